"""Grids, loss matrices, risk curves, and the threshold-scan primitives.

Everything downstream (corrections, selectors, the experiment harness) is
built on four value types and a handful of pure operations:

* a :class:`Grid` of candidate thresholds,
* a :class:`LossMatrix` of per-sample losses evaluated at every threshold,
* a :class:`RiskCurve` (empirical, population, or monotonized), and
* a :class:`Selection` naming the chosen grid index.

The two scans differ in one term: :func:`crc_scan` thresholds the augmented
quantity ``(n/(n+1))·risk + bound/(n+1)`` while :func:`plain_scan` thresholds
the curve values directly.  Both realize the infimum as the smallest feasible
grid index and fall back to the last index (``feasible=False``) when no index
qualifies.  Comparisons are exact ``<=`` on doubles — no epsilon slack — so
that the one-sided guarantees attached to these rules are not silently
altered.
"""

from dataclasses import dataclass, field

import numpy as np

CURVE_KINDS = frozenset(
    {"empirical", "true", "loss-monotonized", "risk-monotonized", "weighted-empirical"}
)


class InvalidInputError(ValueError):
    """Raised when a value fails a domain invariant (shape, range, order)."""


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class Grid:
    """Strictly increasing candidate thresholds.

    Parameters
    ----------
    values : array-like of float, shape (m,)
        The threshold values, strictly increasing, at least one.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        v = _readonly(np.atleast_1d(self.values))
        if v.ndim != 1 or v.size < 1:
            raise InvalidInputError("grid must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("grid values must be finite")
        if v.size > 1 and not np.all(np.diff(v) > 0):
            raise InvalidInputError("grid values must be strictly increasing")
        object.__setattr__(self, "values", v)

    @property
    def m(self) -> int:
        """Number of grid points."""
        return int(self.values.size)

    @property
    def diameter(self) -> float:
        """Spread between the largest and smallest threshold."""
        return float(self.values[-1] - self.values[0])


@dataclass(frozen=True, eq=False)
class LossMatrix:
    """Per-sample losses at every grid threshold.

    ``entries[i, j]`` is the loss of sample ``i`` at ``grid.values[j]``.  All
    entries must lie in ``[0, bound]``; out-of-range values are rejected, not
    clipped (generators clip internally where their construction calls for
    it, but ingestion never repairs data silently).  ``bound`` is always
    caller-supplied and never inferred from the entries, since the
    finite-sample corrections depend on the a-priori range, not the realized
    one.

    ``monotonized`` marks a matrix produced by :func:`loss_monotonize`; the
    empirical risk of such a matrix is labeled accordingly.
    """

    grid: Grid
    bound: float
    entries: np.ndarray
    monotonized: bool = field(default=False)

    def __post_init__(self) -> None:
        b = float(self.bound)
        if not np.isfinite(b) or b <= 0:
            raise InvalidInputError(f"bound must be a positive finite real, got {self.bound!r}")
        e = _readonly(np.atleast_2d(self.entries))
        if e.ndim != 2 or e.shape[0] < 1:
            raise InvalidInputError("entries must be a non-empty 2-D array")
        if e.shape[1] != self.grid.m:
            raise InvalidInputError(
                f"entries have {e.shape[1]} columns but the grid has {self.grid.m} points"
            )
        if not np.all(np.isfinite(e)):
            raise InvalidInputError("loss entries must be finite")
        lo, hi = float(e.min()), float(e.max())
        if lo < 0 or hi > b:
            i, j = np.unravel_index(
                int(np.argmin(e)) if lo < 0 else int(np.argmax(e)), e.shape
            )
            raise InvalidInputError(
                f"loss entry {e[i, j]!r} at row {i}, column {j} lies outside [0, {b}]"
            )
        object.__setattr__(self, "bound", b)
        object.__setattr__(self, "entries", e)

    @property
    def n(self) -> int:
        """Number of samples (rows)."""
        return int(self.entries.shape[0])

    @property
    def m(self) -> int:
        """Number of grid points (columns)."""
        return int(self.entries.shape[1])


@dataclass(frozen=True, eq=False)
class RiskCurve:
    """A per-threshold risk profile.

    ``kind`` records provenance: ``empirical`` (column means of a loss
    matrix), ``true`` (population curve supplied by a generator),
    ``loss-monotonized`` / ``risk-monotonized`` (suffix-maximum envelopes,
    necessarily non-increasing), or ``weighted-empirical``.  ``estimated``
    flags a ``true`` curve that was itself obtained by Monte Carlo rather
    than in closed form.
    """

    grid: Grid
    values: np.ndarray
    kind: str = field(default="empirical")
    estimated: bool = field(default=False)

    def __post_init__(self) -> None:
        if self.kind not in CURVE_KINDS:
            raise InvalidInputError(
                f"unknown curve kind {self.kind!r}; expected one of {sorted(CURVE_KINDS)}"
            )
        v = _readonly(np.atleast_1d(self.values))
        if v.ndim != 1 or v.size != self.grid.m:
            raise InvalidInputError(
                f"curve has {v.size} values but the grid has {self.grid.m} points"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("risk values must be finite")
        if self.kind in ("loss-monotonized", "risk-monotonized") and np.any(np.diff(v) > 0):
            raise InvalidInputError(f"{self.kind} curve must be non-increasing")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class Selection:
    """Outcome of a threshold scan.

    ``feasible=False`` means no grid point satisfied the condition and the
    last-index convention fired; in that case ``index == grid.m - 1``.
    ``effective_level`` is the level the scan actually thresholded against
    (the target level minus any correction the caller applied).
    """

    index: int
    lam: float
    effective_level: float
    feasible: bool


def empirical_risk(matrix: LossMatrix) -> RiskCurve:
    """Column means of the loss matrix.

    The resulting curve is labeled ``empirical``, or ``loss-monotonized``
    when the matrix came out of :func:`loss_monotonize` (row-wise suffix
    maxima average to a non-increasing curve, so the labeling invariant
    holds by construction).
    """
    if matrix.n < 1:
        raise InvalidInputError("empirical risk needs at least one sample")
    kind = "loss-monotonized" if matrix.monotonized else "empirical"
    return RiskCurve(matrix.grid, matrix.entries.mean(axis=0), kind=kind)


def _first_true(cond: np.ndarray) -> tuple[int, bool]:
    hits = np.nonzero(cond)[0]
    if hits.size:
        return int(hits[0]), True
    return int(cond.size - 1), False


def crc_scan(curve: RiskCurve, n: int, bound: float, level: float) -> Selection:
    """Smallest grid index with ``(n/(n+1))·risk + bound/(n+1) <= level``.

    ``n`` is the calibration sample count behind ``curve`` and ``bound`` the
    a-priori loss range (``bound = 0`` degenerates to :func:`plain_scan`).
    No index qualifying returns the last index with ``feasible=False``.  Any
    finite ``level`` is accepted — a level at or below zero simply renders
    every index infeasible when the curve is nonnegative — which keeps
    correction-adjusted callers total.
    """
    n = int(n)
    if n < 1:
        raise InvalidInputError(f"sample count must be >= 1, got {n}")
    bound = float(bound)
    if not np.isfinite(bound) or bound < 0:
        raise InvalidInputError(f"bound must be a nonnegative finite real, got {bound!r}")
    level = float(level)
    if not np.isfinite(level):
        raise InvalidInputError(f"level must be finite, got {level!r}")
    cond = (n / (n + 1)) * curve.values + bound / (n + 1) <= level
    index, feasible = _first_true(cond)
    return Selection(index, float(curve.grid.values[index]), level, feasible)


def plain_scan(curve: RiskCurve, level: float) -> Selection:
    """Smallest grid index with ``risk <= level``; last index if none."""
    level = float(level)
    if not np.isfinite(level):
        raise InvalidInputError(f"level must be finite, got {level!r}")
    index, feasible = _first_true(curve.values <= level)
    return Selection(index, float(curve.grid.values[index]), level, feasible)


def loss_monotonize(matrix: LossMatrix) -> LossMatrix:
    """Replace each row by its right-to-left running maximum.

    Row ``i`` of the output at column ``j`` is ``max_{k >= j} entries[i, k]``,
    so every output row is non-increasing and dominates the input row.  The
    output matrix is flagged ``monotonized``.
    """
    env = np.flip(np.maximum.accumulate(np.flip(matrix.entries, axis=1), axis=1), axis=1)
    return LossMatrix(matrix.grid, matrix.bound, env, monotonized=True)


def risk_monotonize(curve: RiskCurve) -> RiskCurve:
    """Suffix maximum of the curve values; kind becomes ``risk-monotonized``."""
    env = np.flip(np.maximum.accumulate(np.flip(curve.values)))
    return RiskCurve(curve.grid, env, kind="risk-monotonized", estimated=curve.estimated)


def grid_oracle(true_curve: RiskCurve, level: float) -> Selection:
    """Smallest grid index whose *population* risk is at or below ``level``.

    This is :func:`plain_scan` applied to a ``true`` curve; it defines the
    best threshold available on the grid and is what the selection methods
    are measured against.
    """
    if true_curve.kind != "true":
        raise InvalidInputError(
            f"grid oracle expects a true risk curve, got kind {true_curve.kind!r}"
        )
    return plain_scan(true_curve, level)
