"""Finite-sample excess-risk corrections.

Each correction bounds how far the empirical risk curve can sit below the
population curve simultaneously over all ``m`` grid points, so that scanning
at a level reduced by the correction restores the target guarantee for
non-monotone losses.  Natural logarithms throughout.

* Hoeffding:            ``B·sqrt(log(2m)/(2n)) + B/(2·sqrt(2n·log(2m)))``
* Bernstein:            ``sigma_max·sqrt(2·log(2m)/n) + B·log(2m)/(3n)``
* empirical Bernstein:  ``sigma_hat·sqrt(2·log(2m/delta)/n) + 7B·log(2m/delta)/(3(n-1))``
* min-combined:         pointwise minimum of Hoeffding and empirical Bernstein
* bootstrap stability:  a percentile of absolute risk deviations across
  seeded row resamples of the calibration matrix.

The bootstrap estimand is fixed as ``|R*_b(selected*_b) - R(selected)|`` —
the resample's risk at the resample's own selection versus the original risk
at the original selection — because that is what measures end-to-end
procedure stability.  The percentile uses the nearest-rank method on the
sorted absolute deviations (``k = ceil(p/100 · N)``), which is deterministic
and interpolation-free.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from gridcrc._seeding import derive_rng
from gridcrc.core import InvalidInputError, LossMatrix, crc_scan, empirical_risk

CORRECTION_KINDS = frozenset(
    {"hoeffding", "bernstein", "empirical-bernstein", "min-combined", "bootstrap-stability"}
)

DEFAULT_DELTA = 0.05
DEFAULT_RESAMPLES = 200
DEFAULT_PERCENTILE = 90.0


@dataclass(frozen=True)
class CorrectionSpec:
    """Configuration for one correction kind.

    ``sigma_max`` is required for ``bernstein`` (a population standard
    deviation cap); ``delta`` is the empirical-Bernstein confidence parameter
    (defaulted to 0.05 when omitted); ``resamples``/``percentile``/``seed``
    configure ``bootstrap-stability``.
    """

    kind: str
    bound: float
    sigma_max: float | None = None
    delta: float | None = None
    resamples: int = DEFAULT_RESAMPLES
    percentile: float = DEFAULT_PERCENTILE
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in CORRECTION_KINDS:
            raise InvalidInputError(
                f"unknown correction kind {self.kind!r}; expected one of {sorted(CORRECTION_KINDS)}"
            )
        if not (math.isfinite(self.bound) and self.bound > 0):
            raise InvalidInputError(f"bound must be positive and finite, got {self.bound!r}")
        if self.kind == "bernstein":
            if self.sigma_max is None:
                raise InvalidInputError("bernstein correction requires sigma_max")
            if not (0 <= self.sigma_max <= self.bound):
                raise InvalidInputError(
                    f"sigma_max must lie in [0, bound], got {self.sigma_max!r}"
                )
        if self.kind in ("empirical-bernstein", "min-combined"):
            if self.delta is None:
                object.__setattr__(self, "delta", DEFAULT_DELTA)
            if not (0 < self.delta < 1):
                raise InvalidInputError(f"delta must lie in (0, 1), got {self.delta!r}")
        if self.kind == "bootstrap-stability":
            if self.resamples < 1:
                raise InvalidInputError(f"resamples must be >= 1, got {self.resamples!r}")
            if not (0 < self.percentile <= 100):
                raise InvalidInputError(
                    f"percentile must lie in (0, 100], got {self.percentile!r}"
                )


@dataclass(frozen=True)
class CorrectionValue:
    """A computed correction: total ``amount`` plus its additive breakdown.

    ``detail`` maps term names to their values and sums to ``amount``;
    ``winner`` is set only by the min-combined rule and names the bound that
    achieved the minimum.
    """

    amount: float
    detail: dict[str, float]
    winner: str | None = field(default=None)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.amount) and self.amount >= 0):
            raise InvalidInputError(f"correction amount must be >= 0, got {self.amount!r}")


def _require_counts(m: int, n: int, min_n: int = 1) -> tuple[int, int]:
    m, n = int(m), int(n)
    if m < 1:
        raise InvalidInputError(f"grid size m must be >= 1, got {m}")
    if n < min_n:
        raise InvalidInputError(f"sample count n must be >= {min_n}, got {n}")
    return m, n


def _require_bound(bound: float) -> float:
    bound = float(bound)
    if not (math.isfinite(bound) and bound > 0):
        raise InvalidInputError(f"bound must be positive and finite, got {bound!r}")
    return bound


def hoeffding_correction(m: int, n: int, bound: float) -> CorrectionValue:
    """Distribution-free uniform deviation bound over an ``m``-point grid."""
    m, n = _require_counts(m, n)
    bound = _require_bound(bound)
    log2m = math.log(2 * m)
    first = bound * math.sqrt(log2m / (2 * n))
    second = bound / (2 * math.sqrt(2 * n * log2m))
    return CorrectionValue(first + second, {"deviation": first, "expectation_gap": second})


def bernstein_correction(m: int, n: int, bound: float, sigma_max: float) -> CorrectionValue:
    """Variance-aware uniform bound with a known per-threshold std-dev cap."""
    m, n = _require_counts(m, n)
    bound = _require_bound(bound)
    sigma_max = float(sigma_max)
    if not (0 <= sigma_max <= bound):
        raise InvalidInputError(f"sigma_max must lie in [0, bound], got {sigma_max!r}")
    log2m = math.log(2 * m)
    first = sigma_max * math.sqrt(2 * log2m / n)
    second = bound * log2m / (3 * n)
    return CorrectionValue(first + second, {"variance": first, "range": second})


def empirical_bernstein_correction(
    m: int, n: int, bound: float, sigma_hat_max: float, delta: float = DEFAULT_DELTA
) -> CorrectionValue:
    """Variance-adaptive uniform bound using the plug-in std-dev estimate.

    Holds with probability at least ``1 - delta``; needs ``n >= 2`` because
    of the ``n - 1`` in the range term.
    """
    m, n = _require_counts(m, n, min_n=2)
    bound = _require_bound(bound)
    sigma_hat_max = float(sigma_hat_max)
    if sigma_hat_max < 0:
        raise InvalidInputError(f"sigma_hat_max must be >= 0, got {sigma_hat_max!r}")
    delta = float(delta)
    if not (0 < delta < 1):
        raise InvalidInputError(f"delta must lie in (0, 1), got {delta!r}")
    log_term = math.log(2 * m / delta)
    first = sigma_hat_max * math.sqrt(2 * log_term / n)
    second = 7 * bound * log_term / (3 * (n - 1))
    return CorrectionValue(first + second, {"variance": first, "range": second})


def empirical_sigma_max(matrix: LossMatrix) -> float:
    """Largest per-column standard deviation (divide-by-``n`` variance)."""
    return float(matrix.entries.std(axis=0).max())


def min_combined_correction(
    m: int, n: int, bound: float, sigma_hat_max: float, delta: float = DEFAULT_DELTA
) -> CorrectionValue:
    """Pointwise minimum of the Hoeffding and empirical-Bernstein bounds.

    Valid with the empirical-Bernstein confidence ``1 - delta`` (the
    Hoeffding branch holds unconditionally, so the minimum inherits the
    weaker certificate).  ``detail`` carries the winning bound's breakdown
    and ``winner`` names it; Hoeffding wins ties.
    """
    hoeff = hoeffding_correction(m, n, bound)
    emp = empirical_bernstein_correction(m, n, bound, sigma_hat_max, delta)
    if hoeff.amount <= emp.amount:
        return CorrectionValue(hoeff.amount, dict(hoeff.detail), winner="hoeffding")
    return CorrectionValue(emp.amount, dict(emp.detail), winner="empirical-bernstein")


def bootstrap_stability(
    matrix: LossMatrix,
    level: float,
    spec: CorrectionSpec,
    rng_seed: int | None = None,
) -> CorrectionValue:
    """Percentile of absolute risk deviations over seeded row resamples.

    For each of ``spec.resamples`` resamples-with-replacement of the rows,
    the augmented scan is rerun at ``level`` and the absolute difference
    between the resample's empirical risk at its own selection and the
    original empirical risk at the original selection is recorded; the
    reported amount is the nearest-rank ``spec.percentile`` of those
    deviations.  Each resample draws from its own derived substream, so the
    result is independent of evaluation order and bit-reproducible given
    ``(matrix, seed)``.
    """
    if spec.kind != "bootstrap-stability":
        raise InvalidInputError(
            f"bootstrap_stability needs a bootstrap-stability spec, got {spec.kind!r}"
        )
    if matrix.n < 2:
        raise InvalidInputError("bootstrap stability needs at least two rows")
    seed = rng_seed if rng_seed is not None else spec.seed
    if seed is None:
        raise InvalidInputError("bootstrap stability needs a seed (spec.seed or rng_seed)")

    n, m = matrix.n, matrix.m
    base_curve = empirical_risk(matrix)
    base_sel = crc_scan(base_curve, n, matrix.bound, level)
    base_risk = float(base_curve.values[base_sel.index])

    # Resample rows via multinomial counts; the resampled risk curve is then
    # a single (counts/n) @ entries product, avoiding materializing B_boot
    # gathered matrices.
    counts = np.empty((spec.resamples, n), dtype=np.int64)
    uniform = np.full(n, 1.0 / n)
    for b in range(spec.resamples):
        counts[b] = derive_rng(seed, "bootstrap-resample", b).multinomial(n, uniform)
    risks = (counts @ matrix.entries) / n

    cond = (n / (n + 1)) * risks + matrix.bound / (n + 1) <= level
    any_hit = cond.any(axis=1)
    picked = np.where(any_hit, cond.argmax(axis=1), m - 1)
    deviations = np.abs(risks[np.arange(spec.resamples), picked] - base_risk)

    deviations.sort()
    rank = math.ceil(spec.percentile / 100 * spec.resamples)
    beta_hat = float(deviations[rank - 1])
    return CorrectionValue(beta_hat, {"percentile_abs_deviation": beta_hat})
