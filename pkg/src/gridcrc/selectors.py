"""End-to-end named selection methods.

Method names are frozen strings (they appear verbatim in result files and
cross-tool joins):

``crc``
    augmented scan at the target level; exact for monotone losses.
``crc-nm``
    augmented scan at the target level minus the Hoeffding grid correction —
    the default method for possibly non-monotone losses.
``crc-nm-bernstein`` / ``crc-nm-empbern`` / ``crc-nm-min``
    same scheme with the variance-aware corrections.
``loss-mono``
    monotonize each sample's loss row (suffix max), then run the augmented
    scan on the envelope risk.
``risk-mono``
    monotonize the empirical risk curve and threshold it directly at the
    target level, with no finite-sample inflation.
``crc-c``
    augmented scan at the target level minus the bootstrap stability
    estimate; needs a seed.

When a correction meets or exceeds the target level the adjusted level drops
to zero or below, no grid point can qualify, and the last-index convention
fires (``feasible=False``) rather than raising — this keeps parameter sweeps
total.
"""

from dataclasses import dataclass, field

import numpy as np

from gridcrc.core import (
    InvalidInputError,
    LossMatrix,
    RiskCurve,
    Selection,
    crc_scan,
    empirical_risk,
    loss_monotonize,
    plain_scan,
    risk_monotonize,
)
from gridcrc.corrections import (
    CorrectionSpec,
    CorrectionValue,
    bernstein_correction,
    bootstrap_stability,
    empirical_bernstein_correction,
    empirical_sigma_max,
    hoeffding_correction,
    min_combined_correction,
)

METHOD_NAMES = (
    "crc",
    "crc-nm",
    "loss-mono",
    "risk-mono",
    "crc-c",
    "crc-nm-bernstein",
    "crc-nm-empbern",
    "crc-nm-min",
)

_METHOD_CORRECTION_KIND = {
    "crc-nm": "hoeffding",
    "crc-nm-bernstein": "bernstein",
    "crc-nm-empbern": "empirical-bernstein",
    "crc-nm-min": "min-combined",
    "crc-c": "bootstrap-stability",
}


class ConfigurationError(ValueError):
    """Raised when a method configuration is incomplete or inconsistent."""


@dataclass(frozen=True)
class MethodConfig:
    """One selection method with its target level and loss bound.

    ``correction`` is required only where the method cannot derive its
    correction from the matrix alone: ``crc-nm-bernstein`` (needs the
    population ``sigma_max``).  For ``crc-nm-empbern``/``crc-nm-min`` an
    omitted spec means the default confidence; for ``crc-c`` it means the
    default resample count and percentile.  A supplied spec must match the
    method's correction kind and carry the same bound.
    """

    method: str
    alpha: float
    bound: float
    correction: CorrectionSpec | None = field(default=None)

    def __post_init__(self) -> None:
        if self.method not in METHOD_NAMES:
            raise ConfigurationError(
                f"unknown method {self.method!r}; expected one of {list(METHOD_NAMES)}"
            )
        if not (0 < self.alpha < 1):
            raise ConfigurationError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not (np.isfinite(self.bound) and self.bound > 0):
            raise ConfigurationError(f"bound must be positive and finite, got {self.bound!r}")
        expected_kind = _METHOD_CORRECTION_KIND.get(self.method)
        if self.correction is not None:
            if expected_kind is None:
                raise ConfigurationError(
                    f"method {self.method!r} takes no correction spec"
                )
            if self.correction.kind != expected_kind:
                raise ConfigurationError(
                    f"method {self.method!r} requires a {expected_kind!r} correction, "
                    f"got {self.correction.kind!r}"
                )
            if self.correction.bound != self.bound:
                raise ConfigurationError(
                    f"correction bound {self.correction.bound!r} disagrees with "
                    f"method bound {self.bound!r}"
                )
        elif self.method == "crc-nm-bernstein":
            raise ConfigurationError(
                "crc-nm-bernstein requires a correction spec carrying sigma_max"
            )


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Per-sample nonnegative importance weights with an a-priori cap."""

    weights: np.ndarray
    cap: float

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float, copy=True)
        w.flags.writeable = False
        cap = float(self.cap)
        if not (np.isfinite(cap) and cap > 0):
            raise InvalidInputError(f"weight cap must be positive and finite, got {cap!r}")
        if w.ndim != 1 or w.size < 1:
            raise InvalidInputError("weights must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(w)):
            raise InvalidInputError("weights must be finite")
        if w.min() < 0 or w.max() > cap:
            raise InvalidInputError(f"weights must lie in [0, {cap}]")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "cap", cap)


def crc_nm_adjusted_level(alpha: float, correction: CorrectionValue) -> float:
    """Target level minus the correction amount (may be zero or negative)."""
    return float(alpha) - correction.amount


def method_correction(
    matrix: LossMatrix, config: MethodConfig, rng_seed: int | None = None
) -> CorrectionValue | None:
    """The correction ``select`` would subtract for this method, or ``None``.

    Useful for reporting: the breakdown of the adjusted level without
    re-running the selection.
    """
    m, n = matrix.m, matrix.n
    bound = config.bound
    spec = config.correction
    if config.method == "crc-nm":
        return hoeffding_correction(m, n, bound)
    if config.method == "crc-nm-bernstein":
        return bernstein_correction(m, n, bound, spec.sigma_max)
    if config.method == "crc-nm-empbern":
        delta = spec.delta if spec is not None else None
        sigma_hat = empirical_sigma_max(matrix)
        if delta is None:
            return empirical_bernstein_correction(m, n, bound, sigma_hat)
        return empirical_bernstein_correction(m, n, bound, sigma_hat, delta)
    if config.method == "crc-nm-min":
        delta = spec.delta if spec is not None else None
        sigma_hat = empirical_sigma_max(matrix)
        if delta is None:
            return min_combined_correction(m, n, bound, sigma_hat)
        return min_combined_correction(m, n, bound, sigma_hat, delta)
    if config.method == "crc-c":
        boot_spec = spec if spec is not None else CorrectionSpec("bootstrap-stability", bound)
        seed = rng_seed if rng_seed is not None else boot_spec.seed
        if seed is None:
            raise ConfigurationError("crc-c requires a seed (rng_seed or correction.seed)")
        return bootstrap_stability(matrix, config.alpha, boot_spec, seed)
    return None


def select(matrix: LossMatrix, config: MethodConfig, rng_seed: int | None = None) -> Selection:
    """Run one named method on a calibration matrix.

    All methods are deterministic; ``crc-c`` is deterministic given
    ``rng_seed`` (or ``config.correction.seed``) and raises a
    :class:`ConfigurationError` without one.
    """
    if matrix.bound != config.bound:
        raise ConfigurationError(
            f"matrix bound {matrix.bound!r} disagrees with method bound {config.bound!r}"
        )
    n = matrix.n

    if config.method == "crc":
        return crc_scan(empirical_risk(matrix), n, config.bound, config.alpha)

    if config.method == "loss-mono":
        envelope = empirical_risk(loss_monotonize(matrix))
        return crc_scan(envelope, n, config.bound, config.alpha)

    if config.method == "risk-mono":
        return plain_scan(risk_monotonize(empirical_risk(matrix)), config.alpha)

    correction = method_correction(matrix, config, rng_seed)
    adjusted = crc_nm_adjusted_level(config.alpha, correction)
    return crc_scan(empirical_risk(matrix), n, config.bound, adjusted)


def weighted_select(matrix: LossMatrix, weights: WeightVector, alpha: float) -> Selection:
    """Augmented scan on the weighted risk curve with slack cap·bound/(n+1).

    The curve averages ``w_i · L_i(λ)`` over samples; the scan's range term
    uses ``cap · bound`` since that bounds every weighted loss.  With unit
    weights and cap 1 this reduces bit-exactly to the ``crc`` method.
    """
    if weights.weights.size != matrix.n:
        raise InvalidInputError(
            f"got {weights.weights.size} weights for {matrix.n} samples"
        )
    if not (0 < alpha < 1):
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha!r}")
    weighted = weights.weights[:, None] * matrix.entries
    curve = RiskCurve(matrix.grid, weighted.mean(axis=0), kind="weighted-empirical")
    return crc_scan(curve, matrix.n, weights.cap * matrix.bound, alpha)
