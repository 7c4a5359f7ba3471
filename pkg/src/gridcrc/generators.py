"""Seeded synthetic loss-matrix generators.

Each generator is a deterministic function of its seed (identical seed,
bit-identical output) and emits losses already inside ``[0, bound]``.  Where
the construction admits one, the population risk curve is exposed in closed
form; the bump family's curve is only available as a dense Monte Carlo
estimate and is flagged accordingly.
"""

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from scipy.special import expit
from scipy.stats import binom

from gridcrc._seeding import derive_rng
from gridcrc.core import Grid, InvalidInputError, LossMatrix, RiskCurve
from gridcrc.selectors import WeightVector

# ---------------------------------------------------------------------------
# Bernoulli counterexample: flat risk with a zero escape hatch at the end.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CounterexampleConfig:
    """Grid {0, 1/m, ..., 1}; losses Bernoulli(p) everywhere except the last
    threshold, where the loss is identically zero."""

    n: int
    m: int
    p: float
    alpha: float
    trials: int
    seed: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1 or self.trials < 0:
            raise InvalidInputError("n, m must be >= 1 and trials >= 0")
        if not (1.0 / (self.n + 1) < self.alpha < self.p < 1.0):
            raise InvalidInputError(
                f"need 1/(n+1) < alpha < p < 1, got alpha={self.alpha!r}, p={self.p!r}"
            )


def counterexample_true_curve(config: CounterexampleConfig) -> RiskCurve:
    grid = Grid(np.linspace(0.0, 1.0, config.m + 1))
    values = np.concatenate([np.full(config.m, config.p), [0.0]])
    return RiskCurve(grid, values, kind="true")


def gen_counterexample(
    config: CounterexampleConfig,
) -> tuple[Iterator[LossMatrix], RiskCurve]:
    """Stream of ``config.trials`` binary (n+1) x (m+1) matrices plus the
    population curve.  Row n is the held-out test row."""
    grid = Grid(np.linspace(0.0, 1.0, config.m + 1))

    def trials() -> Iterator[LossMatrix]:
        for t in range(config.trials):
            rng = derive_rng(config.seed, "counterexample-trial", t)
            entries = np.zeros((config.n + 1, config.m + 1))
            entries[:, : config.m] = rng.binomial(
                1, config.p, size=(config.n + 1, config.m)
            )
            yield LossMatrix(grid, 1.0, entries)

    return trials(), counterexample_true_curve(config)


def counterexample_analytic_risk(n: int, m: int, p: float, alpha: float) -> float:
    """Expected test loss of the augmented scan on the counterexample.

    With t = alpha - 1/(n+1) and q = P(Bin(n, p) <= floor(n*t)), a threshold
    short of the last one is selected exactly when some Bernoulli column's
    calibration mean clears t, giving expected loss p*(1 - (1-q)^m).
    """
    if n < 1 or m < 1:
        raise InvalidInputError("n, m must be >= 1")
    t = alpha - 1.0 / (n + 1)
    if t < 0:
        return 0.0
    q = float(binom.cdf(math.floor(n * t), n, p))
    return p * (1.0 - (1.0 - q) ** m)


# ---------------------------------------------------------------------------
# Smooth decay plus a randomly-placed bump: the canonical non-monotone loss.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BumpLossConfig:
    """Per-row loss: scale*0.50*exp(-8*lam) + height*gaussian(center, width)
    + noise, clipped to [0, 1], on a uniform m-point grid over [0, 1]."""

    n: int
    m: int
    seed: int
    scale_range: tuple[float, float] = (0.80, 1.20)
    height_range: tuple[float, float] = (0.06, 0.20)
    center_mean: float = 0.42
    center_std: float = 0.06
    width_range: tuple[float, float] = (0.04, 0.09)
    noise_std: float = 0.01

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 2:
            raise InvalidInputError("bump losses need n >= 1 and m >= 2")
        for lo, hi in (self.scale_range, self.height_range, self.width_range):
            if lo > hi:
                raise InvalidInputError("parameter ranges must satisfy low <= high")
        if self.noise_std < 0 or self.center_std < 0:
            raise InvalidInputError("standard deviations must be >= 0")


def _bump_rows(config: BumpLossConfig, rng: np.random.Generator, rows: int, lam: np.ndarray) -> np.ndarray:
    scale = rng.uniform(*config.scale_range, rows)
    height = rng.uniform(*config.height_range, rows)
    center = rng.normal(config.center_mean, config.center_std, rows)
    width = rng.uniform(*config.width_range, rows)
    # Width 0 would divide by zero; the config range keeps it positive.
    noise = rng.normal(0.0, config.noise_std, rows) if config.noise_std > 0 else np.zeros(rows)
    decay = scale[:, None] * 0.50 * np.exp(-8.0 * lam)
    bump = height[:, None] * np.exp(
        -((lam - center[:, None]) ** 2) / (2.0 * width[:, None] ** 2)
    )
    return np.clip(decay + bump + noise[:, None], 0.0, 1.0)


def gen_bump(
    config: BumpLossConfig,
    include_true_curve: bool = True,
    true_curve_rows: int = 1_000_000,
) -> tuple[LossMatrix, RiskCurve | None]:
    """Loss matrix plus (optionally) a Monte Carlo estimate of the population
    curve from ``true_curve_rows`` auxiliary draws.

    The clipping makes the population curve analytically awkward, so the
    reference curve is estimated and flagged ``estimated=True``.
    """
    grid = Grid(np.linspace(0.0, 1.0, config.m))
    lam = grid.values
    entries = _bump_rows(config, derive_rng(config.seed, "bump-matrix"), config.n, lam)
    matrix = LossMatrix(grid, 1.0, entries)
    if not include_true_curve:
        return matrix, None

    chunk = 100_000
    total = np.zeros(config.m)
    done = 0
    index = 0
    while done < true_curve_rows:
        rows = min(chunk, true_curve_rows - done)
        block = _bump_rows(config, derive_rng(config.seed, "bump-true-curve", index), rows, lam)
        total += block.sum(axis=0)
        done += rows
        index += 1
    curve = RiskCurve(grid, total / true_curve_rows, kind="true", estimated=True)
    return matrix, curve


# ---------------------------------------------------------------------------
# Multilabel precision sets with a sinusoidally warped precision loss.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultilabelConfig:
    """Gaussian features, per-label logistic models, noisy predicted
    probabilities; prediction set at threshold lam keeps labels with
    predicted probability >= 1 - lam.

    ``model_seed`` pins the classifier (weights and biases) independently of
    ``seed``; leave it ``None`` to derive the model from ``seed`` as well.
    Repeated evaluation of one fixed predictor over fresh data — the usual
    calibration setting — wants a fixed ``model_seed`` with a varying
    ``seed``; otherwise every draw gets a brand-new predictor, and the
    attainable risk floor itself becomes random."""

    n_cal: int
    n_test: int
    m: int
    seed: int
    n_features: int = 15
    n_labels: int = 10
    weight_std: float = 0.8
    bias_std: float = 0.2
    logit_noise_std: float = 1.0
    sine_amplitude: float = 0.22
    model_seed: int | None = None

    def __post_init__(self) -> None:
        if self.n_cal < 1 or self.n_test < 1 or self.m < 2:
            raise InvalidInputError("multilabel needs n_cal >= 1, n_test >= 1, m >= 2")
        if self.n_features < 1 or self.n_labels < 1:
            raise InvalidInputError("n_features and n_labels must be >= 1")


@dataclass(frozen=True, eq=False)
class MultilabelSample:
    """Calibration/test loss matrices plus the prediction-set sizes behind
    them (rows align with the matrices)."""

    cal: LossMatrix
    test: LossMatrix
    cal_sizes: np.ndarray
    test_sizes: np.ndarray


def precision_loss(x, amplitude: float = 0.22):
    """1 - x + amplitude*sin(2*pi*x)*(1 - x), capped at 1.

    The raw expression marginally exceeds 1 near small positive precisions
    (e.g. 1.016 at x = 0.1 with the default amplitude), so values are capped
    to keep losses inside the declared unit range; 0 and 1 map to 1 and 0
    exactly.
    """
    x = np.asarray(x, dtype=float)
    raw = 1.0 - x + amplitude * np.sin(2.0 * np.pi * x) * (1.0 - x)
    return np.minimum(raw, 1.0)


def gen_multilabel(config: MultilabelConfig) -> MultilabelSample:
    model_master = config.seed if config.model_seed is None else config.model_seed
    model_rng = derive_rng(model_master, "multilabel-model")
    weights = model_rng.normal(0.0, config.weight_std, (config.n_features, config.n_labels))
    bias = model_rng.normal(0.0, config.bias_std, config.n_labels)

    data_rng = derive_rng(config.seed, "multilabel-data")
    n = config.n_cal + config.n_test
    x = data_rng.normal(0.0, 1.0, (n, config.n_features))
    logits = x @ weights + bias
    labels = data_rng.random((n, config.n_labels)) < expit(logits)
    noisy = logits + data_rng.normal(0.0, config.logit_noise_std, logits.shape)
    predicted = expit(noisy)

    grid = Grid(np.linspace(0.0, 1.0, config.m))
    keep = predicted[:, :, None] >= (1.0 - grid.values)[None, None, :]
    sizes = keep.sum(axis=1)
    matched = (keep & labels[:, :, None]).sum(axis=1)
    # Empty prediction sets get precision 0, i.e. the maximal loss.
    precision = np.where(sizes > 0, matched / np.maximum(sizes, 1), 0.0)
    losses = precision_loss(precision, config.sine_amplitude)

    nc = config.n_cal
    cal = LossMatrix(grid, 1.0, losses[:nc])
    test = LossMatrix(grid, 1.0, losses[nc:])
    return MultilabelSample(cal, test, sizes[:nc], sizes[nc:])


# ---------------------------------------------------------------------------
# Miss/oversize losses on a synthetic score model (stand-in for a detector).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OversizeLossConfig:
    """Two loss shapes over score-thresholded candidate sets.

    ``ramp``: (1-gamma)*(1 - matched/total) + gamma*min((size-k0)+/tau, 1).
    ``indicator``: (1-gamma)*[not all matched] + gamma*[size > k0].

    The score model is deliberate plumbing: per sample, a ground-truth count
    (capped shifted Poisson) with scores skewed toward 1, plus spurious
    candidates with scores skewed toward 0.
    """

    n: int
    m: int
    seed: int
    variant: str = "ramp"
    gamma: float = 0.35
    k0: int = 3
    tau: float = 5.0
    gt_rate: float = 4.0
    gt_cap: int = 12
    false_rate: float = 6.0
    false_cap: int = 25

    def __post_init__(self) -> None:
        if self.variant not in ("ramp", "indicator"):
            raise InvalidInputError(f"variant must be 'ramp' or 'indicator', got {self.variant!r}")
        if not (0.0 <= self.gamma <= 1.0):
            raise InvalidInputError(f"gamma must lie in [0, 1], got {self.gamma!r}")
        if self.k0 < 0:
            raise InvalidInputError(f"k0 must be >= 0, got {self.k0!r}")
        if self.variant == "ramp" and self.tau <= 0:
            raise InvalidInputError(f"tau must be > 0 for the ramp variant, got {self.tau!r}")
        if self.n < 1 or self.m < 2:
            raise InvalidInputError("oversize losses need n >= 1 and m >= 2")


@dataclass(frozen=True, eq=False)
class OversizeSample:
    matrix: LossMatrix
    sizes: np.ndarray


def size_penalty(sizes, k0: int, tau: float):
    """Ramp from 0 at k0 to 1 at k0 + tau."""
    return np.minimum(np.maximum(np.asarray(sizes, dtype=float) - k0, 0.0) / tau, 1.0)


def _threshold_counts(scores: np.ndarray, valid: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    # scores: (n, cap); valid: (n, cap) bool; thresholds: (m,)
    hit = (scores[:, :, None] >= thresholds[None, None, :]) & valid[:, :, None]
    return hit.sum(axis=1)


def gen_oversize_surrogate(config: OversizeLossConfig) -> OversizeSample:
    rng = derive_rng(config.seed, "oversize")
    n = config.n
    n_gt = np.minimum(rng.poisson(config.gt_rate, n) + 1, config.gt_cap)
    n_false = np.minimum(rng.poisson(config.false_rate, n), config.false_cap)
    gt_scores = 1.0 - rng.random((n, config.gt_cap)) ** 2
    false_scores = 0.9 * rng.random((n, config.false_cap)) ** 2
    gt_valid = np.arange(config.gt_cap)[None, :] < n_gt[:, None]
    false_valid = np.arange(config.false_cap)[None, :] < n_false[:, None]

    grid = Grid(np.linspace(0.0, 1.0, config.m))
    thresholds = 1.0 - grid.values
    matched = _threshold_counts(gt_scores, gt_valid, thresholds)
    sizes = matched + _threshold_counts(false_scores, false_valid, thresholds)

    if config.variant == "ramp":
        miss = 1.0 - matched / n_gt[:, None]
        losses = (1.0 - config.gamma) * miss + config.gamma * size_penalty(
            sizes, config.k0, config.tau
        )
    else:
        miss = (matched < n_gt[:, None]).astype(float)
        losses = (1.0 - config.gamma) * miss + config.gamma * (sizes > config.k0)
    return OversizeSample(LossMatrix(grid, 1.0, losses), sizes)


def detection_loss_from_counts(
    records,
    grid: Grid,
    gamma: float = 0.35,
    k0: int = 3,
    tau: float = 5.0,
) -> OversizeSample:
    """Assemble the ramp-variant loss matrix from externally supplied counts.

    ``records`` is an iterable of ``(sample_id, lambda_index, n_matched,
    n_gt, set_size)`` covering every (sample, threshold) cell exactly once.
    Samples keep their order of first appearance.  This is the ingestion
    path for real detector outputs: the counts are produced elsewhere, only
    the loss assembly happens here.
    """
    m = grid.m
    order: list = []
    rows: dict = {}
    gt_count: dict = {}
    for sample_id, lam_index, n_matched, n_gt, set_size in records:
        lam_index = int(lam_index)
        n_matched, n_gt, set_size = int(n_matched), int(n_gt), int(set_size)
        if not (0 <= lam_index < m):
            raise InvalidInputError(
                f"sample {sample_id!r}: lambda_index {lam_index} outside [0, {m})"
            )
        if n_gt < 1:
            raise InvalidInputError(f"sample {sample_id!r}: n_gt must be >= 1, got {n_gt}")
        if not (0 <= n_matched <= n_gt):
            raise InvalidInputError(
                f"sample {sample_id!r}: n_matched {n_matched} outside [0, n_gt={n_gt}]"
            )
        if set_size < 0:
            raise InvalidInputError(f"sample {sample_id!r}: set_size must be >= 0")
        if sample_id not in rows:
            order.append(sample_id)
            rows[sample_id] = {}
            gt_count[sample_id] = n_gt
        elif gt_count[sample_id] != n_gt:
            raise InvalidInputError(
                f"sample {sample_id!r}: inconsistent n_gt "
                f"({gt_count[sample_id]} vs {n_gt})"
            )
        if lam_index in rows[sample_id]:
            raise InvalidInputError(
                f"sample {sample_id!r}: duplicate cell at lambda_index {lam_index}"
            )
        rows[sample_id][lam_index] = (n_matched, set_size)
    if not order:
        raise InvalidInputError("no count records supplied")

    matched = np.empty((len(order), m))
    sizes = np.empty((len(order), m), dtype=np.int64)
    n_gt_col = np.array([gt_count[s] for s in order], dtype=float)
    for i, sample_id in enumerate(order):
        cells = rows[sample_id]
        if len(cells) != m:
            missing = sorted(set(range(m)) - set(cells))
            raise InvalidInputError(
                f"sample {sample_id!r}: missing lambda_index cells {missing[:5]}"
            )
        for j in range(m):
            matched[i, j], sizes[i, j] = cells[j]

    miss = 1.0 - matched / n_gt_col[:, None]
    losses = (1.0 - gamma) * miss + gamma * size_penalty(sizes, k0, tau)
    return OversizeSample(LossMatrix(grid, 1.0, losses), sizes)


# ---------------------------------------------------------------------------
# Minimax-style needle instance: one column at the base level, the rest above.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MinimaxInstanceConfig:
    """Binary losses; a hidden column is Bernoulli(alpha) while every other
    column is Bernoulli(alpha + delta).  delta defaults to 0.5*sqrt(log(m)/n)
    capped so alpha + delta <= 0.95."""

    n: int
    m: int
    alpha: float
    seed: int
    delta: float | None = None
    hidden_index: int | str = "random"

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1:
            raise InvalidInputError("n, m must be >= 1")
        if not (0 < self.alpha < 1):
            raise InvalidInputError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if self.delta is None:
            default = 0.5 * math.sqrt(math.log(self.m) / self.n) if self.m > 1 else 0.0
            object.__setattr__(self, "delta", min(default, 0.95 - self.alpha))
        if self.delta < 0 or self.alpha + self.delta >= 1:
            raise InvalidInputError(
                f"need 0 <= delta and alpha + delta < 1, got delta={self.delta!r}"
            )
        if self.hidden_index != "random":
            if not (0 <= int(self.hidden_index) < self.m):
                raise InvalidInputError(
                    f"hidden_index {self.hidden_index!r} outside [0, {self.m})"
                )


def minimax_true_curve(config: MinimaxInstanceConfig) -> RiskCurve:
    if config.hidden_index == "random":
        raise InvalidInputError(
            "the population curve is only defined for a fixed hidden_index"
        )
    values = np.full(config.m, config.alpha + config.delta)
    values[int(config.hidden_index)] = config.alpha
    return RiskCurve(Grid(np.linspace(0.0, 1.0, config.m)), values, kind="true")


def _minimax_matrix(config: MinimaxInstanceConfig, grid: Grid, rng: np.random.Generator) -> LossMatrix:
    hidden = (
        int(rng.integers(config.m))
        if config.hidden_index == "random"
        else int(config.hidden_index)
    )
    entries = rng.binomial(1, config.alpha + config.delta, (config.n + 1, config.m)).astype(float)
    entries[:, hidden] = rng.binomial(1, config.alpha, config.n + 1)
    return LossMatrix(grid, 1.0, entries)


def gen_minimax_instance(config: MinimaxInstanceConfig, trials: int) -> Iterator[LossMatrix]:
    """Stream of ``trials`` binary (n+1) x m matrices."""
    grid = Grid(np.linspace(0.0, 1.0, config.m))
    for t in range(trials):
        yield _minimax_matrix(config, grid, derive_rng(config.seed, "minimax-trial", t))


# ---------------------------------------------------------------------------
# Monotone rows (power decay hitting zero at the last threshold).
# ---------------------------------------------------------------------------


def gen_monotone(n: int, m: int, seed: int) -> LossMatrix:
    """Rows a_i*(1-lam)^k_i with a ~ U(0,1), k ~ U(0.5,4): non-increasing in
    lam with the last entry exactly zero."""
    if n < 1 or m < 2:
        raise InvalidInputError("monotone losses need n >= 1 and m >= 2")
    rng = derive_rng(seed, "monotone")
    amplitude = rng.uniform(0.0, 1.0, n)
    power = rng.uniform(0.5, 4.0, n)
    grid = Grid(np.linspace(0.0, 1.0, m))
    entries = amplitude[:, None] * (1.0 - grid.values)[None, :] ** power[:, None]
    return LossMatrix(grid, 1.0, entries)


# ---------------------------------------------------------------------------
# Smooth losses with a bounded grid slope and a designated margin threshold.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LipschitzConfig:
    """Deterministic profile plus a symmetric two-point row perturbation.

    The profile sits high (above alpha) before the margin threshold, drops
    to exactly alpha - epsilon there, and climbs back afterwards; the
    perturbation is zero before the margin threshold and decays after it.
    The realized grid increments are checked against ``lipschitz_k``.
    """

    n: int
    seed: int
    m: int = 21
    alpha: float = 0.3
    epsilon: float = 0.05
    lipschitz_k: float = 5.0

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 5:
            raise InvalidInputError("need n >= 1 and m >= 5")
        if not (0 < self.alpha < 1):
            raise InvalidInputError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not (0 < self.epsilon <= self.alpha):
            raise InvalidInputError(
                f"epsilon must lie in (0, alpha], got {self.epsilon!r}"
            )
        if self.lipschitz_k <= 0:
            raise InvalidInputError("lipschitz_k must be > 0")


def _lipschitz_profile(config: LipschitzConfig) -> tuple[np.ndarray, np.ndarray, int]:
    """Population curve, perturbation amplitude per column, margin index."""
    lam = np.linspace(0.0, 1.0, config.m)
    j_star = round(0.6 * (config.m - 1))
    lam_star = lam[j_star]
    high = min(0.95, config.alpha + 0.30)
    landing = config.alpha + 0.02  # last pre-margin value, safely above alpha
    floor = config.alpha - config.epsilon

    base = np.empty(config.m)
    descent_start = lam_star / 2.0
    for j, x in enumerate(lam):
        if j == j_star:
            base[j] = floor
        elif x <= descent_start:
            base[j] = high
        elif j < j_star:
            # Linear descent toward the landing value just before the margin.
            frac = (x - descent_start) / (lam[j_star - 1] - descent_start)
            base[j] = high + frac * (landing - high)
        else:
            rise = (high - floor) / (1.0 - lam_star) if lam_star < 1.0 else 0.0
            base[j] = min(high, floor + rise * (x - lam_star))

    amplitude = np.zeros(config.m)
    peak = min(0.17, config.alpha - config.epsilon)
    decay_width = 0.15
    for j in range(j_star, config.m):
        amplitude[j] = peak * max(0.0, 1.0 - (lam[j] - lam_star) / decay_width)

    gaps = np.diff(lam)
    worst = np.max((np.abs(np.diff(base)) + np.abs(np.diff(amplitude))) / gaps)
    if worst > config.lipschitz_k:
        raise InvalidInputError(
            f"construction needs slope {worst:.3f} but lipschitz_k={config.lipschitz_k}; "
            "raise lipschitz_k or coarsen the grid"
        )
    return base, amplitude, j_star


def lipschitz_margin_index(config: LipschitzConfig) -> int:
    """Grid index of the designated threshold with risk alpha - epsilon."""
    return _lipschitz_profile(config)[2]


def gen_lipschitz(config: LipschitzConfig) -> tuple[LossMatrix, RiskCurve]:
    base, amplitude, _ = _lipschitz_profile(config)
    rng = derive_rng(config.seed, "lipschitz")
    signs = rng.integers(0, 2, config.n) * 2.0 - 1.0
    entries = base[None, :] + signs[:, None] * amplitude[None, :]
    grid = Grid(np.linspace(0.0, 1.0, config.m))
    # Signs are symmetric, so the population curve is the base profile.
    return LossMatrix(grid, 1.0, entries), RiskCurve(grid, base, kind="true")


# ---------------------------------------------------------------------------
# Two-group covariate shift with exact importance weights.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoGroupShiftConfig:
    """A rare calibration group becomes common at test time.

    Two thresholds: the first is cheap on the calibration mixture but risky
    for the shifted group; the second is safe everywhere.  The exact
    group-frequency ratio provides the importance weights.
    """

    n_cal: int
    n_test: int
    seed: int
    pi_train: float = 0.1
    pi_test: float = 0.5
    p_risky_high: float = 0.9
    p_risky_low: float = 0.05
    p_safe: float = 0.02

    def __post_init__(self) -> None:
        if self.n_cal < 1 or self.n_test < 1:
            raise InvalidInputError("need n_cal >= 1 and n_test >= 1")
        for name in ("pi_train", "pi_test", "p_risky_high", "p_risky_low", "p_safe"):
            value = getattr(self, name)
            if not (0 < value < 1):
                raise InvalidInputError(f"{name} must lie in (0, 1), got {value!r}")


@dataclass(frozen=True, eq=False)
class ShiftSample:
    cal: LossMatrix
    test: LossMatrix
    weights: WeightVector


def _shift_rows(config: TwoGroupShiftConfig, rng: np.random.Generator, rows: int, pi: float):
    group = rng.random(rows) < pi
    p_risky = np.where(group, config.p_risky_high, config.p_risky_low)
    risky = (rng.random(rows) < p_risky).astype(float)
    safe = (rng.random(rows) < config.p_safe).astype(float)
    return group, np.column_stack([risky, safe])


def gen_two_group_shift(config: TwoGroupShiftConfig) -> ShiftSample:
    grid = Grid(np.array([0.5, 1.0]))
    cal_rng = derive_rng(config.seed, "shift-cal")
    test_rng = derive_rng(config.seed, "shift-test")
    cal_group, cal_entries = _shift_rows(config, cal_rng, config.n_cal, config.pi_train)
    _, test_entries = _shift_rows(config, test_rng, config.n_test, config.pi_test)

    w_in = config.pi_test / config.pi_train
    w_out = (1.0 - config.pi_test) / (1.0 - config.pi_train)
    weights = WeightVector(np.where(cal_group, w_in, w_out), cap=max(w_in, w_out))
    return ShiftSample(
        LossMatrix(grid, 1.0, cal_entries),
        LossMatrix(grid, 1.0, test_entries),
        weights,
    )
