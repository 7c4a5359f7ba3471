"""Seeded Monte Carlo evaluation of selection methods.

``run_experiment`` repeats a calibrate/select/evaluate cycle: each
repetition draws fresh data from the configured generator (or a fresh
disjoint split of a fixed pool), runs every configured method on the
calibration rows, and scores the selected threshold on the held-out rows.
Everything is derived from the plan's master seed, so a report is a pure
function of its plan.

The module also houses the diagnostic probes used by the test suite: the
per-realization decomposition record (augmented vs. plain selection), the
scan-disagreement sweep against its exponential bound, the counterexample
phase table, and the uniform-concentration probe.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

import numpy as np

from gridcrc._seeding import derive_rng, derive_seed
from gridcrc.core import (
    InvalidInputError,
    LossMatrix,
    RiskCurve,
    Selection,
    crc_scan,
    empirical_risk,
    plain_scan,
)
from gridcrc.corrections import (
    CorrectionSpec,
    bernstein_correction,
    hoeffding_correction,
)
from gridcrc.selectors import (
    ConfigurationError,
    MethodConfig,
    select,
    weighted_select,
)
from gridcrc import generators as gens

GENERATOR_NAMES = (
    "bump",
    "multilabel",
    "monotone",
    "minimax",
    "counterexample",
    "oversize",
    "lipschitz",
    "two-group-shift",
    "pool",
)

QUANTILE_KEYS = ("0.05", "0.25", "0.5", "0.75", "0.95")

WEIGHTED_LABEL = "weighted-crc"


@dataclass(frozen=True, eq=False)
class TrialData:
    """One repetition's data: calibration and test matrices, plus optional
    prediction-set sizes (row-aligned) and importance weights."""

    cal: LossMatrix
    test: LossMatrix
    cal_sizes: np.ndarray | None = None
    test_sizes: np.ndarray | None = None
    weights: object | None = None


@dataclass(frozen=True)
class ExperimentPlan:
    """A full experiment: generator, methods, repetition count, split sizes,
    and the master seed all substreams derive from.

    ``weighted_alpha`` adds an importance-weighted selection stream (labeled
    ``weighted-crc``) at that level; it requires a generator that supplies
    per-trial weights.
    """

    generator: str
    generator_config: dict
    methods: tuple[MethodConfig, ...]
    repetitions: int
    n_cal: int
    n_test: int
    master_seed: int
    weighted_alpha: float | None = field(default=None)

    def __post_init__(self) -> None:
        if self.generator not in GENERATOR_NAMES:
            raise ConfigurationError(
                f"unknown generator {self.generator!r}; expected one of {list(GENERATOR_NAMES)}"
            )
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.repetitions < 1:
            raise ConfigurationError("repetitions must be >= 1")
        if self.n_cal < 1 or self.n_test < 1:
            raise ConfigurationError("n_cal and n_test must be >= 1")
        names = [cfg.method for cfg in self.methods]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"duplicate method names in plan: {names}")
        if not names and self.weighted_alpha is None:
            raise ConfigurationError("plan needs at least one method")
        if self.weighted_alpha is not None and not (0 < self.weighted_alpha < 1):
            raise ConfigurationError(
                f"weighted_alpha must lie in (0, 1), got {self.weighted_alpha!r}"
            )


@dataclass(frozen=True)
class MethodRecord:
    """One (method, repetition) outcome."""

    method: str
    repetition: int
    selected_index: int
    selected_lambda: float
    effective_level: float
    feasible: bool
    test_risk: float
    set_size: float | None


@dataclass(frozen=True)
class MethodSummary:
    method: str
    alpha: float
    mean_risk: float
    violation_rate: float
    risk_quantiles: dict[str, float]
    mean_set_size: float | None


@dataclass(frozen=True, eq=False)
class EvalReport:
    plan: ExperimentPlan
    records: tuple[MethodRecord, ...]
    summary: dict[str, MethodSummary]


def _split_rows(matrix: LossMatrix, n_cal: int, n_test: int) -> tuple[LossMatrix, LossMatrix]:
    if n_cal + n_test > matrix.n:
        raise ConfigurationError(
            f"plan needs {n_cal}+{n_test} rows but the generator produced {matrix.n}"
        )
    cal = LossMatrix(matrix.grid, matrix.bound, matrix.entries[:n_cal])
    test = LossMatrix(matrix.grid, matrix.bound, matrix.entries[n_cal : n_cal + n_test])
    return cal, test


def _trial_factory(plan: ExperimentPlan) -> Callable[[int], TrialData]:
    cfg = dict(plan.generator_config)
    nc, nt = plan.n_cal, plan.n_test

    def trial_seed(rep: int) -> int:
        return derive_seed(plan.master_seed, "trial", rep)

    if plan.generator == "bump":
        def make(rep: int) -> TrialData:
            bump_cfg = gens.BumpLossConfig(n=nc + nt, seed=trial_seed(rep), **cfg)
            matrix, _ = gens.gen_bump(bump_cfg, include_true_curve=False)
            return TrialData(*_split_rows(matrix, nc, nt))

    elif plan.generator == "multilabel":
        def make(rep: int) -> TrialData:
            ml_cfg = gens.MultilabelConfig(n_cal=nc, n_test=nt, seed=trial_seed(rep), **cfg)
            sample = gens.gen_multilabel(ml_cfg)
            return TrialData(sample.cal, sample.test, sample.cal_sizes, sample.test_sizes)

    elif plan.generator == "monotone":
        m = int(cfg.pop("m"))
        if cfg:
            raise ConfigurationError(f"unused monotone config keys: {sorted(cfg)}")
        def make(rep: int) -> TrialData:
            matrix = gens.gen_monotone(nc + nt, m, trial_seed(rep))
            return TrialData(*_split_rows(matrix, nc, nt))

    elif plan.generator == "minimax":
        def make(rep: int) -> TrialData:
            mm_cfg = gens.MinimaxInstanceConfig(n=nc + nt - 1, seed=trial_seed(rep), **cfg)
            matrix = next(gens.gen_minimax_instance(mm_cfg, trials=1))
            return TrialData(*_split_rows(matrix, nc, nt))

    elif plan.generator == "counterexample":
        def make(rep: int) -> TrialData:
            ce_cfg = gens.CounterexampleConfig(
                n=nc + nt - 1, trials=1, seed=trial_seed(rep), **cfg
            )
            matrix = next(gens.gen_counterexample(ce_cfg)[0])
            return TrialData(*_split_rows(matrix, nc, nt))

    elif plan.generator == "oversize":
        def make(rep: int) -> TrialData:
            ov_cfg = gens.OversizeLossConfig(n=nc + nt, seed=trial_seed(rep), **cfg)
            sample = gens.gen_oversize_surrogate(ov_cfg)
            cal, test = _split_rows(sample.matrix, nc, nt)
            return TrialData(cal, test, sample.sizes[:nc], sample.sizes[nc : nc + nt])

    elif plan.generator == "lipschitz":
        def make(rep: int) -> TrialData:
            lz_cfg = gens.LipschitzConfig(n=nc + nt, seed=trial_seed(rep), **cfg)
            matrix, _ = gens.gen_lipschitz(lz_cfg)
            return TrialData(*_split_rows(matrix, nc, nt))

    elif plan.generator == "two-group-shift":
        def make(rep: int) -> TrialData:
            sh_cfg = gens.TwoGroupShiftConfig(
                n_cal=nc, n_test=nt, seed=trial_seed(rep), **cfg
            )
            sample = gens.gen_two_group_shift(sh_cfg)
            return TrialData(sample.cal, sample.test, weights=sample.weights)

    elif plan.generator == "pool":
        from gridcrc import fileio

        pool = fileio.read_matrix_csv(cfg["path"], bound=float(cfg["bound"]))
        if nc + nt > pool.n:
            raise ConfigurationError(
                f"pool has {pool.n} rows; plan needs {nc}+{nt}"
            )
        def make(rep: int) -> TrialData:
            rng = derive_rng(plan.master_seed, "trial", rep)
            perm = rng.permutation(pool.n)
            rows = pool.entries[perm[: nc + nt]]
            matrix = LossMatrix(pool.grid, pool.bound, rows)
            return TrialData(*_split_rows(matrix, nc, nt))

    return make


def _evaluate(trial: TrialData, sel: Selection) -> tuple[float, float | None]:
    test_risk = float(trial.test.entries[:, sel.index].mean())
    size = None
    if trial.test_sizes is not None:
        size = float(trial.test_sizes[:, sel.index].mean())
    return test_risk, size


def summarize(
    records: Iterable[MethodRecord], alphas: dict[str, float]
) -> dict[str, MethodSummary]:
    """Aggregate per-repetition records into the frozen per-method summary.

    Exposed separately so reports can be checked for self-consistency: the
    aggregates are recomputable from the records alone.
    """
    by_method: dict[str, list[MethodRecord]] = {}
    for record in records:
        by_method.setdefault(record.method, []).append(record)
    out: dict[str, MethodSummary] = {}
    for method, recs in by_method.items():
        alpha = alphas[method]
        risks = np.array([r.test_risk for r in recs])
        quantiles = np.quantile(risks, [float(k) for k in QUANTILE_KEYS])
        sizes = [r.set_size for r in recs]
        mean_size = None if any(s is None for s in sizes) else float(np.mean(sizes))
        out[method] = MethodSummary(
            method=method,
            alpha=alpha,
            mean_risk=float(risks.mean()),
            violation_rate=float((risks > alpha).mean()),
            risk_quantiles=dict(zip(QUANTILE_KEYS, map(float, quantiles))),
            mean_set_size=mean_size,
        )
    return out


def plan_alphas(plan: ExperimentPlan) -> dict[str, float]:
    alphas = {cfg.method: cfg.alpha for cfg in plan.methods}
    if plan.weighted_alpha is not None:
        alphas[WEIGHTED_LABEL] = plan.weighted_alpha
    return alphas


def run_experiment(plan: ExperimentPlan) -> EvalReport:
    """Execute the plan; deterministic given the plan (master seed included)."""
    make_trial = _trial_factory(plan)
    records: list[MethodRecord] = []
    for rep in range(plan.repetitions):
        trial = make_trial(rep)
        for cfg in plan.methods:
            try:
                sel = select(
                    trial.cal, cfg, rng_seed=derive_seed(plan.master_seed, f"select:{cfg.method}", rep)
                )
            except (InvalidInputError, ConfigurationError) as exc:
                raise type(exc)(f"repetition {rep}, method {cfg.method!r}: {exc}") from exc
            risk, size = _evaluate(trial, sel)
            records.append(
                MethodRecord(
                    cfg.method, rep, sel.index, sel.lam, sel.effective_level,
                    sel.feasible, risk, size,
                )
            )
        if plan.weighted_alpha is not None:
            if trial.weights is None:
                raise ConfigurationError(
                    f"repetition {rep}: plan requests weighted selection but the "
                    f"{plan.generator!r} generator supplies no weights"
                )
            sel = weighted_select(trial.cal, trial.weights, plan.weighted_alpha)
            risk, size = _evaluate(trial, sel)
            records.append(
                MethodRecord(
                    WEIGHTED_LABEL, rep, sel.index, sel.lam, sel.effective_level,
                    sel.feasible, risk, size,
                )
            )
    return EvalReport(plan, tuple(records), summarize(records, plan_alphas(plan)))


# ---------------------------------------------------------------------------
# Diagnostic probes.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecompositionRecord:
    """Augmented scan on the first n rows vs. plain scan on all n+1 rows,
    with the n-row empirical risk evaluated at both selections.

    The sign condition — when the plain index falls strictly before the
    augmented one, the n-row risk at the augmented selection is strictly
    below the risk at the plain selection — is only provable when the
    augmented scan actually found a feasible index (every earlier index,
    the plain selection included, then failed a condition the selected one
    passed).  A last-index fallback selection carries no such comparison,
    which is why the record exposes ``crc_feasible``.
    """

    crc_index: int
    plain_index: int
    crc_feasible: bool
    plain_feasible: bool
    risk_at_crc: float
    risk_at_plain: float


def decomposition_probe(matrix: LossMatrix, alpha: float, bound: float) -> DecompositionRecord:
    """Treat the last row as the held-out sample and compare the two scans."""
    if matrix.n < 2:
        raise InvalidInputError("decomposition probe needs at least two rows")
    n = matrix.n - 1
    cal_curve = RiskCurve(matrix.grid, matrix.entries[:n].mean(axis=0))
    full_curve = RiskCurve(matrix.grid, matrix.entries.mean(axis=0))
    crc_sel = crc_scan(cal_curve, n, bound, alpha)
    plain_sel = plain_scan(full_curve, alpha)
    return DecompositionRecord(
        crc_index=crc_sel.index,
        plain_index=plain_sel.index,
        crc_feasible=crc_sel.feasible,
        plain_feasible=plain_sel.feasible,
        risk_at_crc=float(cal_curve.values[crc_sel.index]),
        risk_at_plain=float(cal_curve.values[plain_sel.index]),
    )


@dataclass(frozen=True)
class DisagreementRow:
    n: int
    frequency: float
    std_error: float
    bound: float


def disagreement_sweep(
    config: "gens.LipschitzConfig", n_values: Iterable[int], trials: int
) -> list[DisagreementRow]:
    """Empirical P(augmented selection != plain selection) per sample size,
    next to the bound exp(-2*n*epsilon^2) (unit loss bound).

    Each swept n must satisfy epsilon >= (1 - alpha)/n, the regime in which
    the bound is claimed.
    """
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    rows = []
    for n in n_values:
        if config.epsilon < (1.0 - config.alpha) / n:
            raise InvalidInputError(
                f"n={n}: epsilon must be at least (1-alpha)/n = {(1 - config.alpha) / n:.4g}"
            )
        disagreements = 0
        for t in range(trials):
            cfg = replace(
                config, n=n + 1, seed=derive_seed(config.seed, f"disagreement-n{n}", t)
            )
            matrix, _ = gens.gen_lipschitz(cfg)
            cal_curve = RiskCurve(matrix.grid, matrix.entries[:n].mean(axis=0))
            full_curve = RiskCurve(matrix.grid, matrix.entries.mean(axis=0))
            crc_sel = crc_scan(cal_curve, n, matrix.bound, config.alpha)
            plain_sel = plain_scan(full_curve, config.alpha)
            disagreements += crc_sel.index != plain_sel.index
        freq = disagreements / trials
        rows.append(
            DisagreementRow(
                n=n,
                frequency=freq,
                std_error=math.sqrt(freq * (1.0 - freq) / trials),
                bound=math.exp(-2.0 * n * config.epsilon**2),
            )
        )
    return rows


@dataclass(frozen=True)
class PhaseCell:
    """One (n, m) cell of the counterexample phase table."""

    n: int
    m: int
    analytic_risk: float
    mc_risk: float | None
    mc_std_error: float | None
    controlled: bool
    control_bound: float
    violation_bound: float


def counterexample_sweep(
    p: float,
    alpha: float,
    n_values: Iterable[int],
    m_values: Iterable[int],
    trials: int,
    seed: int,
) -> list[PhaseCell]:
    """Analytic and Monte Carlo risk of the augmented scan per (n, m) cell.

    The Monte Carlo path draws only the per-column calibration sums (a
    binomial per column — distributionally identical to summing the full
    binary matrix) and scores each trial by p times the indicator that any
    Bernoulli column was feasible, which is the conditional expectation of a
    fresh test row's loss.  ``trials=0`` fills the analytic columns only.
    """
    if trials < 0:
        raise InvalidInputError("trials must be >= 0")
    cells = []
    index = 0
    for n in n_values:
        for m in m_values:
            if alpha <= 1.0 / (n + 1):
                raise InvalidInputError(f"n={n}: alpha must exceed 1/(n+1)")
            analytic = gens.counterexample_analytic_risk(n, m, p, alpha)
            t = alpha - 1.0 / (n + 1)
            control = p * m * math.exp(-2.0 * n * (p - t) ** 2)
            violation = p * -math.expm1(-m * (1.0 - p) ** n)
            mc_risk = mc_se = None
            if trials:
                rng = derive_rng(seed, "counterexample-cell", index)
                hits = 0
                done = 0
                chunk = max(1, min(trials, 4_000_000 // m))
                while done < trials:
                    take = min(chunk, trials - done)
                    sums = rng.binomial(n, p, size=(take, m))
                    feasible = (n / (n + 1)) * (sums / n) + 1.0 / (n + 1) <= alpha
                    hits += int(feasible.any(axis=1).sum())
                    done += take
                rate = hits / trials
                mc_risk = p * rate
                mc_se = p * math.sqrt(rate * (1.0 - rate) / trials)
            cells.append(
                PhaseCell(
                    n=n, m=m, analytic_risk=analytic, mc_risk=mc_risk,
                    mc_std_error=mc_se, controlled=analytic <= alpha,
                    control_bound=control, violation_bound=violation,
                )
            )
            index += 1
    return cells


@dataclass(frozen=True)
class ConcentrationProbe:
    trials: int
    n: int
    m: int
    mean_sup_deviation: float
    bound_amount: float
    correction_kind: str


def uniform_concentration_probe(
    matrices: Iterable[LossMatrix],
    true_curve: RiskCurve,
    correction: CorrectionSpec,
) -> ConcentrationProbe:
    """Monte Carlo estimate of E[sup over the grid of |empirical - true|]
    next to the requested analytic envelope (Hoeffding or Bernstein)."""
    if correction.kind not in ("hoeffding", "bernstein"):
        raise InvalidInputError(
            f"probe supports hoeffding or bernstein envelopes, got {correction.kind!r}"
        )
    total = 0.0
    trials = 0
    n = m = None
    for matrix in matrices:
        if m is None:
            n, m = matrix.n, matrix.m
            if m != true_curve.grid.m:
                raise InvalidInputError("true curve and matrices disagree on grid size")
        curve = empirical_risk(matrix)
        total += float(np.abs(curve.values - true_curve.values).max())
        trials += 1
    if trials == 0:
        raise InvalidInputError("probe needs at least one matrix")
    if correction.kind == "hoeffding":
        bound = hoeffding_correction(m, n, correction.bound)
    else:
        bound = bernstein_correction(m, n, correction.bound, correction.sigma_max)
    return ConcentrationProbe(
        trials=trials, n=n, m=m,
        mean_sup_deviation=total / trials,
        bound_amount=bound.amount,
        correction_kind=correction.kind,
    )
