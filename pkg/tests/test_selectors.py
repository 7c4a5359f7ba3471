"""Method dispatch, adjusted levels, and weighted selection."""

import numpy as np
import pytest

from gridcrc.core import Grid, InvalidInputError, LossMatrix, crc_scan, empirical_risk
from gridcrc.corrections import (
    CorrectionSpec,
    bernstein_correction,
    empirical_bernstein_correction,
    empirical_sigma_max,
    hoeffding_correction,
    min_combined_correction,
)
from gridcrc.selectors import (
    METHOD_NAMES,
    ConfigurationError,
    MethodConfig,
    WeightVector,
    crc_nm_adjusted_level,
    method_correction,
    select,
    weighted_select,
)

import oracles


def grid(m: int) -> Grid:
    return Grid(np.linspace(0.0, 1.0, m))


def random_matrix(n=50, m=12, seed=3) -> LossMatrix:
    rng = np.random.default_rng(seed)
    return LossMatrix(grid(m), 1.0, rng.random((n, m)))


# --- configuration validation -------------------------------------------------


def test_method_names_are_frozen():
    assert METHOD_NAMES == (
        "crc",
        "crc-nm",
        "loss-mono",
        "risk-mono",
        "crc-c",
        "crc-nm-bernstein",
        "crc-nm-empbern",
        "crc-nm-min",
    )


def test_plain_methods_reject_correction_spec():
    spec = CorrectionSpec(kind="hoeffding", bound=1.0)
    for method in ("crc", "loss-mono", "risk-mono"):
        with pytest.raises(ConfigurationError, match="no correction"):
            MethodConfig(method=method, alpha=0.1, bound=1.0, correction=spec)


def test_variance_methods_require_matching_spec():
    with pytest.raises(ConfigurationError, match="sigma_max"):
        MethodConfig(method="crc-nm-bernstein", alpha=0.1, bound=1.0)
    with pytest.raises(ConfigurationError, match="bernstein"):
        MethodConfig(
            method="crc-nm-bernstein",
            alpha=0.1,
            bound=1.0,
            correction=CorrectionSpec(kind="hoeffding", bound=1.0),
        )
    with pytest.raises(ConfigurationError, match="bound"):
        MethodConfig(
            method="crc-nm-bernstein",
            alpha=0.1,
            bound=1.0,
            correction=CorrectionSpec(kind="bernstein", bound=2.0, sigma_max=0.3),
        )
    MethodConfig(
        method="crc-nm-bernstein",
        alpha=0.1,
        bound=1.0,
        correction=CorrectionSpec(kind="bernstein", bound=1.0, sigma_max=0.3),
    )


def test_alpha_and_bound_validation():
    with pytest.raises(ConfigurationError):
        MethodConfig(method="crc", alpha=0.0, bound=1.0)
    with pytest.raises(ConfigurationError):
        MethodConfig(method="crc", alpha=1.5, bound=1.0)
    with pytest.raises(ConfigurationError):
        MethodConfig(method="crc", alpha=0.1, bound=0.0)
    with pytest.raises(ConfigurationError):
        MethodConfig(method="not-a-method", alpha=0.1, bound=1.0)


def test_select_rejects_bound_mismatch():
    matrix = random_matrix()
    config = MethodConfig(method="crc", alpha=0.3, bound=2.0)
    with pytest.raises(ConfigurationError, match="bound"):
        select(matrix, config)


# --- method semantics -----------------------------------------------------------


def test_crc_select_matches_scan():
    matrix = random_matrix()
    config = MethodConfig(method="crc", alpha=0.55, bound=1.0)
    sel = select(matrix, config)
    direct = crc_scan(empirical_risk(matrix), matrix.n, 1.0, 0.55)
    assert (sel.index, sel.lam, sel.feasible) == (
        direct.index,
        direct.lam,
        direct.feasible,
    )
    assert sel.effective_level == 0.55


def test_crc_nm_effective_level_is_alpha_minus_correction():
    matrix = random_matrix(n=200, m=16)
    alpha = 0.6
    sel = select(matrix, MethodConfig(method="crc-nm", alpha=alpha, bound=1.0))
    correction = hoeffding_correction(16, 200, 1.0)
    assert sel.effective_level == alpha - correction.amount
    assert sel.effective_level == crc_nm_adjusted_level(alpha, correction)


def test_crc_nm_total_even_when_adjusted_level_nonpositive():
    # grid so coarse the correction swamps alpha: selection must still return
    matrix = random_matrix(n=5, m=10)
    sel = select(matrix, MethodConfig(method="crc-nm", alpha=0.05, bound=1.0))
    assert sel.effective_level < 0
    assert (sel.index, sel.feasible) == (matrix.m - 1, False)


def test_monotonized_methods_order():
    # risk envelope sits below the mean of the per-row envelopes, and it is
    # scanned without the n/(n+1) inflation, so its selection never comes later
    for seed in range(25):
        rng = np.random.default_rng(seed)
        entries = rng.integers(0, 17, size=(12, 7)) / 16.0
        matrix = LossMatrix(grid(7), 1.0, entries)
        alpha = float(rng.integers(4, 15)) / 16.0
        loss_sel = select(matrix, MethodConfig(method="loss-mono", alpha=alpha, bound=1.0))
        risk_sel = select(matrix, MethodConfig(method="risk-mono", alpha=alpha, bound=1.0))
        assert risk_sel.index <= loss_sel.index


def test_crc_c_deterministic_and_requires_seed():
    matrix = random_matrix()
    config = MethodConfig(method="crc-c", alpha=0.5, bound=1.0)
    with pytest.raises(ConfigurationError, match="seed"):
        select(matrix, config)
    a = select(matrix, config, rng_seed=21)
    b = select(matrix, config, rng_seed=21)
    assert (a.index, a.effective_level) == (b.index, b.effective_level)
    assert a.effective_level <= 0.5  # never loosens the target


def test_crc_c_honours_spec_overrides():
    matrix = random_matrix()
    spec = CorrectionSpec(
        kind="bootstrap-stability", bound=1.0, resamples=8, percentile=50.0
    )
    config = MethodConfig(method="crc-c", alpha=0.5, bound=1.0, correction=spec)
    sel = select(matrix, config, rng_seed=21)
    default = select(
        matrix, MethodConfig(method="crc-c", alpha=0.5, bound=1.0), rng_seed=21
    )
    # a 50th-percentile, 8-resample probe is a different correction stream
    assert sel.effective_level != default.effective_level


def test_method_correction_none_for_uncorrected_methods():
    matrix = random_matrix()
    for method in ("crc", "loss-mono", "risk-mono"):
        config = MethodConfig(method=method, alpha=0.2, bound=1.0)
        assert method_correction(matrix, config) is None


def test_variance_family_effective_levels():
    matrix = random_matrix(n=300, m=20)
    sigma_hat = empirical_sigma_max(matrix)
    cases = [
        (
            "crc-nm-bernstein",
            CorrectionSpec(kind="bernstein", bound=1.0, sigma_max=0.25),
            bernstein_correction(20, 300, 1.0, 0.25).amount,
        ),
        (
            "crc-nm-empbern",
            None,
            empirical_bernstein_correction(20, 300, 1.0, sigma_hat).amount,
        ),
        (
            "crc-nm-min",
            None,
            min_combined_correction(20, 300, 1.0, sigma_hat).amount,
        ),
        (
            "crc-nm-empbern",
            CorrectionSpec(kind="empirical-bernstein", bound=1.0, delta=0.2),
            empirical_bernstein_correction(20, 300, 1.0, sigma_hat, 0.2).amount,
        ),
    ]
    for method, spec, amount in cases:
        config = MethodConfig(method=method, alpha=0.7, bound=1.0, correction=spec)
        sel = select(matrix, config)
        assert sel.effective_level == 0.7 - amount


# --- weighted selection ----------------------------------------------------------


def test_unit_weights_reduce_bit_exactly_to_crc():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n, m = int(rng.integers(2, 30)), int(rng.integers(1, 9))
        matrix = LossMatrix(grid(m), 1.0, rng.random((n, m)))
        alpha = float(rng.uniform(0.05, 0.95))
        weights = WeightVector(np.ones(n), cap=1.0)
        ws = weighted_select(matrix, weights, alpha)
        ps = select(matrix, MethodConfig(method="crc", alpha=alpha, bound=1.0))
        assert (ws.index, ws.lam, ws.feasible) == (ps.index, ps.lam, ps.feasible)
        assert ws.effective_level == ps.effective_level


def test_weighted_select_matches_loop_oracle():
    rng = np.random.default_rng(77)
    for _ in range(30):
        n, m = int(rng.integers(2, 15)), int(rng.integers(1, 6))
        entries = rng.integers(0, 17, size=(n, m)) / 16.0
        raw = rng.integers(1, 9, size=n) / 4.0
        cap = float(raw.max())
        matrix = LossMatrix(grid(m), 1.0, entries)
        alpha = float(rng.integers(2, 15)) / 16.0
        sel = weighted_select(matrix, WeightVector(raw, cap=cap), alpha)
        want_index, want_feasible = oracles.weighted_crc_index(
            entries.tolist(), raw.tolist(), cap, 1.0, alpha
        )
        assert (sel.index, sel.feasible) == (want_index, want_feasible)


def test_weight_vector_validation():
    with pytest.raises(InvalidInputError):
        WeightVector(np.array([1.0, -0.5]), cap=1.0)
    with pytest.raises(InvalidInputError):
        WeightVector(np.array([1.0, 2.0]), cap=1.5)  # entry above cap
    with pytest.raises(InvalidInputError):
        WeightVector(np.array([]), cap=1.0)
    with pytest.raises(InvalidInputError):
        WeightVector(np.array([1.0]), cap=0.0)


def test_weighted_select_length_mismatch():
    matrix = random_matrix(n=10)
    with pytest.raises(InvalidInputError, match="weights"):
        weighted_select(matrix, WeightVector(np.ones(9), cap=1.0), 0.3)
