"""Synthetic loss generators: shapes, ranges, determinism, closed forms."""

import math

import numpy as np
import pytest

from gridcrc.core import Grid, InvalidInputError
from gridcrc.generators import (
    BumpLossConfig,
    CounterexampleConfig,
    LipschitzConfig,
    MinimaxInstanceConfig,
    MultilabelConfig,
    OversizeLossConfig,
    TwoGroupShiftConfig,
    counterexample_analytic_risk,
    counterexample_true_curve,
    detection_loss_from_counts,
    gen_bump,
    gen_counterexample,
    gen_lipschitz,
    gen_minimax_instance,
    gen_monotone,
    gen_multilabel,
    gen_oversize_surrogate,
    gen_two_group_shift,
    lipschitz_margin_index,
    minimax_true_curve,
    precision_loss,
    size_penalty,
)


# --- Bernoulli counterexample -------------------------------------------------


def test_counterexample_config_validation():
    with pytest.raises(InvalidInputError):
        CounterexampleConfig(n=10, m=5, p=0.5, alpha=0.05, trials=1, seed=0)  # alpha <= 1/(n+1)
    with pytest.raises(InvalidInputError):
        CounterexampleConfig(n=10, m=5, p=0.5, alpha=0.6, trials=1, seed=0)  # alpha >= p
    with pytest.raises(InvalidInputError):
        CounterexampleConfig(n=10, m=5, p=0.5, alpha=0.3, trials=-1, seed=0)


def test_counterexample_matrices_and_curve():
    config = CounterexampleConfig(n=8, m=4, p=0.6, alpha=0.3, trials=3, seed=17)
    matrices, curve = gen_counterexample(config)
    matrices = list(matrices)
    assert len(matrices) == 3
    for matrix in matrices:
        assert matrix.entries.shape == (9, 5)
        assert np.all(np.isin(matrix.entries, (0.0, 1.0)))
        assert np.all(matrix.entries[:, -1] == 0.0)
    np.testing.assert_array_equal(curve.values, [0.6, 0.6, 0.6, 0.6, 0.0])
    assert curve.kind == "true" and not curve.estimated
    again, _ = gen_counterexample(config)
    np.testing.assert_array_equal(next(iter(again)).entries, matrices[0].entries)


def test_counterexample_analytic_frozen_values():
    assert counterexample_analytic_risk(1, 1, 0.5, 0.6) == 0.25
    assert counterexample_analytic_risk(10, 1000, 0.4, 0.2) == 0.4
    assert counterexample_analytic_risk(10, 100, 0.4, 0.2) == pytest.approx(
        0.39652764411035085, rel=1e-12
    )
    assert counterexample_analytic_risk(200, 100, 0.4, 0.2) == pytest.approx(
        1.82905286916224e-08, rel=1e-9
    )
    # level below the scan's hard floor: nothing short of the last threshold
    # can ever qualify, so the expected loss is exactly zero
    assert counterexample_analytic_risk(10, 5, 0.5, 0.05) == 0.0


def test_counterexample_analytic_matches_simulation():
    # ties the closed form to the actual generated matrices and scan rule
    config = CounterexampleConfig(n=10, m=5, p=0.5, alpha=0.3, trials=3000, seed=41)
    matrices, _ = gen_counterexample(config)
    n = config.n
    losses = []
    for matrix in matrices:
        means = matrix.entries[:n].mean(axis=0)
        cond = (n / (n + 1)) * means + 1.0 / (n + 1) <= config.alpha
        idx = int(np.argmax(cond))  # last column is always feasible
        losses.append(matrix.entries[n, idx])
    losses = np.asarray(losses)
    want = counterexample_analytic_risk(config.n, config.m, config.p, config.alpha)
    se = losses.std() / math.sqrt(losses.size)
    assert abs(losses.mean() - want) <= 3 * max(se, 1e-6)


# --- bump family ----------------------------------------------------------------


def test_bump_shapes_range_and_determinism():
    config = BumpLossConfig(n=50, m=33, seed=5)
    matrix, curve = gen_bump(config, include_true_curve=False)
    assert curve is None
    assert matrix.entries.shape == (50, 33)
    assert matrix.entries.min() >= 0.0 and matrix.entries.max() <= 1.0
    again, _ = gen_bump(config, include_true_curve=False)
    np.testing.assert_array_equal(matrix.entries, again.entries)


def test_bump_reference_curve_is_flagged_estimated():
    config = BumpLossConfig(n=5, m=17, seed=2)
    _, curve = gen_bump(config, true_curve_rows=30_000)
    assert curve.kind == "true" and curve.estimated
    assert curve.values.shape == (17,)
    # the decay term alone puts the left end near 0.5 and the right end near 0
    assert curve.values[0] > 0.4 and curve.values[-1] < 0.1


def test_bump_config_validation():
    with pytest.raises(InvalidInputError):
        BumpLossConfig(n=5, m=1, seed=0)
    with pytest.raises(InvalidInputError):
        BumpLossConfig(n=5, m=10, seed=0, noise_std=-0.1)
    with pytest.raises(InvalidInputError):
        BumpLossConfig(n=5, m=10, seed=0, scale_range=(1.2, 0.8))


# --- multilabel precision ---------------------------------------------------------


def test_precision_loss_frozen_points():
    assert precision_loss(0.0) == 1.0
    assert precision_loss(1.0) == 0.0
    assert precision_loss(0.1) == 1.0  # raw value 1.016... is capped
    assert precision_loss(0.5) == pytest.approx(0.5, abs=1e-12)
    assert precision_loss(0.75) == pytest.approx(0.195, abs=1e-12)
    out = precision_loss(np.array([0.0, 0.25, 1.0]))
    assert out.shape == (3,)


def test_multilabel_shapes_and_threshold_extremes():
    config = MultilabelConfig(n_cal=60, n_test=40, m=9, seed=3)
    sample = gen_multilabel(config)
    assert sample.cal.entries.shape == (60, 9)
    assert sample.test.entries.shape == (40, 9)
    assert sample.cal_sizes.shape == (60, 9)
    assert sample.test_sizes.shape == (40, 9)
    # lambda = 0 keeps nothing (predicted probabilities are strictly < 1);
    # lambda = 1 keeps every label
    assert np.all(sample.cal_sizes[:, 0] == 0)
    assert np.all(sample.cal.entries[:, 0] == 1.0)
    assert np.all(sample.cal_sizes[:, -1] == config.n_labels)


def test_multilabel_model_seed_semantics():
    base = gen_multilabel(MultilabelConfig(n_cal=20, n_test=10, m=6, seed=5))
    pinned = gen_multilabel(
        MultilabelConfig(n_cal=20, n_test=10, m=6, seed=5, model_seed=5)
    )
    np.testing.assert_array_equal(base.cal.entries, pinned.cal.entries)
    other_model = gen_multilabel(
        MultilabelConfig(n_cal=20, n_test=10, m=6, seed=5, model_seed=6)
    )
    assert not np.array_equal(base.cal.entries, other_model.cal.entries)


def test_multilabel_config_validation():
    with pytest.raises(InvalidInputError):
        MultilabelConfig(n_cal=10, n_test=0, m=6, seed=1)
    with pytest.raises(InvalidInputError):
        MultilabelConfig(n_cal=10, n_test=5, m=6, seed=1, n_labels=0)


# --- miss/oversize --------------------------------------------------------------


def test_oversize_sizes_grow_with_lambda():
    sample = gen_oversize_surrogate(OversizeLossConfig(n=80, m=12, seed=9))
    assert sample.sizes.shape == (80, 12)
    assert np.all(np.diff(sample.sizes, axis=1) >= 0)
    assert sample.matrix.entries.min() >= 0.0
    again = gen_oversize_surrogate(OversizeLossConfig(n=80, m=12, seed=9))
    np.testing.assert_array_equal(sample.matrix.entries, again.matrix.entries)


def test_oversize_indicator_value_set():
    config = OversizeLossConfig(n=60, m=10, seed=4, variant="indicator", gamma=0.35)
    sample = gen_oversize_surrogate(config)
    assert np.all(np.isin(sample.matrix.entries, (0.0, 0.35, 0.65, 1.0)))


def test_oversize_config_validation():
    with pytest.raises(InvalidInputError):
        OversizeLossConfig(n=10, m=5, seed=0, variant="bogus")
    with pytest.raises(InvalidInputError):
        OversizeLossConfig(n=10, m=5, seed=0, gamma=1.5)
    with pytest.raises(InvalidInputError):
        OversizeLossConfig(n=10, m=5, seed=0, tau=0.0)
    with pytest.raises(InvalidInputError):
        OversizeLossConfig(n=10, m=5, seed=0, k0=-1)


def test_size_penalty_ramp():
    np.testing.assert_allclose(
        size_penalty([0, 3, 5.5, 8, 20], k0=3, tau=5.0), [0, 0, 0.5, 1.0, 1.0]
    )


def test_detection_loss_from_counts_assembly():
    grid = Grid(np.array([0.0, 0.5, 1.0]))
    records = [
        ("b", 0, 0, 2, 0),
        ("a", 0, 1, 4, 2),
        ("a", 1, 2, 4, 5),
        ("b", 2, 2, 2, 4),
        ("b", 1, 1, 2, 3),
        ("a", 2, 4, 4, 12),
    ]
    sample = detection_loss_from_counts(records, grid, gamma=0.35, k0=3, tau=5.0)
    # rows follow first appearance: b before a
    np.testing.assert_array_equal(sample.sizes, [[0, 3, 4], [2, 5, 12]])
    want_b = [0.65, 0.65 * 0.5, 0.35 * 0.2]
    want_a = [0.65 * 0.75, 0.65 * 0.5 + 0.35 * 0.4, 0.35]
    np.testing.assert_allclose(sample.matrix.entries, [want_b, want_a], rtol=1e-12)


def test_detection_loss_from_counts_error_paths():
    grid = Grid(np.array([0.0, 1.0]))
    ok = [("a", 0, 1, 2, 3), ("a", 1, 2, 2, 4)]
    detection_loss_from_counts(ok, grid)
    with pytest.raises(InvalidInputError, match="outside"):
        detection_loss_from_counts([("a", 2, 1, 2, 3)], grid)
    with pytest.raises(InvalidInputError, match="duplicate"):
        detection_loss_from_counts(ok + [("a", 1, 2, 2, 4)], grid)
    with pytest.raises(InvalidInputError, match="inconsistent n_gt"):
        detection_loss_from_counts([("a", 0, 1, 2, 3), ("a", 1, 1, 3, 3)], grid)
    with pytest.raises(InvalidInputError, match="missing"):
        detection_loss_from_counts([("a", 0, 1, 2, 3)], grid)
    with pytest.raises(InvalidInputError, match="no count records"):
        detection_loss_from_counts([], grid)
    with pytest.raises(InvalidInputError, match="n_matched"):
        detection_loss_from_counts([("a", 0, 3, 2, 3)], grid)
    with pytest.raises(InvalidInputError, match="set_size"):
        detection_loss_from_counts([("a", 0, 1, 2, -1)], grid)
    with pytest.raises(InvalidInputError, match="n_gt"):
        detection_loss_from_counts([("a", 0, 0, 0, 3)], grid)


# --- minimax needle instance -------------------------------------------------------


def test_minimax_delta_default_frozen():
    a = MinimaxInstanceConfig(n=1000, m=64, alpha=0.1, seed=1)
    assert a.delta == pytest.approx(0.032244701438219545, rel=1e-12)
    b = MinimaxInstanceConfig(n=200, m=256, alpha=0.2, seed=1)
    assert b.delta == pytest.approx(0.08325546111576977, rel=1e-12)
    capped = MinimaxInstanceConfig(n=200, m=256, alpha=0.93, seed=1)
    assert capped.delta == pytest.approx(0.02, abs=1e-12)


def test_minimax_true_curve_and_validation():
    config = MinimaxInstanceConfig(n=100, m=6, alpha=0.2, seed=0, delta=0.3, hidden_index=5)
    curve = minimax_true_curve(config)
    np.testing.assert_allclose(curve.values, [0.5, 0.5, 0.5, 0.5, 0.5, 0.2])
    with pytest.raises(InvalidInputError, match="hidden_index"):
        minimax_true_curve(
            MinimaxInstanceConfig(n=100, m=6, alpha=0.2, seed=0, delta=0.3)
        )
    with pytest.raises(InvalidInputError):
        MinimaxInstanceConfig(n=100, m=6, alpha=0.2, seed=0, hidden_index=6)
    with pytest.raises(InvalidInputError):
        MinimaxInstanceConfig(n=100, m=6, alpha=0.2, seed=0, delta=0.9)


def test_minimax_column_means_near_their_levels():
    config = MinimaxInstanceConfig(
        n=4000, m=8, alpha=0.2, seed=7, delta=0.3, hidden_index=2
    )
    matrix = next(iter(gen_minimax_instance(config, trials=1)))
    assert matrix.entries.shape == (4001, 8)
    assert np.all(np.isin(matrix.entries, (0.0, 1.0)))
    means = matrix.entries.mean(axis=0)
    assert abs(means[2] - 0.2) < 0.04
    others = np.delete(means, 2)
    assert np.all(np.abs(others - 0.5) < 0.04)


def test_minimax_stream_is_deterministic():
    config = MinimaxInstanceConfig(n=30, m=5, alpha=0.2, seed=11)
    a = [matrix.entries for matrix in gen_minimax_instance(config, trials=2)]
    b = [matrix.entries for matrix in gen_minimax_instance(config, trials=2)]
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])
    assert not np.array_equal(a[0], a[1])


# --- monotone rows ---------------------------------------------------------------


def test_monotone_rows_decrease_and_end_at_zero():
    matrix = gen_monotone(n=40, m=15, seed=6)
    assert matrix.entries.shape == (40, 15)
    assert np.all(np.diff(matrix.entries, axis=1) <= 0)
    assert np.all(matrix.entries[:, -1] == 0.0)
    np.testing.assert_array_equal(matrix.entries, gen_monotone(40, 15, 6).entries)
    with pytest.raises(InvalidInputError):
        gen_monotone(n=5, m=1, seed=0)


# --- Lipschitz margin profile -------------------------------------------------------


def test_lipschitz_margin_and_slope():
    config = LipschitzConfig(n=101, seed=717)
    j_star = lipschitz_margin_index(config)
    assert j_star == 12  # round(0.6 * (21 - 1))
    matrix, curve = gen_lipschitz(config)
    assert curve.kind == "true"
    assert curve.values[j_star] == config.alpha - config.epsilon
    assert np.all(np.delete(curve.values, j_star) > config.alpha - config.epsilon)
    # rows are deterministic before the margin and two-valued afterwards
    np.testing.assert_array_equal(
        matrix.entries[:, :j_star], np.tile(curve.values[:j_star], (101, 1))
    )
    gap = 1.0 / (config.m - 1)
    slopes = np.abs(np.diff(matrix.entries, axis=1)) / gap
    assert slopes.max() <= config.lipschitz_k + 1e-9


def test_lipschitz_validation():
    with pytest.raises(InvalidInputError):
        LipschitzConfig(n=10, seed=0, alpha=0.3, epsilon=0.4)
    with pytest.raises(InvalidInputError, match="lipschitz_k"):
        gen_lipschitz(LipschitzConfig(n=10, seed=0, lipschitz_k=0.1))


# --- two-group covariate shift -------------------------------------------------------


def test_shift_sample_shapes_weights_and_determinism():
    config = TwoGroupShiftConfig(n_cal=200, n_test=150, seed=13)
    sample = gen_two_group_shift(config)
    assert sample.cal.entries.shape == (200, 2)
    assert sample.test.entries.shape == (150, 2)
    np.testing.assert_array_equal(sample.cal.grid.values, [0.5, 1.0])
    assert np.all(np.isin(sample.cal.entries, (0.0, 1.0)))
    # exact density-ratio weights for pi 0.1 -> 0.5
    assert sample.weights.cap == 5.0
    assert set(np.unique(sample.weights.weights)) == {5.0, 5.0 / 9.0}
    again = gen_two_group_shift(config)
    np.testing.assert_array_equal(sample.cal.entries, again.cal.entries)
    np.testing.assert_array_equal(sample.weights.weights, again.weights.weights)


def test_shift_config_validation():
    with pytest.raises(InvalidInputError):
        TwoGroupShiftConfig(n_cal=0, n_test=5, seed=1)
    with pytest.raises(InvalidInputError):
        TwoGroupShiftConfig(n_cal=5, n_test=5, seed=1, pi_train=0.0)
