"""On-disk formats: round trips are bit-exact, drift fails loudly."""

import hashlib
import json

import numpy as np
import pytest

from gridcrc.core import Grid, InvalidInputError, LossMatrix, RiskCurve
from gridcrc.harness import MethodRecord, MethodSummary
from gridcrc import fileio


def random_matrix(n=25, m=7, seed=41) -> LossMatrix:
    rng = np.random.default_rng(seed)
    return LossMatrix(Grid(np.sort(rng.random(m))), 1.0, rng.random((n, m)))


def test_matrix_round_trip_is_bit_exact(tmp_path):
    matrix = random_matrix()
    path = tmp_path / "losses.csv"
    fileio.write_matrix_csv(path, matrix)
    back = fileio.read_matrix_csv(path, bound=1.0)
    np.testing.assert_array_equal(back.grid.values, matrix.grid.values)
    np.testing.assert_array_equal(back.entries, matrix.entries)
    assert back.bound == 1.0


def test_matrix_header_and_shape_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("threshold,0.0,1.0\n0,0.5,0.5\n")
    with pytest.raises(InvalidInputError, match="lambda"):
        fileio.read_matrix_csv(path, bound=1.0)
    path.write_text("")
    with pytest.raises(InvalidInputError, match="empty file"):
        fileio.read_matrix_csv(path, bound=1.0)
    path.write_text("lambda,0.0,1.0\n0,0.5\n")
    with pytest.raises(InvalidInputError, match="bad.csv:2"):
        fileio.read_matrix_csv(path, bound=1.0)
    path.write_text("lambda,0.0,1.0\n")
    with pytest.raises(InvalidInputError, match="no sample rows"):
        fileio.read_matrix_csv(path, bound=1.0)


def test_sizes_round_trip_and_validation(tmp_path):
    grid = Grid(np.array([0.0, 0.5, 1.0]))
    sizes = np.array([[0, 2, 5], [1, 1, 9]])
    path = tmp_path / "sizes.csv"
    fileio.write_sizes_csv(path, grid, sizes)
    back_grid, back = fileio.read_sizes_csv(path)
    np.testing.assert_array_equal(back_grid.values, grid.values)
    np.testing.assert_array_equal(back, sizes)
    with pytest.raises(InvalidInputError, match="columns"):
        fileio.write_sizes_csv(path, grid, np.zeros((2, 4)))


def test_curve_round_trip_both_flags(tmp_path):
    grid = Grid(np.linspace(0, 1, 5))
    for estimated in (False, True):
        curve = RiskCurve(grid, np.array([0.5, 0.4, 0.3, 0.2, 0.1]),
                          kind="true", estimated=estimated)
        path = tmp_path / f"curve-{estimated}.csv"
        fileio.write_curve_csv(path, curve)
        back = fileio.read_curve_csv(path)
        np.testing.assert_array_equal(back.values, curve.values)
        assert back.estimated is estimated
        assert back.kind == "true"
    # the reader takes the caller's word for the curve kind
    empirical = fileio.read_curve_csv(tmp_path / "curve-False.csv", kind="empirical")
    assert empirical.kind == "empirical"


def test_curve_reader_rejects_drift(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("lambda,risk\n0.0,0.5\n")
    with pytest.raises(InvalidInputError, match="estimated"):
        fileio.read_curve_csv(path)
    path.write_text("lambda,risk,estimated\n0.0,0.5,maybe\n")
    with pytest.raises(InvalidInputError, match="maybe"):
        fileio.read_curve_csv(path)
    path.write_text("lambda,risk,estimated\n0.0,0.5,true\n0.5,0.4,false\n")
    with pytest.raises(InvalidInputError, match="mixed"):
        fileio.read_curve_csv(path)
    path.write_text("lambda,risk,estimated\n")
    with pytest.raises(InvalidInputError, match="no rows"):
        fileio.read_curve_csv(path)


def sample_records() -> list[MethodRecord]:
    return [
        MethodRecord("crc", 0, 3, 0.3, 0.1, True, 0.08123456789012345, None),
        MethodRecord("crc-nm", 0, 5, 0.5, 0.0437, False, 0.11, 4.25),
        MethodRecord("crc", 1, 2, 0.2, 0.1, True, 1e-17, None),
    ]


def test_results_round_trip(tmp_path):
    path = tmp_path / "results.csv"
    records = sample_records()
    fileio.write_results_csv(path, records)
    back = fileio.read_results_csv(path)
    assert back == records  # frozen dataclasses compare field-by-field


def test_results_header_drift_names_columns(tmp_path):
    path = tmp_path / "results.csv"
    fileio.write_results_csv(path, sample_records())
    text = path.read_text().replace("test_risk", "risk")
    path.write_text(text)
    with pytest.raises(InvalidInputError) as excinfo:
        fileio.read_results_csv(path)
    assert "test_risk" in str(excinfo.value)
    assert "risk" in str(excinfo.value)


def test_results_bad_feasible_token(tmp_path):
    path = tmp_path / "results.csv"
    fileio.write_results_csv(path, sample_records())
    path.write_text(path.read_text().replace("true", "yes"))
    with pytest.raises(InvalidInputError, match="feasible"):
        fileio.read_results_csv(path)


def test_summary_round_trip(tmp_path):
    summary = {
        "crc": MethodSummary(
            method="crc",
            alpha=0.1,
            mean_risk=0.09,
            violation_rate=0.4,
            risk_quantiles={"0.05": 0.01, "0.25": 0.05, "0.5": 0.09,
                            "0.75": 0.12, "0.95": 0.2},
            mean_set_size=None,
        )
    }
    path = tmp_path / "summary.json"
    fileio.write_summary_json(path, summary)
    back = fileio.read_summary_json(path)
    assert back["crc"]["alpha"] == 0.1
    assert back["crc"]["mean_set_size"] is None
    assert back["crc"]["risk_quantiles"]["0.95"] == 0.2
    assert path.read_text().endswith("\n")
    path.write_text("[1, 2]\n")
    with pytest.raises(InvalidInputError, match="JSON object"):
        fileio.read_summary_json(path)


def test_count_records_round_trip(tmp_path):
    records = [("img-1", 0, 1, 3, 2), ("img-1", 1, 3, 3, 7), ("img-2", 0, 0, 1, 0)]
    path = tmp_path / "counts.csv"
    fileio.write_count_records_csv(path, records)
    assert fileio.read_count_records_csv(path) == records
    path.write_text("sample_id,lambda_index,n_matched,n_gt,set_size\n")
    with pytest.raises(InvalidInputError, match="no count records"):
        fileio.read_count_records_csv(path)
    path.write_text("sample,lambda_index,n_matched,n_gt,set_size\na,0,1,1,1\n")
    with pytest.raises(InvalidInputError, match="sample_id"):
        fileio.read_count_records_csv(path)


def test_file_digest_is_sha256(tmp_path):
    path = tmp_path / "blob.bin"
    path.write_bytes(b"gridcrc")
    assert fileio.file_digest(path) == hashlib.sha256(b"gridcrc").hexdigest()
