"""Schema-only parsers: round trips on shipped artifacts, loud drift errors."""

import json
from pathlib import Path

import pytest

from crcplots.schema import (
    SchemaError,
    read_corrections_csv,
    read_curve_csv,
    read_phase_csv,
    read_results_csv,
    read_selection_json,
    read_summary_json,
)

EXAMPLES = Path(__file__).resolve().parent.parent / "examples"


def test_results_roundtrip():
    rows = read_results_csv(EXAMPLES / "runs" / "bump-small" / "results.csv")
    assert len(rows) == 4 * 80  # four methods, eighty repetitions
    first = rows[0]
    assert first["method"] == "crc"
    assert isinstance(first["repetition"], int)
    assert isinstance(first["selected_index"], int)
    assert isinstance(first["feasible"], bool)
    assert isinstance(first["test_risk"], float)
    assert first["set_size"] is None  # the bump stream has no prediction sets
    methods = {r["method"] for r in rows}
    assert methods == {"crc", "crc-nm", "loss-mono", "risk-mono"}


def test_results_with_set_sizes():
    rows = read_results_csv(EXAMPLES / "runs" / "multilabel-small" / "results.csv")
    assert all(isinstance(r["set_size"], float) for r in rows)


def test_renamed_column_is_named_in_the_error(tmp_path):
    source = (EXAMPLES / "runs" / "bump-small" / "results.csv").read_text()
    drifted = tmp_path / "results.csv"
    drifted.write_text(source.replace("test_risk", "risk", 1))
    with pytest.raises(SchemaError, match="'test_risk'"):
        read_results_csv(drifted)


def test_extra_column_is_rejected(tmp_path):
    source = (EXAMPLES / "runs" / "bump-small" / "results.csv").read_text()
    lines = source.splitlines()
    lines[0] += ",note"
    drifted = tmp_path / "results.csv"
    drifted.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError, match="extra column 'note'"):
        read_results_csv(drifted)


def test_bad_token_names_the_column(tmp_path):
    bad = tmp_path / "results.csv"
    bad.write_text(
        "method,repetition,selected_index,selected_lambda,effective_level,"
        "feasible,test_risk,set_size\n"
        "crc,0,1,0.5,0.1,true,oops,\n"
    )
    with pytest.raises(SchemaError, match="'test_risk' is not a number: 'oops'"):
        read_results_csv(bad)


def test_empty_file_is_an_error(tmp_path):
    empty = tmp_path / "results.csv"
    empty.write_text("")
    with pytest.raises(SchemaError, match="empty file"):
        read_results_csv(empty)


def test_curve_roundtrip():
    curve = read_curve_csv(EXAMPLES / "curves" / "empirical.csv")
    assert len(curve["lambda"]) == len(curve["risk"]) == 64
    assert curve["estimated"] is False
    assert curve["lambda"] == sorted(curve["lambda"])


def test_curve_mixed_estimated_flag(tmp_path):
    bad = tmp_path / "curve.csv"
    bad.write_text("lambda,risk,estimated\n0,0.5,true\n1,0.4,false\n")
    with pytest.raises(SchemaError, match="'estimated' mixes"):
        read_curve_csv(bad)


def test_curve_bad_bool(tmp_path):
    bad = tmp_path / "curve.csv"
    bad.write_text("lambda,risk,estimated\n0,0.5,maybe\n")
    with pytest.raises(SchemaError, match="'estimated' must be 'true' or 'false'"):
        read_curve_csv(bad)


def test_phase_roundtrip():
    cells = read_phase_csv(EXAMPLES / "phase" / "phase.csv")
    assert len(cells) == 15  # five n values, three m values
    assert {c["m"] for c in cells} == {10, 100, 1000}
    for cell in cells:
        assert isinstance(cell["controlled"], bool)
        assert cell["mc_risk"] is not None  # the table was built with trials > 0


def test_corrections_roundtrip():
    rows = read_corrections_csv(EXAMPLES / "corrections" / "hoeffding-vs-n.csv")
    assert [r["n"] for r in rows] == [500, 1000, 2000, 5000, 10000, 20000]
    assert all(r["kind"] == "hoeffding" and r["sigma"] is None for r in rows)
    rows = read_corrections_csv(EXAMPLES / "corrections" / "bernstein-vs-n.csv")
    assert all(r["sigma"] == 0.3 for r in rows)
    assert all(isinstance(r["amount"], float) for r in rows)


def test_summary_roundtrip():
    summary = read_summary_json(EXAMPLES / "runs" / "bump-small" / "summary.json")
    assert set(summary) == {"crc", "crc-nm", "loss-mono", "risk-mono"}
    assert summary["crc"]["mean_set_size"] is None
    assert "0.5" in summary["crc"]["risk_quantiles"]


def test_summary_missing_key_is_named(tmp_path):
    payload = json.loads(
        (EXAMPLES / "runs" / "bump-small" / "summary.json").read_text()
    )
    del payload["crc"]["mean_risk"]
    bad = tmp_path / "summary.json"
    bad.write_text(json.dumps(payload))
    with pytest.raises(SchemaError, match="missing key 'mean_risk' for method 'crc'"):
        read_summary_json(bad)


def test_selection_roundtrip():
    sel = read_selection_json(EXAMPLES / "selections" / "crc-nm.json")
    assert sel["method"] == "crc-nm"
    assert sel["feasible"] is True
    assert 0 <= sel["index"] < 64


def test_selection_missing_key(tmp_path):
    bad = tmp_path / "sel.json"
    bad.write_text(json.dumps({"method": "crc", "alpha": 0.1}))
    with pytest.raises(SchemaError, match="missing key 'index'"):
        read_selection_json(bad)


def test_invalid_json_is_a_schema_error(tmp_path):
    bad = tmp_path / "sel.json"
    bad.write_text("{not json")
    with pytest.raises(SchemaError, match="invalid JSON"):
        read_selection_json(bad)
