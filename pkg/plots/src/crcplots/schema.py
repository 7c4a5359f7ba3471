"""Schema-only parsers for the producer's frozen CSV/JSON formats.

Every reader validates the exact header (or key set) it expects and converts
tokens to Python values — nothing here aggregates, averages, or otherwise
computes statistics.  A mismatch raises :class:`SchemaError` naming the
offending column or key, so drift in the producer's formats fails loudly
instead of rendering garbage.
"""

import csv
import json


class SchemaError(Exception):
    """An input file does not match the frozen schema."""


RESULTS_HEADER = (
    "method",
    "repetition",
    "selected_index",
    "selected_lambda",
    "effective_level",
    "feasible",
    "test_risk",
    "set_size",
)

CURVE_HEADER = ("lambda", "risk", "estimated")

PHASE_HEADER = (
    "n",
    "m",
    "analytic_risk",
    "mc_risk",
    "mc_std_error",
    "controlled",
    "control_bound",
    "violation_bound",
)

CORRECTIONS_HEADER = (
    "kind",
    "m",
    "n",
    "bound",
    "sigma",
    "delta",
    "amount",
    "terms",
    "winner",
)

SUMMARY_KEYS = ("alpha", "mean_risk", "violation_rate", "risk_quantiles", "mean_set_size")

SELECTION_KEYS = ("method", "alpha", "index", "lambda", "effective_level", "feasible")


def _check_header(path, got, want) -> None:
    for i, name in enumerate(want):
        if i >= len(got) or got[i] != name:
            found = got[i] if i < len(got) else "<missing>"
            raise SchemaError(
                f"{path}: column {i + 1} should be {name!r}, found {found!r}"
            )
    if len(got) > len(want):
        raise SchemaError(f"{path}: unexpected extra column {got[len(want)]!r}")


def _rows(path, header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None:
            raise SchemaError(f"{path}: empty file")
        _check_header(path, first, header)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise SchemaError(
                    f"{path}:{lineno}: expected {len(header)} fields, found {len(row)}"
                )
            yield lineno, row


def _float(path, lineno, column, token) -> float:
    try:
        return float(token)
    except ValueError:
        raise SchemaError(
            f"{path}:{lineno}: column {column!r} is not a number: {token!r}"
        ) from None


def _int(path, lineno, column, token) -> int:
    try:
        return int(token)
    except ValueError:
        raise SchemaError(
            f"{path}:{lineno}: column {column!r} is not an integer: {token!r}"
        ) from None


def _bool(path, lineno, column, token) -> bool:
    if token == "true":
        return True
    if token == "false":
        return False
    raise SchemaError(
        f"{path}:{lineno}: column {column!r} must be 'true' or 'false', got {token!r}"
    )


def _optional_float(path, lineno, column, token):
    return None if token == "" else _float(path, lineno, column, token)


def read_results_csv(path) -> list[dict]:
    """Rows of a per-repetition results table, one dict per row."""
    out = []
    for lineno, row in _rows(path, RESULTS_HEADER):
        out.append(
            {
                "method": row[0],
                "repetition": _int(path, lineno, "repetition", row[1]),
                "selected_index": _int(path, lineno, "selected_index", row[2]),
                "selected_lambda": _float(path, lineno, "selected_lambda", row[3]),
                "effective_level": _float(path, lineno, "effective_level", row[4]),
                "feasible": _bool(path, lineno, "feasible", row[5]),
                "test_risk": _float(path, lineno, "test_risk", row[6]),
                "set_size": _optional_float(path, lineno, "set_size", row[7]),
            }
        )
    return out


def read_curve_csv(path) -> dict:
    """A risk curve: parallel lambda/risk lists plus the estimated flag."""
    lams: list[float] = []
    risks: list[float] = []
    flags: set[bool] = set()
    for lineno, row in _rows(path, CURVE_HEADER):
        lams.append(_float(path, lineno, "lambda", row[0]))
        risks.append(_float(path, lineno, "risk", row[1]))
        flags.add(_bool(path, lineno, "estimated", row[2]))
    if not lams:
        raise SchemaError(f"{path}: no rows")
    if len(flags) != 1:
        raise SchemaError(f"{path}: column 'estimated' mixes true and false")
    return {"lambda": lams, "risk": risks, "estimated": flags.pop()}


def read_phase_csv(path) -> list[dict]:
    """Cells of a counterexample phase table."""
    out = []
    for lineno, row in _rows(path, PHASE_HEADER):
        out.append(
            {
                "n": _int(path, lineno, "n", row[0]),
                "m": _int(path, lineno, "m", row[1]),
                "analytic_risk": _float(path, lineno, "analytic_risk", row[2]),
                "mc_risk": _optional_float(path, lineno, "mc_risk", row[3]),
                "mc_std_error": _optional_float(path, lineno, "mc_std_error", row[4]),
                "controlled": _bool(path, lineno, "controlled", row[5]),
                "control_bound": _float(path, lineno, "control_bound", row[6]),
                "violation_bound": _float(path, lineno, "violation_bound", row[7]),
            }
        )
    if not out:
        raise SchemaError(f"{path}: no rows")
    return out


def read_corrections_csv(path) -> list[dict]:
    """Rows of a correction-amount table."""
    out = []
    for lineno, row in _rows(path, CORRECTIONS_HEADER):
        out.append(
            {
                "kind": row[0],
                "m": _int(path, lineno, "m", row[1]),
                "n": _int(path, lineno, "n", row[2]),
                "bound": _float(path, lineno, "bound", row[3]),
                "sigma": _optional_float(path, lineno, "sigma", row[4]),
                "delta": _optional_float(path, lineno, "delta", row[5]),
                "amount": _float(path, lineno, "amount", row[6]),
                "terms": row[7],
                "winner": row[8] or None,
            }
        )
    if not out:
        raise SchemaError(f"{path}: no rows")
    return out


def _load_json(path):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON ({exc})") from None


def read_summary_json(path) -> dict:
    """Per-method summary statistics, keyed by method name."""
    payload = _load_json(path)
    if not isinstance(payload, dict):
        raise SchemaError(f"{path}: expected a JSON object keyed by method")
    for method, stats in payload.items():
        if not isinstance(stats, dict):
            raise SchemaError(f"{path}: entry for method {method!r} is not an object")
        for key in SUMMARY_KEYS:
            if key not in stats:
                raise SchemaError(
                    f"{path}: missing key {key!r} for method {method!r}"
                )
    return payload


def read_selection_json(path) -> dict:
    """One selection record as written by the producer's select command."""
    payload = _load_json(path)
    if not isinstance(payload, dict):
        raise SchemaError(f"{path}: expected a JSON object")
    for key in SELECTION_KEYS:
        if key not in payload:
            raise SchemaError(f"{path}: missing key {key!r}")
    return payload
