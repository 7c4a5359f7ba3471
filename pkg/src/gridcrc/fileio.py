"""Frozen on-disk formats: CSV tables, result records, summary JSON.

These layouts are the contract between this package and anything downstream
(plotting, external analysis), so readers validate headers exactly and fail
loudly on drift.  Floats are written with 17 significant digits, enough to
round-trip doubles bit-for-bit.

Layouts:

* loss matrix / sizes table — header ``lambda,<v0>,<v1>,...`` carrying the
  grid, then one row per sample: ``<sample_id>,<value per grid point>``.
* risk curve — ``lambda,risk,estimated`` with estimated in {true,false}.
* results — one row per (method, repetition):
  ``method,repetition,selected_index,selected_lambda,effective_level,feasible,test_risk,set_size``
  (set_size left empty when the experiment has no set-size notion).
* summary — JSON object keyed by method name.
* count records — ``sample_id,lambda_index,n_matched,n_gt,set_size``, the
  ingestion format for externally computed detection counts.
"""

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from gridcrc.core import Grid, InvalidInputError, LossMatrix, RiskCurve
from gridcrc.harness import MethodRecord, MethodSummary

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

COUNTS_HEADER = ("sample_id", "lambda_index", "n_matched", "n_gt", "set_size")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _check_header(path, found: list[str], expected: tuple[str, ...]) -> None:
    if list(found) != list(expected):
        raise InvalidInputError(
            f"{path}: bad header; expected {','.join(expected)} "
            f"but found {','.join(found)}"
        )


def _write_table(path, grid_values: np.ndarray, rows: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", *(_fmt(v) for v in grid_values)])
        for i, row in enumerate(rows):
            writer.writerow([i, *(_fmt(v) for v in row)])


def _read_table(path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "lambda" or len(header) < 2:
            found = ",".join(header) if header else "<empty file>"
            raise InvalidInputError(
                f"{path}: bad header; expected lambda,<grid values> but found {found}"
            )
        grid_values = np.array([float(v) for v in header[1:]])
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise InvalidInputError(
                    f"{path}:{lineno}: expected {len(header)} fields, found {len(row)}"
                )
            rows.append([float(v) for v in row[1:]])
    if not rows:
        raise InvalidInputError(f"{path}: table has no sample rows")
    return grid_values, np.array(rows)


def write_matrix_csv(path, matrix: LossMatrix) -> None:
    _write_table(path, matrix.grid.values, matrix.entries)


def read_matrix_csv(path, bound: float) -> LossMatrix:
    """The loss bound is not stored in the file; the caller supplies it."""
    grid_values, rows = _read_table(path)
    return LossMatrix(Grid(grid_values), bound, rows)


def write_sizes_csv(path, grid: Grid, sizes: np.ndarray) -> None:
    sizes = np.asarray(sizes)
    if sizes.ndim != 2 or sizes.shape[1] != grid.m:
        raise InvalidInputError(
            f"sizes must be 2-D with {grid.m} columns, got shape {sizes.shape}"
        )
    _write_table(path, grid.values, sizes)


def read_sizes_csv(path) -> tuple[Grid, np.ndarray]:
    grid_values, rows = _read_table(path)
    return Grid(grid_values), rows


def write_curve_csv(path, curve: RiskCurve) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "risk", "estimated"])
        flag = "true" if curve.estimated else "false"
        for lam, risk in zip(curve.grid.values, curve.values):
            writer.writerow([_fmt(lam), _fmt(risk), flag])


def read_curve_csv(path, kind: str = "true") -> RiskCurve:
    """The curve kind is not stored in the file; the caller declares it."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        _check_header(path, header or [], ("lambda", "risk", "estimated"))
        lams, risks, flags = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise InvalidInputError(f"{path}:{lineno}: expected 3 fields, found {len(row)}")
            if row[2] not in ("true", "false"):
                raise InvalidInputError(
                    f"{path}:{lineno}: estimated must be 'true' or 'false', got {row[2]!r}"
                )
            lams.append(float(row[0]))
            risks.append(float(row[1]))
            flags.append(row[2] == "true")
    if not lams:
        raise InvalidInputError(f"{path}: curve has no rows")
    if len(set(flags)) != 1:
        raise InvalidInputError(f"{path}: mixed 'estimated' flags within one curve")
    return RiskCurve(Grid(np.array(lams)), np.array(risks), kind=kind, estimated=flags[0])


def write_results_csv(path, records) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULTS_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.method,
                    r.repetition,
                    r.selected_index,
                    _fmt(r.selected_lambda),
                    _fmt(r.effective_level),
                    "true" if r.feasible else "false",
                    _fmt(r.test_risk),
                    "" if r.set_size is None else _fmt(r.set_size),
                ]
            )


def read_results_csv(path) -> list[MethodRecord]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        _check_header(path, header or [], RESULTS_HEADER)
        records = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(RESULTS_HEADER):
                raise InvalidInputError(
                    f"{path}:{lineno}: expected {len(RESULTS_HEADER)} fields, found {len(row)}"
                )
            if row[5] not in ("true", "false"):
                raise InvalidInputError(
                    f"{path}:{lineno}: feasible must be 'true' or 'false', got {row[5]!r}"
                )
            records.append(
                MethodRecord(
                    method=row[0],
                    repetition=int(row[1]),
                    selected_index=int(row[2]),
                    selected_lambda=float(row[3]),
                    effective_level=float(row[4]),
                    feasible=row[5] == "true",
                    test_risk=float(row[6]),
                    set_size=None if row[7] == "" else float(row[7]),
                )
            )
    return records


def write_summary_json(path, summary: dict[str, MethodSummary]) -> None:
    payload = {
        name: {
            "alpha": s.alpha,
            "mean_risk": s.mean_risk,
            "violation_rate": s.violation_rate,
            "risk_quantiles": s.risk_quantiles,
            "mean_set_size": s.mean_set_size,
        }
        for name, s in summary.items()
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_summary_json(path) -> dict:
    with open(path) as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict):
        raise InvalidInputError(f"{path}: summary must be a JSON object")
    return payload


def write_count_records_csv(path, records) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COUNTS_HEADER)
        for sample_id, lam_index, n_matched, n_gt, set_size in records:
            writer.writerow([sample_id, lam_index, n_matched, n_gt, set_size])


def read_count_records_csv(path) -> list[tuple[str, int, int, int, int]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        _check_header(path, header or [], COUNTS_HEADER)
        records = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(COUNTS_HEADER):
                raise InvalidInputError(
                    f"{path}:{lineno}: expected {len(COUNTS_HEADER)} fields, found {len(row)}"
                )
            records.append((row[0], int(row[1]), int(row[2]), int(row[3]), int(row[4])))
    if not records:
        raise InvalidInputError(f"{path}: no count records")
    return records


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
