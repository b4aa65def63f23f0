"""Validation of run reports and bench tables."""

from __future__ import annotations

import math
import re
from typing import Iterable, List, Mapping

METHODS = (
    "glqfom",
    "glqgmres",
    "glfom-real",
    "glgmres-real",
    "qfom-stacked",
    "qgmres-stacked",
)

RUN_REQUIRED_KEYS = [
    "tool_version",
    "command",
    "config",
    "problem",
    "dimensions",
    "iterations",
    "converged",
    "status",
    "rr",
    "final_true_rr",
    "rr_history",
    "flops",
    "cpu_seconds",
]

BENCH_REQUIRED_COLUMNS = [
    "case",
    "method",
    "dimension",
    "iterations",
    "cpu",
    "rr",
    "final_true_rr",
    "converged",
    "operator_flops",
    "total_flops",
    "timing_comparable",
]

STATUSES = {"converged", "breakdown", "max_iterations"}
DIMENSION_RE = re.compile(r"^\[\d+,\d+\]$")


def _nonnegative(val) -> bool:
    try:
        num = float(val)
    except (TypeError, ValueError):
        return False
    return not math.isnan(num) and num >= 0


def validate_run_report(report: Mapping) -> List[str]:
    errors: List[str] = []
    for key in RUN_REQUIRED_KEYS:
        if key not in report:
            errors.append(f"missing key {key}")
    method = str(report.get("config", {}).get("method") or "")
    if method and method not in METHODS:
        errors.append(f"invalid method {method}")
    status = report.get("status")
    if status is not None and status not in STATUSES:
        errors.append(f"invalid status {status}")
    dims = report.get("dimensions")
    if dims is not None and (len(dims) != 2 or any(int(d) < 1 for d in dims)):
        errors.append(f"invalid dimensions {dims}")
    history = report.get("rr_history")
    iterations = report.get("iterations")
    if history is not None and iterations is not None and len(history) != int(iterations) + 1:
        errors.append(f"rr_history has {len(history)} entries for {iterations} iterations")
    for key in ("iterations", "cpu_seconds"):
        if key in report and not _nonnegative(report[key]):
            errors.append(f"invalid {key}")
    return errors


def validate_bench_rows(rows: Iterable[Mapping]) -> List[str]:
    errors: List[str] = []
    for idx, row in enumerate(rows, start=1):
        for col in BENCH_REQUIRED_COLUMNS:
            if col not in row:
                errors.append(f"row {idx}: missing column {col}")
        method = str(row.get("method") or "")
        if method not in METHODS:
            errors.append(f"row {idx}: invalid method {method}")
        dimension = str(row.get("dimension") or "")
        if not DIMENSION_RE.match(dimension):
            errors.append(f"row {idx}: invalid dimension {dimension}")
        for col in ("iterations", "cpu", "operator_flops", "total_flops"):
            if col in row and not _nonnegative(row.get(col)):
                errors.append(f"row {idx}: invalid {col}")
    return errors
