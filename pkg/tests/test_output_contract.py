import json
from pathlib import Path

from qkrylov.output_contract import (
    RUN_REQUIRED_KEYS,
    validate_bench_rows,
    validate_run_report,
)


def valid_report() -> dict:
    return {
        "tool_version": "0.3.0",
        "git_sha": "",
        "command": "solve",
        "config": {"method": "glqgmres", "tol": 1e-6},
        "problem": {"source": "random", "n": 8, "m": 2},
        "dimensions": [8, 2],
        "iterations": 2,
        "converged": True,
        "status": "converged",
        "rr": 1e-7,
        "final_true_rr": 1.1e-7,
        "rr_history": [1.0, 0.01, 1e-7],
        "flops": {"operator": 10, "inner": 5, "update": 5, "total": 20},
        "cpu_seconds": 0.002,
    }


def test_valid_run_report():
    assert validate_run_report(valid_report()) == []


def test_run_report_problems_are_listed():
    report = valid_report()
    del report["flops"]
    report["status"] = "stalled"
    report["dimensions"] = [0, 2]
    report["rr_history"] = [1.0]
    report["config"]["method"] = "cg"
    errors = validate_run_report(report)
    assert "missing key flops" in errors
    assert "invalid status stalled" in errors
    assert "invalid dimensions [0, 2]" in errors
    assert "invalid method cg" in errors
    assert any("rr_history has 1 entries" in e for e in errors)


def test_bench_rows():
    row = {
        "case": "random8",
        "method": "glfom-real",
        "dimension": "[32,8]",
        "iterations": 4,
        "cpu": 0.1,
        "rr": 1e-7,
        "final_true_rr": 1e-7,
        "converged": True,
        "operator_flops": 10,
        "total_flops": 40,
        "timing_comparable": False,
    }
    assert validate_bench_rows([row]) == []
    bad = dict(row, dimension="32x8", cpu=float("nan"))
    del bad["rr"]
    errors = validate_bench_rows([row, bad])
    assert errors == [
        "row 2: missing column rr",
        "row 2: invalid dimension 32x8",
        "row 2: invalid cpu",
    ]


def test_run_report_schema_matches_required_keys():
    root = Path(__file__).resolve().parents[1]
    schema_path = root / "schemas" / "run_report.schema.json"
    schema = json.loads(schema_path.read_text(encoding="utf-8"))
    assert set(schema["required"]) == set(RUN_REQUIRED_KEYS)
