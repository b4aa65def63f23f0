import json
import math

import pandas as pd

from qkrylov import __version__
from qkrylov.report import (
    _resolve_git_sha,
    bench_frame,
    build_run_report,
    format_bench_table,
    write_bench_csv,
    write_history_csv,
    write_json_report,
)


def bench_row(method: str, dimension: str) -> dict:
    return {
        "oracle_error": None,
        "method": method,
        "case": "random8",
        "dimension": dimension,
        "iterations": 12,
        "cpu": 0.01,
        "rr": 3e-7,
        "final_true_rr": 3.1e-7,
        "converged": True,
        "operator_flops": 100,
        "total_flops": 180,
        "timing_comparable": True,
    }


def test_json_report_is_strict_and_sorted(tmp_path):
    report = build_run_report(
        "solve",
        {"method": "glqfom", "tol": 1e-6},
        {"n": 8},
        {"rr": math.inf, "rr_history": [1.0, None, math.nan, 0.5], "iterations": 3},
    )
    assert report["tool_version"] == __version__
    out = write_json_report(tmp_path / "nested" / "run.json", report)
    text = out.read_text(encoding="utf-8")
    assert "NaN" not in text and "Infinity" not in text
    data = json.loads(text)
    assert list(data) == sorted(data)
    assert data["rr"] is None
    assert data["rr_history"] == [1.0, None, None, 0.5]
    assert data["config"]["method"] == "glqfom"


def test_history_csv_has_step_and_rr(tmp_path):
    path = write_history_csv(tmp_path / "h.csv", [1.0, None, 0.125])
    df = pd.read_csv(path)
    assert list(df.columns) == ["step", "rr"]
    assert df["step"].tolist() == [0, 1, 2]
    assert math.isnan(df["rr"][1])
    assert df["rr"][2] == 0.125


def test_bench_columns_follow_contract_order(tmp_path):
    rows = [bench_row("glqgmres", "[8,2]"), bench_row("glgmres-real", "[32,8]")]
    df = bench_frame(rows)
    assert df.columns[:3].tolist() == ["case", "method", "dimension"]
    assert df.columns[-1] == "oracle_error"
    path = write_bench_csv(tmp_path / "bench.csv", rows)
    back = pd.read_csv(path)
    assert back["dimension"].tolist() == ["[8,2]", "[32,8]"]
    table = format_bench_table(rows)
    assert "glgmres-real" in table
    assert "operator_flops" not in table
    assert format_bench_table([]) == "(no runs)"


def test_git_sha_provenance(mocker, tmp_path):
    check = mocker.patch("qkrylov.report.subprocess.check_output", return_value="abc1234\n")
    assert _resolve_git_sha(tmp_path) == "abc1234"
    assert check.call_args.args[0] == ["git", "rev-parse", "--short", "HEAD"]
    check.side_effect = FileNotFoundError("git")
    assert _resolve_git_sha(tmp_path) == ""
