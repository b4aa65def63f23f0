"""Reporting utilities (JSON run report, residual history CSV, bench table)."""

from __future__ import annotations

import json
import math
import subprocess
from pathlib import Path
from typing import Any, Iterable, Mapping

import pandas as pd

from . import __version__
from .output_contract import BENCH_REQUIRED_COLUMNS


def _repo_root() -> Path:
    return Path(__file__).resolve().parents[2]


def _resolve_git_sha(repo_root: Path) -> str:
    try:
        out = subprocess.check_output(
            ["git", "rev-parse", "--short", "HEAD"],
            cwd=str(repo_root),
            stderr=subprocess.DEVNULL,
            text=True,
        )
        return out.strip()
    except Exception:
        return ""


def _sanitize(value: Any) -> Any:
    """Replace non-finite floats with None so the output is strict JSON."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, Mapping):
        return {str(k): _sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitize(v) for v in value]
    if hasattr(value, "item"):
        return _sanitize(value.item())
    return value


def build_run_report(
    command: str, config: Mapping[str, Any], problem: Mapping[str, Any], record: Mapping[str, Any]
) -> dict[str, Any]:
    report: dict[str, Any] = {
        "tool_version": __version__,
        "git_sha": _resolve_git_sha(_repo_root()),
        "command": command,
        "config": dict(config),
        "problem": dict(problem),
    }
    report.update(record)
    return report


def write_json_report(path: str | Path, report: Mapping[str, Any]) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8") as f:
        json.dump(_sanitize(report), f, sort_keys=True, indent=2, allow_nan=False)
        f.write("\n")
    return out


def history_frame(history: Iterable[float | None]) -> pd.DataFrame:
    values = list(history)
    return pd.DataFrame({"step": range(len(values)), "rr": values})


def write_history_csv(path: str | Path, history: Iterable[float | None]) -> Path:
    """One row per step; steps with no estimate are left empty."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    history_frame(history).to_csv(out, index=False, float_format="%.17g")
    return out


def bench_frame(rows: Iterable[Mapping[str, Any]]) -> pd.DataFrame:
    df = pd.DataFrame(list(rows))
    ordered = [c for c in BENCH_REQUIRED_COLUMNS if c in df.columns]
    extra = [c for c in df.columns if c not in ordered]
    return df[ordered + extra] if len(df.columns) else df


def write_bench_csv(path: str | Path, rows: Iterable[Mapping[str, Any]]) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    bench_frame(rows).to_csv(out, index=False)
    return out


def format_bench_table(rows: Iterable[Mapping[str, Any]]) -> str:
    df = bench_frame(rows)
    if df.empty:
        return "(no runs)"
    shown = ("case", "method", "dimension", "iterations", "cpu", "rr")
    cols = [c for c in shown if c in df.columns]
    return df[cols].to_string(index=False)
