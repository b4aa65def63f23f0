# -*- coding: utf-8 -*-
"""Command-line interface for qkrylov."""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

from tqdm import tqdm

from . import __version__
from .errors import QKrylovError
from .experiment import ExperimentConfig, Problem, RunRecord, build_config, execute, load_problem
from .output_contract import METHODS, validate_bench_rows, validate_run_report
from .problems import SYLVESTER_FAMILIES, QuatImage, image_write
from .report import (
    build_run_report,
    format_bench_table,
    write_bench_csv,
    write_history_csv,
    write_json_report,
)

DEFAULT_RESTORED = "out/restored.png"
DEFAULT_BENCH_OUT = "out/bench.csv"
DEFAULT_BENCH_METHODS = ("glqgmres", "glqfom", "glgmres-real", "glfom-real")

INPUT_ERRORS = (QKrylovError, ValueError, OSError)


def _add_source_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--matrix", type=str, default=None, help="MatrixMarket file for A0.")
    p.add_argument(
        "--random",
        nargs="+",
        metavar="KEY=INT",
        default=None,
        help="Random seeded problem, e.g. --random n=8 m=2.",
    )


def _add_run_args(p: argparse.ArgumentParser, *, tol_help: str = "default 1e-6") -> None:
    p.add_argument("--method", type=str, default=None, choices=METHODS, help="Solver method.")
    p.add_argument(
        "--tol", type=float, default=None, help=f"Relative residual tolerance ({tol_help})."
    )
    p.add_argument("--maxit", type=int, default=None, help="Iteration cap (default 3000).")
    p.add_argument("--seed", type=int, default=None, help="Philox seed (default 0).")
    p.add_argument("--out", type=str, default=None, help="JSON report path.")
    p.add_argument("--history", type=str, default=None, help="Residual history CSV path.")
    p.add_argument("--profile", type=str, default=None, help="Profile in config/experiments.yaml.")
    p.add_argument(
        "--profiles-file", type=str, default=None, help="Alternative profiles YAML file."
    )


def add_solve_parser(subparsers: argparse._SubParsersAction) -> argparse.ArgumentParser:
    p = subparsers.add_parser(
        "solve",
        help="Solve A X = B with a global Krylov method.",
        description="Solve A X = B for A = a0 A0 + a1 A0 i + a2 A0 j + a3 A0 k or a random A.",
    )
    _add_source_args(p)
    p.add_argument("--m", type=int, default=None, help="Number of right-hand side columns.")
    p.add_argument("--coeffs", type=str, default=None, help="a0,a1,a2,a3 multipliers of A0.")
    _add_run_args(p)
    p.set_defaults(func=solve_command)
    return p


def add_sylvester_parser(subparsers: argparse._SubParsersAction) -> argparse.ArgumentParser:
    p = subparsers.add_parser(
        "sylvester",
        help="Solve A X + X B = C.",
        description="Quaternion Sylvester equation with a tridiagonal B family.",
    )
    _add_source_args(p)
    p.add_argument("--m", type=int, default=None, help="Order of B (columns of X).")
    p.add_argument(
        "--family", type=str, default=None, choices=sorted(SYLVESTER_FAMILIES), help="B family."
    )
    p.add_argument("--planted", action="store_true", help="Build C from a known solution.")
    _add_run_args(p)
    p.set_defaults(func=sylvester_command)
    return p


def add_deblur_parser(subparsers: argparse._SubParsersAction) -> argparse.ArgumentParser:
    p = subparsers.add_parser(
        "deblur",
        help="Restore a blurred colour image.",
        description="Blur an RGB image with A and restore it by solving A X = B.",
    )
    p.add_argument("--image", type=str, default=None, help="8-bit RGB PNG.")
    p.add_argument("--synthetic", type=int, default=None, help="Use a synthetic N x N image.")
    p.add_argument(
        "--blur",
        type=str,
        default=None,
        help="uniform:s=INT | gaussian:r=INT,sigma=FLOAT | multichannel (default uniform:s=4).",
    )
    p.add_argument(
        "--restored", type=str, default=None, help=f"Output PNG (default {DEFAULT_RESTORED})."
    )
    _add_run_args(p, tol_help="default 1e-2")
    p.set_defaults(func=deblur_command)
    return p


def add_bench_parser(subparsers: argparse._SubParsersAction) -> argparse.ArgumentParser:
    p = subparsers.add_parser(
        "bench",
        help="Compare methods on one problem.",
        description="Run several methods on one seeded problem and write a comparison CSV.",
    )
    _add_source_args(p)
    p.add_argument("--m", type=int, default=None, help="Number of right-hand side columns.")
    p.add_argument("--coeffs", type=str, default=None, help="a0,a1,a2,a3 multipliers of A0.")
    p.add_argument(
        "--method",
        dest="methods",
        type=str,
        default=None,
        help=f"Comma-separated methods (default {','.join(DEFAULT_BENCH_METHODS)}).",
    )
    p.add_argument("--tol", type=float, default=None, help="Relative residual tolerance.")
    p.add_argument("--maxit", type=int, default=None, help="Iteration cap (default 3000).")
    p.add_argument("--seed", type=int, default=None, help="Philox seed (default 0).")
    p.add_argument("--parallel", action="store_true", help="Run methods concurrently.")
    p.add_argument("--oracle", action="store_true", help="Add a dense direct-solve error column.")
    p.add_argument(
        "--out", type=str, default=None, help=f"Bench CSV (default {DEFAULT_BENCH_OUT})."
    )
    p.add_argument("--profile", type=str, default=None, help="Profile in config/experiments.yaml.")
    p.add_argument(
        "--profiles-file", type=str, default=None, help="Alternative profiles YAML file."
    )
    p.set_defaults(func=bench_command)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkrylov",
        description="Structure-preserving global Krylov solvers for quaternion matrix equations.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", action="store_true", help="Debug logging on stderr.")
    parser.add_argument("--quiet", action="store_true", help="No progress bars.")

    subparsers = parser.add_subparsers(dest="command", required=False)
    add_solve_parser(subparsers)
    add_sylvester_parser(subparsers)
    add_deblur_parser(subparsers)
    add_bench_parser(subparsers)
    return parser


def _input_label(args: argparse.Namespace) -> str:
    return str(getattr(args, "matrix", None) or getattr(args, "image", None) or "input")


def _fail(args: argparse.Namespace, exc: BaseException) -> int:
    label = _input_label(args)
    message = str(exc)
    if label != "input" and label not in message:
        message = f"{label}: {message}"
    print(f"error: {message}", file=sys.stderr)
    return 1


def _summary(record: RunRecord) -> str:
    rr = "n/a" if record.rr is None else f"{record.rr:.3e}"
    return (
        f"{record.method} {record.case} dim={record.dimension_label()} IT={record.iterations} "
        f"CPU={record.cpu_seconds:.3f}s RR={rr} true={record.final_true_rr:.3e} "
        f"status={record.status}"
    )


def _emit(cfg: ExperimentConfig, problem: Problem, record: RunRecord) -> int:
    report = build_run_report(cfg.command, cfg.echo(), problem.description, record.to_dict())
    errors = validate_run_report(report)
    if errors:
        for err in errors:
            print(f"error: {err}", file=sys.stderr)
        return 1
    if cfg.out:
        write_json_report(cfg.out, report)
        print(f"Report: {cfg.out}")
    if cfg.history:
        write_history_csv(cfg.history, record.rr_history)
        print(f"History: {cfg.history}")
    return 0


def _run_single(args: argparse.Namespace) -> tuple[int, ExperimentConfig | None, RunRecord | None]:
    try:
        cfg = build_config(args)
        problem = load_problem(cfg)
        X, record = execute(cfg, cfg.method, problem)
    except INPUT_ERRORS as exc:
        return _fail(args, exc), None, None
    print(_summary(record))
    if record.solution_error is not None:
        print(f"Planted solution error: {record.solution_error:.3e}")
    if problem.image is not None and record.metrics and record.blurred_metrics:
        blurred, restored = record.blurred_metrics, record.metrics
        print("          PSNR     SSIM    CPU      RR")
        print(f"blurred   {blurred['psnr']:7.3f}  {blurred['ssim']:.4f}  -        -")
        print(
            f"restored  {restored['psnr']:7.3f}  {restored['ssim']:.4f}  "
            f"{record.cpu_seconds:.3f}  {restored['rr']:.3e}"
        )
        target = Path(cfg.restored or DEFAULT_RESTORED)
        try:
            image_write(target, QuatImage.from_matrix(X))
        except INPUT_ERRORS as exc:
            return _fail(args, exc), cfg, record
        print(f"Restored image: {target}")
    code = _emit(cfg, problem, record)
    if code:
        return code, cfg, record
    return (0 if record.converged else 2), cfg, record


def solve_command(args: argparse.Namespace) -> int:
    return _run_single(args)[0]


def sylvester_command(args: argparse.Namespace) -> int:
    return _run_single(args)[0]


def deblur_command(args: argparse.Namespace) -> int:
    return _run_single(args)[0]


def bench_command(args: argparse.Namespace) -> int:
    try:
        cfg = build_config(args)
        problem = load_problem(cfg)
    except INPUT_ERRORS as exc:
        return _fail(args, exc)
    methods = cfg.methods or list(DEFAULT_BENCH_METHODS)
    quiet = bool(getattr(args, "quiet", False))

    try:
        if cfg.parallel:
            with ThreadPoolExecutor(max_workers=len(methods)) as pool:
                futures = [
                    pool.submit(execute, cfg, method, problem, timing_comparable=False)
                    for method in methods
                ]
                records = [f.result()[1] for f in tqdm(futures, desc="bench", disable=quiet)]
        else:
            records = [
                execute(cfg, method, problem)[1]
                for method in tqdm(methods, desc="bench", disable=quiet)
            ]
    except INPUT_ERRORS as exc:
        return _fail(args, exc)

    rows = [r.bench_row() for r in records]
    errors = validate_bench_rows(rows)
    if errors:
        for err in errors:
            print(f"error: {err}", file=sys.stderr)
        return 1
    out = cfg.out or DEFAULT_BENCH_OUT
    write_bench_csv(out, rows)
    print(format_bench_table(rows))
    print(f"Bench: {out}")
    return 0 if all(r.converged for r in records) else 2


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if not hasattr(args, "func"):
        parser.print_help()
        return 0
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
