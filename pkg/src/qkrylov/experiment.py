"""Experiment assembly: configuration, problem construction and method dispatch."""

from __future__ import annotations

import argparse
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import scipy.linalg

from .baseline import RealBlockProblem, gl_fom_real, gl_gmres_real
from .errors import DimensionMismatch
from .output_contract import METHODS
from .problems import (
    EXAMPLE_COEFFS,
    RNG_ALGORITHM,
    blur_matrix,
    build_test_problem,
    compute_metrics,
    image_read,
    make_rng,
    parse_blur_spec,
    parse_matrix_market,
    random_problem,
    stack_columns,
    sylvester_problem,
    synthetic_image,
)
from .problems.generators import random_coefficient, scaled_copies
from .problems.images import QuatImage
from .profiles import apply_profile, load_profiles
from .qblock import matrix_operator
from .qcore import (
    QMatrix,
    counterpart_column,
    fro_norm,
    from_counterpart_column,
    qmat_mul,
    real_counterpart,
)
from .qsolve import (
    DEFAULT_MAXIT,
    DEFAULT_TOL,
    SolverConfig,
    SolveReport,
    krylov_solve,
    sylvester_operator,
)

SOURCES = ("matrixmarket", "random", "sylvester", "deblur")
DEBLUR_TOL = 1e-2
DEFAULT_BLUR = "uniform:s=4"
DEFAULT_SYNTHETIC = 32
ORACLE_MAX_ORDER = 2000
# diagonal shift of random Sylvester coefficients, clear of the spectrum of every B family
SYLVESTER_SHIFT = 10.0


@dataclass
class ExperimentConfig:
    command: str
    source: str
    method: str = "glqgmres"
    methods: list[str] = field(default_factory=list)
    matrix: str | None = None
    n: int | None = None
    m: int = 3
    coeffs: tuple[float, float, float, float] = EXAMPLE_COEFFS
    family: str = "ibm32"
    planted: bool = False
    image: str | None = None
    synthetic: int | None = None
    blur: str = DEFAULT_BLUR
    tol: float = DEFAULT_TOL
    maxit: int = DEFAULT_MAXIT
    seed: int = 0
    out: str | None = None
    history: str | None = None
    restored: str | None = None
    parallel: bool = False
    oracle: bool = False
    profile: str | None = None

    def __post_init__(self) -> None:
        if self.source not in SOURCES:
            raise ValueError(f"unknown problem source {self.source!r}")
        for method in self.methods or [self.method]:
            if method not in METHODS:
                raise ValueError(f"unknown method {method!r}; use one of {', '.join(METHODS)}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.maxit < 1:
            raise ValueError(f"maxit must be at least 1, got {self.maxit}")
        if self.m < 1:
            raise ValueError(f"m must be positive, got {self.m}")

    def solver_config(self, method: str | None = None) -> SolverConfig:
        return SolverConfig(tol=self.tol, maxit=self.maxit, method=method or self.method)

    def echo(self) -> dict[str, Any]:
        data = asdict(self)
        data["coeffs"] = list(self.coeffs)
        return data


@dataclass
class Problem:
    case: str
    coefficient: QMatrix
    rhs: QMatrix
    right: QMatrix | None = None
    reference: QMatrix | None = None
    image: QuatImage | None = None
    description: dict[str, Any] = field(default_factory=dict)


@dataclass
class RunRecord:
    case: str
    method: str
    dimensions: list[int]
    iterations: int
    cpu_seconds: float
    rr: float | None
    final_true_rr: float
    converged: bool
    status: str
    rr_history: list[float | None]
    residual_checks: list[dict[str, float]]
    flops: dict[str, int]
    operator_flops: int
    breakdown_step: int | None
    singular_steps: list[int]
    timing_comparable: bool = True
    metrics: dict[str, float] | None = None
    blurred_metrics: dict[str, float] | None = None
    oracle_error: float | None = None
    solution_error: float | None = None

    @classmethod
    def from_report(cls, case: str, report: SolveReport) -> "RunRecord":
        return cls(
            case=case,
            method=report.method,
            dimensions=list(report.dimensions),
            iterations=report.iterations,
            cpu_seconds=report.wall_seconds,
            rr=report.rr,
            final_true_rr=report.final_true_rr,
            converged=report.converged,
            status=report.status,
            rr_history=list(report.rr_history),
            residual_checks=list(report.residual_checks),
            flops=report.flops.to_dict(),
            operator_flops=report.operator_flops,
            breakdown_step=report.breakdown_step,
            singular_steps=list(report.singular_steps),
        )

    def dimension_label(self) -> str:
        return "[" + ",".join(str(d) for d in self.dimensions) + "]"

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def bench_row(self) -> dict[str, Any]:
        return {
            "case": self.case,
            "method": self.method,
            "dimension": self.dimension_label(),
            "iterations": self.iterations,
            "cpu": self.cpu_seconds,
            "rr": self.rr,
            "final_true_rr": self.final_true_rr,
            "converged": self.converged,
            "operator_flops": self.operator_flops,
            "total_flops": self.flops["total"],
            "timing_comparable": self.timing_comparable,
            "oracle_error": self.oracle_error,
        }


def parse_random_spec(tokens: list[str] | None) -> dict[str, int]:
    """``["n=8", "m=2"]`` -> ``{"n": 8, "m": 2}``."""
    out: dict[str, int] = {}
    for token in tokens or []:
        key, sep, value = token.partition("=")
        if not sep or key not in ("n", "m"):
            raise ValueError(f"--random expects n=INT m=INT, got {token!r}")
        try:
            out[key] = int(value)
        except ValueError:
            raise ValueError(f"--random value {token!r} is not an integer") from None
        if out[key] < 1:
            raise ValueError(f"--random {key} must be positive")
    if "n" not in out:
        raise ValueError("--random needs n=INT")
    return out


def parse_coeffs(text: str | list | tuple | None) -> tuple[float, float, float, float]:
    if text is None or text == "":
        return EXAMPLE_COEFFS
    parts = text if isinstance(text, (list, tuple)) else str(text).split(",")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError:
        raise ValueError(f"--coeffs expects four numbers, got {text!r}") from None
    if len(values) != 4:
        raise ValueError(f"--coeffs expects four numbers, got {len(values)}")
    return values  # type: ignore[return-value]


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge CLI arguments over the selected profile and defaults."""
    raw = {k: v for k, v in vars(args).items() if k != "func"}
    raw = apply_profile(raw.get("profile"), load_profiles(raw.get("profiles_file")), raw)
    command = str(raw.get("command"))

    random_spec = raw.get("random")
    if isinstance(random_spec, dict):
        random_spec = [f"{k}={v}" for k, v in random_spec.items()]
    elif isinstance(random_spec, str):
        random_spec = random_spec.split()
    sizes = parse_random_spec(random_spec) if random_spec else {}
    matrix = raw.get("matrix") or None

    if command == "deblur":
        source = "deblur"
        if raw.get("image") and raw.get("synthetic"):
            raise ValueError("use either --image or --synthetic, not both")
    else:
        if bool(matrix) == bool(sizes):
            raise ValueError(
                "give exactly one problem source: --matrix PATH or --random n=INT m=INT"
            )
        if command == "sylvester":
            source = "sylvester"
        else:
            source = "matrixmarket" if matrix else "random"

    methods_raw = raw.get("methods") or []
    if isinstance(methods_raw, str):
        methods_raw = methods_raw.split(",")
    methods = [m.strip() for m in methods_raw if m and m.strip()]

    default_tol = DEBLUR_TOL if command == "deblur" else DEFAULT_TOL
    m_value = sizes.get("m") or raw.get("m") or 3
    return ExperimentConfig(
        command=command,
        source=source,
        method=raw.get("method") or "glqgmres",
        methods=methods,
        matrix=str(matrix) if matrix else None,
        n=sizes.get("n"),
        m=int(m_value),
        coeffs=parse_coeffs(raw.get("coeffs")),
        family=raw.get("family") or "ibm32",
        planted=bool(raw.get("planted")),
        image=raw.get("image") or None,
        synthetic=raw.get("synthetic") or None,
        blur=raw.get("blur") or DEFAULT_BLUR,
        tol=float(raw.get("tol") or default_tol),
        maxit=int(raw.get("maxit") or DEFAULT_MAXIT),
        seed=int(raw.get("seed") or 0),
        out=raw.get("out") or None,
        history=raw.get("history") or None,
        restored=raw.get("restored") or None,
        parallel=bool(raw.get("parallel")),
        oracle=bool(raw.get("oracle")),
        profile=raw.get("profile") or None,
    )


def load_problem(cfg: ExperimentConfig) -> Problem:
    """Assemble the problem a config describes; missing matrix files raise FileNotFoundError."""
    desc: dict[str, Any] = {"source": cfg.source, "seed": cfg.seed, "rng": RNG_ALGORITHM}
    if cfg.source == "deblur":
        if cfg.image:
            image = image_read(cfg.image)
        else:
            image = synthetic_image(cfg.synthetic or DEFAULT_SYNTHETIC)
        spec = parse_blur_spec(cfg.blur)
        A = blur_matrix(spec, image.height)
        B = qmat_mul(A, image.matrix)
        name = Path(cfg.image).stem if cfg.image else f"synthetic{image.height}x{image.width}"
        desc.update(
            {"image": name, "blur": spec.label(), "n": image.height, "m": image.width}
        )
        return Problem(
            case=name, coefficient=A, rhs=B, reference=image.matrix, image=image, description=desc
        )

    if cfg.matrix:
        path = Path(cfg.matrix)
        if not path.exists():
            raise FileNotFoundError(f"matrix file not found: {path}")
        A0 = parse_matrix_market(path)
        case = path.stem
        desc["matrix"] = path.name
    else:
        A0 = None
        case = f"random{cfg.n}"

    if cfg.source == "sylvester":
        rng = make_rng(cfg.seed)
        if A0 is not None:
            A = scaled_copies(A0, EXAMPLE_COEFFS)
        else:
            A = random_coefficient(int(cfg.n or 1), rng, shift=SYLVESTER_SHIFT)
        sp_problem = sylvester_problem(A, cfg.m, cfg.family, planted=cfg.planted, rng=rng)
        desc.update(
            {
                "n": A.n,
                "m": cfg.m,
                "family": cfg.family,
                "planted": cfg.planted,
                "coeffs": list(EXAMPLE_COEFFS),
            }
        )
        return Problem(
            case=f"{case}-{cfg.family}",
            coefficient=A,
            rhs=sp_problem.C,
            right=sp_problem.B,
            reference=sp_problem.planted,
            description=desc,
        )

    if A0 is not None:
        A, B = build_test_problem(A0, cfg.coeffs, m=cfg.m, seed=cfg.seed)
        desc["coeffs"] = list(cfg.coeffs)
    else:
        A, B = random_problem(int(cfg.n or 1), cfg.m, seed=cfg.seed)
    desc.update({"n": A.n, "m": cfg.m})
    return Problem(case=case, coefficient=A, rhs=B, description=desc)


def run_method(method: str, problem: Problem, cfg: SolverConfig) -> tuple[QMatrix, SolveReport]:
    """Run one named method on ``problem`` and return the quaternion solution."""
    A, B, right = problem.coefficient, problem.rhs, problem.right
    if method in ("glqfom", "glqgmres"):
        variant = "fom" if method == "glqfom" else "gmres"
        if right is not None:
            op = sylvester_operator(A, right, cfg.workers)
        else:
            op = matrix_operator(A, B.m, cfg.workers)
        return krylov_solve(op, B, None, cfg, variant=variant, method=method)
    if method in ("glfom-real", "glgmres-real"):
        if right is not None:
            P = RealBlockProblem.from_sylvester(A, right, B)
        else:
            P = RealBlockProblem.from_quaternion(A, B)
        solver = gl_fom_real if method == "glfom-real" else gl_gmres_real
        Y, report = solver(P, None, cfg)
        return P.to_quaternion(Y), report
    if method in ("qfom-stacked", "qgmres-stacked"):
        if right is not None:
            raise ValueError("stacked methods apply to A X = B only")
        system = stack_columns(A, B)
        variant = "fom" if method == "qfom-stacked" else "gmres"
        x, report = krylov_solve(
            system.operator, system.rhs, None, cfg, variant=variant, method=method
        )
        return system.unstack(x), report
    raise ValueError(f"unknown method {method!r}")


def oracle_solution(problem: Problem) -> QMatrix | None:
    """Dense LU solve of the real counterpart system; ``None`` when not applicable."""
    A = problem.coefficient
    if problem.right is not None or 4 * A.n > ORACLE_MAX_ORDER:
        return None
    lu = scipy.linalg.lu_factor(np.asarray(real_counterpart(A.dense())))
    return from_counterpart_column(scipy.linalg.lu_solve(lu, counterpart_column(problem.rhs)))


def execute(
    cfg: ExperimentConfig, method: str, problem: Problem, *, timing_comparable: bool = True
) -> tuple[QMatrix, RunRecord]:
    X, report = run_method(method, problem, cfg.solver_config(method))
    record = RunRecord.from_report(problem.case, report)
    record.timing_comparable = timing_comparable
    if problem.image is not None:
        original = problem.image
        record.metrics = compute_metrics(original, QuatImage.from_matrix(X)).to_dict()
        record.blurred_metrics = compute_metrics(
            original, QuatImage.from_matrix(problem.rhs)
        ).to_dict()
    elif problem.reference is not None:
        record.solution_error = fro_norm(X - problem.reference) / fro_norm(problem.reference)
    if cfg.oracle:
        exact = oracle_solution(problem)
        if exact is not None:
            if exact.shape != X.shape:
                raise DimensionMismatch("oracle and solution shapes differ")
            record.oracle_error = fro_norm(X - exact) / fro_norm(exact)
    return X, record
