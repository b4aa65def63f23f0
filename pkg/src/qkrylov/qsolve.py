"""Gl-QFOM and Gl-QGMRES with quaternion Givens rotations.

Both solvers share one loop: global Arnoldi step, apply the stored
rotations to the new Hessenberg column, estimate the residual, then rotate
the new subdiagonal away. FOM reads its estimate before the new rotation,
GMRES after it. The iterate is formed only when the loop stops.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .errors import (
    DimensionMismatch,
    HessenbergSingular,
    IndexOutOfRange,
    MaxIterExceeded,
    NonFiniteInput,
    SingularDiagonal,
    ZeroPair,
)
from .qblock import (
    QUATERNION_SPACE,
    BlockOperator,
    GlobalArnoldi,
    KrylovSpace,
    as_operator,
)
from .qcore import (
    QINV_EPS,
    QMatrix,
    Quaternion,
    hamilton,
    qarray_abs,
    qinv,
    qmat_mul,
    qmat_mul_flops,
)

logger = logging.getLogger(__name__)

SINGULAR_RTOL = 1e-14
DEFAULT_TOL = 1e-6
DEFAULT_MAXIT = 3000


@dataclass(frozen=True)
class GivensRotationQ:
    """2 x 2 unitary block ``[[g11, g12], [g21, g22]]`` acting on rows ``index, index+1``."""

    index: int
    g11: Quaternion
    g12: Quaternion
    g21: Quaternion
    g22: Quaternion
    r: float

    def apply(self, a: Quaternion, b: Quaternion) -> tuple[Quaternion, Quaternion]:
        """``G* (a, b)``."""
        return (
            self.g11.conj() * a + self.g21.conj() * b,
            self.g12.conj() * a + self.g22.conj() * b,
        )

    def matrix(self) -> QMatrix:
        return QMatrix.from_qarray(
            np.array(
                [
                    [self.g11.to_array(), self.g12.to_array()],
                    [self.g21.to_array(), self.g22.to_array()],
                ]
            )
        )


def make_givens(h_ii: Quaternion, h_next: Quaternion, index: int = 0) -> GivensRotationQ:
    """Rotation whose conjugate transpose maps ``(h_ii, h_next)`` to ``(r, 0)``.

    Raises ZeroPair if both entries vanish.
    """
    a_ii, a_next = abs(h_ii), abs(h_next)
    r = math.hypot(a_ii, a_next)
    if r == 0.0:
        raise ZeroPair(f"cannot build a rotation from a zero pair at row {index}")
    g11 = h_ii / r
    g21 = h_next / r
    if a_ii <= a_next:
        mag = abs(g21)
        g12 = Quaternion(mag)
        g22 = -((g21 / mag) * g11.conj())
    else:
        mag = abs(g11)
        g22 = Quaternion(mag)
        g12 = -((g11 / mag) * g21.conj())
    return GivensRotationQ(index=index, g11=g11, g12=g12, g21=g21, g22=g22, r=r)


def apply_givens_column(rotations: list[GivensRotationQ], column) -> np.ndarray:
    """Apply ``G_i*`` to entries ``(i, i+1)`` of a quaternion column, in order."""
    out = np.array(column, dtype=float, copy=True)
    length = out.shape[0]
    for rot in rotations:
        i = rot.index
        if i < 0 or i + 1 >= length:
            raise IndexOutOfRange(f"rotation on rows ({i}, {i + 1}) outside column of {length}")
        a, b = rot.apply(Quaternion.from_array(out[i]), Quaternion.from_array(out[i + 1]))
        out[i] = a.to_array()
        out[i + 1] = b.to_array()
    return out


def _back_substitute_array(R: np.ndarray, u: np.ndarray) -> np.ndarray:
    k = R.shape[0]
    y = np.zeros((k, 4))
    if k == 0:
        return y
    diag = qarray_abs(R[np.arange(k), np.arange(k)])
    threshold = SINGULAR_RTOL * float(np.max(diag))
    for i in range(k - 1, -1, -1):
        if diag[i] <= threshold or diag[i] < QINV_EPS:
            raise SingularDiagonal(i, float(diag[i]))
        s = u[i].copy()
        if i + 1 < k:
            s -= hamilton(R[i, i + 1 :], y[i + 1 :]).sum(axis=0)
        y[i] = qinv(Quaternion.from_array(R[i, i])).to_array()
        y[i] = hamilton(y[i], s)
    return y


def back_substitute(R: QMatrix, u) -> np.ndarray:
    """Solve the upper triangular system ``R y = u`` bottom-up.

    ``y_i = R_ii^{-1} (u_i - sum_{k>i} R_ik y_k)`` with the inverse on the left.

    Raises SingularDiagonal when ``|R_ii|`` is below ``1e-14 * max_l |R_ll|``.
    """
    if R.n != R.m:
        raise DimensionMismatch(f"triangular factor must be square, got {R.shape}")
    vec = np.asarray(u, dtype=float).reshape(-1, 4)
    if vec.shape[0] != R.n:
        raise DimensionMismatch(f"right-hand side has {vec.shape[0]} entries, expected {R.n}")
    return _back_substitute_array(R.to_qarray(), vec)


@dataclass
class SolverConfig:
    tol: float = DEFAULT_TOL
    maxit: int = DEFAULT_MAXIT
    breakdown_tol: float | None = None
    method: str | None = None
    ortho: str = "mgs"
    reorthogonalize: bool = False
    residual_check_every: int = 0
    memory_budget_bytes: int | None = None
    raise_on_maxit: bool = False
    workers: int | None = None

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.maxit < 1:
            raise ValueError(f"maxit must be at least 1, got {self.maxit}")
        if self.residual_check_every < 0:
            raise ValueError("residual_check_every must be >= 0")


@dataclass
class FlopCounter:
    operator: int = 0
    inner: int = 0
    update: int = 0

    @property
    def total(self) -> int:
        return self.operator + self.inner + self.update

    def to_dict(self) -> dict[str, int]:
        return {**asdict(self), "total": self.total}


@dataclass
class SolveReport:
    method: str
    dimensions: list[int]
    iterations: int = 0
    converged: bool = False
    status: str = "max_iterations"
    rr_history: list[float | None] = field(default_factory=list)
    final_true_rr: float = float("nan")
    wall_seconds: float = 0.0
    breakdown: bool = False
    breakdown_step: int | None = None
    singular_steps: list[int] = field(default_factory=list)
    residual_checks: list[dict[str, float]] = field(default_factory=list)
    flops: FlopCounter = field(default_factory=FlopCounter)
    operator_flops: int = 0

    @property
    def rr(self) -> float | None:
        values = [v for v in self.rr_history if v is not None]
        return values[-1] if values else None

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["flops"] = self.flops.to_dict()
        data["rr"] = self.rr
        return data


def _triangle(columns: list[np.ndarray], j: int) -> np.ndarray:
    R = np.zeros((j, j, 4))
    for c in range(j):
        R[: c + 1, c] = columns[c][: c + 1]
    return R


def krylov_solve(
    op: Any,
    B: Any,
    X0: Any = None,
    cfg: SolverConfig | None = None,
    *,
    variant: str,
    space: KrylovSpace = QUATERNION_SPACE,
    method: str | None = None,
) -> tuple[Any, SolveReport]:
    """Unrestarted global FOM (``variant="fom"``) or GMRES (``variant="gmres"``)."""
    if variant not in ("fom", "gmres"):
        raise ValueError(f"unknown variant {variant!r}")
    cfg = cfg or SolverConfig()
    start = time.perf_counter()
    shape = space.shape(B)
    operator = as_operator(op, shape, workers=cfg.workers)
    X0 = space.zeros_like(B) if X0 is None else X0
    if space.shape(X0) != shape:
        raise DimensionMismatch(f"initial guess {space.shape(X0)} does not match {shape}")
    if isinstance(op, QMatrix) and not op.is_finite():
        raise NonFiniteInput("coefficient matrix contains NaN or Inf")
    for label, block in (("right-hand side", B), ("initial guess", X0)):
        if not space.is_finite(block):
            raise NonFiniteInput(f"{label} contains NaN or Inf")

    report = SolveReport(method=method or cfg.method or variant, dimensions=list(shape))
    report.operator_flops = operator.flops

    R0 = space.sub(B, operator(X0))
    beta = space.norm(R0)
    if beta == 0.0:
        report.converged = True
        report.status = "converged"
        report.rr_history = [0.0]
        report.final_true_rr = 0.0
        report.wall_seconds = time.perf_counter() - start
        return X0, report

    arnoldi = GlobalArnoldi(
        operator,
        space.scale(R0, 1.0 / beta),
        space=space,
        ortho=cfg.ortho,
        reorthogonalize=cfg.reorthogonalize,
        breakdown_tol=cfg.breakdown_tol,
        memory_budget_bytes=cfg.memory_budget_bytes,
    )

    def iterate(columns: list[np.ndarray], rhs: list[Quaternion], j: int):
        R = _triangle(columns, j)
        u = np.array([q.to_array() for q in rhs[:j]])
        y = _back_substitute_array(R, u)
        return space.add(X0, space.combine(arnoldi.basis.blocks[:j], y))

    def true_rr(X) -> float:
        return space.norm(space.sub(B, operator(X))) / beta

    rotations: list = []
    rotated: list[np.ndarray] = []
    u: list[Quaternion] = [Quaternion(beta)]
    history: list[float | None] = [1.0]
    max_diag = 0.0
    X = X0
    j = 0
    converged = False

    for j in range(1, cfg.maxit + 1):
        col = apply_givens_column(rotations, arnoldi.advance())
        h_jj = Quaternion.from_array(col[j - 1])
        h_next = float(col[j, 0])
        u.append(Quaternion())
        breakdown = arnoldi.invariant
        check = cfg.residual_check_every and j % cfg.residual_check_every == 0

        if variant == "fom":
            mag = abs(h_jj)
            max_diag = max(max_diag, mag)
            estimate: float | None = None
            if mag <= SINGULAR_RTOL * max_diag or mag < QINV_EPS:
                report.singular_steps.append(j)
                logger.warning("%s", HessenbergSingular(j, mag))
            else:
                y_last = qinv(h_jj) * u[j - 1]
                estimate = h_next * abs(y_last) / beta
            history.append(estimate)
            converged = estimate is not None and (estimate < cfg.tol or breakdown)
            if check and estimate is not None:
                X_j = iterate(rotated + [col], u, j)
                report.residual_checks.append(
                    {"step": j, "estimate": estimate, "true": true_rr(X_j)}
                )
            if converged or breakdown or j == cfg.maxit:
                X = _fom_iterate(iterate, rotated + [col], u, j, X0)
                break

        if h_next != 0.0:
            rot = make_givens(h_jj, Quaternion(h_next), index=j - 1)
            col[j - 1] = (rot.r, 0.0, 0.0, 0.0)
            col[j] = 0.0
            u[j - 1], u[j] = rot.apply(u[j - 1], u[j])
            rotations.append(rot)
            max_diag = max(max_diag, rot.r)
        rotated.append(col)

        if variant == "gmres":
            estimate = abs(u[j]) / beta
            history.append(estimate)
            converged = estimate < cfg.tol or breakdown
            if check:
                X_j = iterate(rotated, u, j)
                report.residual_checks.append(
                    {"step": j, "estimate": estimate, "true": true_rr(X_j)}
                )
            if converged or j == cfg.maxit:
                X = iterate(rotated, u, j)
                break
        logger.debug("%s step %d rr=%s", report.method, j, history[-1])

    report.iterations = j
    report.rr_history = history
    report.breakdown = arnoldi.invariant
    report.breakdown_step = arnoldi.breakdown_step
    report.converged = bool(converged)
    if arnoldi.invariant:
        report.status = "breakdown"
    elif converged:
        report.status = "converged"
    report.final_true_rr = true_rr(X)
    report.flops = FlopCounter(
        operator=arnoldi.operator_calls * operator.flops,
        inner=arnoldi.inner_products * space.inner_flops(B),
        update=(arnoldi.updates + j) * space.update_flops(B),
    )
    report.wall_seconds = time.perf_counter() - start
    if not converged:
        logger.info("%s stopped after %d iterations without convergence", report.method, j)
        if cfg.raise_on_maxit:
            raise MaxIterExceeded(j, solution=X, report=report)
    return X, report


def _fom_iterate(iterate, columns, u, j, X0):
    """FOM iterate at step ``j``.

    When the last rotated diagonal vanished the minimal-residual iterate of
    step ``j - 1`` is returned instead, ``X0`` at the first step.
    """
    try:
        return iterate(columns, u, j)
    except SingularDiagonal:
        if j == 1:
            return X0
        return iterate(columns[: j - 1], u, j - 1)


def gl_qfom(A, B: QMatrix, X0: QMatrix | None = None, cfg: SolverConfig | None = None):
    """Global quaternion FOM for ``A X = B``; ``A`` is a QMatrix or an operator."""
    return krylov_solve(A, B, X0, cfg, variant="fom", method="glqfom")


def gl_qgmres(A, B: QMatrix, X0: QMatrix | None = None, cfg: SolverConfig | None = None):
    """Global quaternion GMRES for ``A X = B``; ``A`` is a QMatrix or an operator."""
    return krylov_solve(A, B, X0, cfg, variant="gmres", method="glqgmres")


def sylvester_operator(A: QMatrix, B: QMatrix, workers: int | None = None) -> BlockOperator:
    """``X -> A X + X B`` on n x m blocks."""
    if A.n != A.m or B.n != B.m:
        raise DimensionMismatch(f"Sylvester coefficients must be square, got {A.shape}, {B.shape}")
    if not (A.is_finite() and B.is_finite()):
        raise NonFiniteInput("Sylvester coefficients contain NaN or Inf")
    n, m = A.n, B.n
    right_flops = 8 * B.nnz() * n if B.is_sparse else 4 * n * m * (8 * m - 1)

    def apply(X: QMatrix) -> QMatrix:
        if X.shape != (n, m):
            raise DimensionMismatch(f"expected a {(n, m)} block, got {X.shape}")
        return qmat_mul(A, X, workers=workers) + qmat_mul(X, B, workers=workers)

    return BlockOperator(
        apply=apply,
        shape=(n, m),
        flops=qmat_mul_flops(A, m) + right_flops + 4 * n * m,
        label="sylvester",
    )


def _workers(cfg: SolverConfig | None) -> int | None:
    return cfg.workers if cfg is not None else None


def gl_qfom_sylvester(
    A: QMatrix,
    B: QMatrix,
    C: QMatrix,
    X0: QMatrix | None = None,
    cfg: SolverConfig | None = None,
):
    return krylov_solve(
        sylvester_operator(A, B, _workers(cfg)),
        C,
        X0,
        cfg,
        variant="fom",
        method="glqfom-sylvester",
    )


def gl_qgmres_sylvester(
    A: QMatrix,
    B: QMatrix,
    C: QMatrix,
    X0: QMatrix | None = None,
    cfg: SolverConfig | None = None,
):
    return krylov_solve(
        sylvester_operator(A, B, _workers(cfg)),
        C,
        X0,
        cfg,
        variant="gmres",
        method="glqgmres-sylvester",
    )
