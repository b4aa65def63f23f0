"""Real-counterpart Gl-FOM / Gl-GMRES comparison methods.

The quaternion equation A X = B is rewritten as R(A) Y = R(B) over real
4n x 4m blocks and solved by the ordinary global methods with the
inner product tr(Y^T X). The loop is the quaternion one from ``qsolve``
run over a real space, so the stopping rule is identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch
from .qblock import BlockOperator
from .qcore import QMatrix, Quaternion, from_real_counterpart, real_counterpart
from .qsolve import SolverConfig, SolveReport, krylov_solve


class RealSpace:
    name = "real"

    def inner(self, x: np.ndarray, y: np.ndarray) -> Quaternion:
        return Quaternion(float(np.vdot(y, x)))

    def norm(self, x: np.ndarray) -> float:
        return float(np.linalg.norm(x))

    def subtract(self, w: np.ndarray, v: np.ndarray, h: Quaternion) -> np.ndarray:
        return w - v * h.q0

    def scale(self, x: np.ndarray, s: float) -> np.ndarray:
        return x * s

    def combine(self, blocks: Sequence[np.ndarray], coeffs: np.ndarray) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=float).reshape(-1, 4)
        if coeffs.shape[0] != len(blocks):
            raise DimensionMismatch(f"{len(blocks)} blocks but {coeffs.shape[0]} coefficients")
        out = np.zeros_like(blocks[0])
        for v, c in zip(blocks, coeffs[:, 0]):
            out += v * c
        return out

    def add(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return x + y

    def sub(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return x - y

    def shape(self, x: np.ndarray) -> tuple[int, int]:
        rows, cols = x.shape
        return int(rows), int(cols)

    def zeros_like(self, x: np.ndarray) -> np.ndarray:
        return np.zeros_like(x, dtype=float)

    def nbytes(self, x: np.ndarray) -> int:
        return int(x.size) * 8

    def inner_flops(self, x: np.ndarray) -> int:
        return 2 * int(x.size) - 1

    def update_flops(self, x: np.ndarray) -> int:
        return 2 * int(x.size)

    def is_finite(self, x: np.ndarray) -> bool:
        return bool(np.isfinite(x).all())


REAL_SPACE = RealSpace()


def real_mat_mul_flops(M, cols: int) -> int:
    """Flops of ``M @ Y`` for a real ``M`` and ``cols`` right-hand columns."""
    rows, inner = M.shape
    if sp.issparse(M):
        return 2 * int(M.nnz) * cols
    return rows * cols * (2 * inner - 1)


def sylvester_real_operator(M, right: np.ndarray) -> BlockOperator:
    """``Y -> M Y + Y right``, the real counterpart of ``X -> A X + X B``."""
    rows, cols = M.shape[0], right.shape[0]
    if M.shape[1] != rows or right.shape != (cols, cols):
        raise DimensionMismatch(f"Sylvester coefficients {M.shape}, {right.shape} are not square")
    flops = real_mat_mul_flops(M, cols) + rows * cols * (2 * cols - 1) + rows * cols
    return BlockOperator(
        apply=lambda Y: np.asarray(M @ Y) + Y @ right,
        shape=(rows, cols),
        flops=flops,
        label="real-sylvester",
    )


@dataclass(frozen=True)
class RealBlockProblem:
    """``coefficient @ Y (+ Y @ right) = rhs`` over real 4n x 4m blocks."""

    coefficient: np.ndarray | sp.csr_matrix
    rhs: np.ndarray
    right: np.ndarray | None = None

    def __post_init__(self) -> None:
        rows, cols = self.coefficient.shape
        if rows != cols or rows != self.rhs.shape[0]:
            raise DimensionMismatch(
                f"coefficient {self.coefficient.shape} incompatible with rhs {self.rhs.shape}"
            )
        if self.right is not None and self.right.shape != (self.rhs.shape[1],) * 2:
            raise DimensionMismatch(f"right coefficient {self.right.shape} does not fit rhs")

    @classmethod
    def from_quaternion(cls, A: QMatrix, B: QMatrix) -> "RealBlockProblem":
        return cls(coefficient=real_counterpart(A), rhs=real_counterpart(B.dense()))

    @classmethod
    def from_sylvester(cls, A: QMatrix, B: QMatrix, C: QMatrix) -> "RealBlockProblem":
        return cls(
            coefficient=real_counterpart(A),
            rhs=real_counterpart(C.dense()),
            right=np.asarray(real_counterpart(B.dense())),
        )

    @property
    def block_width(self) -> int:
        return int(self.rhs.shape[1])

    @property
    def dimensions(self) -> list[int]:
        return [int(self.rhs.shape[0]), int(self.rhs.shape[1])]

    def operator(self) -> BlockOperator:
        if self.right is not None:
            return sylvester_real_operator(self.coefficient, self.right)
        M = self.coefficient
        return BlockOperator(
            apply=lambda Y: np.asarray(M @ Y),
            shape=self.rhs.shape,
            flops=real_mat_mul_flops(M, self.block_width),
            label="real",
        )

    def to_quaternion(self, Y: np.ndarray) -> QMatrix:
        return from_real_counterpart(Y)


def gl_fom_real(
    P: RealBlockProblem, X0: np.ndarray | None = None, cfg: SolverConfig | None = None
) -> tuple[np.ndarray, SolveReport]:
    return krylov_solve(
        P.operator(), P.rhs, X0, cfg, variant="fom", space=REAL_SPACE, method="glfom-real"
    )


def gl_gmres_real(
    P: RealBlockProblem, X0: np.ndarray | None = None, cfg: SolverConfig | None = None
) -> tuple[np.ndarray, SolveReport]:
    return krylov_solve(
        P.operator(), P.rhs, X0, cfg, variant="gmres", space=REAL_SPACE, method="glgmres-real"
    )
