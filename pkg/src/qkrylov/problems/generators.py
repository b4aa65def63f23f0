"""Seeded test-problem generators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from ..errors import DimensionMismatch
from ..qblock import BlockOperator
from ..qcore import QMatrix, qmat_mul, qmat_mul_flops

RNG_ALGORITHM = "philox4x64-10"
EXAMPLE_COEFFS = (1.0, -1.0, 2.0, 1.5)

# multipliers (B1, B2, B3) of the tridiagonal B0
SYLVESTER_FAMILIES: dict[str, tuple[float, float, float]] = {
    "ibm32": (2.0, -1.0, 1.5),
    "ash85": (1.0, -1.0, -1.5),
    "pde225": (1.0, 2.0, -1.0),
    "can445": (1.5, 1.0, -1.0),
}


def make_rng(seed: int | None) -> np.random.Generator:
    """Counter-based Philox generator; the algorithm name is ``RNG_ALGORITHM``."""
    return np.random.Generator(np.random.Philox(seed))


def uniform_qmatrix(n: int, m: int, rng: np.random.Generator) -> QMatrix:
    """Four i.i.d. uniform [0, 1] components, drawn in component order."""
    return QMatrix(*(rng.random((n, m)) for _ in range(4)))


def scaled_copies(A0, coeffs: Sequence[float]) -> QMatrix:
    if len(coeffs) != 4:
        raise ValueError(f"need four component multipliers, got {len(coeffs)}")
    if sp.issparse(A0):
        base = sp.csr_matrix(A0, dtype=float)
        return QMatrix(*(base * float(c) for c in coeffs))
    base = np.asarray(A0, dtype=float)
    return QMatrix(*(base * float(c) for c in coeffs))


def build_test_problem(
    A0,
    coeffs: Sequence[float] = EXAMPLE_COEFFS,
    n: int | None = None,
    m: int = 3,
    seed: int | None = 0,
) -> tuple[QMatrix, QMatrix]:
    """``A = sum_t coeffs[t] A0 e_t`` and a uniform random right-hand side ``B``."""
    rows, cols = A0.shape
    n = rows if n is None else n
    if rows != cols or rows != n:
        raise DimensionMismatch(f"A0 must be {n} x {n}, got {A0.shape}")
    if m < 1:
        raise ValueError("m must be positive")
    A = scaled_copies(A0, coeffs)
    B = uniform_qmatrix(n, m, make_rng(seed))
    return A, B


def random_coefficient(n: int, rng: np.random.Generator, shift: float = 2.0) -> QMatrix:
    """Dense quaternion ``shift * I + G / sqrt(4n)`` with Gaussian ``G``; well conditioned."""
    G = QMatrix.random(n, n, rng) * (1.0 / np.sqrt(4.0 * n))
    return G + QMatrix.identity(n) * shift


def random_problem(n: int, m: int, seed: int | None = 0) -> tuple[QMatrix, QMatrix]:
    rng = make_rng(seed)
    A = random_coefficient(n, rng)
    B = uniform_qmatrix(n, m, rng)
    return A, B


def tridiagonal_b0(m: int) -> np.ndarray:
    """Order-m matrix with 2 on the diagonal, 1 above and -1 below."""
    if m < 1:
        raise ValueError("m must be positive")
    return 2.0 * np.eye(m) + np.eye(m, k=1) - np.eye(m, k=-1)


def sylvester_right(m: int, family: str = "ibm32") -> QMatrix:
    try:
        b1, b2, b3 = SYLVESTER_FAMILIES[family]
    except KeyError:
        raise ValueError(
            f"unknown Sylvester family {family!r}; use one of {sorted(SYLVESTER_FAMILIES)}"
        ) from None
    return scaled_copies(tridiagonal_b0(m), (1.0, b1, b2, b3))


@dataclass(frozen=True)
class SylvesterProblem:
    A: QMatrix
    B: QMatrix
    C: QMatrix
    planted: QMatrix | None = None


def sylvester_problem(
    A: QMatrix,
    m: int,
    family: str = "ibm32",
    seed: int | None = 0,
    planted: bool = False,
    rng: np.random.Generator | None = None,
) -> SylvesterProblem:
    """``A X + X B = C`` with ``B`` from ``family``; ``C`` uniform or built from a planted ``X``.

    Pass the generator that produced ``A`` as ``rng`` to continue its stream; ``seed``
    is then ignored.
    """
    B = sylvester_right(m, family)
    rng = make_rng(seed) if rng is None else rng
    if planted:
        X = uniform_qmatrix(A.n, m, rng)
        C = qmat_mul(A, X) + qmat_mul(X, B)
        return SylvesterProblem(A=A, B=B, C=C.dense(), planted=X)
    return SylvesterProblem(A=A, B=B, C=uniform_qmatrix(A.n, m, rng))


def stack(X: QMatrix) -> QMatrix:
    """Column-major stacking into an ``nm x 1`` quaternion vector."""
    X = X.dense()
    return QMatrix(*(np.reshape(c, (-1, 1), order="F").copy() for c in X.components))


def unstack(x: QMatrix, n: int, m: int) -> QMatrix:
    if x.shape != (n * m, 1):
        raise DimensionMismatch(f"expected a {(n * m, 1)} vector, got {x.shape}")
    return QMatrix(*(np.reshape(c, (n, m), order="F").copy() for c in x.dense().components))


@dataclass(frozen=True)
class StackedSystem:
    operator: BlockOperator
    rhs: QMatrix
    n: int
    m: int

    def unstack(self, x: QMatrix) -> QMatrix:
        return unstack(x, self.n, self.m)


def stack_columns(A: QMatrix, X: QMatrix) -> StackedSystem:
    """Block-diagonal ``diag(A, ..., A)`` applied without forming it, with ``X`` stacked."""
    if A.n != A.m or A.m != X.n:
        raise DimensionMismatch(f"cannot stack {X.shape} against {A.shape}")
    n, m = X.shape

    def apply(x: QMatrix) -> QMatrix:
        return stack(qmat_mul(A, unstack(x, n, m)))

    op = BlockOperator(apply=apply, shape=(n * m, 1), flops=qmat_mul_flops(A, m), label="stacked")
    return StackedSystem(operator=op, rhs=stack(X), n=n, m=m)
