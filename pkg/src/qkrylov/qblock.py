"""Block products and the global quaternion Arnoldi process.

Whole n x m matrices play the role of vectors: inner products are trace
inner products and basis combinations take their coefficients on the right.
The orthogonalization loop is written against a small "space" interface so
the same code drives the quaternion solvers and the real-counterpart
baselines.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Protocol, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    MemoryBudgetExceeded,
    NonFiniteInput,
    NotNormalized,
    OperatorShapeMismatch,
)
from .qcore import (
    QMatrix,
    Quaternion,
    fro_norm,
    inner_product,
    qmat_mul,
    qmat_mul_flops,
)

logger = logging.getLogger(__name__)

BREAKDOWN_FACTOR = 1e-14
NORMALIZATION_TOL = 1e-8
ORTHO_METHODS = ("mgs", "cgs")


class KrylovSpace(Protocol):
    """Vector-space operations a global Krylov method needs."""

    name: str

    def inner(self, x: Any, y: Any) -> Quaternion: ...

    def norm(self, x: Any) -> float: ...

    def subtract(self, w: Any, v: Any, h: Quaternion) -> Any: ...

    def scale(self, x: Any, s: float) -> Any: ...

    def combine(self, blocks: Sequence[Any], coeffs: np.ndarray) -> Any: ...

    def add(self, x: Any, y: Any) -> Any: ...

    def sub(self, x: Any, y: Any) -> Any: ...

    def shape(self, x: Any) -> tuple[int, int]: ...

    def zeros_like(self, x: Any) -> Any: ...

    def nbytes(self, x: Any) -> int: ...

    def inner_flops(self, x: Any) -> int: ...

    def update_flops(self, x: Any) -> int: ...

    def is_finite(self, x: Any) -> bool: ...


class QuaternionSpace:
    name = "quaternion"

    def inner(self, x: QMatrix, y: QMatrix) -> Quaternion:
        return inner_product(x, y)

    def norm(self, x: QMatrix) -> float:
        return fro_norm(x)

    def subtract(self, w: QMatrix, v: QMatrix, h: Quaternion) -> QMatrix:
        return w - v.right_mul(h)

    def scale(self, x: QMatrix, s: float) -> QMatrix:
        return x * s

    def combine(self, blocks: Sequence[QMatrix], coeffs: np.ndarray) -> QMatrix:
        return star_vec(blocks, coeffs)

    def add(self, x: QMatrix, y: QMatrix) -> QMatrix:
        return x + y

    def sub(self, x: QMatrix, y: QMatrix) -> QMatrix:
        return x - y

    def shape(self, x: QMatrix) -> tuple[int, int]:
        return x.shape

    def zeros_like(self, x: QMatrix) -> QMatrix:
        return QMatrix.zeros(*x.shape)

    def nbytes(self, x: QMatrix) -> int:
        n, m = x.shape
        return 4 * n * m * 8

    def inner_flops(self, x: QMatrix) -> int:
        n, m = x.shape
        return 4 * (8 * n * m - 1)

    def update_flops(self, x: QMatrix) -> int:
        n, m = x.shape
        return 32 * n * m

    def is_finite(self, x: QMatrix) -> bool:
        return x.is_finite()


QUATERNION_SPACE = QuaternionSpace()


@dataclass(frozen=True)
class BlockOperator:
    """Linear map on n x m blocks with an analytic per-application flop count."""

    apply: Callable[[Any], Any]
    shape: tuple[int, int]
    flops: int = 0
    label: str = ""

    def __call__(self, x: Any) -> Any:
        return self.apply(x)


def matrix_operator(A: QMatrix, m: int, workers: int | None = None) -> BlockOperator:
    """``X -> A X`` for ``X`` of shape ``(A.m, m)``."""
    if A.n != A.m:
        raise DimensionMismatch(f"coefficient matrix must be square, got {A.shape}")
    return BlockOperator(
        apply=lambda X: qmat_mul(A, X, workers=workers),
        shape=(A.n, m),
        flops=qmat_mul_flops(A, m),
        label="matrix",
    )


def as_operator(op: Any, shape: tuple[int, int], workers: int | None = None) -> BlockOperator:
    if isinstance(op, BlockOperator):
        return op
    if isinstance(op, QMatrix):
        return matrix_operator(op, shape[1], workers=workers)
    if callable(op):
        return BlockOperator(apply=op, shape=shape)
    raise TypeError(f"expected a QMatrix or a callable operator, got {type(op).__name__}")


@dataclass
class BlockBasis:
    blocks: list[Any] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __getitem__(self, i: int) -> Any:
        return self.blocks[i]

    def __iter__(self) -> Iterator[Any]:
        return iter(self.blocks)

    def append(self, block: Any, space: KrylovSpace = QUATERNION_SPACE) -> None:
        if self.blocks and space.shape(block) != space.shape(self.blocks[0]):
            raise DimensionMismatch(
                f"block shape {space.shape(block)} differs from {space.shape(self.blocks[0])}"
            )
        self.blocks.append(block)

    def gram(self, space: KrylovSpace = QUATERNION_SPACE) -> np.ndarray:
        """``(k, k, 4)`` array of inner products ``<V_j, V_i>`` at ``[i, j]``."""
        k = len(self.blocks)
        out = np.zeros((k, k, 4))
        for i in range(k):
            for j in range(k):
                out[i, j] = space.inner(self.blocks[j], self.blocks[i]).to_array()
        return out

    def orthonormality_error(self, space: KrylovSpace = QUATERNION_SPACE) -> float:
        g = self.gram(space)
        g[..., 0] -= np.eye(len(self.blocks))
        return float(np.max(np.abs(g))) if g.size else 0.0


@dataclass(frozen=True)
class QHessenberg:
    """(k+1) x k quaternion Hessenberg matrix, stored as an ``(k+1, k, 4)`` array."""

    entries: np.ndarray

    @property
    def k(self) -> int:
        return int(self.entries.shape[1])

    def as_qmatrix(self) -> QMatrix:
        return QMatrix.from_qarray(self.entries)

    def square(self) -> QMatrix:
        return QMatrix.from_qarray(self.entries[: self.k])

    def subdiagonal(self) -> np.ndarray:
        k = self.k
        return np.array([self.entries[j + 1, j] for j in range(k)]).reshape(k, 4)

    def is_upper_hessenberg(self, atol: float = 0.0) -> bool:
        """Component 0 upper Hessenberg, components 1-3 upper triangular."""
        e = self.entries
        rows, cols = e.shape[:2]
        below_sub = np.tril(np.ones((rows, cols), dtype=bool), k=-2)
        below_diag = np.tril(np.ones((rows, cols), dtype=bool), k=-1)
        if np.any(np.abs(e[..., 0][below_sub]) > atol):
            return False
        return not np.any(np.abs(e[..., 1:][below_diag]) > atol)


@dataclass(frozen=True)
class ArnoldiResult:
    basis: BlockBasis
    hess: QHessenberg
    breakdown: bool
    breakdown_step: int | None = None


def star_vec(basis: Sequence[QMatrix], alpha) -> QMatrix:
    """``sum_i V_i * alpha_i`` with each coefficient on the right."""
    coeffs = np.asarray(alpha, dtype=float)
    if coeffs.ndim == 1 and coeffs.size == 4:
        coeffs = coeffs.reshape(1, 4)
    if coeffs.shape != (len(basis), 4):
        raise DimensionMismatch(f"{len(basis)} blocks but coefficients of shape {coeffs.shape}")
    if not len(basis):
        raise DimensionMismatch("empty basis")
    out = QMatrix.zeros(*basis[0].shape)
    for v, a in zip(basis, coeffs):
        if np.any(a):
            out = out + v.right_mul(Quaternion.from_array(a))
    return out


def star_mat(basis: Sequence[QMatrix], W: QMatrix) -> list[QMatrix]:
    """Column ``p`` of the result is ``star_vec(basis, W[:, p])``."""
    if W.n != len(basis):
        raise DimensionMismatch(f"{len(basis)} blocks but W has {W.n} rows")
    arr = W.to_qarray()
    return [star_vec(basis, arr[:, p]) for p in range(W.m)]


def boxtimes(basis: Sequence[QMatrix], images: Sequence[QMatrix]) -> QMatrix:
    """Entry ``(p, q)`` is ``tr(V_p* images_q) = <images_q, V_p>``."""
    if len(images) != len(basis):
        raise DimensionMismatch(f"{len(basis)} blocks but {len(images)} images")
    k = len(basis)
    out = np.zeros((k, k, 4))
    for p, v in enumerate(basis):
        for q, w in enumerate(images):
            out[p, q] = inner_product(w, v).to_array()
    return QMatrix.from_qarray(out)


class GlobalArnoldi:
    """Incremental global Arnoldi process.

    After ``j`` calls to :meth:`advance` the relation
    ``op(V_1..V_j) = V_1..V_{j+1} * H`` holds with ``H`` of shape (j+1) x j.
    When ``h_{j+1,j}`` drops to ``breakdown_tol`` the space is invariant, no
    new block is stored and ``invariant`` is set.
    """

    def __init__(
        self,
        op: Callable[[Any], Any],
        v1: Any,
        *,
        space: KrylovSpace = QUATERNION_SPACE,
        ortho: str = "mgs",
        reorthogonalize: bool = False,
        breakdown_tol: float | None = None,
        memory_budget_bytes: int | None = None,
    ) -> None:
        if ortho not in ORTHO_METHODS:
            raise ValueError(f"unknown orthogonalization {ortho!r}; use one of {ORTHO_METHODS}")
        if not space.is_finite(v1):
            raise NonFiniteInput("starting block contains NaN or Inf")
        norm = space.norm(v1)
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise NotNormalized(f"starting block has norm {norm:.6g}, expected 1")
        self.op = op
        self.space = space
        self.ortho = ortho
        self.reorthogonalize = reorthogonalize
        self.breakdown_tol = breakdown_tol
        self.memory_budget_bytes = memory_budget_bytes
        self.basis = BlockBasis([v1])
        self.columns: list[np.ndarray] = []
        self.invariant = False
        self.breakdown_step: int | None = None
        self.operator_calls = 0
        self.inner_products = 0
        self.updates = 0

    @property
    def steps(self) -> int:
        return len(self.columns)

    def advance(self) -> np.ndarray:
        """Run one step and return the new Hessenberg column as a ``(j+1, 4)`` array."""
        if self.invariant:
            raise RuntimeError("Krylov space is already invariant")
        space = self.space
        j = len(self.columns)
        v = self.basis[j]
        w = self.op(v)
        self.operator_calls += 1
        if space.shape(w) != space.shape(v):
            raise OperatorShapeMismatch(
                f"operator mapped a {space.shape(v)} block to {space.shape(w)}"
            )
        if self.breakdown_tol is None:
            self.breakdown_tol = BREAKDOWN_FACTOR * space.norm(w)

        h = np.zeros((j + 2, 4))
        sweeps = 2 if self.reorthogonalize else 1
        for sweep in range(sweeps):
            if self.ortho == "cgs" and sweep == 0:
                coeffs = [space.inner(w, self.basis[i]) for i in range(j + 1)]
                for i, hij in enumerate(coeffs):
                    w = space.subtract(w, self.basis[i], hij)
                    h[i] += hij.to_array()
            else:
                for i in range(j + 1):
                    hij = space.inner(w, self.basis[i])
                    w = space.subtract(w, self.basis[i], hij)
                    h[i] += hij.to_array()
            self.inner_products += j + 1
            self.updates += j + 1

        h_next = space.norm(w)
        h[j + 1, 0] = h_next
        invariant = h_next <= self.breakdown_tol
        if not invariant:
            self._check_memory(w)
        self.columns.append(h)
        if invariant:
            self.invariant = True
            self.breakdown_step = j + 1
            logger.debug("global Arnoldi breakdown at step %d (h = %.3e)", j + 1, h_next)
        else:
            self.basis.append(space.scale(w, 1.0 / h_next), space)
        return h

    def _check_memory(self, w: Any) -> None:
        if self.memory_budget_bytes is None:
            return
        needed = (len(self.basis) + 1) * self.space.nbytes(w)
        logger.debug("basis memory %d of %d bytes", needed, self.memory_budget_bytes)
        if needed > self.memory_budget_bytes:
            raise MemoryBudgetExceeded(
                f"basis of {len(self.basis) + 1} blocks needs {needed} bytes, "
                f"budget is {self.memory_budget_bytes}"
            )

    def hessenberg(self) -> QHessenberg:
        k = len(self.columns)
        entries = np.zeros((k + 1, k, 4))
        for j, col in enumerate(self.columns):
            entries[: j + 2, j] = col
        return QHessenberg(entries)

    def result(self) -> ArnoldiResult:
        k = len(self.columns)
        blocks = self.basis.blocks if self.invariant else self.basis.blocks[: k + 1]
        return ArnoldiResult(
            basis=BlockBasis(list(blocks)),
            hess=self.hessenberg(),
            breakdown=self.invariant,
            breakdown_step=self.breakdown_step,
        )


def _run_arnoldi(op, V1, k: int, breakdown_tol, ortho: str, reorthogonalize: bool, space):
    if k < 1:
        raise ValueError("k must be at least 1")
    operator = as_operator(op, space.shape(V1))
    arnoldi = GlobalArnoldi(
        operator,
        V1,
        space=space,
        ortho=ortho,
        reorthogonalize=reorthogonalize,
        breakdown_tol=breakdown_tol,
    )
    for _ in range(k):
        arnoldi.advance()
        if arnoldi.invariant:
            break
    return arnoldi.result()


def global_arnoldi_mgs(
    op,
    V1,
    k: int,
    breakdown_tol: float | None = None,
    *,
    reorthogonalize: bool = False,
    space: KrylovSpace = QUATERNION_SPACE,
) -> ArnoldiResult:
    """Global Arnoldi with modified Gram-Schmidt."""
    return _run_arnoldi(op, V1, k, breakdown_tol, "mgs", reorthogonalize, space)


def global_arnoldi_cgs(
    op,
    V1,
    k: int,
    breakdown_tol: float | None = None,
    *,
    space: KrylovSpace = QUATERNION_SPACE,
) -> ArnoldiResult:
    """Global Arnoldi with classical Gram-Schmidt; reference variant."""
    return _run_arnoldi(op, V1, k, breakdown_tol, "cgs", False, space)
