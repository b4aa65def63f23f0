"""Quaternion scalars, quaternion matrices and the real counterpart mapping.

A quaternion matrix W = W0 + W1 i + W2 j + W3 k is held as its four real
component matrices. Its real counterpart is the 4n x 4m matrix

    [[W0, -W1, -W2, -W3],
     [W1,  W0, -W3,  W2],
     [W2,  W3,  W0, -W1],
     [W3, -W2,  W1,  W0]]

whose first block column [W0; W1; W2; W3] already determines everything.
Products are evaluated on that first block column only.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, QuaternionZeroDivision

logger = logging.getLogger(__name__)

QINV_EPS = 1e-300
THREADS_ENV = "QKRYLOV_THREADS"

Component = Union[np.ndarray, sp.spmatrix, sp.sparray]


def thread_count() -> int:
    """Worker threads for the component GEMMs (``QKRYLOV_THREADS``, default 1)."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        logger.warning("ignoring %s=%r (not an integer)", THREADS_ENV, raw)
        return 1
    return max(1, value)


@dataclass(frozen=True)
class Quaternion:
    q0: float = 0.0
    q1: float = 0.0
    q2: float = 0.0
    q3: float = 0.0

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        a = np.asarray(arr, dtype=float).reshape(4)
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def to_array(self) -> np.ndarray:
        return np.array([self.q0, self.q1, self.q2, self.q3], dtype=float)

    def conj(self) -> "Quaternion":
        return Quaternion(self.q0, -self.q1, -self.q2, -self.q3)

    def norm_sq(self) -> float:
        return self.q0 * self.q0 + self.q1 * self.q1 + self.q2 * self.q2 + self.q3 * self.q3

    def __abs__(self) -> float:
        return math.sqrt(self.norm_sq())

    def imag_norm(self) -> float:
        return math.sqrt(self.q1 * self.q1 + self.q2 * self.q2 + self.q3 * self.q3)

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(
            self.q0 + other.q0, self.q1 + other.q1, self.q2 + other.q2, self.q3 + other.q3
        )

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(
            self.q0 - other.q0, self.q1 - other.q1, self.q2 - other.q2, self.q3 - other.q3
        )

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.q0, -self.q1, -self.q2, -self.q3)

    def __mul__(self, other: "Quaternion | float") -> "Quaternion":
        if isinstance(other, Quaternion):
            return qmul(self, other)
        s = float(other)
        return Quaternion(self.q0 * s, self.q1 * s, self.q2 * s, self.q3 * s)

    def __rmul__(self, other: float) -> "Quaternion":
        s = float(other)
        return Quaternion(self.q0 * s, self.q1 * s, self.q2 * s, self.q3 * s)

    def __truediv__(self, other: float) -> "Quaternion":
        s = float(other)
        return Quaternion(self.q0 / s, self.q1 / s, self.q2 / s, self.q3 / s)


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)  # noqa: E741
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product ``a * b``."""
    return Quaternion(
        a.q0 * b.q0 - a.q1 * b.q1 - a.q2 * b.q2 - a.q3 * b.q3,
        a.q0 * b.q1 + a.q1 * b.q0 + a.q2 * b.q3 - a.q3 * b.q2,
        a.q0 * b.q2 - a.q1 * b.q3 + a.q2 * b.q0 + a.q3 * b.q1,
        a.q0 * b.q3 + a.q1 * b.q2 - a.q2 * b.q1 + a.q3 * b.q0,
    )


def qinv(q: Quaternion, eps: float = QINV_EPS) -> Quaternion:
    """Inverse ``conj(q) / |q|^2``; QuaternionZeroDivision when ``|q| < eps``."""
    mag = abs(q)
    if not mag >= eps:
        raise QuaternionZeroDivision(f"cannot invert quaternion with |q| = {mag:.3e}")
    return q.conj() / q.norm_sq()


def scalar_counterpart(q: Quaternion) -> np.ndarray:
    """4 x 4 real counterpart of a scalar."""
    return np.array(
        [
            [q.q0, -q.q1, -q.q2, -q.q3],
            [q.q1, q.q0, -q.q3, q.q2],
            [q.q2, q.q3, q.q0, -q.q1],
            [q.q3, -q.q2, q.q1, q.q0],
        ]
    )


def hamilton(a, b) -> np.ndarray:
    """Broadcast Hamilton product of quaternion arrays of shape ``(..., 4)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1] != 4 or b.shape[-1] != 4:
        raise DimensionMismatch("quaternion arrays need a trailing axis of length 4")
    a0, a1, a2, a3 = (a[..., t] for t in range(4))
    b0, b1, b2, b3 = (b[..., t] for t in range(4))
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def qarray_abs(a) -> np.ndarray:
    return np.sqrt(np.sum(np.square(np.asarray(a, dtype=float)), axis=-1))


def _dense(w: Component) -> np.ndarray:
    if sp.issparse(w):
        return np.asarray(w.toarray())
    return np.asarray(w, dtype=float)


def _sum_squares(w: Component) -> float:
    if sp.issparse(w):
        return float(w.multiply(w).sum())
    arr = np.asarray(w, dtype=float)
    return float(np.vdot(arr, arr))


@dataclass(frozen=True, eq=False)
class QMatrix:
    """Quaternion matrix as four real components of identical shape.

    Components are dense ``ndarray`` or, for coefficient matrices, scipy CSR.
    """

    w0: Component
    w1: Component
    w2: Component
    w3: Component

    def __post_init__(self) -> None:
        shapes = {tuple(c.shape) for c in self.components}
        if len(shapes) != 1:
            raise DimensionMismatch(f"component shapes differ: {sorted(shapes)}")
        (shape,) = shapes
        if len(shape) != 2:
            raise DimensionMismatch(f"components must be 2-D, got shape {shape}")

    @classmethod
    def from_components(cls, w0, w1=None, w2=None, w3=None) -> "QMatrix":
        """Build from components; missing ones are zero. Dense inputs are copied to float."""
        base = w0 if sp.issparse(w0) else np.array(w0, dtype=float, ndmin=2)
        shape = base.shape

        def fill(w):
            if w is None:
                return sp.csr_matrix(shape) if sp.issparse(base) else np.zeros(shape)
            return w.tocsr() if sp.issparse(w) else np.array(w, dtype=float, ndmin=2)

        if sp.issparse(base):
            base = base.tocsr()
        return cls(base, fill(w1), fill(w2), fill(w3))

    @classmethod
    def zeros(cls, n: int, m: int) -> "QMatrix":
        return cls(np.zeros((n, m)), np.zeros((n, m)), np.zeros((n, m)), np.zeros((n, m)))

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls.from_components(np.eye(n))

    @classmethod
    def from_quaternion(cls, q: Quaternion) -> "QMatrix":
        return cls.from_components([[q.q0]], [[q.q1]], [[q.q2]], [[q.q3]])

    @classmethod
    def from_qarray(cls, arr) -> "QMatrix":
        a = np.asarray(arr, dtype=float)
        if a.ndim != 3 or a.shape[-1] != 4:
            raise DimensionMismatch(f"expected an (n, m, 4) array, got {a.shape}")
        return cls(*(np.ascontiguousarray(a[..., t]) for t in range(4)))

    @classmethod
    def random(cls, n: int, m: int, rng: np.random.Generator) -> "QMatrix":
        return cls(*(rng.standard_normal((n, m)) for _ in range(4)))

    @property
    def components(self) -> tuple[Component, Component, Component, Component]:
        return (self.w0, self.w1, self.w2, self.w3)

    @property
    def shape(self) -> tuple[int, int]:
        n, m = self.w0.shape
        return int(n), int(m)

    @property
    def n(self) -> int:
        return self.shape[0]

    @property
    def m(self) -> int:
        return self.shape[1]

    @property
    def is_sparse(self) -> bool:
        return any(sp.issparse(c) for c in self.components)

    def nnz(self) -> int:
        """Stored entries summed over the four components."""
        total = 0
        for c in self.components:
            total += int(c.nnz) if sp.issparse(c) else int(np.count_nonzero(c))
        return total

    def dense(self) -> "QMatrix":
        if not self.is_sparse:
            return self
        return QMatrix(*(_dense(c) for c in self.components))

    def to_qarray(self) -> np.ndarray:
        return np.stack([_dense(c) for c in self.components], axis=-1)

    def entry(self, i: int, j: int) -> Quaternion:
        return Quaternion(*(float(_dense(c[i : i + 1, j : j + 1])[0, 0]) for c in self.components))

    def is_pure(self) -> bool:
        return _sum_squares(self.w0) == 0.0

    def is_finite(self) -> bool:
        """No NaN or Inf in any stored component."""
        return all(
            bool(np.isfinite(c.data if sp.issparse(c) else c).all()) for c in self.components
        )

    def __add__(self, other: "QMatrix") -> "QMatrix":
        _check_same_shape(self, other)
        return QMatrix(*(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        _check_same_shape(self, other)
        return QMatrix(*(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "QMatrix":
        return QMatrix(*(-c for c in self.components))

    def __mul__(self, scalar: float) -> "QMatrix":
        s = float(scalar)
        return QMatrix(*(c * s for c in self.components))

    __rmul__ = __mul__

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        return qmat_mul(self, other)

    def right_mul(self, q: Quaternion) -> "QMatrix":
        """``X * q`` with the scalar on the right."""
        x0, x1, x2, x3 = self.components
        a, b, c, d = q.q0, q.q1, q.q2, q.q3
        return QMatrix(
            x0 * a - x1 * b - x2 * c - x3 * d,
            x0 * b + x1 * a + x2 * d - x3 * c,
            x0 * c - x1 * d + x2 * a + x3 * b,
            x0 * d + x1 * c - x2 * b + x3 * a,
        )

    def left_mul(self, q: Quaternion) -> "QMatrix":
        """``q * X`` with the scalar on the left."""
        x0, x1, x2, x3 = self.components
        a, b, c, d = q.q0, q.q1, q.q2, q.q3
        return QMatrix(
            x0 * a - x1 * b - x2 * c - x3 * d,
            x1 * a + x0 * b + x3 * c - x2 * d,
            x2 * a - x3 * b + x0 * c + x1 * d,
            x3 * a + x2 * b - x1 * c + x0 * d,
        )

    def conj_transpose(self) -> "QMatrix":
        return conj_transpose(self)


def _check_same_shape(x: QMatrix, y: QMatrix) -> None:
    if x.shape != y.shape:
        raise DimensionMismatch(f"shape {x.shape} does not match {y.shape}")


def conj_transpose(X: QMatrix) -> QMatrix:
    """``X* = X0^T - X1^T i - X2^T j - X3^T k``."""

    def t(c, sign):
        out = c.T * sign
        return out.tocsr() if sp.issparse(out) else np.ascontiguousarray(out)

    return QMatrix(t(X.w0, 1.0), t(X.w1, -1.0), t(X.w2, -1.0), t(X.w3, -1.0))


def real_counterpart(W: QMatrix):
    """Full 4n x 4m real counterpart (scipy CSR when ``W`` is sparse)."""
    w0, w1, w2, w3 = W.components
    blocks = [
        [w0, -w1, -w2, -w3],
        [w1, w0, -w3, w2],
        [w2, w3, w0, -w1],
        [w3, -w2, w1, w0],
    ]
    if W.is_sparse:
        return sp.bmat([[sp.csr_matrix(b) for b in row] for row in blocks], format="csr")
    return np.block(blocks)


def counterpart_column(W: QMatrix) -> np.ndarray:
    """First block column ``[W0; W1; W2; W3]`` (4n x m)."""
    return np.vstack([_dense(c) for c in W.components])


def from_counterpart_column(C) -> QMatrix:
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] % 4:
        raise DimensionMismatch(f"column form needs 4n rows, got shape {C.shape}")
    n = C.shape[0] // 4
    return QMatrix(*(np.ascontiguousarray(C[t * n : (t + 1) * n]) for t in range(4)))


def from_real_counterpart(R) -> QMatrix:
    """Recover ``W`` from its full counterpart (reads the first block column)."""
    rows, cols = R.shape
    if rows % 4 or cols % 4:
        raise DimensionMismatch(f"real counterpart needs a 4n x 4m shape, got {R.shape}")
    return from_counterpart_column(_dense(R[:, : cols // 4]))


def jrs_violation(M) -> float:
    """Largest entrywise deviation of a real 4p x 4q matrix from the counterpart pattern."""
    M = _dense(M)
    return float(np.max(np.abs(M - real_counterpart(from_real_counterpart(M)))))


def qmat_mul(A: QMatrix, V: QMatrix, workers: int | None = None) -> QMatrix:
    """Product ``A V`` through the first block column of the counterpart.

    Each component ``A_t`` is multiplied once against ``[V0 V1 V2 V3]``; the
    sixteen partial products are then assembled with the counterpart signs.
    """
    if A.m != V.n:
        raise DimensionMismatch(f"cannot multiply {A.shape} by {V.shape}")
    m = V.m
    stacked = np.hstack([_dense(c) for c in V.components])

    def product(t: int) -> np.ndarray:
        return np.asarray(A.components[t] @ stacked)

    workers = thread_count() if workers is None else max(1, int(workers))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=min(workers, 4)) as executor:
            blocks = list(executor.map(product, range(4)))
    else:
        blocks = [product(t) for t in range(4)]

    # p[t][s] = A_t V_s
    p = [[blk[:, s * m : (s + 1) * m] for s in range(4)] for blk in blocks]
    return QMatrix(
        p[0][0] - p[1][1] - p[2][2] - p[3][3],
        p[0][1] + p[1][0] + p[2][3] - p[3][2],
        p[0][2] - p[1][3] + p[2][0] + p[3][1],
        p[0][3] + p[1][2] - p[2][1] + p[3][0],
    )


def qmat_mul_flops(A: QMatrix, m: int) -> int:
    """Analytic flop count of ``qmat_mul`` for ``m`` right-hand columns."""
    p, q = A.shape
    if A.is_sparse:
        return 8 * A.nnz() * m
    return 4 * p * m * (8 * q - 1)


def inner_product(X: QMatrix, Y: QMatrix) -> Quaternion:
    """Trace inner product ``<X, Y> = tr(Y* X)``, right-linear in ``X``."""
    _check_same_shape(X, Y)
    x0, x1, x2, x3 = (_dense(c) for c in X.components)
    y0, y1, y2, y3 = (_dense(c) for c in Y.components)
    d = np.vdot
    return Quaternion(
        float(d(y0, x0) + d(y1, x1) + d(y2, x2) + d(y3, x3)),
        float(d(y0, x1) - d(y1, x0) - d(y2, x3) + d(y3, x2)),
        float(d(y0, x2) + d(y1, x3) - d(y2, x0) - d(y3, x1)),
        float(d(y0, x3) - d(y1, x2) + d(y2, x1) - d(y3, x0)),
    )


def fro_norm(X: QMatrix) -> float:
    return math.sqrt(sum(_sum_squares(c) for c in X.components))
