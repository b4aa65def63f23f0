"""Toeplitz blurring operators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..errors import DimensionMismatch
from ..qcore import QMatrix

BLUR_KINDS = ("uniform", "gaussian", "multichannel")
MULTICHANNEL_INNER = 8


@dataclass(frozen=True)
class BlurSpec:
    kind: str
    s: int | None = None
    r: int | None = None
    sigma: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in BLUR_KINDS:
            raise ValueError(f"unknown blur kind {self.kind!r}; use one of {BLUR_KINDS}")
        if self.kind == "uniform" and (self.s is None or self.s < 1):
            raise ValueError("uniform blur needs s >= 1")
        if self.kind == "gaussian":
            if self.r is None or self.r < 0:
                raise ValueError("gaussian blur needs r >= 0")
            if self.sigma is None or not self.sigma > 0:
                raise ValueError("gaussian blur needs sigma > 0")

    def label(self) -> str:
        if self.kind == "uniform":
            return f"uniform:s={self.s}"
        if self.kind == "gaussian":
            return f"gaussian:r={self.r},sigma={self.sigma:g}"
        return "multichannel"


def parse_blur_spec(text: str) -> BlurSpec:
    """Parse ``uniform:s=INT``, ``gaussian:r=INT,sigma=FLOAT`` or ``multichannel``."""
    kind, _, rest = text.strip().partition(":")
    params: dict[str, str] = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"blur parameter {item!r} is not key=value")
        params[key.strip()] = value.strip()
    unknown = set(params) - {"s", "r", "sigma"}
    if unknown:
        raise ValueError(f"unknown blur parameters: {', '.join(sorted(unknown))}")
    try:
        return BlurSpec(
            kind=kind.strip(),
            s=int(params["s"]) if "s" in params else None,
            r=int(params["r"]) if "r" in params else None,
            sigma=float(params["sigma"]) if "sigma" in params else None,
        )
    except (TypeError, ValueError) as exc:
        raise ValueError(f"invalid blur spec {text!r}: {exc}") from None


def toeplitz_uniform(n: int, s: int) -> np.ndarray:
    """Band of half-width ``s`` filled with ``1 / (2s - 1)``."""
    if n < 1 or s < 1:
        raise ValueError("toeplitz_uniform needs n >= 1 and s >= 1")
    offsets = np.arange(n)
    return scipy.linalg.toeplitz(np.where(offsets <= s, 1.0 / (2 * s - 1), 0.0))


def toeplitz_gaussian(n: int, r: int, sigma: float) -> np.ndarray:
    """Truncated Gaussian band: ``exp(-(i-j)^2 / (2 sigma^2)) / (sigma sqrt(2 pi))``."""
    if n < 1 or r < 0 or not sigma > 0:
        raise ValueError("toeplitz_gaussian needs n >= 1, r >= 0 and sigma > 0")
    offsets = np.arange(n, dtype=float)
    col = np.exp(-(offsets**2) / (2.0 * sigma**2)) / (sigma * math.sqrt(2.0 * math.pi))
    return scipy.linalg.toeplitz(np.where(offsets <= r, col, 0.0))


def kronecker(H0: np.ndarray, H1: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(H0, dtype=float), np.asarray(H1, dtype=float))


def multichannel_blur(A1: np.ndarray) -> QMatrix:
    """Pure quaternion blur ``A1 i + A2 j + A3 k`` with ``A2 = A3 = -0.5 A1``."""
    A1 = np.asarray(A1, dtype=float)
    if A1.ndim != 2 or A1.shape[0] != A1.shape[1]:
        raise DimensionMismatch(f"multichannel blur needs a square matrix, got {A1.shape}")
    return QMatrix(np.zeros_like(A1), A1.copy(), -0.5 * A1, -0.5 * A1)


def multichannel_factors(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian ``H0`` (r = sigma = 3) and uniform ``H1`` (s = 5) with ``H0 kron H1`` of order n.

    ``H1`` has order 8 when 8 divides ``n``; otherwise ``H1 = [1]``.
    """
    if n % MULTICHANNEL_INNER == 0:
        inner = MULTICHANNEL_INNER
        H1 = toeplitz_uniform(inner, 5)
    else:
        inner = 1
        H1 = np.ones((1, 1))
    H0 = toeplitz_gaussian(n // inner, 3, 3.0)
    return H0, H1


def blur_matrix(spec: BlurSpec, n: int) -> QMatrix:
    """Blurring operator of order ``n`` for ``spec``."""
    if spec.kind == "uniform":
        return QMatrix.from_components(toeplitz_uniform(n, spec.s or 1))
    if spec.kind == "gaussian":
        return QMatrix.from_components(toeplitz_gaussian(n, spec.r or 0, spec.sigma or 1.0))
    H0, H1 = multichannel_factors(n)
    return multichannel_blur(kronecker(H0, H1))
