"""Restoration quality measures: PSNR, global SSIM and relative error."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import DimensionMismatch
from ..qcore import QMatrix, fro_norm
from .images import DYNAMIC_RANGE, QuatImage


@dataclass(frozen=True)
class Metrics:
    psnr: float
    ssim: float
    rr: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


def _as_matrix(x: QuatImage | QMatrix) -> QMatrix:
    return x.matrix if isinstance(x, QuatImage) else x


def _pair(X, Xk) -> tuple[QMatrix, QMatrix]:
    a, b = _as_matrix(X), _as_matrix(Xk)
    if a.shape != b.shape:
        raise DimensionMismatch(f"image shapes differ: {a.shape} vs {b.shape}")
    return a.dense(), b.dense()


def psnr(X, Xk, d: float = DYNAMIC_RANGE) -> float:
    """``10 log10(3 n m d^2 / ||X - Xk||^2)``; ``inf`` for identical inputs."""
    a, b = _pair(X, Xk)
    err = fro_norm(a - b) ** 2
    if err == 0.0:
        return math.inf
    n, m = a.shape
    return 10.0 * math.log10(3.0 * n * m * d * d / err)


def ssim(X, Xk, L: float = DYNAMIC_RANGE) -> float:
    """Single-window SSIM over all 3nm channel values, population statistics."""
    a, b = _pair(X, Xk)
    x = np.concatenate([c.ravel() for c in (a.w1, a.w2, a.w3)])
    y = np.concatenate([c.ravel() for c in (b.w1, b.w2, b.w3)])
    c1 = (0.01 * L) ** 2
    c2 = (0.03 * L) ** 2
    mu_x, mu_y = float(x.mean()), float(y.mean())
    var_x, var_y = float(x.var()), float(y.var())
    cov = float(np.mean((x - mu_x) * (y - mu_y)))
    return ((2 * mu_x * mu_y + c1) * (2 * cov + c2)) / (
        (mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2)
    )


def rr(X, Xk) -> float:
    """``||X - Xk|| / ||X||``."""
    a, b = _pair(X, Xk)
    ref = fro_norm(a)
    if ref == 0.0:
        raise ZeroDivisionError("reference image is zero")
    return fro_norm(a - b) / ref


def compute_metrics(X, Xk) -> Metrics:
    return Metrics(psnr=psnr(X, Xk), ssim=ssim(X, Xk), rr=rr(X, Xk))
