import math

import numpy as np
import pytest

from qkrylov.errors import DimensionMismatch
from qkrylov.problems import QuatImage, compute_metrics, psnr, rr, ssim, synthetic_image
from qkrylov.qcore import QMatrix


def image_with_offset(base: QuatImage, delta: float) -> QuatImage:
    X = base.matrix
    return QuatImage(QMatrix(X.w0, X.w1 + delta, X.w2, X.w3))


def test_identical_images():
    img = synthetic_image(8)
    assert psnr(img, img) == math.inf
    assert ssim(img, img) == pytest.approx(1.0)
    assert rr(img, img) == 0.0


def test_psnr_single_unit_error():
    img = synthetic_image(6)
    X = img.matrix
    w2 = X.w2.copy()
    w2[2, 3] += 1.0
    noisy = QuatImage(QMatrix(X.w0, X.w1, w2, X.w3))
    assert psnr(img, noisy) == pytest.approx(10.0 * math.log10(3 * 36 * 255.0**2))


def test_more_noise_scores_lower():
    img = synthetic_image(16)
    slight = image_with_offset(img, 2.0)
    heavy = image_with_offset(img, 20.0)
    assert psnr(img, heavy) < psnr(img, slight)
    assert ssim(img, heavy) < ssim(img, slight) <= 1.0
    assert rr(img, heavy) > rr(img, slight)


def test_relative_error_against_matrix():
    img = synthetic_image(4)
    zero = QMatrix.zeros(4, 4)
    assert rr(img, zero) == pytest.approx(1.0)
    with pytest.raises(ZeroDivisionError):
        rr(zero, img)


def test_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        psnr(synthetic_image(4), synthetic_image(5))


def test_compute_metrics_dict():
    img = synthetic_image(8)
    m = compute_metrics(img, image_with_offset(img, 1.0)).to_dict()
    assert set(m) == {"psnr", "ssim", "rr"}
    assert np.isfinite(m["psnr"])
