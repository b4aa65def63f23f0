import math

import numpy as np
import pytest

from qkrylov.problems import (
    BlurSpec,
    blur_matrix,
    kronecker,
    multichannel_blur,
    parse_blur_spec,
    toeplitz_gaussian,
    toeplitz_uniform,
)
from qkrylov.problems.blur import multichannel_factors


def test_uniform_band_values():
    T = toeplitz_uniform(10, 2)
    assert np.allclose(T, T.T)
    assert T[0, 0] == pytest.approx(1.0 / 3.0)
    assert T[4, 6] == pytest.approx(1.0 / 3.0)
    assert T[4, 7] == 0.0
    # interior rows carry 2s + 1 entries
    assert T[5].sum() == pytest.approx(5.0 / 3.0)


def test_uniform_band_wider_than_matrix_is_full():
    T = toeplitz_uniform(4, 6)
    assert np.allclose(T, np.full((4, 4), 1.0 / 11.0))


def test_gaussian_band():
    T = toeplitz_gaussian(12, 3, 2.0)
    peak = 1.0 / (2.0 * math.sqrt(2.0 * math.pi))
    assert T[5, 5] == pytest.approx(peak)
    assert T[5, 7] == pytest.approx(peak * math.exp(-4.0 / 8.0))
    assert T[5, 9] == 0.0
    assert np.allclose(T, T.T)


def test_kronecker_product():
    H0 = np.array([[1.0, 2.0], [0.0, 1.0]])
    H1 = np.eye(3)
    K = kronecker(H0, H1)
    assert K.shape == (6, 6)
    assert np.array_equal(K[:3, 3:], 2.0 * np.eye(3))


def test_multichannel_blur_is_pure():
    A1 = toeplitz_uniform(5, 1)
    A = multichannel_blur(A1)
    assert A.is_pure()
    assert np.array_equal(A.w2, -0.5 * A1)
    assert np.array_equal(A.w3, -0.5 * A1)


def test_multichannel_factor_sizes():
    H0, H1 = multichannel_factors(128)
    assert H0.shape == (16, 16)
    assert H1.shape == (8, 8)
    H0, H1 = multichannel_factors(12)
    assert H0.shape == (12, 12)
    assert np.array_equal(H1, [[1.0]])
    assert blur_matrix(BlurSpec("multichannel"), 24).shape == (24, 24)


def test_blur_matrix_kinds():
    U = blur_matrix(parse_blur_spec("uniform:s=3"), 9)
    assert not (U.w1.any() or U.w2.any() or U.w3.any())
    assert np.allclose(U.w0, toeplitz_uniform(9, 3))
    G = blur_matrix(parse_blur_spec("gaussian:r=2,sigma=1.5"), 9)
    assert np.allclose(G.w0, toeplitz_gaussian(9, 2, 1.5))


def test_parse_blur_spec():
    spec = parse_blur_spec("gaussian:r=35,sigma=10")
    assert spec == BlurSpec("gaussian", r=35, sigma=10.0)
    assert spec.label() == "gaussian:r=35,sigma=10"
    assert parse_blur_spec("multichannel").kind == "multichannel"
    for bad in ("uniform", "uniform:s=0", "box:s=2", "uniform:t=3", "gaussian:r=2", "uniform:s"):
        with pytest.raises(ValueError):
            parse_blur_spec(bad)
