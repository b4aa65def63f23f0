"""Test problems, data ingestion and image metrics."""

from .blur import (
    BlurSpec,
    blur_matrix,
    kronecker,
    multichannel_blur,
    parse_blur_spec,
    toeplitz_gaussian,
    toeplitz_uniform,
)
from .generators import (
    EXAMPLE_COEFFS,
    RNG_ALGORITHM,
    SYLVESTER_FAMILIES,
    StackedSystem,
    SylvesterProblem,
    build_test_problem,
    make_rng,
    random_problem,
    stack,
    stack_columns,
    sylvester_problem,
    tridiagonal_b0,
    unstack,
)
from .images import (
    QuatImage,
    image_read,
    image_write,
    read_qmatrix_csv,
    synthetic_image,
    write_qmatrix_csv,
)
from .matrixmarket import parse_matrix_market
from .metrics import Metrics, compute_metrics, psnr, rr, ssim

__all__ = [
    "BlurSpec",
    "EXAMPLE_COEFFS",
    "Metrics",
    "QuatImage",
    "RNG_ALGORITHM",
    "SYLVESTER_FAMILIES",
    "StackedSystem",
    "SylvesterProblem",
    "blur_matrix",
    "build_test_problem",
    "compute_metrics",
    "image_read",
    "image_write",
    "kronecker",
    "make_rng",
    "multichannel_blur",
    "parse_blur_spec",
    "parse_matrix_market",
    "psnr",
    "random_problem",
    "read_qmatrix_csv",
    "rr",
    "ssim",
    "stack",
    "stack_columns",
    "sylvester_problem",
    "synthetic_image",
    "toeplitz_gaussian",
    "toeplitz_uniform",
    "tridiagonal_b0",
    "unstack",
    "write_qmatrix_csv",
]
