"""Colour images as pure quaternion matrices, plus the component CSV dump."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..errors import DimensionMismatch, ImageIOError, ParseError, UnsupportedFormat
from ..qcore import QMatrix

DYNAMIC_RANGE = 255.0


@dataclass(frozen=True)
class QuatImage:
    """Red, green and blue in the i, j and k components; the real part stays zero."""

    matrix: QMatrix
    d: float = DYNAMIC_RANGE

    def __post_init__(self) -> None:
        if not self.matrix.dense().is_pure():
            raise ValueError("image matrix must be a pure quaternion (zero real part)")

    @classmethod
    def from_channels(cls, red, green, blue, d: float = DYNAMIC_RANGE) -> "QuatImage":
        red = np.asarray(red, dtype=float)
        green = np.asarray(green, dtype=float)
        blue = np.asarray(blue, dtype=float)
        return cls(QMatrix(np.zeros_like(red), red, green, blue), d)

    @classmethod
    def from_matrix(cls, X: QMatrix, d: float = DYNAMIC_RANGE) -> "QuatImage":
        """Drop any real part, e.g. from a restored iterate."""
        X = X.dense()
        return cls(QMatrix(np.zeros(X.shape), X.w1, X.w2, X.w3), d)

    @property
    def height(self) -> int:
        return self.matrix.n

    @property
    def width(self) -> int:
        return self.matrix.m

    def channels(self) -> np.ndarray:
        """``(height, width, 3)`` array of channel values."""
        X = self.matrix.dense()
        return np.stack([X.w1, X.w2, X.w3], axis=-1)

    def to_uint8(self) -> np.ndarray:
        return np.clip(np.rint(self.channels()), 0, 255).astype(np.uint8)


def image_read(path: str | Path) -> QuatImage:
    """Read an 8-bit RGB PNG.

    Missing or unreadable files raise ImageIOError, other modes UnsupportedFormat.
    """
    path = Path(path)
    try:
        with Image.open(path) as img:
            if img.mode != "RGB":
                raise UnsupportedFormat(f"{path}: expected 8-bit RGB, got mode {img.mode}")
            pixels = np.asarray(img, dtype=np.uint8)
    except FileNotFoundError:
        raise ImageIOError(f"image not found: {path}") from None
    except UnidentifiedImageError:
        raise ImageIOError(f"not a readable image: {path}") from None
    data = pixels.astype(float)
    return QuatImage.from_channels(data[..., 0], data[..., 1], data[..., 2])


def image_write(path: str | Path, image: QuatImage) -> None:
    """Write as PNG; values are clamped to [0, 255] and rounded."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        Image.fromarray(image.to_uint8()).save(path, format="PNG")
    except OSError as exc:
        raise ImageIOError(f"cannot write {path}: {exc}") from exc


def synthetic_image(height: int, width: int | None = None) -> QuatImage:
    """Deterministic test picture: smooth colour ramps with two flat blocks."""
    width = height if width is None else width
    y, x = np.mgrid[0:height, 0:width].astype(float)
    u, v = x / max(width - 1, 1), y / max(height - 1, 1)
    red = 127.5 * (1.0 + np.sin(2.0 * np.pi * u))
    green = 255.0 * v
    blue = 127.5 * (1.0 + np.cos(np.pi * (u + v)))
    h4, w4 = height // 4, width // 4
    red[h4 : 2 * h4, w4 : 2 * w4] = 230.0
    green[h4 : 2 * h4, w4 : 2 * w4] = 40.0
    blue[2 * h4 : 3 * h4, 2 * w4 : 3 * w4] = 20.0
    green[2 * h4 : 3 * h4, 2 * w4 : 3 * w4] = 200.0
    return QuatImage.from_channels(*(np.rint(c) for c in (red, green, blue)))


def write_qmatrix_csv(path: str | Path, W: QMatrix) -> None:
    """Header ``qmatrix n m`` then the four components, row-major, blank-line separated."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n, m = W.shape
    blocks = []
    for comp in W.dense().components:
        blocks.append("\n".join(",".join(repr(float(v)) for v in row) for row in comp))
    path.write_text(f"qmatrix {n} {m}\n" + "\n\n".join(blocks) + "\n", encoding="utf-8")


def read_qmatrix_csv(path: str | Path) -> QMatrix:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split() if lines else []
    if len(header) != 3 or header[0] != "qmatrix":
        raise ParseError(1, "expected header 'qmatrix n m'")
    try:
        n, m = int(header[1]), int(header[2])
    except ValueError:
        raise ParseError(1, "dimensions must be integers") from None
    comps: list[list[list[float]]] = [[]]
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            if comps[-1]:
                comps.append([])
            continue
        try:
            row = [float(v) for v in line.split(",")]
        except ValueError:
            raise ParseError(lineno, "non-numeric value") from None
        if len(row) != m:
            raise ParseError(lineno, f"expected {m} values, found {len(row)}")
        comps[-1].append(row)
    comps = [c for c in comps if c]
    if len(comps) != 4 or any(len(c) != n for c in comps):
        raise DimensionMismatch(f"expected four {n} x {m} blocks")
    return QMatrix(*(np.array(c, dtype=float).reshape(n, m) for c in comps))
