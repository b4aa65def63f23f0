"""MatrixMarket reader (real coordinate and array formats)."""

from __future__ import annotations

import logging
from pathlib import Path

import scipy.io as scio
import scipy.sparse as sp

from ..errors import ParseError, UnsupportedField

logger = logging.getLogger(__name__)

SUPPORTED_FIELDS = {"real", "integer"}
REJECTED_FIELDS = {"complex", "pattern"}


def _numbers(tokens: list[str], lineno: int, kinds: str) -> list:
    out = []
    for tok, kind in zip(tokens, kinds):
        try:
            out.append(int(tok) if kind == "i" else float(tok))
        except ValueError:
            expected = "an integer" if kind == "i" else "a number"
            raise ParseError(lineno, f"cannot read {tok!r} as {expected}") from None
    return out


def _scan_body(lines: list[str], fmt: str, symmetry: str, rows: int, cols: int) -> int:
    """Check entry lines so malformed content is reported with its line number.

    Returns the line number of the size line.
    """
    body = [
        (lineno, line.split())
        for lineno, line in enumerate(lines[1:], start=2)
        if line.strip() and not line.lstrip().startswith("%")
    ]
    size_lineno, _ = body[0]
    entries = body[1:]
    if fmt == "coordinate":
        expected = int(body[0][1][2])
        width, kinds = 3, "iif"
    else:
        expected = sum(
            1
            for j in range(cols)
            for i in range(rows)
            if symmetry == "general"
            or (symmetry == "symmetric" and i >= j)
            or (symmetry == "skew-symmetric" and i > j)
        )
        width, kinds = 1, "f"
    if len(entries) != expected:
        last = entries[-1][0] if entries else size_lineno
        noun = "entries" if fmt == "coordinate" else "values"
        raise ParseError(last, f"expected {expected} {noun}, found {len(entries)}")
    for lineno, tokens in entries:
        if len(tokens) != width:
            raise ParseError(lineno, f"expected {width} field(s), found {len(tokens)}")
        values = _numbers(tokens, lineno, kinds)
        if fmt != "coordinate":
            continue
        i, j = values[0], values[1]
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise ParseError(lineno, f"index ({i}, {j}) outside {rows} x {cols}")
        if symmetry != "general" and j > i:
            raise ParseError(lineno, f"entry ({i}, {j}) above the diagonal ({symmetry})")
    return size_lineno


def parse_matrix_market(path: str | Path) -> sp.csr_matrix:
    """Read a real MatrixMarket file into CSR.

    Symmetric and skew-symmetric storage is expanded and duplicate coordinate
    entries are summed. Malformed content raises ParseError with the offending
    line; complex and pattern files raise UnsupportedField.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"matrix file not found: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].lower().startswith("%%matrixmarket"):
        raise ParseError(1, "missing %%MatrixMarket banner")
    try:
        rows, cols, _, fmt, field, symmetry = scio.mminfo(str(path))
    except (ValueError, RuntimeError, IndexError) as exc:
        raise ParseError(1, f"malformed header: {exc}") from None
    if field in REJECTED_FIELDS or symmetry == "hermitian":
        raise UnsupportedField(
            f"{field} {symmetry} MatrixMarket files are not supported (real only)"
        )
    if field not in SUPPORTED_FIELDS:
        raise UnsupportedField(f"unknown field {field!r}")
    if symmetry != "general" and rows != cols:
        raise ParseError(2, f"{symmetry} storage requires a square matrix")

    size_lineno = _scan_body(lines, fmt, symmetry, int(rows), int(cols))
    try:
        loaded = scio.mmread(str(path))
    except (ValueError, RuntimeError) as exc:
        raise ParseError(size_lineno, str(exc)) from None
    A = sp.csr_matrix(loaded, dtype=float)
    A.sum_duplicates()
    logger.debug("read %s: %d x %d, %d stored entries", path.name, rows, cols, A.nnz)
    return A
