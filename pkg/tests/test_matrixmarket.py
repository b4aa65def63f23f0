from pathlib import Path

import numpy as np
import pytest

from qkrylov.errors import ParseError, UnsupportedField
from qkrylov.problems import parse_matrix_market


def write_mtx(tmp_path: Path, text: str, name: str = "m.mtx") -> Path:
    path = tmp_path / name
    path.write_text(text.lstrip(), encoding="utf-8")
    return path


def test_general_coordinate(tmp_path: Path):
    path = write_mtx(
        tmp_path,
        """
%%MatrixMarket matrix coordinate real general
% comment line
3 3 4
1 1 2.0
2 3 -1.5
3 1 4
3 3 1e-1
""",
    )
    A = parse_matrix_market(path)
    expected = np.array([[2.0, 0.0, 0.0], [0.0, 0.0, -1.5], [4.0, 0.0, 0.1]])
    assert A.format == "csr"
    assert np.array_equal(A.toarray(), expected)


def test_symmetric_and_skew_are_expanded(tmp_path: Path):
    sym = write_mtx(
        tmp_path,
        """
%%MatrixMarket matrix coordinate real symmetric
2 2 2
1 1 3
2 1 5
""",
        "sym.mtx",
    )
    skew = write_mtx(
        tmp_path,
        """
%%MatrixMarket matrix coordinate integer skew-symmetric
2 2 1
2 1 5
""",
        "skew.mtx",
    )
    assert np.array_equal(parse_matrix_market(sym).toarray(), [[3.0, 5.0], [5.0, 0.0]])
    assert np.array_equal(parse_matrix_market(skew).toarray(), [[0.0, -5.0], [5.0, 0.0]])


def test_duplicate_entries_are_summed(tmp_path: Path):
    path = write_mtx(
        tmp_path,
        """
%%MatrixMarket matrix coordinate real general
2 2 3
1 2 1.0
1 2 2.5
2 2 1.0
""",
    )
    assert np.array_equal(parse_matrix_market(path).toarray(), [[0.0, 3.5], [0.0, 1.0]])


def test_array_format_is_column_major(tmp_path: Path):
    path = write_mtx(
        tmp_path,
        """
%%MatrixMarket matrix array real general
2 3
1
2
3
4
5
6
""",
    )
    assert np.array_equal(parse_matrix_market(path).toarray(), [[1, 3, 5], [2, 4, 6]])


def test_symmetric_array_reads_lower_triangle(tmp_path: Path):
    path = write_mtx(
        tmp_path,
        """
%%MatrixMarket matrix array real symmetric
2 2
1
2
3
""",
    )
    assert np.array_equal(parse_matrix_market(path).toarray(), [[1.0, 2.0], [2.0, 3.0]])


@pytest.mark.parametrize("field", ["complex", "pattern"])
def test_unsupported_fields(tmp_path: Path, field: str):
    path = write_mtx(tmp_path, f"%%MatrixMarket matrix coordinate {field} general\n1 1 0\n")
    with pytest.raises(UnsupportedField):
        parse_matrix_market(path)


def test_missing_banner(tmp_path: Path):
    path = write_mtx(tmp_path, "3 3 0\n")
    with pytest.raises(ParseError) as info:
        parse_matrix_market(path)
    assert info.value.line == 1


def test_entry_count_mismatch(tmp_path: Path):
    path = write_mtx(
        tmp_path,
        """
%%MatrixMarket matrix coordinate real general
2 2 3
1 1 1.0
2 2 1.0
""",
    )
    with pytest.raises(ParseError, match="expected 3 entries"):
        parse_matrix_market(path)


def test_bad_number_reports_line(tmp_path: Path):
    path = write_mtx(
        tmp_path,
        """
%%MatrixMarket matrix coordinate real general
2 2 2
1 1 1.0
2 2 abc
""",
    )
    with pytest.raises(ParseError) as info:
        parse_matrix_market(path)
    assert info.value.line == 4
    assert "abc" in str(info.value)


def test_symmetric_entry_above_diagonal(tmp_path: Path):
    path = write_mtx(
        tmp_path,
        """
%%MatrixMarket matrix coordinate real symmetric
2 2 1
1 2 1.0
""",
    )
    with pytest.raises(ParseError, match="above the diagonal"):
        parse_matrix_market(path)


def test_index_outside_matrix(tmp_path: Path):
    path = write_mtx(
        tmp_path,
        """
%%MatrixMarket matrix coordinate real general
2 2 1
3 1 1.0
""",
    )
    with pytest.raises(ParseError, match="outside"):
        parse_matrix_market(path)


def test_missing_file(tmp_path: Path):
    with pytest.raises(FileNotFoundError):
        parse_matrix_market(tmp_path / "nope.mtx")


def test_integer_field_loads_as_float(tmp_path: Path):
    path = write_mtx(
        tmp_path,
        """
%%MatrixMarket matrix coordinate integer general
2 2 2
1 1 3
2 2 -4
""",
    )
    A = parse_matrix_market(path)
    assert A.dtype == np.float64
    assert np.array_equal(A.toarray(), [[3.0, 0.0], [0.0, -4.0]])


def test_array_value_count_mismatch(tmp_path: Path):
    path = write_mtx(tmp_path, "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n")
    with pytest.raises(ParseError, match="expected 4 values") as info:
        parse_matrix_market(path)
    assert info.value.line == 5
