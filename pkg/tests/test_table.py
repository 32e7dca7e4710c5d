import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polarwave.table import SweepTable, encode_csv, format_value, write_csv


@pytest.mark.parametrize(
    "value, text",
    [
        (0.19215, "1.92150000e-1"),
        (1.0, "1.00000000e0"),
        (-2.5e-12, "-2.50000000e-12"),
        (1.234e100, "1.23400000e100"),
        (0.0, "0.00000000e0"),
        (-0.0, "0.00000000e0"),
        (float("nan"), "nan"),
        (float("inf"), "inf"),
        (float("-inf"), "-inf"),
    ],
)
def test_format_value(value, text):
    assert format_value(value) == text


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_round_trip_nine_digits(x):
    back = float(format_value(x))
    assert back == pytest.approx(x, rel=5e-9, abs=0.0) or x == 0.0


def test_two_by_two_table(tmp_path):
    table = SweepTable(("x", "y"), np.array([[0.0, 1.0], [1.0, float("nan")]]))
    path = tmp_path / "t.csv"
    write_csv(table, path)
    raw = path.read_bytes()
    assert raw == b"x,y\n0.00000000e0,1.00000000e0\n1.00000000e0,nan\n"
    assert len(raw.decode().splitlines()) == 3
    write_csv(table, tmp_path / "u.csv")
    assert (tmp_path / "u.csv").read_bytes() == raw


def test_table_validation():
    with pytest.raises(ValueError):
        SweepTable(("x", "y"), np.zeros((2, 3)))
    with pytest.raises(ValueError):
        SweepTable(("x",), np.array([[1.0], [1.0]]))
    with pytest.raises(ValueError):
        SweepTable(("x",), np.array([[float("nan")]]))
    empty = SweepTable(("x", "y"), np.array([]))
    assert len(empty) == 0 and encode_csv(empty) == "x,y\n"


def test_from_columns():
    table = SweepTable.from_columns({"a": [1, 2], "b": [3, 4]})
    assert table.header == ("a", "b")
    np.testing.assert_array_equal(table.column("b"), [3.0, 4.0])
