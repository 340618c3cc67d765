"""Tests for exact scalars, matrices and bitsets."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dimlift.errors import ParseError, ResourceError, ShapeError
from dimlift.exactnum import (
    BitSet,
    RatMatrix,
    as_rational,
    format_rational,
    hstack,
    mat_mul,
    powerset,
    rat_cmp,
    vec_max,
    vstack,
)

small = st.fractions(min_value=-10, max_value=10, max_denominator=12)


def matrices(rows: int, cols: int):
    return st.lists(small, min_size=rows * cols, max_size=rows * cols).map(
        lambda xs: RatMatrix(rows, cols, tuple(xs))
    )


class TestRationals:
    """Parsing and formatting of p/q strings."""

    def test_parse_forms(self):
        assert as_rational("3/6") == Fraction(1, 2)
        assert as_rational(" -4 ") == Fraction(-4)
        assert as_rational(7) == Fraction(7)

    def test_floats_rejected(self):
        with pytest.raises(ParseError):
            as_rational(0.5)

    def test_bool_rejected(self):
        with pytest.raises(ParseError):
            as_rational(True)

    @pytest.mark.parametrize("text", ["1/0", "a/b", "1/", ""])
    def test_bad_strings(self, text):
        with pytest.raises(ParseError):
            as_rational(text)

    def test_format(self):
        assert format_rational(Fraction(4, 2)) == "2"
        assert format_rational(Fraction(-3, 9)) == "-1/3"

    @given(small)
    def test_format_parses_back(self, x):
        assert as_rational(format_rational(x)) == x

    @given(small, small)
    def test_rat_cmp_matches_ordering(self, x, y):
        assert rat_cmp(x, y) == (x > y) - (x < y)

    @given(small, small, small)
    def test_field_axioms(self, x, y, z):
        assert (x + y) + z == x + (y + z)
        assert x * (y + z) == x * y + x * z
        if x:
            assert x * (1 / x) == 1


class TestRatMatrix:
    def test_from_rows_and_access(self):
        m = RatMatrix.from_rows([[1, "1/2"], [0, 3]])
        assert m.shape == (2, 2)
        assert m[0, 1] == Fraction(1, 2)
        assert m.column(1) == (Fraction(1, 2), Fraction(3))

    def test_ragged_rows_rejected(self):
        with pytest.raises(ShapeError):
            RatMatrix.from_rows([[1, 2], [3]])

    def test_product_shape_mismatch(self):
        with pytest.raises(ShapeError):
            mat_mul(RatMatrix.zeros(2, 3), RatMatrix.zeros(2, 3))

    def test_identity_is_neutral(self):
        m = RatMatrix.from_rows([[1, 2, 3], [4, 5, 6]])
        assert RatMatrix.identity(2) @ m == m
        assert m @ RatMatrix.identity(3) == m

    def test_json_uses_strings(self):
        m = RatMatrix.from_rows([["2/4", -1]])
        assert m.to_json() == [["1/2", "-1"]]
        assert RatMatrix.from_json(m.to_json()) == m

    def test_stacking(self):
        a = RatMatrix.from_rows([[1], [2]])
        b = RatMatrix.from_rows([[3], [4]])
        assert hstack([a, b], rows=2) == RatMatrix.from_rows([[1, 3], [2, 4]])
        assert vstack([a, b], cols=1) == RatMatrix.from_rows([[1], [2], [3], [4]])

    def test_empty_shapes(self):
        m = RatMatrix.from_rows([], cols=3)
        assert m.shape == (0, 3)
        assert (RatMatrix.zeros(2, 0) @ RatMatrix.zeros(0, 4)) == RatMatrix.zeros(2, 4)

    @given(matrices(2, 3), matrices(3, 2), matrices(2, 2))
    def test_product_is_associative(self, a, b, c):
        assert (a @ b) @ c == a @ (b @ c)

    @given(matrices(2, 2), matrices(2, 2), matrices(2, 2))
    def test_product_distributes(self, a, b, c):
        assert a @ (b + c) == a @ b + a @ c


class TestBitSet:
    def test_members(self):
        s = BitSet.from_indices(4, [0, 2])
        assert 2 in s and 1 not in s
        assert len(s) == 2
        assert str(s) == "{0,2}"

    def test_out_of_range(self):
        with pytest.raises(ShapeError):
            BitSet.from_indices(2, [2])
        with pytest.raises(ShapeError):
            BitSet(2, 0b100)

    def test_union_and_subset(self):
        a, b = BitSet(3, 0b001), BitSet(3, 0b011)
        assert a.union(b) == b
        assert a.issubset(b) and not b.issubset(a)

    def test_powerset_binary_counter_order(self):
        assert [s.mask for s in powerset(2)] == [0, 1, 2, 3]

    def test_powerset_cap(self):
        with pytest.raises(ResourceError) as exc:
            powerset(5, cap=4)
        assert exc.value.cap_name == "powerset_cap"


def test_vec_max_is_coordinatewise():
    assert vec_max([(1, 3), (2, 2)]) == (2, 3)
