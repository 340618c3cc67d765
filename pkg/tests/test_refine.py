"""Tests for interpolation and the refinement tables."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimlift.errors import InfeasibleError, PreconditionError, ShapeError
from dimlift.exactnum import BitSet
from dimlift.refine import (
    Decomposition,
    check_lamas_table,
    check_mult_table,
    check_riesz_table,
    interpolate,
    lamas_decompose,
    mult_refine,
    riesz_refine,
)

F = Fraction
nonneg = st.fractions(min_value=0, max_value=6, max_denominator=6)


def vec(*xs):
    return tuple(F(x) for x in xs)


class TestInterpolate:
    def test_coordinatewise_max(self):
        assert interpolate([vec(1, 3), vec(2, 2)], [vec(3, 4)]) == vec(2, 3)

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            interpolate([vec(5, 0)], [vec(3, 4)])

    def test_needs_a_lower_bound(self):
        with pytest.raises(ShapeError):
            interpolate([], [vec(1)])


class TestDecomposition:
    def test_parts_must_sum(self):
        with pytest.raises(ShapeError):
            Decomposition(vec(5), (vec(2), vec(2)))

    def test_negative_part(self):
        with pytest.raises(PreconditionError):
            Decomposition(vec(1), (vec(2), vec(-1)))


class TestRiesz:
    def test_scalar_example(self):
        u = Decomposition.of([[2], [3]])
        v = Decomposition.of([[4], [1]])
        table = riesz_refine(u, v)
        assert [[table[(k, m)][0] for m in range(2)] for k in range(2)] == [[2, 0], [2, 1]]

    def test_vector_example(self):
        u = Decomposition.of([[1, 0], [0, 1]])
        v = Decomposition.of([[1, 1]])
        table = riesz_refine(u, v)
        assert table[(0, 0)] == vec(1, 0)
        assert table[(1, 0)] == vec(0, 1)

    def test_totals_must_match(self):
        with pytest.raises(ShapeError):
            riesz_refine(Decomposition.of([[1]]), Decomposition.of([[2]]))

    @given(
        st.lists(nonneg, min_size=1, max_size=4),
        st.lists(nonneg, min_size=1, max_size=4),
    )
    @settings(max_examples=60)
    def test_marginals(self, xs, ys):
        # rescale ys so both sides share a total
        total_x, total_y = sum(xs), sum(ys)
        if total_y == 0:
            ys = [total_x] + [F(0)] * (len(ys) - 1)
        else:
            ys = [y * total_x / total_y for y in ys]
        u = Decomposition.of([[x] for x in xs])
        v = Decomposition.of([[y] for y in ys])
        assert check_riesz_table(u, v, riesz_refine(u, v))


class TestMultRefine:
    def test_two_decompositions(self):
        d1 = Decomposition.of([[1], [1]])
        d2 = Decomposition.of([[2], [0]])
        table = mult_refine([d1, d2])
        assert table.keys == ((0, 0), (0, 1), (1, 0), (1, 1))
        assert [x[0] for x in table.values] == [1, 0, 1, 0]

    def test_no_decompositions(self):
        table = mult_refine([], total=vec(3))
        assert table.keys == ((),)
        assert table[()] == vec(3)

    def test_three_decompositions(self):
        decomps = [
            Decomposition.of([[1, 2], [2, 0]]),
            Decomposition.of([[3, 1], [0, 1]]),
            Decomposition.of([[0, 0], [1, 1], [2, 1]]),
        ]
        table = mult_refine(decomps)
        assert len(table) == 12
        assert check_mult_table(decomps, table, vec(3, 2))

    def test_different_totals(self):
        with pytest.raises(ShapeError):
            mult_refine([Decomposition.of([[1]]), Decomposition.of([[2]])])


class TestLamas:
    def test_lambda_two(self):
        table = lamas_decompose([[2], [2]], 2)
        assert table[BitSet(2, 0b11)] == vec(1)
        assert table[BitSet(2, 0b00)] == vec(0)

    def test_lambda_one(self):
        table = lamas_decompose([[3, 1], [3, 1]], 1)
        assert table[BitSet(2, 0)] == vec(3, 1)
        assert all(not any(v) for s, v in table.items() if s.mask)

    def test_single_vector(self):
        table = lamas_decompose([[4, 2]], 3)
        assert len(table) == 2
        assert check_lamas_table([vec(4, 2)], F(3), table)

    def test_empty_family(self):
        table = lamas_decompose([], 2, dim=2)
        assert table.values == (vec(0, 0),)

    def test_ratio_violated(self):
        with pytest.raises(PreconditionError):
            lamas_decompose([[1], [3]], 2)

    def test_lambda_below_one(self):
        with pytest.raises(PreconditionError):
            lamas_decompose([[1]], F(1, 2))

    @given(
        st.fractions(min_value=1, max_value=4, max_denominator=4),
        st.lists(
            st.lists(st.fractions(min_value=0, max_value=1, max_denominator=5), min_size=2,
                     max_size=2),
            min_size=1,
            max_size=3,
        ),
        st.lists(st.fractions(min_value=0, max_value=5, max_denominator=5), min_size=2,
                 max_size=2),
    )
    @settings(max_examples=60)
    def test_substitution(self, lam, weights, base):
        # a_i = base * (1 + t_i * (lam - 1)) keeps every ratio within lam
        a_list = [
            tuple(c * (1 + t * (lam - 1)) for c, t in zip(base, ts)) for ts in weights
        ]
        table = lamas_decompose(a_list, lam)
        assert len(table) == 2 ** len(a_list)
        assert check_lamas_table(a_list, lam, table)
