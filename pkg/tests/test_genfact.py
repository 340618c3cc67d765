"""Tests for the canonical generic maps, flatness and factorization."""

from fractions import Fraction

import pytest

from dimlift.boolsem import BoolMap, bool_compose
from dimlift.errors import PreconditionError, ResourceError, ShapeError
from dimlift.exactnum import Caps, RatMatrix
from dimlift.genfact import (
    factor_general,
    factor_idc,
    factor_simple,
    flatness_constant,
    gen,
    gen_simple,
    is_flat,
    predicted_size,
    q_bound,
    rev_lift,
)
from dimlift.oracle import encode_factor_system, fm_solve
from dimlift.pss import PssHom, PssSpace, hom_validate, idc_hom
from dimlift.sampling import random_factor_instance

ALL_TO_ONE = BoolMap.from_lists(2, 1, [[0], [0]])


def column(f: PssHom, i: int) -> list:
    return list(f.matrix.column(i))


class TestGenSimple:
    def test_two_point_source(self, tu_space):
        gs, f = gen_simple(tu_space, ALL_TO_ONE, 2)
        assert gs.size == 4
        assert column(f, 0) == [1, 2, 1, 2]
        assert column(f, 1) == [1, 1, 2, 2]
        assert flatness_constant(f).lambda_min == 2

    def test_labels(self, tu_space):
        gs, _ = gen_simple(tu_space, ALL_TO_ONE, 1)
        assert gs.space().labels == ("{}:t.u", "{0}:t.u", "{1}:t.u", "{0,1}:t.u")

    def test_zero_pattern_gives_a_point(self, tu_space):
        gs, f = gen_simple(tu_space, BoolMap.zero(2, 1), 3)
        assert f.tgt.total_dim == 1
        assert f.is_zero()

    def test_choices_multiply(self):
        source = PssSpace.of([["a", "b"], ["c"]])
        gs, f = gen_simple(source, ALL_TO_ONE, 1)
        assert gs.size == 4 * 2
        assert f.is_positive()

    def test_lambda_below_one(self, tu_space):
        with pytest.raises(PreconditionError):
            gen_simple(tu_space, ALL_TO_ONE, Fraction(1, 2))

    def test_powerset_cap(self, tu_space):
        with pytest.raises(ResourceError) as exc:
            gen_simple(tu_space, ALL_TO_ONE, 1, Caps(powerset_cap=1))
        assert exc.value.cap_name == "powerset_cap"


class TestGen:
    def test_component_dimensions(self, tu_space):
        pattern = BoolMap.from_lists(2, 2, [[0], [0, 1]])
        generic = gen(tu_space, pattern, 1)
        assert generic.space.dims == (4, 2)
        assert predicted_size(tu_space, pattern) == 6
        assert idc_hom(generic.hom) == bool_compose(generic.iota.as_boolmap(), pattern)

    def test_prefixed_labels(self, tu_space):
        generic = gen(tu_space, BoolMap.identity(2), 1)
        assert generic.space.labels == ("0/{}:t", "0/{0}:t", "1/{}:u", "1/{1}:u")

    def test_empty_target(self, tu_space):
        generic = gen(tu_space, BoolMap.zero(2, 0), 1)
        assert generic.space.total_dim == 0
        assert generic.hom.matrix.shape == (0, 2)

    def test_mu_below_one(self, tu_space):
        with pytest.raises(PreconditionError):
            gen(tu_space, BoolMap.identity(2), 0)

    def test_dimension_cap(self, tu_space):
        with pytest.raises(ResourceError) as exc:
            gen(tu_space, BoolMap.from_lists(2, 2, [[0], [0, 1]]), 1, Caps(max_dim=5))
        assert exc.value.cap_name == "max_dim"

    def test_component_view(self, tu_space):
        generic = gen(tu_space, BoolMap.from_lists(2, 2, [[0], [0, 1]]), 2)
        second = generic.component(1)
        assert second.n_components == 1
        assert second.space.total_dim == 2


class TestFlatness:
    def test_sum_map(self, tu_space):
        h = hom_validate(RatMatrix.from_rows([[1, 1]]), tu_space, PssSpace.simplicial(1))
        assert flatness_constant(h).lambda_min == 1
        assert is_flat(h, 1)

    def test_witness(self, tu_space):
        h = hom_validate(RatMatrix.from_rows([[3, 1]]), tu_space, PssSpace.simplicial(1))
        report = flatness_constant(h)
        assert report.lambda_min == 3
        assert report.witness == (0, 1, 0)
        assert not is_flat(h, 2)

    def test_disjoint_supports(self, tu_space):
        h = PssHom.identity(tu_space)
        assert flatness_constant(h).witness is None


class TestRevLift:
    def test_images_are_unit_sums(self):
        pattern = BoolMap.from_lists(2, 2, [[0], [0, 1]])
        f = rev_lift(pattern, PssSpace.simplicial(2))
        assert f.matrix.to_json() == [["1", "1"], ["0", "1"]]
        assert idc_hom(f) == pattern

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            rev_lift(BoolMap.identity(2), PssSpace.simplicial(3))


class TestFactor:
    def test_q_bound(self):
        assert q_bound(1, 5) == 1
        assert q_bound(3, 2) == 2
        assert q_bound(3, 9) == 4
        assert q_bound(0, 4) == 1

    def test_factor_simple(self, tu_space):
        generic = gen(tu_space, ALL_TO_ONE, 2)
        g = hom_validate(RatMatrix.from_rows([[2, 1], [1, 1]]), tu_space, PssSpace.simple("xy"))
        h = factor_simple(generic, g)
        assert h.compose(generic.hom).matrix == g.matrix

    def test_factor_simple_too_steep(self, tu_space):
        generic = gen(tu_space, ALL_TO_ONE, 2)
        g = hom_validate(RatMatrix.from_rows([[3, 1]]), tu_space, PssSpace.simplicial(1))
        with pytest.raises(PreconditionError):
            factor_simple(generic, g)

    def test_factor_idc_zero_map(self, tu_space):
        generic = gen(tu_space, BoolMap.zero(2, 1), 1)
        h = PssHom.zero(tu_space, PssSpace.simplicial(1))
        g = factor_idc(generic, h, BoolMap.identity(1))
        assert idc_hom(g) == BoolMap.identity(1)
        assert g.compose(generic.hom).is_zero()

    def test_factor_general_needs_mu_two(self, tu_space):
        # two source components split over two generic components: q = 2
        h = hom_validate(RatMatrix.from_rows([[1, 1]]), tu_space, PssSpace.simplicial(1))
        pattern = ALL_TO_ONE
        with pytest.raises(PreconditionError):
            factor_general(gen(tu_space, BoolMap.identity(2), 1), h, pattern)
        generic = gen(tu_space, BoolMap.identity(2), 2)
        g = factor_general(generic, h, pattern)
        assert g.compose(generic.hom).matrix == h.matrix
        assert idc_hom(g) == pattern

    def test_pattern_mismatch(self, tu_space):
        h = hom_validate(RatMatrix.from_rows([[1, 0]]), tu_space, PssSpace.simplicial(1))
        generic = gen(tu_space, BoolMap.identity(2), 2)
        with pytest.raises(PreconditionError):
            factor_general(generic, h, ALL_TO_ONE)

    def test_simple_source_through_the_solver(self):
        source = PssSpace.simple("tu")
        point = PssSpace.simplicial(1)
        h = hom_validate(RatMatrix.from_rows([[1, 2]]), source, point)
        lam = flatness_constant(h).lambda_min
        generic = gen(source, BoolMap.identity(1), q_bound(1, 1) * lam)
        g = factor_general(generic, h, BoolMap.identity(1))
        assert g.compose(generic.hom).matrix == h.matrix

        system = encode_factor_system(generic.hom, h, BoolMap.identity(1))
        assert system.check({f"g[0,{c}]": g.matrix[0, c] for c in range(g.matrix.cols)})
        assert fm_solve(system).feasible

    def test_random_instances(self):
        non_simplicial = 0
        for k in range(30):
            inst = random_factor_instance(0, k, max_components=3, max_dim=3)
            if inst.source.total_dim > inst.source.n_components:
                non_simplicial += 1
            lam = flatness_constant(inst.h).lambda_min
            q = q_bound(inst.source.n_components, inst.f_pattern.tgt_arity)
            generic = gen(inst.source, inst.f_pattern, q * lam)
            g = factor_general(generic, inst.h, inst.g_pattern)
            assert g.compose(generic.hom).matrix == inst.h.matrix
            assert idc_hom(g) == inst.g_pattern
        assert non_simplicial > 0
