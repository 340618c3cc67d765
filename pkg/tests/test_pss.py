"""Tests for pseudo-simplicial spaces, their order and positive maps."""

from fractions import Fraction

import pytest

from dimlift.boolsem import BoolMap, bool_compose
from dimlift.errors import PositivityError, PreconditionError, ShapeError
from dimlift.exactnum import RatMatrix
from dimlift.pss import (
    PssHom,
    PssSpace,
    PssVector,
    RelationKind,
    arch_leq,
    basis_vector,
    canonical_lifting,
    compact_ideal_of,
    component_unit,
    direct_sum,
    hom_validate,
    idc_hom,
    idc_space,
    in_cone,
    order_unit,
    rel_lambda,
    strict_leq,
)
from dimlift.sampling import random_space, random_valid_hom, random_vector, sub_rng

AB = PssSpace.simple(["a", "b"])
Q = PssSpace.simplicial(1)


class TestSpaces:
    def test_dimensions(self):
        space = PssSpace.of([["a", "b"], ["c"]])
        assert space.dims == (2, 1)
        assert space.total_dim == 3
        assert space.span(1) == range(2, 3)
        assert space.component_of(1) == 0

    def test_empty_component_rejected(self):
        with pytest.raises(ShapeError):
            PssSpace.of([[]])

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ShapeError):
            PssSpace.of([["a"], ["a"]])

    def test_idc_arity(self, tu_space):
        assert idc_space(AB) == 1
        assert idc_space(PssSpace.zero()) == 0
        assert idc_space(tu_space) == 2

    def test_direct_sum_prefixes(self):
        space = direct_sum([AB, AB], ["0/", "1/"])
        assert space.labels == ("0/a", "0/b", "1/a", "1/b")


class TestOrder:
    def test_cone(self):
        assert in_cone(PssVector.of(AB, [0, 0]))
        assert in_cone(PssVector.of(AB, [1, "1/2"]))
        assert not in_cone(PssVector.of(AB, [1, 0]))

    def test_basis_vector_not_positive_but_arch_positive(self):
        zero = PssVector.of(AB, [0, 0])
        e = basis_vector(AB, "a")
        assert arch_leq(zero, e)
        assert not strict_leq(zero, e)

    def test_arch_reflexive(self):
        x = PssVector.of(AB, [3, -1])
        assert arch_leq(x, x)

    def test_strict_implies_arch(self):
        rng = sub_rng(0, "order", 0)
        space = PssSpace.of([["a", "b"], ["c"]])
        for _ in range(200):
            x = PssVector(space, random_vector(rng, 3))
            y = PssVector(space, random_vector(rng, 3))
            if strict_leq(x, y):
                assert arch_leq(x, y)

    def test_compact_ideal(self, tu_space):
        v = PssVector.of(tu_space, [0, 2])
        assert compact_ideal_of(v).indices() == (1,)


class TestRelations:
    def test_equal_vectors(self):
        a = PssVector.of(AB, [2, 3])
        assert rel_lambda(a, a, 1, RelationKind.ASYMP_ARCH)

    def test_ratio_two(self):
        space = PssSpace.simplicial(2)
        a = PssVector.of(space, [1, 2])
        b = PssVector.of(space, [2, 1])
        assert rel_lambda(a, b, 2, RelationKind.ASYMP_ARCH)
        assert not rel_lambda(a, b, Fraction(3, 2), RelationKind.ASYMP_ARCH)

    def test_zero_is_below_everything(self):
        zero = PssVector.of(AB, [0, 0])
        b = PssVector.of(AB, [1, 1])
        for lam in (Fraction(1, 10), 1, 5):
            assert rel_lambda(zero, b, lam, RelationKind.PROPTO_ARCH)

    def test_cone_precondition(self):
        bad = PssVector.of(AB, [1, 0])
        with pytest.raises(PreconditionError):
            rel_lambda(bad, bad, 1, RelationKind.PROPTO)

    def test_lambda_positive(self):
        a = PssVector.of(AB, [1, 1])
        with pytest.raises(PreconditionError):
            rel_lambda(a, a, 0, RelationKind.ASYMP)


class TestHomValidate:
    def test_identity(self):
        f = hom_validate(RatMatrix.identity(2), AB, AB)
        assert f.is_positive()

    def test_negative_column(self):
        with pytest.raises(PositivityError) as exc:
            hom_validate(RatMatrix.from_rows([[1], [-1]]), Q, AB)
        err = exc.value
        assert err.block == (0, 0)
        image = RatMatrix.from_rows([[1], [-1]]).apply(err.witness)
        assert not in_cone(PssVector(AB, image))

    def test_summing_row(self):
        f = hom_validate(RatMatrix.from_rows([[1, 1]]), AB, Q)
        assert f.apply(order_unit(AB)).coords == (Fraction(2),)

    def test_zero_row_in_nonzero_block(self):
        with pytest.raises(PositivityError):
            hom_validate(RatMatrix.from_rows([[1, 0], [0, 0]]), AB, AB)

    def test_witness_for_mixed_signs(self):
        m = RatMatrix.from_rows([[3, -1]])
        with pytest.raises(PositivityError) as exc:
            hom_validate(m, AB, Q)
        assert not in_cone(PssVector(Q, m.apply(exc.value.witness)))

    def test_validation_agrees_with_sampling(self):
        rng = sub_rng(0, "positivity", 0)
        src = PssSpace.of([["a", "b"], ["c"]])
        tgt = PssSpace.of([["x", "y"]])
        for _ in range(100):
            f = random_valid_hom(rng, src, tgt)
            for _ in range(10):
                v = PssVector(src, tuple(x + 1 for x in random_vector(rng, 3)))
                assert in_cone(f.apply(v))


class TestIdc:
    def test_zero_map(self, tu_space):
        f = PssHom.zero(tu_space, AB)
        assert idc_hom(f).is_zero()

    def test_identity(self, tu_space):
        assert idc_hom(PssHom.identity(tu_space)).to_lists() == [[0], [1]]

    def test_diagonal(self):
        target = PssSpace.simplicial(2)
        f = hom_validate(RatMatrix.from_rows([[1], [1]]), Q, target)
        assert idc_hom(f).to_lists() == [[0, 1]]

    def test_functorial(self):
        for k in range(100):
            rng = sub_rng(0, "idc", k)
            a, b, c = (random_space(rng, 3, 2) for _ in range(3))
            f, g = random_valid_hom(rng, a, b), random_valid_hom(rng, b, c)
            assert idc_hom(g.compose(f)) == bool_compose(idc_hom(g), idc_hom(f))

    def test_order_unit_image_positive(self):
        rng = sub_rng(0, "unit", 0)
        for _ in range(50):
            a, b = random_space(rng, 2, 2), random_space(rng, 2, 2)
            f = random_valid_hom(rng, a, b)
            image = f.apply(order_unit(a))
            pattern = idc_hom(f)
            for k in range(b.n_components):
                hit = any(k in img for img in pattern.atom_images)
                assert all(x > 0 for x in image.component(k)) == hit

    def test_canonical_lifting_sums(self, tu_space):
        pattern = BoolMap.from_lists(2, 1, [[0], [0]])
        f = canonical_lifting(pattern, tu_space, AB)
        assert f.apply(component_unit(tu_space, 0)).coords == (1, 1)
        assert idc_hom(f) == pattern
