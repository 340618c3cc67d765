"""Tests for the counterexample checks."""

from fractions import Fraction

import pytest

from dimlift.boolsem import SemDiagram, SemIso
from dimlift.counterexamples import (
    COUNTEREXAMPLES,
    LexViolation,
    SquareParams,
    check_lex_candidate,
    check_nonsimpl_square,
    check_positive_product_nonzero,
    check_q_example,
    idempotent_identity,
    idempotent_suite,
    lex_suite,
    nonsimpl_square_diagram,
    nonsimpl_square_suite,
    q_example,
    q_example_suite,
    random_square_params,
    run_counterexample,
)
from dimlift.errors import InputError, InvariantViolation, PreconditionError, ShapeError
from dimlift.exactnum import RatMatrix
from dimlift.formats import load_sample
from dimlift.genfact import gen
from dimlift.lift import dislift
from dimlift.pss import PssSpace, PssVector, idc_hom

ONE_BY_ONE = RatMatrix.from_rows([[1]])
H = PssSpace.of([["h0"], ["h1"]])


class TestNonSimplicialSquare:
    def test_all_ones_infeasible(self):
        ones = SquareParams.ones()
        result = check_nonsimpl_square(ones, ones)
        assert not result.feasible

    def test_relaxed_control_feasible(self):
        ones = SquareParams.ones()
        result = check_nonsimpl_square(ones, ones, relaxed=True)
        assert result.feasible

    def test_random_params_infeasible(self):
        for k in range(10):
            f0, f1 = random_square_params(0, k)
            assert not check_nonsimpl_square(f0, f1).feasible

    def test_params_must_be_positive(self):
        with pytest.raises(PreconditionError):
            SquareParams(Fraction(0), Fraction(1), Fraction(1), Fraction(1))

    def test_diagram_matches_sample(self):
        assert nonsimpl_square_diagram() == SemDiagram.from_dict(load_sample("square"))

    def test_diagram_still_lifts(self):
        # the obstruction is to simplicial liftings only
        assert dislift(nonsimpl_square_diagram()).verify().all_passed


class TestQExample:
    def test_mu_one_infeasible_mu_two_factors(self):
        outcome = check_q_example()
        assert outcome.confirmed
        ex = q_example()
        generic = gen(ex.source, ex.f_pattern, 2)
        assert outcome.mu2.compose(generic.hom).matrix == ex.h.matrix
        assert idc_hom(outcome.mu2) == ex.g_pattern

    def test_suite(self):
        report = q_example_suite()
        assert report.passed
        assert report.summary == "μ=1 infeasible; μ=2 factored and verified"


class TestIdempotent:
    def test_identity_on_units(self):
        residual = idempotent_identity(ONE_BY_ONE, ONE_BY_ONE, ONE_BY_ONE)
        assert residual.holds
        assert residual.lhs.to_json() == [["2"]]
        assert not residual.idempotent

    def test_idempotent_triple(self):
        zero = RatMatrix.from_rows([[0]])
        residual = idempotent_identity(ONE_BY_ONE, zero, ONE_BY_ONE)
        assert residual.idempotent
        assert residual.lhs.is_zero()

    def test_shapes(self):
        with pytest.raises(ShapeError):
            idempotent_identity(ONE_BY_ONE, RatMatrix.from_rows([[1, 1]]), ONE_BY_ONE)

    def test_positive_product(self):
        block = RatMatrix.from_rows([[1, 0], [0, 2]])
        assert check_positive_product_nonzero(block, block, block)

    def test_zero_block_rejected(self):
        zero = RatMatrix.from_rows([[0]])
        with pytest.raises(PreconditionError):
            check_positive_product_nonzero(ONE_BY_ONE, zero, ONE_BY_ONE)


class TestLex:
    def test_zero_image_breaks_square(self):
        v = check_lex_candidate(
            H, PssVector.of(H, [1, 1]), PssVector.of(H, [0, 0]), SemIso.identity(2)
        )
        assert v.requirement == "square"

    def test_nonzero_image_breaks_positivity(self):
        v = check_lex_candidate(
            H, PssVector.of(H, [1, 1]), PssVector.of(H, [1, 0]), SemIso.identity(2)
        )
        assert v.requirement == "positivity"
        assert v.witness == 2

    def test_negative_image(self):
        v = check_lex_candidate(
            H, PssVector.of(H, [1, 1]), PssVector.of(H, [-1, 0]), SemIso.identity(2)
        )
        assert v.requirement == "positivity"
        assert v.witness == ["-1", "0"]

    def test_wrong_target(self):
        q = PssSpace.simplicial(1)
        with pytest.raises(ShapeError):
            check_lex_candidate(q, PssVector.of(q, [1]), PssVector.of(q, [0]), SemIso.identity(2))


class TestSuites:
    def test_small_suites_pass(self):
        assert nonsimpl_square_suite(trials=5).passed
        assert idempotent_suite(trials=20).passed
        assert lex_suite(trials=50).passed

    def test_progress_events(self):
        events = []
        lex_suite(trials=3, progress=events.append)
        assert events[0] == {"phase": "lex", "total": 3}
        assert events[1:] == [{"update": 1}] * 3

    def test_lex_counts_only_returned_violations(self, monkeypatch):
        monkeypatch.setattr(
            "dimlift.counterexamples.check_lex_candidate",
            lambda *args: LexViolation("none", "no requirement broken"),
        )
        report = lex_suite(trials=4)
        assert report.confirmed == 0
        assert not report.passed
        assert report.details[0]["requirement"] == "none"

    def test_lex_records_candidates_that_lift(self, monkeypatch):
        def lifts(*args):
            raise InvariantViolation("lexicographic candidate satisfies every requirement")

        monkeypatch.setattr("dimlift.counterexamples.check_lex_candidate", lifts)
        report = lex_suite(trials=2)
        assert report.confirmed == 0
        assert [d["trial"] for d in report.details] == [0, 1]

    def test_registry(self):
        assert set(COUNTEREXAMPLES) == {"nonsimpl-square", "q-example", "idempotent", "lex"}
        report = run_counterexample("lex", seed=1, trials=10)
        assert report.trials == 10

    def test_unknown_name(self):
        with pytest.raises(InputError):
            run_counterexample("nope")

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["nonsimpl-square", "idempotent", "lex"])
    def test_full_counts(self, name):
        report = run_counterexample(name)
        assert report.passed
