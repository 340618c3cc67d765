"""Tests for the seeded acceptance suites."""

import pytest

from dimlift.errors import InputError
from dimlift.exactnum import Caps
from dimlift.poset import search_dismantling
from dimlift.suites import SUITES, dismantlable_pool, run_suite

SMALL_TRIALS = {
    "dislift": 10,
    "factor": 20,
    "chain": 5,
    "liftsg": 8,
    "refine": 60,
    "idc": 30,
    "dismantle": 30,
}


class TestPool:
    def test_all_dismantlable_and_bounded(self):
        pool = dismantlable_pool(4, 4)
        assert pool
        for p in pool:
            assert p.n <= 4
            assert search_dismantling(p).dismantlable

    def test_every_poset_up_to_three_elements(self):
        # 1 + 2 + 5 posets, none of which can get stuck
        assert len(dismantlable_pool(3, 3)) == 8


@pytest.mark.parametrize("name", sorted(SMALL_TRIALS))
def test_small_run_passes(name):
    report = run_suite(name, seed=0, trials=SMALL_TRIALS[name])
    assert report.passed, report.details
    assert report.summary


def test_same_seed_same_report():
    first = run_suite("dislift", seed=7, trials=4).to_dict()
    second = run_suite("dislift", seed=7, trials=4).to_dict()
    assert first == second


def test_caps_reach_the_suite():
    report = run_suite("factor", seed=0, trials=10, caps=Caps(powerset_cap=0))
    assert not report.passed
    assert any("subsets" in d.get("error", "") for d in report.details)


def test_counterexamples_are_registered():
    for name in ("nonsimpl-square", "q-example", "idempotent", "lex"):
        assert name in SUITES


def test_unknown_suite():
    with pytest.raises(InputError):
        run_suite("everything")


@pytest.mark.slow
@pytest.mark.parametrize("name", ["dislift", "factor", "chain", "liftsg", "idc", "dismantle"])
def test_full_suite(name):
    report = run_suite(name)
    assert report.passed, report.details[:5]


@pytest.mark.slow
def test_full_refine_suite():
    assert run_suite("refine").passed
