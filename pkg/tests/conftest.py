"""Shared pytest fixtures."""

from __future__ import annotations

import pytest

from dimlift.boolsem import SemDiagram
from dimlift.formats import load_sample
from dimlift.poset import Poset
from dimlift.pss import PssSpace


@pytest.fixture
def chain3() -> Poset:
    return Poset.from_covers(["a", "b", "c"], [("a", "b"), ("b", "c")])


@pytest.fixture
def square() -> Poset:
    return Poset.from_covers(
        ["0", "a", "b", "1"], [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")]
    )


@pytest.fixture
def cube() -> Poset:
    return Poset.boolean_lattice(3)


@pytest.fixture
def square_diagram() -> SemDiagram:
    return SemDiagram.from_dict(load_sample("square"))


@pytest.fixture
def chain3_diagram() -> SemDiagram:
    return SemDiagram.from_dict(load_sample("chain3"))


@pytest.fixture
def tu_space() -> PssSpace:
    """Q_{t} ⊕ Q_{u}."""
    return PssSpace.of([["t"], ["u"]])
