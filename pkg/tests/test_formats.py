"""Tests for document reading, writing and DOT export."""

from pathlib import Path

import pytest

from dimlift.boolsem import SemDiagram
from dimlift.errors import ParseError
from dimlift.formats import (
    diagram_to_dot,
    lifting_to_dot,
    load_sample,
    parse_json,
    read_json,
    sample_names,
    sniff_kind,
    write_json,
)
from dimlift.lift import dislift


def test_read_missing_file(tmp_path: Path):
    with pytest.raises(ParseError):
        read_json(tmp_path / "nope.json")


def test_malformed_json_reports_position():
    with pytest.raises(ParseError) as exc:
        parse_json('{"elements": [1,\n  ]}', source="bad.json")
    assert exc.value.line == 2
    assert str(exc.value).startswith("bad.json: line 2")


def test_top_level_must_be_object():
    with pytest.raises(ParseError):
        parse_json("[1, 2]")


def test_write_json_is_stable(tmp_path: Path):
    target = tmp_path / "out.json"
    text = write_json({"b": ["1/2"], "a": 1}, target)
    assert text.endswith("\n")
    assert text.index('"b"') < text.index('"a"')
    assert target.read_text(encoding="utf-8") == text


def test_sniff_kind(square_diagram):
    assert sniff_kind(load_sample("square")) == "diagram"
    assert sniff_kind(load_sample("square_poset")) == "poset"
    assert sniff_kind(dislift(square_diagram).to_dict()) == "lifting"
    with pytest.raises(ParseError):
        sniff_kind({"foo": 1})


def test_samples():
    names = sample_names()
    assert {"square", "chain3", "cube", "m3", "n5"} <= set(names)
    with pytest.raises(ParseError) as exc:
        load_sample("nope")
    assert "square" in str(exc.value)


def test_diagram_dot_annotates_arities():
    dot = diagram_to_dot(SemDiagram.from_dict(load_sample("square")))
    assert dot.startswith("digraph diagram {")
    assert '"a" [label="a\\n2^3"];' in dot
    assert dot.count(" -> ") == 4


def test_lifting_dot_annotates_dimensions(chain3_diagram):
    result = dislift(chain3_diagram)
    dot = lifting_to_dot(chain3_diagram, result.lifting)
    assert "dim " in dot
    assert dot.count("[label=") == 3
