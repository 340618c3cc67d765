"""
Reading and writing dimlift documents.

JSON keeps insertion order, uses indent=2 and ends with a newline, so
identical runs give byte-identical files. Rationals are
always strings of the form "p/q".
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Optional

from .boolsem import SemDiagram
from .errors import ParseError
from .lift import PssDiagram
from .poset import Poset

SAMPLES_PACKAGE = "dimlift.samples"


def read_json(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read file: {e.strerror or e}", source=str(path)) from e
    return parse_json(text, source=str(path))


def parse_json(text: str, source: Optional[str] = None) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno, column=e.colno, source=source) from e
    if not isinstance(data, dict):
        raise ParseError("top-level JSON value must be an object", source=source)
    return data


def write_json(data: dict, path: str | Path | None = None) -> str:
    """Serialize deterministically; write to `path` when given. Returns the text."""
    text = json.dumps(data, indent=2, ensure_ascii=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def sniff_kind(data: dict) -> str:
    """'poset', 'diagram' or 'lifting', from the keys of a parsed document."""
    keys = set(data)
    if {"poset", "arrows"} <= keys and "objects" not in keys:
        return "diagram"
    if {"objects", "arrows", "iota"} <= keys:
        return "lifting"
    if "elements" in keys:
        return "poset"
    raise ParseError("document is neither a poset, a diagram nor a lifting")


def load_sample(name: str) -> dict:
    """A bundled example by name, e.g. 'square' or 'chain3'."""
    filename = name if name.endswith(".json") else f"{name}.json"
    try:
        text = resources.files(SAMPLES_PACKAGE).joinpath(filename).read_text(encoding="utf-8")
    except (FileNotFoundError, OSError):
        raise ParseError(
            f"no bundled sample {name!r}; available: {', '.join(sample_names())}"
        ) from None
    return parse_json(text, source=f"sample:{filename}")


def sample_names() -> list[str]:
    return sorted(
        entry.name[: -len(".json")]
        for entry in resources.files(SAMPLES_PACKAGE).iterdir()
        if entry.name.endswith(".json")
    )


# ---------------------------------------------------------------------------
# DOT
# ---------------------------------------------------------------------------


def poset_to_dot(poset: Poset, name: str = "poset") -> str:
    return poset.to_dot(name=name)


def diagram_to_dot(diagram: SemDiagram, name: str = "diagram") -> str:
    """Cover graph with each node annotated by the arity of its semilattice."""
    notes = {i: f"2^{m}" for i, m in enumerate(diagram.arity)}
    return diagram.poset.to_dot(notes, name=name)


def lifting_to_dot(diagram: SemDiagram, lifting: PssDiagram, name: str = "lifting") -> str:
    """Cover graph with nodes annotated "2^m / dim d"."""
    notes = {
        i: f"2^{m} / dim {lifting.objects[i].total_dim}" for i, m in enumerate(diagram.arity)
    }
    return diagram.poset.to_dot(notes, name=name)
