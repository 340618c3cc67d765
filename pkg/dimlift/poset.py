"""
Finite posets, cover relations and dismantling.

A poset is stored as a read-only boolean numpy matrix `leq` with
`leq[i, j]` true iff element i <= element j. Covers, doubly-irreducible
elements and the dismantling search are derived from it.

A poset is dismantlable when it can be emptied by repeatedly deleting an
element with at most one upper cover and at most one lower cover in what
remains. The search backtracks over those choices (ascending index first)
and memoizes on the bitmask of remaining elements.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import ParseError, PosetError, ResourceError
from .exactnum import DEFAULT_MAX_POSET_ELEMENTS

logger = logging.getLogger(__name__)


class Poset:
    """Immutable finite partial order over named elements.

    Conventions:
        - child[i, j] is True iff j covers i
        - upper_covers(i) lists the j covering i, lower_covers(j) the i covered by j
    """

    def __init__(self, elements: Sequence[str], leq: np.ndarray):
        names = tuple(str(e) for e in elements)
        if len(set(names)) != len(names):
            raise PosetError(f"duplicate element names in {list(names)}")
        n = len(names)
        leq = np.array(leq, dtype=bool).reshape((n, n)) if n else np.zeros((0, 0), dtype=bool)
        if not self.is_partial_order(leq):
            raise PosetError("relation is not reflexive, antisymmetric and transitive")
        leq.flags.writeable = False
        self.elements = names
        self.leq = leq
        self._index = {name: i for i, name in enumerate(names)}

    # Construction

    @classmethod
    def from_covers(cls, elements: Sequence[str], covers: Iterable[tuple[str, str]]) -> "Poset":
        """Order generated by the reflexive-transitive closure of `covers`."""
        names = [str(e) for e in elements]
        index = {name: i for i, name in enumerate(names)}
        n = len(names)
        rel = np.eye(n, dtype=bool)
        for a, b in covers:
            if str(a) not in index or str(b) not in index:
                raise PosetError(f"cover ({a}, {b}) names an unknown element")
            rel[index[str(a)], index[str(b)]] = True
        for k in range(n):
            rel |= rel[:, k, None] & rel[None, k, :]
        if n and ((rel & rel.T).sum() > n):
            cyc = [(names[i], names[j]) for i, j in zip(*np.nonzero(rel & rel.T)) if i < j]
            raise PosetError(f"covers close to a non-antisymmetric relation, e.g. {cyc[0]}")
        return cls(names, rel)

    @classmethod
    def from_below_masks(
        cls, below: Sequence[int], names: Optional[Sequence[str]] = None
    ) -> "Poset":
        """Build from strict down-set masks: bit i of below[j] set iff i < j."""
        n = len(below)
        rel = np.eye(n, dtype=bool)
        for j, mask in enumerate(below):
            for i in range(n):
                if mask >> i & 1:
                    rel[i, j] = True
        return cls(names or [str(i) for i in range(n)], rel)

    @classmethod
    def chain(cls, n: int) -> "Poset":
        names = [str(i) for i in range(n)]
        return cls.from_covers(names, list(zip(names, names[1:])))

    @classmethod
    def antichain(cls, n: int) -> "Poset":
        return cls.from_covers([str(i) for i in range(n)], [])

    @classmethod
    def boolean_lattice(cls, k: int) -> "Poset":
        """The subsets of a k-set ordered by inclusion, named by bitmask."""
        masks = range(1 << k)
        covers = [(str(a), str(a | 1 << i)) for a in masks for i in range(k) if not a >> i & 1]
        return cls.from_covers([str(a) for a in masks], covers)

    @staticmethod
    def is_partial_order(rel: np.ndarray) -> bool:
        n = len(rel)
        if n == 0:
            return True
        if not rel[np.diag_indices_from(rel)].all():
            return False
        if (rel & rel.T).sum() > n:
            return False
        rel2 = np.matmul(rel, rel)
        return not ((~rel) & rel2).any()

    # Basic access

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def n(self) -> int:
        return len(self.elements)

    def index(self, name: str) -> int:
        try:
            return self._index[str(name)]
        except KeyError:
            raise PosetError(f"unknown element {name!r}") from None

    def name(self, i: int) -> str:
        return self.elements[i]

    def le(self, i: int, j: int) -> bool:
        return bool(self.leq[i, j])

    def lt(self, i: int, j: int) -> bool:
        return i != j and bool(self.leq[i, j])

    def comparable_pairs(self) -> list[tuple[int, int]]:
        """All (x, y) with x <= y, identity pairs included."""
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.leq))]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return self.elements == other.elements and np.array_equal(self.leq, other.leq)

    def __hash__(self) -> int:
        return hash((self.elements, self.leq.tobytes()))

    def __repr__(self) -> str:
        pairs = ", ".join(f"{self.name(a)}<{self.name(b)}" for a, b in self.cover_pairs())
        return f"Poset([{', '.join(self.elements)}]; {pairs})"

    # Derived structure

    @cached_property
    def child(self) -> np.ndarray:
        n = self.n
        if n == 0:
            return np.zeros((0, 0), dtype=bool)
        lt = self.leq.copy()
        lt[np.diag_indices_from(lt)] = False
        out = lt & ~np.matmul(lt, lt)
        out.flags.writeable = False
        return out

    def cover_pairs(self) -> list[tuple[int, int]]:
        """All (x, y) with x < y and nothing strictly between, sorted."""
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.child))]

    def upper_covers(self, i: int) -> list[int]:
        return [int(j) for j in np.nonzero(self.child[i, :])[0]]

    def lower_covers(self, j: int) -> list[int]:
        return [int(i) for i in np.nonzero(self.child[:, j])[0]]

    @cached_property
    def strict_up_masks(self) -> tuple[int, ...]:
        """Bit j of entry i is set iff i < j."""
        return tuple(
            sum(1 << j for j in range(self.n) if j != i and self.leq[i, j]) for i in range(self.n)
        )

    @cached_property
    def strict_down_masks(self) -> tuple[int, ...]:
        """Bit j of entry i is set iff j < i."""
        return tuple(
            sum(1 << j for j in range(self.n) if j != i and self.leq[j, i]) for i in range(self.n)
        )

    @cached_property
    def height(self) -> int:
        """Number of elements in a longest chain."""
        order = sorted(range(self.n), key=lambda i: bin(self.strict_down_masks[i]).count("1"))
        longest = [1] * self.n
        for j in order:
            for i in self.lower_covers(j):
                longest[j] = max(longest[j], longest[i] + 1)
        return max(longest, default=0)

    def is_naturally_labelled(self) -> bool:
        """Whether the index order is a linear extension."""
        return all(i <= j for i, j in self.comparable_pairs())

    def subposet(self, indices: Sequence[int]) -> "Poset":
        idx = list(indices)
        return Poset([self.elements[i] for i in idx], self.leq[np.ix_(idx, idx)])

    def linear_extension(self) -> list[int]:
        """A linear extension, smallest available index first."""
        remaining = (1 << self.n) - 1
        down = self.strict_down_masks
        out = []
        while remaining:
            i = next(i for i in range(self.n) if remaining >> i & 1 and not down[i] & remaining)
            out.append(i)
            remaining &= ~(1 << i)
        return out

    # Serialization

    def to_dict(self) -> dict:
        return {
            "elements": list(self.elements),
            "covers": [[self.name(a), self.name(b)] for a, b in self.cover_pairs()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Poset":
        if not isinstance(data, dict) or "elements" not in data:
            raise ParseError("poset must be an object with 'elements' and 'covers'")
        elements = data["elements"]
        cover_list = data.get("covers", [])
        if not isinstance(elements, list) or not isinstance(cover_list, list):
            raise ParseError("'elements' and 'covers' must be lists")
        pairs = []
        for c in cover_list:
            if not isinstance(c, list) or len(c) != 2:
                raise ParseError(f"cover {c!r} must be a pair [a, b]")
            pairs.append((str(c[0]), str(c[1])))
        return cls.from_covers([str(e) for e in elements], pairs)

    def to_dot(self, annotations: Optional[dict[int, str]] = None, name: str = "poset") -> str:
        """Cover graph as DOT text, bottom to top."""
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for i, label in enumerate(self.elements):
            text = label
            if annotations and i in annotations:
                text = f"{label}\\n{annotations[i]}"
            lines.append(f'  "{label}" [label="{text}"];')
        for a, b in self.cover_pairs():
            lines.append(f'  "{self.name(a)}" -> "{self.name(b)}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Covers and irreducibility
# ---------------------------------------------------------------------------


def covers(p: Poset) -> list[tuple[int, int]]:
    return p.cover_pairs()


def doubly_irreducible(p: Poset) -> frozenset[int]:
    """Elements with at most one upper cover and at most one lower cover."""
    return frozenset(_irreducible_in(p, (1 << p.n) - 1))


def _covers_within(p: Poset, x: int, mask: int) -> tuple[list[int], list[int]]:
    """Lower and upper covers of x inside the subposet on `mask`."""
    up, down = p.strict_up_masks, p.strict_down_masks
    above = up[x] & mask
    below = down[x] & mask
    uppers = [y for y in _bits(above) if not down[y] & above]
    lowers = [y for y in _bits(below) if not up[y] & below]
    return lowers, uppers


def _irreducible_in(p: Poset, mask: int) -> list[int]:
    out = []
    for x in _bits(mask):
        lowers, uppers = _covers_within(p, x, mask)
        if len(lowers) <= 1 and len(uppers) <= 1:
            out.append(x)
    return out


def covers_within(p: Poset, x: int, members: Iterable[int]) -> tuple[Optional[int], Optional[int]]:
    """Unique lower and upper cover of x in the subposet `members` + x.

    Returns None for a missing cover. Raises if x is not doubly irreducible there.
    """
    mask = 1 << x
    for m in members:
        mask |= 1 << m
    lowers, uppers = _covers_within(p, x, mask)
    if len(lowers) > 1 or len(uppers) > 1:
        raise PosetError(f"{p.name(x)} is not doubly irreducible in the current subposet")
    return (lowers[0] if lowers else None, uppers[0] if uppers else None)


def _bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


# ---------------------------------------------------------------------------
# Dismantling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DismantlingOrder:
    """Elements in removal order; re-insertion replays it backwards."""

    removal_sequence: tuple[int, ...]

    @property
    def reinsertion_sequence(self) -> tuple[int, ...]:
        return tuple(reversed(self.removal_sequence))

    def is_valid(self, p: Poset) -> bool:
        if sorted(self.removal_sequence) != list(range(p.n)):
            return False
        mask = (1 << p.n) - 1
        for x in self.removal_sequence:
            if x not in _irreducible_in(p, mask):
                return False
            mask &= ~(1 << x)
        return True

    def names(self, p: Poset) -> list[str]:
        return [p.name(i) for i in self.removal_sequence]


@dataclass
class DismantleSearch:
    """Outcome of the dismantling search, with stuck subposets as a failure certificate."""

    order: Optional[DismantlingOrder]
    stuck: list[frozenset[int]] = field(default_factory=list)
    states_explored: int = 0

    @property
    def dismantlable(self) -> bool:
        return self.order is not None


def search_dismantling(p: Poset, max_elements: int = DEFAULT_MAX_POSET_ELEMENTS) -> DismantleSearch:
    if p.n > max_elements:
        raise ResourceError(
            f"poset has {p.n} elements, dismantling search is capped at {max_elements}",
            cap_name="max_poset_elements",
            limit=max_elements,
        )
    memo: dict[int, bool] = {0: True}
    stuck: set[int] = set()

    def solvable(mask: int) -> bool:
        if mask in memo:
            return memo[mask]
        candidates = _irreducible_in(p, mask)
        if not candidates:
            stuck.add(mask)
        result = any(solvable(mask & ~(1 << x)) for x in candidates)
        memo[mask] = result
        return result

    full = (1 << p.n) - 1
    if not solvable(full):
        by_size = sorted(stuck, key=lambda m: (-bin(m).count("1"), m))
        certificate = [frozenset(_bits(m)) for m in by_size]
        logger.debug(f"poset with {p.n} elements is not dismantlable ({len(memo)} states)")
        return DismantleSearch(order=None, stuck=certificate, states_explored=len(memo))

    sequence = []
    mask = full
    while mask:
        x = next(x for x in _irreducible_in(p, mask) if solvable(mask & ~(1 << x)))
        sequence.append(x)
        mask &= ~(1 << x)
    order = DismantlingOrder(tuple(sequence))
    logger.debug(f"dismantling order {order.names(p)} ({len(memo)} states)")
    return DismantleSearch(order=order, states_explored=len(memo))


def dismantling_order(
    p: Poset, max_elements: int = DEFAULT_MAX_POSET_ELEMENTS
) -> Optional[DismantlingOrder]:
    """A removal sequence of doubly-irreducible elements, or None."""
    return search_dismantling(p, max_elements).order


def dismantling_order_bruteforce(p: Poset) -> Optional[DismantlingOrder]:
    """Plain backtracking over every removal sequence, no memo. Small posets only."""

    def walk(mask: int, seq: tuple[int, ...]) -> Optional[tuple[int, ...]]:
        if not mask:
            return seq
        for x in _irreducible_in(p, mask):
            found = walk(mask & ~(1 << x), seq + (x,))
            if found is not None:
                return found
        return None

    found = walk((1 << p.n) - 1, ())
    return DismantlingOrder(found) if found is not None else None


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def _down_closed_subsets(below: Sequence[int]) -> Iterator[int]:
    n = len(below)
    for mask in range(1 << n):
        if all(below[i] & ~mask == 0 for i in _bits(mask)):
            yield mask


def _linear_extensions(below: Sequence[int]) -> Iterator[tuple[int, ...]]:
    n = len(below)

    def extend(placed: int, prefix: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        if len(prefix) == n:
            yield prefix
            return
        for i in range(n):
            if not placed >> i & 1 and below[i] & ~placed == 0:
                yield from extend(placed | 1 << i, prefix + (i,))

    yield from extend(0, ())


def _canonical_form(below: Sequence[int]) -> tuple[int, ...]:
    best: Optional[tuple[int, ...]] = None
    for ext in _linear_extensions(below):
        position = {x: k for k, x in enumerate(ext)}
        form = tuple(sum(1 << position[y] for y in _bits(below[x])) for x in ext)
        if best is None or form < best:
            best = form
    return best if best is not None else ()


def enumerate_posets(n: int) -> list[Poset]:
    """Every poset on n elements up to isomorphism, naturally labelled."""
    classes: list[tuple[int, ...]] = [()]
    for size in range(n):
        grown: set[tuple[int, ...]] = set()
        for below in classes:
            for down in _down_closed_subsets(below):
                grown.add(_canonical_form(below + (down,)))
        classes = sorted(grown)
        logger.debug(f"{len(classes)} posets on {size + 1} elements")
    return [Poset.from_below_masks(below) for below in classes]


def is_isomorphic(p: Poset, q: Poset) -> bool:
    if p.n != q.n:
        return False
    return _canonical_form(p.strict_down_masks) == _canonical_form(q.strict_down_masks)
