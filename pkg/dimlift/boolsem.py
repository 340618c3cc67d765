"""
Finite Boolean semilattices 2^m, their join-homomorphisms and diagrams.

A ⟨∨,0⟩-homomorphism 2^m -> 2^n is determined by where it sends the m atoms,
so a `BoolMap` is just a tuple of atom images. A `SemDiagram` assigns an
arity to every element of a poset and a `BoolMap` to every comparable pair.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import CoherenceError, ParseError, ShapeError
from .exactnum import BitSet
from .poset import Poset, covers

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoolMap:
    """Join-homomorphism 2^src_arity -> 2^tgt_arity given by its atom images."""

    src_arity: int
    tgt_arity: int
    atom_images: tuple[BitSet, ...]

    def __post_init__(self):
        if len(self.atom_images) != self.src_arity:
            raise ShapeError(
                f"BoolMap from 2^{self.src_arity} needs {self.src_arity} atom images, "
                f"got {len(self.atom_images)}"
            )
        for img in self.atom_images:
            if img.width != self.tgt_arity:
                raise ShapeError(
                    f"atom image {img} has width {img.width}, expected {self.tgt_arity}"
                )

    @classmethod
    def from_lists(
        cls, src_arity: int, tgt_arity: int, images: Sequence[Iterable[int]]
    ) -> "BoolMap":
        return cls(
            src_arity, tgt_arity, tuple(BitSet.from_indices(tgt_arity, img) for img in images)
        )

    @classmethod
    def identity(cls, n: int) -> "BoolMap":
        return cls(n, n, tuple(BitSet(n, 1 << i) for i in range(n)))

    @classmethod
    def zero(cls, m: int, n: int) -> "BoolMap":
        return cls(m, n, tuple(BitSet(n) for _ in range(m)))

    def image(self, x: BitSet) -> BitSet:
        """Image of an arbitrary element: the union of its atoms' images."""
        if x.width != self.src_arity:
            raise ShapeError(f"element of 2^{x.width} given to a map from 2^{self.src_arity}")
        mask = 0
        for i in x.indices():
            mask |= self.atom_images[i].mask
        return BitSet(self.tgt_arity, mask)

    def coordinate(self, j: int) -> "BoolMap":
        """The j-th coordinate 2^src -> 2: atom i goes to {0} iff j is in its image."""
        return BoolMap(
            self.src_arity, 1, tuple(BitSet(1, 1 if j in img else 0) for img in self.atom_images)
        )

    def is_zero(self) -> bool:
        return not any(img for img in self.atom_images)

    def is_identity(self) -> bool:
        return self.src_arity == self.tgt_arity and self == BoolMap.identity(self.src_arity)

    def to_lists(self) -> list[list[int]]:
        return [list(img.indices()) for img in self.atom_images]

    def __str__(self) -> str:
        body = ", ".join(f"{i}->{img}" for i, img in enumerate(self.atom_images))
        return f"2^{self.src_arity}->2^{self.tgt_arity}[{body}]"


def bool_compose(g: BoolMap, f: BoolMap) -> BoolMap:
    """g ∘ f."""
    if f.tgt_arity != g.src_arity:
        raise ShapeError(f"cannot compose {g} after {f}: arity {f.tgt_arity} vs {g.src_arity}")
    return BoolMap(f.src_arity, g.tgt_arity, tuple(g.image(img) for img in f.atom_images))


@dataclass(frozen=True)
class SemIso:
    """Isomorphism 2^n -> 2^n permuting atoms: atom i goes to atom permutation[i]."""

    permutation: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.permutation) != list(range(len(self.permutation))):
            raise ShapeError(f"{self.permutation} is not a permutation")

    @classmethod
    def identity(cls, n: int) -> "SemIso":
        return cls(tuple(range(n)))

    @property
    def arity(self) -> int:
        return len(self.permutation)

    def inverse(self) -> "SemIso":
        inv = [0] * self.arity
        for i, j in enumerate(self.permutation):
            inv[j] = i
        return SemIso(tuple(inv))

    def as_boolmap(self) -> BoolMap:
        n = self.arity
        return BoolMap(n, n, tuple(BitSet(n, 1 << j) for j in self.permutation))

    def compose(self, other: "SemIso") -> "SemIso":
        """self ∘ other."""
        if self.arity != other.arity:
            raise ShapeError("cannot compose isomorphisms of different arity")
        return SemIso(tuple(self.permutation[j] for j in other.permutation))


# ---------------------------------------------------------------------------
# Diagrams
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SemDiagram:
    """Functor from a poset to finite Boolean semilattices.

    `arrows` holds a map for every pair x <= y, keyed by element indices.
    """

    poset: Poset
    arity: tuple[int, ...]
    arrows: Mapping[tuple[int, int], BoolMap]

    def __post_init__(self):
        self.validate()

    def arrow(self, x: int, y: int) -> BoolMap:
        try:
            return self.arrows[(x, y)]
        except KeyError:
            raise ShapeError(f"no arrow {self.poset.name(x)} -> {self.poset.name(y)}") from None

    def validate(self) -> None:
        """Identities on the diagonal and exact functoriality on every triangle."""
        p = self.poset
        if len(self.arity) != p.n:
            raise ShapeError(f"{len(self.arity)} arities for {p.n} elements")
        pairs = p.comparable_pairs()
        if set(self.arrows) != set(pairs):
            raise ShapeError("arrows must be given on exactly the comparable pairs")
        for (x, y), f in self.arrows.items():
            if f.src_arity != self.arity[x] or f.tgt_arity != self.arity[y]:
                raise ShapeError(f"arrow {p.name(x)} -> {p.name(y)} has the wrong arities")
            if x == y and f != BoolMap.identity(self.arity[x]):
                raise CoherenceError(
                    (p.name(x), p.name(y)), f"arrow at {p.name(x)} is not the identity"
                )
        for x, y in pairs:
            for z in range(p.n):
                if x != y and y != z and p.le(y, z):
                    composite = bool_compose(self.arrows[(y, z)], self.arrows[(x, y)])
                    if composite != self.arrows[(x, z)]:
                        raise CoherenceError((p.name(x), p.name(z)))

    def restrict(self, indices: Sequence[int]) -> "SemDiagram":
        """The sub-diagram on the given elements, reindexed in the given order."""
        idx = list(indices)
        sub = self.poset.subposet(idx)
        arrows = {
            (a, b): self.arrows[(idx[a], idx[b])] for a, b in sub.comparable_pairs()
        }
        return SemDiagram(sub, tuple(self.arity[i] for i in idx), arrows)

    def to_dict(self) -> dict:
        p = self.poset
        return {
            "poset": p.to_dict(),
            "arity": {p.name(i): m for i, m in enumerate(self.arity)},
            "arrows": {
                f"{p.name(a)}<{p.name(b)}": self.arrows[(a, b)].to_lists() for a, b in covers(p)
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SemDiagram":
        if not isinstance(data, dict) or "poset" not in data:
            raise ParseError("diagram must be an object with 'poset', 'arity' and 'arrows'")
        poset = Poset.from_dict(data["poset"])
        raw_arity = data.get("arity", {})
        if not isinstance(raw_arity, dict):
            raise ParseError("'arity' must map element names to integers")
        arities = []
        for name in poset.elements:
            m = raw_arity.get(name, 0)
            if not isinstance(m, int) or isinstance(m, bool) or m < 0:
                raise ParseError(f"arity of {name!r} must be a non-negative integer")
            arities.append(m)
        raw_arrows = data.get("arrows", {})
        if not isinstance(raw_arrows, dict):
            raise ParseError("'arrows' must map 'x<y' keys to atom image lists")
        cover_arrows = {}
        for key, images in raw_arrows.items():
            if "<" not in key:
                raise ParseError(f"arrow key {key!r} must have the form 'x<y'")
            a, b = key.split("<", 1)
            x, y = poset.index(a), poset.index(b)
            if not isinstance(images, list) or any(not isinstance(img, list) for img in images):
                raise ParseError(f"arrow {key!r} must be a list of atom image lists")
            cover_arrows[(x, y)] = BoolMap.from_lists(arities[x], arities[y], images)
        return diagram_from_covers(poset, arities, cover_arrows)


def diagram_from_covers(
    poset: Poset,
    arities: Sequence[int],
    cover_arrows: Mapping[tuple[int, int], BoolMap],
) -> SemDiagram:
    """Extend arrows given on covers to every comparable pair.

    Processes elements top-down so that every upper cover of x already has
    its outgoing arrows; all cover paths from x to y must agree.
    """
    p = poset
    arities = tuple(arities)
    if len(arities) != p.n:
        raise ShapeError(f"{len(arities)} arities for {p.n} elements")
    cover_set = set(covers(p))
    extra = set(cover_arrows) - cover_set
    if extra:
        a, b = sorted(extra)[0]
        raise ShapeError(f"{p.name(a)} < {p.name(b)} is not a cover")
    missing = cover_set - set(cover_arrows)
    if missing:
        a, b = sorted(missing)[0]
        raise ShapeError(f"missing arrow for cover {p.name(a)} < {p.name(b)}")
    for (a, b), f in cover_arrows.items():
        if f.src_arity != arities[a] or f.tgt_arity != arities[b]:
            raise ShapeError(
                f"arrow {p.name(a)} < {p.name(b)} is 2^{f.src_arity}->2^{f.tgt_arity}, "
                f"expected 2^{arities[a]}->2^{arities[b]}"
            )

    arrows: dict[tuple[int, int], BoolMap] = {}
    for x in reversed(p.linear_extension()):
        arrows[(x, x)] = BoolMap.identity(arities[x])
        for y in range(p.n):
            if not p.lt(x, y):
                continue
            candidates = [
                bool_compose(arrows[(c, y)], cover_arrows[(x, c)])
                for c in p.upper_covers(x)
                if p.le(c, y)
            ]
            if any(c != candidates[0] for c in candidates[1:]):
                raise CoherenceError((p.name(x), p.name(y)))
            arrows[(x, y)] = candidates[0]
    return SemDiagram(p, arities, arrows)


def random_diagram(
    poset: Poset, max_arity: int, seed: int | str, min_arity: int = 1
) -> SemDiagram:
    """Deterministic coherent diagram on `poset`.

    Elements are visited top-down along a linear extension. For each atom of
    x, the image under the first upper cover is sampled freely; images under
    the other covers are sampled among the choices that agree with the
    earlier covers on every common upper bound. When no choice agrees, the
    atom is sent to 0 under every cover, which always commutes.
    """
    rng = random.Random(f"diagram:{seed}")
    p = poset
    arities = tuple(rng.randint(min(min_arity, max_arity), max_arity) for _ in range(p.n))
    # full[(c, y)] holds the already built arrow c -> y for c above the current element
    full: dict[tuple[int, int], BoolMap] = {}
    cover_arrows: dict[tuple[int, int], BoolMap] = {}

    for x in reversed(p.linear_extension()):
        full[(x, x)] = BoolMap.identity(arities[x])
        ups = p.upper_covers(x)
        images: dict[int, list[BitSet]] = {c: [] for c in ups}
        for _atom in range(arities[x]):
            chosen = _sample_atom(rng, p, arities, full, ups)
            for c in ups:
                images[c].append(chosen[c])
        for c in ups:
            cover_arrows[(x, c)] = BoolMap(arities[x], arities[c], tuple(images[c]))
        for y in range(p.n):
            if p.lt(x, y):
                c = next(c for c in ups if p.le(c, y))
                full[(x, y)] = bool_compose(full[(c, y)], cover_arrows[(x, c)])

    return diagram_from_covers(p, arities, cover_arrows)


def _sample_atom(
    rng: random.Random,
    p: Poset,
    arities: Sequence[int],
    full: Mapping[tuple[int, int], BoolMap],
    ups: Sequence[int],
    attempts: int = 8,
) -> dict[int, BitSet]:
    for _ in range(attempts):
        chosen: dict[int, BitSet] = {}
        for c in ups:
            options = [BitSet(arities[c], m) for m in range(1 << arities[c])]
            fits = [s for s in options if _agrees(p, full, chosen, c, s)]
            if not fits:
                break
            chosen[c] = rng.choice(fits)
        else:
            return chosen
    return {c: BitSet(arities[c]) for c in ups}


def _agrees(
    p: Poset,
    full: Mapping[tuple[int, int], BoolMap],
    chosen: Mapping[int, BitSet],
    c: int,
    s: BitSet,
) -> bool:
    for d, t in chosen.items():
        for y in range(p.n):
            if p.le(c, y) and p.le(d, y):
                if full[(c, y)].image(s) != full[(d, y)].image(t):
                    return False
    return True
