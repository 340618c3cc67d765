"""
Pseudo-simplicial spaces and positive homomorphisms between them.

A pseudo-simplicial space is a finite direct sum of simple spaces Q_X, where
Q_X is Q^X ordered by: f <= g iff f = g or f(x) < g(x) for every x. A space
is stored as its list of components, each the list of its basis labels, and
every map is a rational matrix in the concatenated canonical basis.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .boolsem import BoolMap
from .errors import ParseError, PositivityError, PreconditionError, ShapeError
from .exactnum import (
    ONE,
    ZERO,
    BitSet,
    RatMatrix,
    RationalLike,
    as_rational,
    format_rational,
    mat_mul,
    vec_le,
    vec_scale,
    vec_sub,
    vstack,
)

logger = logging.getLogger(__name__)

CompactIdeal = BitSet


@dataclass(frozen=True)
class PssSpace:
    """Direct sum of simple spaces; the zero space has no components."""

    components: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        seen: set[str] = set()
        for k, comp in enumerate(self.components):
            if not comp:
                raise ShapeError(f"component {k} is empty")
            for label in comp:
                if label in seen:
                    raise ShapeError(f"duplicate basis label {label!r}")
                seen.add(label)

    @classmethod
    def of(cls, components: Iterable[Iterable[str]]) -> "PssSpace":
        return cls(tuple(tuple(str(x) for x in comp) for comp in components))

    @classmethod
    def zero(cls) -> "PssSpace":
        return cls(())

    @classmethod
    def simplicial(cls, n: int, prefix: str = "e") -> "PssSpace":
        """Q^n: n one-dimensional components."""
        return cls(tuple((f"{prefix}{i}",) for i in range(n)))

    @classmethod
    def simple(cls, labels: Iterable[str]) -> "PssSpace":
        return cls.of([labels])

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.components)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for comp in self.components for label in comp)

    def offset(self, k: int) -> int:
        return sum(len(c) for c in self.components[:k])

    def span(self, k: int) -> range:
        """Coordinate positions of component k."""
        start = self.offset(k)
        return range(start, start + len(self.components[k]))

    def component_of(self, position: int) -> int:
        for k in range(self.n_components):
            if position in self.span(k):
                return k
        raise IndexError(f"coordinate {position} outside a space of dimension {self.total_dim}")

    def component_space(self, k: int) -> "PssSpace":
        return PssSpace((self.components[k],))

    def is_simple(self) -> bool:
        return self.n_components == 1

    def is_simplicial(self) -> bool:
        return all(d == 1 for d in self.dims)

    def describe(self) -> str:
        if not self.components:
            return "0"
        return " ⊕ ".join(f"Q_{{{','.join(c)}}}" for c in self.components)

    def to_dict(self) -> dict:
        return {"components": [list(c) for c in self.components]}

    @classmethod
    def from_dict(cls, data: dict) -> "PssSpace":
        comps = data.get("components") if isinstance(data, dict) else None
        if not isinstance(comps, list) or any(not isinstance(c, list) for c in comps):
            raise ParseError("space must be an object with a 'components' list of label lists")
        return cls.of(comps)


def direct_sum(spaces: Sequence[PssSpace], prefixes: Optional[Sequence[str]] = None) -> PssSpace:
    """Concatenate components; labels are prefixed to keep them unique."""
    comps = []
    for k, space in enumerate(spaces):
        prefix = prefixes[k] if prefixes is not None else ""
        for comp in space.components:
            comps.append(tuple(f"{prefix}{label}" for label in comp))
    return PssSpace(tuple(comps))


def idc_space(space: PssSpace) -> int:
    """Arity m of Idc A = 2^m: one atom per simple component."""
    return space.n_components


# ---------------------------------------------------------------------------
# Vectors and the order
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PssVector:
    space: PssSpace
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.space.total_dim:
            raise ShapeError(
                f"vector has {len(self.coords)} coordinates, space has dimension "
                f"{self.space.total_dim}"
            )

    @classmethod
    def of(cls, space: PssSpace, values: Iterable[RationalLike]) -> "PssVector":
        return cls(space, tuple(as_rational(v) for v in values))

    def component(self, k: int) -> tuple:
        span = self.space.span(k)
        return self.coords[span.start : span.stop]

    def __add__(self, other: "PssVector") -> "PssVector":
        _same_space(self, other)
        return PssVector(self.space, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "PssVector") -> "PssVector":
        _same_space(self, other)
        return PssVector(self.space, vec_sub(self.coords, other.coords))

    def scale(self, c: RationalLike) -> "PssVector":
        return PssVector(self.space, vec_scale(as_rational(c), self.coords))

    def to_json(self) -> list[str]:
        return [format_rational(v) for v in self.coords]


def _same_space(x: PssVector, y: PssVector) -> None:
    if x.space != y.space:
        raise ShapeError("vectors live in different spaces")


def order_unit(space: PssSpace) -> PssVector:
    """1_A: all ones."""
    return PssVector(space, (ONE,) * space.total_dim)


def component_unit(space: PssSpace, k: int) -> PssVector:
    """1_{A_k}: ones on component k, zero elsewhere."""
    span = space.span(k)
    coords = [ZERO] * space.total_dim
    for pos in span:
        coords[pos] = ONE
    return PssVector(space, tuple(coords))


def basis_vector(space: PssSpace, label: str) -> PssVector:
    try:
        pos = space.labels.index(label)
    except ValueError:
        raise ShapeError(f"no basis label {label!r} in {space.describe()}") from None
    coords = [ZERO] * space.total_dim
    coords[pos] = ONE
    return PssVector(space, tuple(coords))


def in_cone(v: PssVector) -> bool:
    """v >= 0: on each component, v is zero or strictly positive everywhere."""
    for k in range(v.space.n_components):
        block = v.component(k)
        if any(block) and not all(x > 0 for x in block):
            return False
    return True


def strict_leq(x: PssVector, y: PssVector) -> bool:
    """x <= y in the pseudo-simplicial order."""
    _same_space(x, y)
    return in_cone(y - x)


def arch_leq(x: PssVector, y: PssVector) -> bool:
    """x <= y in the archimedean quotient, which is Q^X with the product order."""
    _same_space(x, y)
    return vec_le(x.coords, y.coords)


def compact_ideal_of(v: PssVector) -> CompactIdeal:
    """Components on which v is nonzero, i.e. the compact ideal generated by v."""
    space = v.space
    return BitSet.from_indices(
        space.n_components, (k for k in range(space.n_components) if any(v.component(k)))
    )


class RelationKind(Enum):
    """The four comparison relations indexed by a constant lambda."""

    PROPTO = "propto"
    ASYMP = "asymp"
    PROPTO_ARCH = "propto_arch"
    ASYMP_ARCH = "asymp_arch"

    @property
    def archimedean(self) -> bool:
        return self in (RelationKind.PROPTO_ARCH, RelationKind.ASYMP_ARCH)

    @property
    def symmetric(self) -> bool:
        return self in (RelationKind.ASYMP, RelationKind.ASYMP_ARCH)


def rel_lambda(a: PssVector, b: PssVector, lam: RationalLike, kind: RelationKind) -> bool:
    """Test a ∝ b (or a ≍ b) with constant lam, in the chosen order."""
    lam = as_rational(lam)
    _same_space(a, b)
    if lam <= 0:
        raise PreconditionError(f"lambda must be positive, got {format_rational(lam)}")
    if kind.archimedean:
        if any(x < 0 for x in a.coords + b.coords):
            raise PreconditionError(
                "archimedean relations need coordinatewise non-negative vectors"
            )
        leq = arch_leq
    else:
        if not (in_cone(a) and in_cone(b)):
            raise PreconditionError("relations need both vectors in the positive cone")
        leq = strict_leq
    forward = leq(a, b.scale(lam))
    if not kind.symmetric:
        return forward
    return forward and leq(b, a.scale(lam))


# ---------------------------------------------------------------------------
# Homomorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PssHom:
    """Linear map src -> tgt as a tgt.total_dim x src.total_dim matrix.

    Construction only checks the shape; `hom_validate` checks positivity.
    """

    src: PssSpace
    tgt: PssSpace
    matrix: RatMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.tgt.total_dim, self.src.total_dim):
            raise ShapeError(
                f"matrix {self.matrix.rows}x{self.matrix.cols} does not map "
                f"dimension {self.src.total_dim} to dimension {self.tgt.total_dim}"
            )

    @classmethod
    def identity(cls, space: PssSpace) -> "PssHom":
        return cls(space, space, RatMatrix.identity(space.total_dim))

    @classmethod
    def zero(cls, src: PssSpace, tgt: PssSpace) -> "PssHom":
        return cls(src, tgt, RatMatrix.zeros(tgt.total_dim, src.total_dim))

    def block(self, j: int, i: int) -> RatMatrix:
        """Block from source component i to target component j."""
        rows, cols = self.tgt.span(j), self.src.span(i)
        return self.matrix.block(rows.start, rows.stop, cols.start, cols.stop)

    def block_is_zero(self, j: int, i: int) -> bool:
        rows, cols = self.tgt.span(j), self.src.span(i)
        m = self.matrix
        return not any(m[r, c] for r in rows for c in cols)

    def apply(self, v: PssVector) -> PssVector:
        if v.space != self.src:
            raise ShapeError("vector is not in the source space")
        return PssVector(self.tgt, self.matrix.apply(v.coords))

    def compose(self, inner: "PssHom") -> "PssHom":
        """self ∘ inner."""
        if inner.tgt != self.src:
            raise ShapeError("cannot compose: intermediate spaces differ")
        return PssHom(inner.src, self.tgt, mat_mul(self.matrix, inner.matrix))

    def __add__(self, other: "PssHom") -> "PssHom":
        if (self.src, self.tgt) != (other.src, other.tgt):
            raise ShapeError("cannot add maps between different spaces")
        return PssHom(self.src, self.tgt, self.matrix + other.matrix)

    def scale(self, c: RationalLike) -> "PssHom":
        return PssHom(self.src, self.tgt, self.matrix.scale(c))

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def positivity_error(self) -> Optional[PositivityError]:
        """The first block failing the positivity test, or None."""
        for i in range(self.src.n_components):
            for j in range(self.tgt.n_components):
                err = _check_block(self, j, i)
                if err is not None:
                    return err
        return None

    def is_positive(self) -> bool:
        return self.positivity_error() is None

    def to_dict(self) -> dict:
        return {
            "src": self.src.to_dict(),
            "tgt": self.tgt.to_dict(),
            "matrix": self.matrix.to_json(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PssHom":
        if not isinstance(data, dict) or not {"src", "tgt", "matrix"} <= set(data):
            raise ParseError("hom must be an object with 'src', 'tgt' and 'matrix'")
        src = PssSpace.from_dict(data["src"])
        tgt = PssSpace.from_dict(data["tgt"])
        matrix = RatMatrix.from_json(data["matrix"], cols=src.total_dim)
        if matrix.rows == 0:
            matrix = RatMatrix.zeros(tgt.total_dim, src.total_dim)
        return cls(src, tgt, matrix)


def _check_block(f: PssHom, j: int, i: int) -> Optional[PositivityError]:
    """A block is fine iff it is zero, or non-negative with every row sum positive.

    On failure, the witness is a source vector that is strictly positive on
    component i and zero elsewhere, whose image leaves the cone.
    """
    if f.block_is_zero(j, i):
        return None
    rows, cols = f.tgt.span(j), f.src.span(i)
    m = f.matrix
    for r in rows:
        entries = [m[r, c] for c in cols]
        neg = next((k for k, x in enumerate(entries) if x < 0), None)
        if neg is not None:
            rest = sum(x for k, x in enumerate(entries) if k != neg)
            weight = max(ONE, Fraction(math.floor(rest / -entries[neg]) + 1))
            local = [ONE] * len(entries)
            local[neg] = weight
            return PositivityError(
                f"block ({j},{i}) row {r - rows.start} has a negative entry",
                block=(j, i),
                row=r,
                witness=_embed(f.src, i, local),
            )
        if sum(entries) == 0:
            return PositivityError(
                f"block ({j},{i}) is nonzero but row {r - rows.start} is zero",
                block=(j, i),
                row=r,
                witness=_embed(f.src, i, [ONE] * len(entries)),
            )
    return None


def _embed(space: PssSpace, k: int, local: Sequence[Fraction]) -> tuple:
    coords = [ZERO] * space.total_dim
    for pos, x in zip(space.span(k), local):
        coords[pos] = x
    return tuple(coords)


def hom_validate(matrix: RatMatrix, src: PssSpace, tgt: PssSpace) -> PssHom:
    """Build a PssHom, raising PositivityError if it does not preserve the cone."""
    f = PssHom(src, tgt, matrix)
    err = f.positivity_error()
    if err is not None:
        raise err
    return f


def idc_hom(f: PssHom) -> BoolMap:
    """Idc f: atom i goes to the target components hit by a nonzero block."""
    m, n = f.src.n_components, f.tgt.n_components
    return BoolMap(
        m,
        n,
        tuple(
            BitSet.from_indices(n, (j for j in range(n) if not f.block_is_zero(j, i)))
            for i in range(m)
        ),
    )


def canonical_lifting(pattern: BoolMap, src: PssSpace, tgt: PssSpace) -> PssHom:
    """All-ones block from component i to component k whenever k is in pattern(i).

    On a simple source this is x -> (sum of coordinates) * 1_B.
    """
    if pattern.src_arity != src.n_components or pattern.tgt_arity != tgt.n_components:
        raise ShapeError(
            f"pattern {pattern} does not match {src.n_components} -> {tgt.n_components} components"
        )
    rows = [[ZERO] * src.total_dim for _ in range(tgt.total_dim)]
    for i, image in enumerate(pattern.atom_images):
        for k in image:
            for r in tgt.span(k):
                for c in src.span(i):
                    rows[r][c] = ONE
    return PssHom(src, tgt, RatMatrix.from_rows(rows, cols=src.total_dim))


def stack_components(blocks: Sequence[PssHom], src: PssSpace, tgt: PssSpace) -> PssHom:
    """Assemble a map into tgt from one map per target component."""
    if len(blocks) != tgt.n_components:
        raise ShapeError("need one block per target component")
    return PssHom(src, tgt, vstack([b.matrix for b in blocks], cols=src.total_dim))

