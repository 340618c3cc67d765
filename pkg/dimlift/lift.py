"""
Liftings of Boolean semilattice diagrams by pseudo-simplicial spaces.

- `dislift` lifts a diagram indexed by a dismantlable poset, re-inserting
  elements in the reverse of a dismantling order.
- `verify_lifting` re-checks any lifting against its diagram.
- `lift_chain` lifts a finite stage of a chain of Boolean maps into a given
  chain of simplicial spaces.
- `lift_sg` represents a finite join-semilattice with zero by supports.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .boolsem import BoolMap, SemDiagram, SemIso, bool_compose
from .errors import (
    InputError,
    InvariantViolation,
    ParseError,
    PreconditionError,
    ShapeError,
    UnsupportedInputError,
)
from .exactnum import BitSet, Caps, RatMatrix
from .genfact import (
    CanonicalGeneric,
    factor_general,
    flatness_constant,
    gen,
    q_bound,
    rev_lift,
)
from .poset import DismantlingOrder, Poset, covers_within, dismantling_order, enumerate_posets
from .pss import PssHom, PssSpace, hom_validate, idc_hom
from .sampling import random_boolmap

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Diagrams of spaces and their verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PssDiagram:
    """A functor from a poset to pseudo-simplicial spaces.

    `arrows` holds a map for every pair x <= y, identities included.
    """

    poset: Poset
    objects: tuple[PssSpace, ...]
    arrows: Mapping[tuple[int, int], PssHom]

    def arrow(self, x: int, y: int) -> PssHom:
        return self.arrows[(x, y)]

    def to_dict(self) -> dict:
        p = self.poset
        return {
            "objects": {p.name(i): space.to_dict() for i, space in enumerate(self.objects)},
            "arrows": {
                f"{p.name(x)}<{p.name(y)}": self.arrows[(x, y)].matrix.to_json()
                for x, y in p.comparable_pairs()
                if x != y
            },
        }


@dataclass(frozen=True)
class NaturalIsoFamily:
    """iota_x: Phi(x) -> Idc Psi(x), one per element."""

    isos: tuple[SemIso, ...]

    def __getitem__(self, x: int) -> SemIso:
        return self.isos[x]

    def to_dict(self, poset: Poset) -> dict:
        return {poset.name(i): list(iso.permutation) for i, iso in enumerate(self.isos)}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    witness: Optional[tuple[str, ...]] = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed}
        if self.detail:
            out["detail"] = self.detail
        if self.witness is not None:
            out["witness"] = list(self.witness)
        return out


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "", witness=None) -> None:
        self.checks.append(CheckResult(name, passed, detail, witness))

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "total": len(self.checks),
            "failed": len(self.failures),
            "checks": [c.to_dict() for c in self.checks],
        }


def verify_lifting(
    diagram: SemDiagram, lifting: PssDiagram, iotas: NaturalIsoFamily
) -> VerificationReport:
    """Check positivity, identities, functoriality and every naturality square."""
    report = VerificationReport()
    p = diagram.poset
    if lifting.poset != p:
        report.add("poset", False, "the lifting is indexed by a different poset")
        return report
    if len(lifting.objects) != p.n or len(iotas.isos) != p.n:
        report.add("shape", False, "object or isomorphism count differs from the poset")
        return report

    for x in range(p.n):
        name = p.name(x)
        ok = iotas[x].arity == diagram.arity[x] == lifting.objects[x].n_components
        report.add(f"iota {name}", ok, "" if ok else "arity mismatch", (name,))
        ok = lifting.arrow(x, x) == PssHom.identity(lifting.objects[x])
        report.add(f"identity {name}", ok, "" if ok else "arrow is not the identity", (name,))

    for x, y in p.comparable_pairs():
        if x == y:
            continue
        pair = (p.name(x), p.name(y))
        f = lifting.arrow(x, y)
        err = f.positivity_error()
        report.add(f"positive {pair[0]}<{pair[1]}", err is None, str(err or ""), pair)

    for x, y in p.comparable_pairs():
        for z in range(p.n):
            if x == y or y == z or not p.le(y, z):
                continue
            try:
                composite = lifting.arrow(y, z).compose(lifting.arrow(x, y))
                ok = composite.matrix == lifting.arrow(x, z).matrix
            except ShapeError:
                ok = False
            triple = (p.name(x), p.name(y), p.name(z))
            report.add(f"functor {'<'.join(triple)}", ok, "" if ok else "triangle differs", triple)

    for x, y in p.comparable_pairs():
        pair = (p.name(x), p.name(y))
        try:
            left = bool_compose(iotas[y].as_boolmap(), diagram.arrow(x, y))
            right = bool_compose(idc_hom(lifting.arrow(x, y)), iotas[x].as_boolmap())
            ok = left == right
        except ShapeError:
            left = right = None
            ok = False
        report.add(
            f"natural {pair[0]}<{pair[1]}",
            ok,
            "" if ok else f"iota∘Phi = {left}, Idc Psi∘iota = {right}",
            pair,
        )
    return report


# ---------------------------------------------------------------------------
# Lifting dismantlable diagrams
# ---------------------------------------------------------------------------

CASE_ISOLATED = "A"
CASE_BELOW = "B"
CASE_ABOVE = "C"


@dataclass(frozen=True)
class LiftResult:
    diagram: SemDiagram
    lifting: PssDiagram
    iotas: NaturalIsoFamily
    order: DismantlingOrder
    cases: tuple[str, ...]

    def verify(self) -> VerificationReport:
        return verify_lifting(self.diagram, self.lifting, self.iotas)

    def to_dict(self) -> dict:
        p = self.diagram.poset
        return {
            "dismantling_order": self.order.names(p),
            "cases": {p.name(i): c for i, c in enumerate(self.cases)},
            **self.lifting.to_dict(),
            "iota": self.iotas.to_dict(p),
        }


def dislift(diagram: SemDiagram, caps: Optional[Caps] = None) -> LiftResult:
    """Lift a diagram indexed by a dismantlable poset.

    Elements come back in reverse dismantling order. Each one is doubly
    irreducible among those already present, so it has at most one lower
    cover u and one upper cover v there:

    - neither: Psi(x) = Q^n;
    - only v: Psi(x) = Q^n, mapped into Psi(v) by rev_lift;
    - u: Psi(x) = Gen(Psi(u), Phi(u,x) ∘ iota_u^-1) with the canonical
      mu-generic map, and when v exists the arrow x -> v comes from
      factor_general.

    Other arrows through x are composites through u or v.
    """
    caps = caps or Caps()
    p = diagram.poset
    order = dismantling_order(p, caps.max_poset_elements)
    if order is None:
        raise UnsupportedInputError("the index poset is not dismantlable")

    objects: dict[int, PssSpace] = {}
    iotas: dict[int, SemIso] = {}
    arrows: dict[tuple[int, int], PssHom] = {}
    cases: dict[int, str] = {}
    present: list[int] = []

    for x in order.reinsertion_sequence:
        lower, upper = covers_within(p, x, present)
        n = diagram.arity[x]
        name = p.name(x)
        if lower is None:
            objects[x] = PssSpace.simplicial(n)
            iotas[x] = SemIso.identity(n)
            if upper is None:
                cases[x] = CASE_ISOLATED
            else:
                cases[x] = CASE_BELOW
                pattern = bool_compose(iotas[upper].as_boolmap(), diagram.arrow(x, upper))
                arrows[(x, upper)] = rev_lift(pattern, objects[upper])
        else:
            cases[x] = CASE_ABOVE
            pattern = bool_compose(diagram.arrow(lower, x), iotas[lower].inverse().as_boolmap())
            if upper is None:
                lam, mu = Fraction(1), Fraction(1)
            else:
                lam = flatness_constant(arrows[(lower, upper)]).lambda_min
                mu = q_bound(objects[lower].n_components, n) * lam
            generic = gen(objects[lower], pattern, mu, caps)
            objects[x] = generic.space
            iotas[x] = generic.iota
            arrows[(lower, x)] = generic.hom
            if upper is not None:
                target_pattern = bool_compose(
                    bool_compose(iotas[upper].as_boolmap(), diagram.arrow(x, upper)),
                    iotas[x].inverse().as_boolmap(),
                )
                arrows[(x, upper)] = factor_general(
                    generic, arrows[(lower, upper)], target_pattern, lam
                )
        arrows[(x, x)] = PssHom.identity(objects[x])

        for y in present:
            if upper is not None and p.lt(x, y) and y != upper:
                arrows[(x, y)] = arrows[(upper, y)].compose(arrows[(x, upper)])
            if lower is not None and p.lt(y, x) and y != lower:
                arrows[(y, x)] = arrows[(lower, x)].compose(arrows[(y, lower)])
        present.append(x)
        logger.debug(
            f"inserted {name} (case {cases[x]}): {objects[x].n_components} components, "
            f"dimension {objects[x].total_dim}"
        )

    lifting = PssDiagram(
        p, tuple(objects[i] for i in range(p.n)), {k: arrows[k] for k in p.comparable_pairs()}
    )
    family = NaturalIsoFamily(tuple(iotas[i] for i in range(p.n)))
    result = LiftResult(diagram, lifting, family, order, tuple(cases[i] for i in range(p.n)))
    report = result.verify()
    if not report.all_passed:
        first = report.failures[0]
        raise InvariantViolation(f"constructed lifting fails {first.name}: {first.detail}")
    logger.info(
        f"lifted a diagram on {p.n} elements, total dimension "
        f"{sum(s.total_dim for s in lifting.objects)}"
    )
    return result


def lifting_from_dict(data: dict, diagram: SemDiagram) -> tuple[PssDiagram, NaturalIsoFamily]:
    """Read back a lifting written by LiftResult.to_dict, without validating it."""
    p = diagram.poset
    if not isinstance(data, dict) or not {"objects", "arrows", "iota"} <= set(data):
        raise ParseError("lifting must be an object with 'objects', 'arrows' and 'iota'")
    try:
        objects = tuple(PssSpace.from_dict(data["objects"][p.name(i)]) for i in range(p.n))
        isos = tuple(SemIso(tuple(data["iota"][p.name(i)])) for i in range(p.n))
    except KeyError as e:
        raise ParseError(f"lifting has no entry for element {e.args[0]!r}") from None
    arrows: dict[tuple[int, int], PssHom] = {}
    for x, y in p.comparable_pairs():
        if x == y:
            arrows[(x, y)] = PssHom.identity(objects[x])
            continue
        key = f"{p.name(x)}<{p.name(y)}"
        if key not in data["arrows"]:
            raise ParseError(f"lifting has no arrow {key!r}")
        matrix = RatMatrix.from_json(data["arrows"][key], cols=objects[x].total_dim)
        if matrix.rows == 0:
            matrix = RatMatrix.zeros(objects[y].total_dim, objects[x].total_dim)
        arrows[(x, y)] = PssHom(objects[x], objects[y], matrix)
    return PssDiagram(p, objects, arrows), NaturalIsoFamily(isos)


# ---------------------------------------------------------------------------
# Chains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainSpec:
    """Boolean maps s_i: 2^m_i -> 2^m_{i+1} over simplicial maps t_i: Q^n_i -> Q^n_{i+1}.

    f_maps[i]: 2^m_i -> Idc H_i, and every square
    Idc t_i ∘ f_i = f_{i+1} ∘ s_i must commute.
    """

    s_maps: tuple[BoolMap, ...]
    t_maps: tuple[PssHom, ...]
    f_maps: tuple[BoolMap, ...]

    @property
    def length(self) -> int:
        return len(self.s_maps)

    @property
    def targets(self) -> tuple[PssSpace, ...]:
        if not self.t_maps:
            return (PssSpace.simplicial(self.f_maps[0].tgt_arity),)
        return tuple(t.src for t in self.t_maps) + (self.t_maps[-1].tgt,)

    def validate(self) -> None:
        n = self.length
        if len(self.t_maps) != n or len(self.f_maps) != n + 1:
            raise ShapeError(f"chain of length {n} needs {n} t-maps and {n + 1} f-maps")
        for i in range(n):
            s, t, f, f_next = self.s_maps[i], self.t_maps[i], self.f_maps[i], self.f_maps[i + 1]
            if s.src_arity != f.src_arity or s.tgt_arity != f_next.src_arity:
                raise ShapeError(f"s_{i} does not connect the arities of f_{i} and f_{i + 1}")
            if f.tgt_arity != t.src.n_components or f_next.tgt_arity != t.tgt.n_components:
                raise ShapeError(f"f_{i} or f_{i + 1} does not match the spaces of t_{i}")
            if i + 1 < n and self.t_maps[i + 1].src != t.tgt:
                raise ShapeError(f"t_{i} and t_{i + 1} do not compose")
            err = t.positivity_error()
            if err is not None:
                raise PreconditionError(f"t_{i} is not positive: {err}")
            if bool_compose(idc_hom(t), f) != bool_compose(f_next, s):
                raise PreconditionError(f"square {i} of the chain does not commute")


@dataclass(frozen=True)
class ChainLift:
    spec: ChainSpec
    spaces: tuple[PssSpace, ...]
    generics: tuple[CanonicalGeneric, ...]
    f_homs: tuple[PssHom, ...]
    alphas: tuple[SemIso, ...]

    def check_squares(self) -> VerificationReport:
        report = VerificationReport()
        for i, (f, alpha) in enumerate(zip(self.f_homs, self.alphas)):
            ok = bool_compose(idc_hom(f), alpha.as_boolmap()) == self.spec.f_maps[i]
            report.add(f"f_{i} lifts", ok, "" if ok else "Idc f_i ∘ alpha_i differs", (str(i),))
        for i, s in enumerate(self.generics):
            t = self.spec.t_maps[i]
            ok = self.f_homs[i + 1].compose(s.hom).matrix == t.compose(self.f_homs[i]).matrix
            detail = "" if ok else "f_next ∘ s_i differs from t_i ∘ f_i"
            report.add(f"square {i}", ok, detail, (str(i),))
            left = idc_hom(s.hom)
            right = bool_compose(
                bool_compose(self.alphas[i + 1].as_boolmap(), self.spec.s_maps[i]),
                self.alphas[i].inverse().as_boolmap(),
            )
            ok = left == right
            report.add(f"alpha {i + 1}", ok, "" if ok else "Idc s_i differs", (str(i),))
        return report


def lift_chain(spec: ChainSpec, caps: Optional[Caps] = None) -> ChainLift:
    """G_0 = Q^m_0 with f_0 from rev_lift, then G_{i+1} = Gen(G_i, s_i ∘ alpha_i^-1).

    The generic map s_i uses mu = q * lambda, where lambda is the flatness of
    t_i ∘ f_i and q bounds the components of A and G as in factor_general.
    """
    caps = caps or Caps()
    spec.validate()
    f0 = spec.f_maps[0]
    spaces = [PssSpace.simplicial(f0.src_arity)]
    alphas = [SemIso.identity(f0.src_arity)]
    f_homs = [rev_lift(f0, spec.targets[0])]
    generics: list[CanonicalGeneric] = []
    for i in range(spec.length):
        t = spec.t_maps[i]
        h = t.compose(f_homs[i])
        lam = flatness_constant(h).lambda_min
        pattern = bool_compose(spec.s_maps[i], alphas[i].inverse().as_boolmap())
        q = q_bound(spaces[i].n_components, pattern.tgt_arity)
        generic = gen(spaces[i], pattern, q * lam, caps)
        alpha_next = generic.iota
        target_pattern = bool_compose(spec.f_maps[i + 1], alpha_next.inverse().as_boolmap())
        f_next = factor_general(generic, h, target_pattern, lam)
        generics.append(generic)
        spaces.append(generic.space)
        alphas.append(alpha_next)
        f_homs.append(f_next)
        logger.debug(f"chain stage {i + 1}: dimension {generic.space.total_dim}")
    result = ChainLift(spec, tuple(spaces), tuple(generics), tuple(f_homs), tuple(alphas))
    report = result.check_squares()
    if not report.all_passed:
        raise InvariantViolation(f"chain lifting fails {report.failures[0].name}")
    return result


def random_chain_spec(
    seed: int | str, length: int, max_arity: int, attempts: int = 20
) -> ChainSpec:
    """A compatible ChainSpec built forwards from seeded random choices.

    f_{i+1} sends atom b to the intersection of Idc t_i(f_i(a)) over the
    atoms a with b in s_i(a); the draw is kept when the square commutes.
    After `attempts` failures t_i is taken to be zero, which always fits.
    """
    rng = random.Random(f"chain:{seed}")
    m = [rng.randint(1, max_arity) for _ in range(length + 1)]
    n = [rng.randint(1, max_arity) for _ in range(length + 1)]
    f_maps = [random_boolmap(rng, m[0], n[0])]
    s_maps: list[BoolMap] = []
    t_maps: list[PssHom] = []
    for i in range(length):
        src, tgt = PssSpace.simplicial(n[i]), PssSpace.simplicial(n[i + 1])
        for attempt in range(attempts + 1):
            if attempt < attempts:
                rows = [[rng.randint(0, 3) for _ in range(n[i])] for _ in range(n[i + 1])]
                t = hom_validate(RatMatrix.from_rows(rows, cols=n[i]), src, tgt)
            else:
                t = PssHom.zero(src, tgt)
            s = random_boolmap(rng, m[i], m[i + 1])
            fitted = _fit_next(bool_compose(idc_hom(t), f_maps[i]), s, n[i + 1], rng)
            if fitted is not None:
                break
        s_maps.append(s)
        t_maps.append(t)
        f_maps.append(fitted)
    spec = ChainSpec(tuple(s_maps), tuple(t_maps), tuple(f_maps))
    spec.validate()
    return spec


def _fit_next(
    required: BoolMap, s: BoolMap, width: int, rng: random.Random
) -> Optional[BoolMap]:
    images = []
    for b in range(s.tgt_arity):
        above = [a for a in range(s.src_arity) if b in s.atom_images[a]]
        if not above:
            images.append(BitSet(width, rng.randrange(1 << width)))
            continue
        mask = (1 << width) - 1
        for a in above:
            mask &= required.atom_images[a].mask
        images.append(BitSet(width, mask))
    candidate = BoolMap(s.tgt_arity, width, tuple(images))
    if bool_compose(candidate, s) != required:
        return None
    return candidate


# ---------------------------------------------------------------------------
# Finite join-semilattices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JoinTable:
    """A finite join-semilattice with zero, given by its join table."""

    elements: tuple[str, ...]
    join: tuple[tuple[int, ...], ...]
    zero: int

    def __post_init__(self):
        n = len(self.elements)
        if n == 0:
            raise InputError("a semilattice with zero has at least one element")
        if len(self.join) != n or any(len(row) != n for row in self.join):
            raise InputError("join table must be square")
        if any(not 0 <= v < n for row in self.join for v in row):
            raise InputError("join table refers to unknown elements")
        j = self.join
        for a in range(n):
            if j[a][a] != a:
                raise InputError(f"join is not idempotent at {self.elements[a]}")
            if j[self.zero][a] != a:
                raise InputError(f"{self.elements[self.zero]} is not a zero")
            for b in range(n):
                if j[a][b] != j[b][a]:
                    raise InputError("join is not commutative")
                for c in range(n):
                    if j[j[a][b]][c] != j[a][j[b][c]]:
                        raise InputError("join is not associative")

    @property
    def n(self) -> int:
        return len(self.elements)

    def leq(self, a: int, b: int) -> bool:
        return self.join[a][b] == b

    @classmethod
    def from_poset(cls, p: Poset) -> "JoinTable":
        """Join table of a poset in which every pair has a least upper bound."""
        if p.n == 0:
            raise InputError("empty poset has no zero")
        bottoms = [x for x in range(p.n) if all(p.le(x, y) for y in range(p.n))]
        if not bottoms:
            raise InputError("poset has no least element")
        table = []
        for a in range(p.n):
            row = []
            for b in range(p.n):
                uppers = [c for c in range(p.n) if p.le(a, c) and p.le(b, c)]
                least = [c for c in uppers if all(p.le(c, d) for d in uppers)]
                if not least:
                    raise InputError(f"{p.name(a)} and {p.name(b)} have no join")
                row.append(least[0])
            table.append(tuple(row))
        return cls(p.elements, tuple(table), bottoms[0])

    def to_dict(self) -> dict:
        return {
            "elements": list(self.elements),
            "zero": self.elements[self.zero],
            "join": [[self.elements[v] for v in row] for row in self.join],
        }


def enumerate_semilattices(size: int) -> list[JoinTable]:
    """Every join-semilattice with zero on `size` elements, up to isomorphism.

    A finite join-semilattice with zero is a lattice, so these are the posets
    on `size` elements with a bottom and all binary joins.
    """
    out = []
    for p in enumerate_posets(size):
        try:
            out.append(JoinTable.from_poset(p))
        except InputError:
            continue
    return out


@dataclass(frozen=True)
class LiftSgResult:
    """Supports j(s) = {x in S : s is not below x}, one per element of S.

    A function S -> Q belongs to the cone when it is non-negative and its
    support is some j(s); compact ideals then correspond to supports.
    """

    table: JoinTable
    supports: tuple[BitSet, ...]

    def in_cone(self, values: Sequence[Fraction]) -> bool:
        if len(values) != self.table.n or any(v < 0 for v in values):
            return False
        return self.support_of(values) in self.supports

    def support_of(self, values: Sequence[Fraction]) -> BitSet:
        return BitSet.from_indices(self.table.n, (i for i, v in enumerate(values) if v))

    def ideal_leq(self, f: Sequence[Fraction], g: Sequence[Fraction]) -> bool:
        """f generates a smaller compact ideal than g."""
        return self.support_of(f).issubset(self.support_of(g))

    def ideal_of(self, values: Sequence[Fraction]) -> Optional[int]:
        """The element s whose support matches, or None outside the cone."""
        support = self.support_of(values)
        for s, j in enumerate(self.supports):
            if j == support:
                return s
        return None

    def order_matches(self) -> bool:
        t = self.table
        return all(
            t.leq(a, b) == self.supports[a].issubset(self.supports[b])
            for a in range(t.n)
            for b in range(t.n)
        )

    def to_dict(self) -> dict:
        t = self.table
        return {
            "ground_set": list(t.elements),
            "supports": {
                t.elements[s]: [t.elements[x] for x in j] for s, j in enumerate(self.supports)
            },
        }


def lift_sg(table: JoinTable) -> LiftSgResult:
    t = table
    supports = tuple(
        BitSet.from_indices(t.n, (x for x in range(t.n) if not t.leq(s, x))) for s in range(t.n)
    )
    result = LiftSgResult(t, supports)
    if supports[t.zero]:
        raise InvariantViolation("support of zero is not empty")
    for a in range(t.n):
        for b in range(t.n):
            if supports[t.join[a][b]] != supports[a].union(supports[b]):
                raise InvariantViolation("supports do not preserve joins")
    if len(set(supports)) != t.n or not result.order_matches():
        raise InvariantViolation("support order does not reproduce the semilattice")
    return result

