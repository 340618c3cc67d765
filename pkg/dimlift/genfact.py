"""
Canonical generic maps and factorization through them.

`gen` builds, for a pseudo-simplicial space A and a join-homomorphism
Idc A -> 2^n, the space G = G_0 ⊕ ... ⊕ G_{n-1} together with the canonical
mu-generic map f_mu: A -> G. The `factor_*` functions then factor any
suitably flat h: A -> B as g ∘ f_mu with a prescribed Idc g.

Every factorization is re-checked (g ∘ f = h, Idc g and positivity) before it
is returned.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import prod
from typing import Optional, Sequence

from .boolsem import BoolMap, SemIso, bool_compose
from .errors import InvariantViolation, PreconditionError, ResourceError, ShapeError
from .exactnum import (
    ONE,
    ZERO,
    BitSet,
    Caps,
    RatMatrix,
    RationalLike,
    as_rational,
    format_rational,
    hstack,
    vec_scale,
    vec_sum,
    vstack,
)
from .pss import (
    PssHom,
    PssSpace,
    canonical_lifting,
    component_unit,
    direct_sum,
    hom_validate,
    idc_hom,
    order_unit,
)
from .refine import Decomposition, lamas_decompose, mult_refine, riesz_refine

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenSpace:
    """Index data of one simple generic component Q_F, F = P(I) x T.

    `support` is I as a set of source components. Subsets X are bitsets over
    the source components, listed in binary-counter order relative to the
    sorted members of I; `choices` lists T lexicographically, one basis label
    per member of I.
    """

    source: PssSpace
    support: BitSet
    subsets: tuple[BitSet, ...]
    choices: tuple[tuple[str, ...], ...]

    @property
    def members(self) -> tuple[int, ...]:
        return self.support.indices()

    @property
    def index_labels(self) -> tuple[tuple[BitSet, tuple[str, ...]], ...]:
        return tuple((x, phi) for x in self.subsets for phi in self.choices)

    @property
    def size(self) -> int:
        return len(self.subsets) * len(self.choices)

    def label(self, x: BitSet, phi: Sequence[str]) -> str:
        return f"{x}:{'.'.join(phi)}"

    def space(self, prefix: str = "") -> PssSpace:
        return PssSpace.simple(prefix + self.label(x, phi) for x, phi in self.index_labels)


def predicted_size(source: PssSpace, pattern: BoolMap) -> int:
    """|F| of every component of Gen(source, pattern), summed."""
    dims = source.dims
    total = 0
    for j in range(pattern.tgt_arity):
        members = [i for i, img in enumerate(pattern.atom_images) if j in img]
        total += (1 << len(members)) * prod(dims[i] for i in members)
    return total


def gen_simple(
    source: PssSpace,
    pattern: BoolMap,
    lam: RationalLike,
    caps: Optional[Caps] = None,
) -> tuple[GenSpace, PssHom]:
    """The canonical lam-generic map from `source` into one simple space.

    For t in T_i with i in I, f(t) has coefficient 1 on every index (X, phi)
    with phi(i) = t and i not in X, and coefficient lam when i is in X.
    """
    caps = caps or Caps()
    lam = as_rational(lam)
    if lam < 1:
        raise PreconditionError(f"lambda must be at least 1, got {format_rational(lam)}")
    if pattern.src_arity != source.n_components or pattern.tgt_arity != 1:
        raise ShapeError(f"pattern {pattern} is not a map Idc A -> 2 for this space")

    support = BitSet.from_indices(
        source.n_components, (i for i, img in enumerate(pattern.atom_images) if img)
    )
    members = support.indices()
    if len(members) > caps.powerset_cap:
        raise ResourceError(
            f"generic space needs subsets of a {len(members)}-element set",
            cap_name="powerset_cap",
            limit=caps.powerset_cap,
        )
    size = (1 << len(members)) * prod(source.dims[i] for i in members)
    if size > caps.max_dim:
        raise ResourceError(
            f"generic space would have dimension {size}", cap_name="max_dim", limit=caps.max_dim
        )

    subsets = tuple(
        BitSet.from_indices(
            source.n_components, (i for k, i in enumerate(members) if mask >> k & 1)
        )
        for mask in range(1 << len(members))
    )
    choices = tuple(product(*(source.components[i] for i in members)))
    gs = GenSpace(source, support, subsets, choices)
    target = gs.space()

    columns = []
    for i in range(source.n_components):
        for t in source.components[i]:
            if i not in support:
                columns.append((ZERO,) * size)
                continue
            k = members.index(i)
            col = []
            for x, phi in gs.index_labels:
                if phi[k] != t:
                    col.append(ZERO)
                else:
                    col.append(lam if i in x else ONE)
            columns.append(tuple(col))
    f = hom_validate(RatMatrix.from_columns(columns, rows=size), source, target)
    logger.debug(f"Gen component: |I|={len(members)}, dimension {size}")
    return gs, f


@dataclass(frozen=True)
class CanonicalGeneric:
    """f_mu: A -> G together with the index data of each component of G."""

    source: PssSpace
    pattern: BoolMap
    mu: Fraction
    components: tuple[GenSpace, ...]
    space: PssSpace
    hom: PssHom
    iota: SemIso

    @property
    def n_components(self) -> int:
        return len(self.components)

    def component(self, j: int) -> "CanonicalGeneric":
        """The simple generic map A -> G_j."""
        span = self.space.span(j)
        rows = [self.hom.matrix.row(r) for r in span]
        sub_space = self.space.component_space(j)
        sub_hom = PssHom(
            self.source, sub_space, RatMatrix.from_rows(rows, cols=self.source.total_dim)
        )
        return CanonicalGeneric(
            self.source,
            self.pattern.coordinate(j),
            self.mu,
            (self.components[j],),
            sub_space,
            sub_hom,
            SemIso.identity(1),
        )


def gen(
    source: PssSpace,
    pattern: BoolMap,
    mu: RationalLike,
    caps: Optional[Caps] = None,
) -> CanonicalGeneric:
    """G = ⊕_j Gen(source, pattern_j) with f_mu stacked by component.

    Component j of G carries the labels of its own Gen space prefixed with
    "j/". iota sends atom j of 2^n to component j, and iota ∘ pattern equals
    Idc f_mu.
    """
    caps = caps or Caps()
    mu = as_rational(mu)
    if mu < 1:
        raise PreconditionError(f"mu must be at least 1, got {format_rational(mu)}")
    if pattern.src_arity != source.n_components:
        raise ShapeError(
            f"pattern starts at 2^{pattern.src_arity}, space has {source.n_components} components"
        )
    expected = predicted_size(source, pattern)
    if expected > caps.max_dim:
        raise ResourceError(
            f"generic space would have dimension {expected}",
            cap_name="max_dim",
            limit=caps.max_dim,
        )
    if expected > caps.max_dim // 2:
        logger.warning(f"generic space of dimension {expected} is close to max_dim={caps.max_dim}")

    parts = [gen_simple(source, pattern.coordinate(j), mu, caps) for j in range(pattern.tgt_arity)]
    spaces = [gs.space() for gs, _ in parts]
    target = direct_sum(spaces, [f"{j}/" for j in range(len(parts))])
    matrix = vstack([f.matrix for _, f in parts], cols=source.total_dim)
    hom = PssHom(source, target, matrix)
    iota = SemIso.identity(pattern.tgt_arity)
    if idc_hom(hom) != bool_compose(iota.as_boolmap(), pattern):
        raise InvariantViolation("Idc of the generic map differs from its pattern")
    logger.debug(
        f"Gen: {target.n_components} components, dimension {target.total_dim}, "
        f"mu={format_rational(mu)}"
    )
    return CanonicalGeneric(
        source, pattern, mu, tuple(gs for gs, _ in parts), target, hom, iota
    )


# ---------------------------------------------------------------------------
# Flatness and reverse lifting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlatnessReport:
    """Smallest lambda >= 1 for which the map is lambda-flat.

    `witness` is (i, j, coordinate) attaining the largest ratio
    f(1_{A_i})[coordinate] / f(1_{A_j})[coordinate], or None when no two
    source components meet a common target component.
    """

    lambda_min: Fraction
    witness: Optional[tuple[int, int, int]] = None

    def to_dict(self) -> dict:
        return {
            "lambda_min": format_rational(self.lambda_min),
            "witness": list(self.witness) if self.witness else None,
        }


def flatness_constant(f: PssHom) -> FlatnessReport:
    best = None
    witness = None
    units = [f.apply(component_unit(f.src, i)).coords for i in range(f.src.n_components)]
    for k in range(f.tgt.n_components):
        span = f.tgt.span(k)
        hit = [i for i in range(f.src.n_components) if not f.block_is_zero(k, i)]
        for i in hit:
            for j in hit:
                if i == j:
                    continue
                for c in span:
                    if units[j][c] <= 0:
                        raise PreconditionError(
                            f"component {j} has a non-positive image at coordinate {c}"
                        )
                    ratio = units[i][c] / units[j][c]
                    if best is None or ratio > best:
                        best, witness = ratio, (i, j, c)
    return FlatnessReport(max(ONE, best) if best is not None else ONE, witness)


def is_flat(f: PssHom, lam: RationalLike) -> bool:
    return flatness_constant(f).lambda_min <= as_rational(lam)


def rev_lift(pattern: BoolMap, target: PssSpace) -> PssHom:
    """Q^m -> target sending e_i to the sum of the order-units of pattern(i)."""
    if pattern.tgt_arity != target.n_components:
        raise ShapeError(
            f"pattern ends at 2^{pattern.tgt_arity}, space has {target.n_components} components"
        )
    f = canonical_lifting(pattern, PssSpace.simplicial(pattern.src_arity), target)
    if idc_hom(f) != pattern:
        raise InvariantViolation("reverse lifting does not reproduce its pattern")
    return f


# ---------------------------------------------------------------------------
# Factorization
# ---------------------------------------------------------------------------


def q_bound(m: int, p: int) -> int:
    if m > 0 and p > 0:
        return min(1 << (m - 1), p)
    return 1


def _verify_factor(g: PssHom, f: PssHom, h: PssHom, pattern: BoolMap, what: str) -> PssHom:
    err = g.positivity_error()
    if err is not None:
        raise InvariantViolation(f"{what}: result is not positive ({err})")
    if g.compose(f).matrix != h.matrix:
        raise InvariantViolation(f"{what}: g ∘ f differs from h")
    if idc_hom(g) != pattern:
        raise InvariantViolation(f"{what}: Idc g differs from the requested map")
    return g


def factor_simple(generic: CanonicalGeneric, g: PssHom) -> PssHom:
    """h: G -> C with h ∘ f_lambda = g, for simple C and lambda-flat g.

    g must be nonzero exactly on the source components in the support I of
    the generic map.
    """
    if generic.n_components != 1:
        raise PreconditionError("factor_simple needs a generic map into a simple space")
    target = g.tgt
    if not target.is_simple():
        raise PreconditionError(f"target {target.describe()} is not simple")
    if g.src != generic.source:
        raise ShapeError("g does not start at the source of the generic map")
    gs = generic.components[0]
    lam = generic.mu
    hit = BitSet.from_indices(
        g.src.n_components, (i for i in range(g.src.n_components) if not g.block_is_zero(0, i))
    )
    if hit != gs.support:
        raise PreconditionError(
            f"g is nonzero on components {hit}, generic map on {gs.support}"
        )
    flat = flatness_constant(g)
    if flat.lambda_min > lam:
        raise PreconditionError(
            f"g is only {format_rational(flat.lambda_min)}-flat, "
            f"generic map has lambda {format_rational(lam)}"
        )

    members = gs.members
    dim_c = target.total_dim
    if not members:
        h = PssHom.zero(generic.space, target)
        return _verify_factor(h, generic.hom, g, idc_hom(h), "factor_simple")

    src = g.src
    totals = [g.apply(component_unit(src, i)).coords for i in members]
    table_b = lamas_decompose(totals, lam)
    # table_b is keyed by subsets of positions in `members`; gs.subsets lists the same masks
    b = [table_b.values[n] for n in range(len(gs.subsets))]

    per_subset: list[list[tuple]] = [[] for _ in gs.subsets]
    for k, i in enumerate(members):
        first = src.offset(i)
        cols = [g.matrix.column(first + t) for t in range(src.dims[i])]
        u = Decomposition(totals[k], tuple(cols))
        weighted = tuple(vec_scale(lam, bx) if n >> k & 1 else bx for n, bx in enumerate(b))
        v = Decomposition(totals[k], weighted)
        r = riesz_refine(u, v)
        for n in range(len(gs.subsets)):
            scale = 1 / lam if n >> k & 1 else ONE
            per_subset[n].append(
                tuple(vec_scale(scale, r[(t, n)]) for t in range(src.dims[i]))
            )

    columns = []
    for n in range(len(gs.subsets)):
        decomps = [Decomposition(b[n], parts) for parts in per_subset[n]]
        d = mult_refine(decomps, total=b[n])
        columns.extend(d.values)
    h = PssHom(generic.space, target, RatMatrix.from_columns(columns, rows=dim_c))
    if h.apply(order_unit(generic.space)).coords != vec_sum(b, dim_c):
        raise InvariantViolation("factor_simple: h(1) differs from the sum of the b_X")
    logger.debug(f"factor_simple: |I|={len(members)}, |F|={len(columns)}")
    return _verify_factor(h, generic.hom, g, idc_hom(h), "factor_simple")


def factor_idc(generic: CanonicalGeneric, h: PssHom, pattern: BoolMap) -> PssHom:
    """g: G -> B with g ∘ f = h and Idc g = pattern, for simple G and B."""
    if generic.n_components != 1:
        raise PreconditionError("factor_idc needs a generic map into a simple space")
    if h.tgt.n_components != 1:
        raise PreconditionError(f"target {h.tgt.describe()} is not simple")
    if bool_compose(pattern, idc_hom(generic.hom)) != idc_hom(h):
        raise PreconditionError("Idc h differs from pattern ∘ Idc f")
    if h.is_zero():
        if pattern.is_zero():
            g = PssHom.zero(generic.space, h.tgt)
        else:
            g = canonical_lifting(pattern, generic.space, h.tgt)
        return _verify_factor(g, generic.hom, h, pattern, "factor_idc")
    g = factor_simple(generic, h)
    return _verify_factor(g, generic.hom, h, pattern, "factor_idc")


def factor_general(
    generic: CanonicalGeneric,
    h: PssHom,
    pattern: BoolMap,
    lam: Optional[RationalLike] = None,
) -> PssHom:
    """g: G -> B with g ∘ f_mu = h and Idc g = pattern.

    h must be lam-flat and mu >= q * lam with q = min(2^(m-1), p), where m
    and p count the components of A and G. Each target component is handled
    separately: h is split into pieces h_j, one per component of G, and each
    piece is factored through its own simple generic component.
    """
    src, tgt, space = generic.source, h.tgt, generic.space
    if h.src != src:
        raise ShapeError("h does not start at the source of the generic map")
    if pattern.src_arity != generic.n_components or pattern.tgt_arity != tgt.n_components:
        raise ShapeError(f"pattern {pattern} does not match Idc G -> Idc B")
    flat = flatness_constant(h).lambda_min
    lam = flat if lam is None else as_rational(lam)
    if lam < flat:
        raise PreconditionError(
            f"h is only {format_rational(flat)}-flat, not {format_rational(lam)}-flat"
        )
    m, p = src.n_components, generic.n_components
    q = q_bound(m, p)
    if generic.mu < q * lam:
        raise PreconditionError(
            f"generic map has mu={format_rational(generic.mu)}, "
            f"needs at least q*lambda={format_rational(q * lam)}"
        )
    f_pattern = idc_hom(generic.hom)
    if bool_compose(pattern, f_pattern) != idc_hom(h):
        raise PreconditionError("Idc h differs from pattern ∘ Idc f")
    if m == 0 or p == 0:
        g = canonical_lifting(pattern, space, tgt)
        return _verify_factor(g, generic.hom, h, pattern, "factor_general")

    row_blocks = []
    for k in range(tgt.n_components):
        span = tgt.span(k)
        h_k = PssHom(
            src,
            tgt.component_space(k),
            RatMatrix.from_rows([h.matrix.row(r) for r in span], cols=src.total_dim),
        )
        supports = [
            frozenset(i for i in range(m) if j in f_pattern.atom_images[i])
            if k in pattern.atom_images[j]
            else frozenset()
            for j in range(p)
        ]
        distinct = set(supports)
        counts = [sum(1 for part in distinct if i in part) for i in range(m)]
        pieces = []
        for j in range(p):
            weights = [
                Fraction(1, counts[i] * supports.count(supports[j])) if i in supports[j] else ZERO
                for i in range(m)
            ]
            piece = _weight_columns(h_k, weights)
            local = BoolMap(1, 1, (BitSet(1, 1 if k in pattern.atom_images[j] else 0),))
            g_jk = factor_idc(generic.component(j), piece, local)
            pieces.append(g_jk.matrix)
        row_blocks.append(hstack(pieces, rows=len(span)))
    g = PssHom(space, tgt, vstack(row_blocks, cols=space.total_dim))
    logger.debug(f"factor_general: m={m} p={p} q={q} lambda={format_rational(lam)}")
    return _verify_factor(g, generic.hom, h, pattern, "factor_general")


def _weight_columns(h: PssHom, weights: Sequence[Fraction]) -> PssHom:
    """Scale the columns of each source component i by weights[i]."""
    src = h.src
    col_weight = [weights[src.component_of(c)] for c in range(src.total_dim)]
    rows = [
        tuple(x * w for x, w in zip(h.matrix.row(r), col_weight)) for r in range(h.matrix.rows)
    ]
    return PssHom(src, h.tgt, RatMatrix.from_rows(rows, cols=src.total_dim))
