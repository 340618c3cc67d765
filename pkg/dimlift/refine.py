"""
Constructive refinement in the simplicial cone (Q+)^d.

Everything here works coordinatewise on tuples of Fractions and re-verifies
its output by substituting into the defining sums before returning.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Hashable, Iterator, Optional, Sequence

from .errors import InfeasibleError, InvariantViolation, PreconditionError, ShapeError
from .exactnum import (
    ONE,
    ZERO,
    BitSet,
    RationalLike,
    as_rational,
    format_rational,
    vec_add,
    vec_is_nonneg,
    vec_le,
    vec_max,
    vec_scale,
    vec_sub,
    vec_sum,
    zero_vec,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Decomposition:
    """total = sum(parts), with every part coordinatewise non-negative."""

    total: tuple
    parts: tuple[tuple, ...]

    def __post_init__(self):
        for k, part in enumerate(self.parts):
            if len(part) != len(self.total):
                raise ShapeError(f"part {k} has dimension {len(part)}, total has {len(self.total)}")
            if not vec_is_nonneg(part):
                raise PreconditionError(f"part {k} has a negative coordinate")
        if vec_sum(self.parts, len(self.total)) != tuple(self.total):
            raise ShapeError("parts do not sum to the total")

    @classmethod
    def of(cls, parts: Sequence[Sequence[RationalLike]]) -> "Decomposition":
        """Decomposition whose total is the sum of the given parts."""
        if not parts:
            raise ShapeError("cannot infer the dimension of an empty decomposition")
        vectors = tuple(tuple(as_rational(x) for x in p) for p in parts)
        return cls(vec_sum(vectors, len(vectors[0])), vectors)

    @property
    def dim(self) -> int:
        return len(self.total)


@dataclass(frozen=True)
class RefinementTable:
    """Non-negative vectors indexed by pairs, tuples or subsets."""

    keys: tuple
    values: tuple[tuple, ...]

    def __post_init__(self):
        if len(self.keys) != len(self.values):
            raise ShapeError("refinement table needs one value per key")

    @cached_property
    def _index(self) -> dict:
        return {k: n for n, k in enumerate(self.keys)}

    def __getitem__(self, key: Hashable) -> tuple:
        return self.values[self._index[key]]

    def __len__(self) -> int:
        return len(self.keys)

    def items(self) -> Iterator[tuple[Hashable, tuple]]:
        return iter(zip(self.keys, self.values))

    def to_dict(self) -> dict:
        return {str(k): [format_rational(x) for x in v] for k, v in self.items()}


def interpolate(
    lowers: Sequence[Sequence[Fraction]], uppers: Sequence[Sequence[Fraction]]
) -> tuple:
    """Some x with lower <= x <= upper for every pair: the coordinatewise max of lowers."""
    if not lowers:
        raise ShapeError("interpolation needs at least one lower bound")
    for k, low in enumerate(lowers):
        for m, up in enumerate(uppers):
            if not vec_le(low, up):
                raise InfeasibleError(f"lower bound {k} is not below upper bound {m}")
    return vec_max(lowers)


def riesz_refine(u: Decomposition, v: Decomposition) -> RefinementTable:
    """c[(k, l)] with row sums u.parts[k] and column sums v.parts[l].

    Greedy per coordinate, filling cells in row-major order.
    """
    if u.total != v.total:
        raise ShapeError("decompositions have different totals")
    dim = u.dim
    rows, cols = len(u.parts), len(v.parts)
    cells = [[[ZERO] * dim for _ in range(cols)] for _ in range(rows)]
    for d in range(dim):
        row_rem = [p[d] for p in u.parts]
        col_rem = [p[d] for p in v.parts]
        for k in range(rows):
            for m in range(cols):
                c = min(row_rem[k], col_rem[m])
                if c:
                    cells[k][m][d] = c
                    row_rem[k] -= c
                    col_rem[m] -= c
    table = RefinementTable(
        tuple((k, m) for k in range(rows) for m in range(cols)),
        tuple(tuple(cells[k][m]) for k in range(rows) for m in range(cols)),
    )
    if not check_riesz_table(u, v, table):
        raise InvariantViolation("greedy refinement does not reproduce its marginals")
    return table


def check_riesz_table(u: Decomposition, v: Decomposition, table: RefinementTable) -> bool:
    dim = u.dim
    if any(not vec_is_nonneg(x) for x in table.values):
        return False
    for k, part in enumerate(u.parts):
        if vec_sum((table[(k, m)] for m in range(len(v.parts))), dim) != part:
            return False
    for m, part in enumerate(v.parts):
        if vec_sum((table[(k, m)] for k in range(len(u.parts))), dim) != part:
            return False
    return True


def mult_refine(
    decomps: Sequence[Decomposition], total: Optional[Sequence[Fraction]] = None
) -> RefinementTable:
    """x[phi] for phi in the product of the part indices, lexicographic.

    sum(x) is the common total, and for each i and t the entries with
    phi[i] == t sum to decomps[i].parts[t]. Built by folding riesz_refine
    over the decompositions one at a time.
    """
    if total is None:
        if not decomps:
            raise ShapeError("mult_refine needs a total when there are no decompositions")
        total = decomps[0].total
    total = tuple(total)
    for i, dec in enumerate(decomps):
        if dec.total != total:
            raise ShapeError(f"decomposition {i} has a different total")
    if not vec_is_nonneg(total):
        raise PreconditionError("total must be non-negative")

    keys: list[tuple] = [()]
    values: list[tuple] = [total]
    for dec in decomps:
        current = Decomposition(total, tuple(values))
        step = riesz_refine(current, dec)
        keys = [psi + (t,) for psi in keys for t in range(len(dec.parts))]
        values = [step[(k, t)] for k in range(len(current.parts)) for t in range(len(dec.parts))]
    table = RefinementTable(tuple(keys), tuple(values))
    if not check_mult_table(decomps, table, total):
        raise InvariantViolation("multi-refinement fails its marginal equations")
    return table


def check_mult_table(
    decomps: Sequence[Decomposition], table: RefinementTable, total: Sequence[Fraction]
) -> bool:
    dim = len(total)
    expected = list(product(*(range(len(d.parts)) for d in decomps)))
    if list(table.keys) != expected:
        return False
    if any(not vec_is_nonneg(x) for x in table.values):
        return False
    if vec_sum(table.values, dim) != tuple(total):
        return False
    for i, dec in enumerate(decomps):
        for t, part in enumerate(dec.parts):
            marginal = vec_sum((x for phi, x in table.items() if phi[i] == t), dim)
            if marginal != part:
                return False
    return True


def lamas_decompose(
    a_list: Sequence[Sequence[RationalLike]], lam: RationalLike, dim: Optional[int] = None
) -> RefinementTable:
    """b[X] for X a subset of the index set, in binary-counter order, with

        a_i = sum_{X not containing i} b[X] + lam * sum_{X containing i} b[X]

    for every i. Requires a_i <= lam * a_j coordinatewise for all i, j.
    """
    lam = as_rational(lam)
    if lam < 1:
        raise PreconditionError(f"lambda must be at least 1, got {format_rational(lam)}")
    vectors = [tuple(as_rational(x) for x in a) for a in a_list]
    n = len(vectors)
    if n == 0:
        if dim is None:
            raise ShapeError("lamas_decompose needs a dimension when the family is empty")
        return RefinementTable((BitSet(0),), (zero_vec(dim),))
    dim = len(vectors[0])
    for i, a in enumerate(vectors):
        if len(a) != dim:
            raise ShapeError(f"vector {i} has dimension {len(a)}, expected {dim}")
        for d, x in enumerate(a):
            if x < 0:
                raise PreconditionError(f"a_{i} has negative coordinate {d}")
    for i, ai in enumerate(vectors):
        for j, aj in enumerate(vectors):
            for d in range(dim):
                if ai[d] > lam * aj[d]:
                    raise PreconditionError(
                        f"a_{i} exceeds {format_rational(lam)} * a_{j} at coordinate {d}"
                    )

    subsets = [BitSet(n, mask) for mask in range(1 << n)]
    if lam == ONE:
        zero = zero_vec(dim)
        table = RefinementTable(tuple(subsets), (vectors[0],) + (zero,) * (len(subsets) - 1))
    else:
        inv = 1 / lam
        base = interpolate([vec_scale(inv, a) for a in vectors], vectors)
        scale = 1 / (lam - 1)
        decomps = []
        for a in vectors:
            upper = vec_sub(a, base)
            lower = vec_sub(vec_scale(lam - 1, base), upper)
            decomps.append(Decomposition(base, (vec_scale(scale, lower), vec_scale(scale, upper))))
        refined = mult_refine(decomps)
        by_mask = {}
        for phi, x in refined.items():
            mask = sum(1 << i for i, bit in enumerate(phi) if bit)
            by_mask[mask] = x
        table = RefinementTable(tuple(subsets), tuple(by_mask[s.mask] for s in subsets))
    if not check_lamas_table(vectors, lam, table):
        raise InvariantViolation("lambda-decomposition fails substitution")
    logger.debug(f"lambda-decomposition of {n} vectors, lambda={format_rational(lam)}")
    return table


def check_lamas_table(
    a_list: Sequence[Sequence[Fraction]], lam: Fraction, table: RefinementTable
) -> bool:
    if any(not vec_is_nonneg(x) for x in table.values):
        return False
    for i, a in enumerate(a_list):
        acc = zero_vec(len(a))
        for subset, b in table.items():
            acc = vec_add(acc, vec_scale(lam, b) if i in subset else b)
        if acc != tuple(a):
            return False
    return True
