"""
Seeded generators for the property suites.

Every generator takes a `random.Random`; `sub_rng` derives independent
streams from a run seed so that suites never share state.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .boolsem import BoolMap, bool_compose
from .exactnum import BitSet, RatMatrix, hstack
from .oracle import LinearForm, LinSystem
from .pss import PssHom, PssSpace, hom_validate, stack_components


def sub_rng(seed: int | str, label: str, k: int) -> random.Random:
    return random.Random(f"{seed}:{label}:{k}")


def random_rational(rng: random.Random, lo: int = -3, hi: int = 3, max_den: int = 3) -> Fraction:
    return Fraction(rng.randint(lo * max_den, hi * max_den), rng.randint(1, max_den))


def random_positive_rational(rng: random.Random, max_num: int = 9, max_den: int = 9) -> Fraction:
    return Fraction(rng.randint(1, max_num), rng.randint(1, max_den))


def random_vector(rng: random.Random, dim: int, max_value: int = 4) -> tuple:
    return tuple(Fraction(rng.randint(0, max_value), rng.randint(1, 3)) for _ in range(dim))


def random_matrix(
    rng: random.Random, rows: int, cols: int, lo: int = -3, hi: int = 3
) -> RatMatrix:
    return RatMatrix.from_rows(
        [[random_rational(rng, lo, hi) for _ in range(cols)] for _ in range(rows)], cols=cols
    )


def random_positive_block(
    rng: random.Random, rows: int, cols: int, max_entry: int = 3
) -> RatMatrix:
    """Non-negative entries with every row sum positive."""
    data = []
    for _ in range(rows):
        row = [Fraction(rng.randint(0, max_entry), rng.randint(1, 2)) for _ in range(cols)]
        if not any(row):
            row[rng.randrange(cols)] = Fraction(rng.randint(1, max_entry))
        data.append(row)
    return RatMatrix.from_rows(data, cols=cols)


def random_boolmap(rng: random.Random, m: int, n: int) -> BoolMap:
    return BoolMap(m, n, tuple(BitSet(n, rng.randrange(1 << n)) for _ in range(m)))


def random_space(
    rng: random.Random, max_components: int, max_dim: int, min_components: int = 1
) -> PssSpace:
    k = rng.randint(min_components, max_components)
    return PssSpace.of(
        [f"c{c}_{d}" for d in range(rng.randint(1, max_dim))] for c in range(k)
    )


def random_hom(
    rng: random.Random, src: PssSpace, tgt: PssSpace, pattern: Optional[BoolMap] = None
) -> PssHom:
    """A valid hom whose nonzero blocks are exactly those pattern asks for."""
    if pattern is None:
        pattern = random_boolmap(rng, src.n_components, tgt.n_components)
    blocks = []
    for k in range(tgt.n_components):
        row = []
        for i in range(src.n_components):
            rows, cols = len(tgt.span(k)), len(src.span(i))
            if k in pattern.atom_images[i]:
                row.append(random_positive_block(rng, rows, cols))
            else:
                row.append(RatMatrix.zeros(rows, cols))
        matrix = hstack(row, rows=len(tgt.span(k)))
        blocks.append(PssHom(src, tgt.component_space(k), matrix))
    return stack_components(blocks, src, tgt)


@dataclass(frozen=True)
class FactorInstance:
    """h: A -> B with Idc h = g_pattern ∘ f_pattern."""

    source: PssSpace
    f_pattern: BoolMap
    g_pattern: BoolMap
    h: PssHom


def random_factor_instance(
    seed: int | str, k: int, max_components: int = 2, max_dim: int = 1
) -> FactorInstance:
    rng = sub_rng(seed, "factor", k)
    source = random_space(rng, max_components, max_dim)
    n = rng.randint(1, max_components)
    target = random_space(rng, max_components, max_dim)
    f_pattern = random_boolmap(rng, source.n_components, n)
    g_pattern = random_boolmap(rng, n, target.n_components)
    h = random_hom(rng, source, target, bool_compose(g_pattern, f_pattern))
    return FactorInstance(source, f_pattern, g_pattern, h)


def random_lin_system(rng: random.Random, n_vars: int, n_constraints: int) -> LinSystem:
    """Small integer systems for cross-checking the solver."""
    names = tuple(f"x{i}" for i in range(n_vars))
    buckets: dict[str, list[LinearForm]] = {"eq": [], "ge": [], "gt": []}
    for _ in range(n_constraints):
        kind = rng.choice(("eq", "ge", "ge", "gt", "gt"))
        coeffs = {v: rng.randint(-2, 2) for v in names}
        buckets[kind].append(LinearForm.of(coeffs, rng.randint(-3, 3)))
    return LinSystem(names, tuple(buckets["eq"]), tuple(buckets["ge"]), tuple(buckets["gt"]))


def random_valid_hom(rng: random.Random, src: PssSpace, tgt: PssSpace) -> PssHom:
    """A random hom re-checked through hom_validate."""
    return hom_validate(random_hom(rng, src, tgt).matrix, src, tgt)
