"""
Exact linear feasibility over Q by Fourier-Motzkin elimination.

A `LinSystem` holds equalities (form = 0), non-strict inequalities
(form >= 0) and strict inequalities (form > 0). `fm_solve` decides it and,
when feasible, returns a witness that is re-checked against every
constraint before it is returned.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .boolsem import BoolMap
from .errors import InvariantViolation, ParseError, ResourceError, ShapeError
from .exactnum import (
    DEFAULT_MAX_VARS,
    ONE,
    ZERO,
    RationalLike,
    as_rational,
    format_rational,
)
from .pss import PssHom

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearForm:
    """sum(coeff * var) + const, with zero coefficients dropped."""

    coeffs: tuple[tuple[str, Fraction], ...] = ()
    const: Fraction = ZERO

    @classmethod
    def of(cls, coeffs: Mapping[str, RationalLike], const: RationalLike = 0) -> "LinearForm":
        items = [(v, as_rational(c)) for v, c in coeffs.items()]
        return cls(tuple(sorted((v, c) for v, c in items if c)), as_rational(const))

    @classmethod
    def var(cls, name: str) -> "LinearForm":
        return cls(((name, ONE),))

    @classmethod
    def constant(cls, value: RationalLike) -> "LinearForm":
        return cls((), as_rational(value))

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.coeffs)

    def coeff(self, name: str) -> Fraction:
        for v, c in self.coeffs:
            if v == name:
                return c
        return ZERO

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def is_constant(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "LinearForm") -> "LinearForm":
        acc = self.as_dict()
        for v, c in other.coeffs:
            acc[v] = acc.get(v, ZERO) + c
        return LinearForm.of(acc, self.const + other.const)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + other.scale(-1)

    def scale(self, k: RationalLike) -> "LinearForm":
        k = as_rational(k)
        return LinearForm.of({v: k * c for v, c in self.coeffs}, k * self.const)

    def substitute(self, name: str, form: "LinearForm") -> "LinearForm":
        c = self.coeff(name)
        if not c:
            return self
        rest = LinearForm(tuple((v, x) for v, x in self.coeffs if v != name), self.const)
        return rest + form.scale(c)

    def evaluate(self, assignment: Mapping[str, Fraction]) -> Fraction:
        total = self.const
        for v, c in self.coeffs:
            total += c * assignment[v]
        return total

    def to_dict(self) -> dict:
        out = {"coeffs": {v: format_rational(c) for v, c in self.coeffs}}
        out["const"] = format_rational(self.const)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "LinearForm":
        if not isinstance(data, dict) or not isinstance(data.get("coeffs", {}), dict):
            raise ParseError("linear form must be an object with 'coeffs' and 'const'")
        return cls.of(data.get("coeffs", {}), data.get("const", "0"))

    def __str__(self) -> str:
        terms = [f"{format_rational(c)}*{v}" for v, c in self.coeffs]
        if self.const or not terms:
            terms.append(format_rational(self.const))
        return " + ".join(terms)


def linear_sum(forms: Iterable[LinearForm]) -> LinearForm:
    total = LinearForm()
    for f in forms:
        total = total + f
    return total


@dataclass(frozen=True)
class LinSystem:
    variables: tuple[str, ...]
    eq: tuple[LinearForm, ...] = ()
    ge: tuple[LinearForm, ...] = ()
    gt: tuple[LinearForm, ...] = ()

    def __post_init__(self):
        declared = set(self.variables)
        if len(declared) != len(self.variables):
            raise ShapeError("duplicate variable names")
        for form in self.eq + self.ge + self.gt:
            unknown = set(form.variables) - declared
            if unknown:
                raise ShapeError(f"form uses undeclared variables {sorted(unknown)}")

    def check(self, assignment: Mapping[str, Fraction]) -> bool:
        if set(assignment) != set(self.variables):
            return False
        return (
            all(f.evaluate(assignment) == 0 for f in self.eq)
            and all(f.evaluate(assignment) >= 0 for f in self.ge)
            and all(f.evaluate(assignment) > 0 for f in self.gt)
        )

    def to_dict(self) -> dict:
        return {
            "vars": list(self.variables),
            "eq": [f.to_dict() for f in self.eq],
            "ge": [f.to_dict() for f in self.ge],
            "gt": [f.to_dict() for f in self.gt],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LinSystem":
        if not isinstance(data, dict) or not isinstance(data.get("vars"), list):
            raise ParseError("system must be an object with a 'vars' list")
        return cls(
            tuple(str(v) for v in data["vars"]),
            tuple(LinearForm.from_dict(f) for f in data.get("eq", [])),
            tuple(LinearForm.from_dict(f) for f in data.get("ge", [])),
            tuple(LinearForm.from_dict(f) for f in data.get("gt", [])),
        )


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: Optional[dict[str, Fraction]] = None
    trace: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "verdict": "feasible" if self.feasible else "infeasible",
            "witness": (
                {v: format_rational(x) for v, x in self.witness.items()} if self.witness else None
            ),
            "trace": list(self.trace),
        }


@dataclass(frozen=True)
class _Ineq:
    form: LinearForm
    strict: bool

    def holds_constant(self) -> bool:
        return self.form.const > 0 if self.strict else self.form.const >= 0


@dataclass
class _Stage:
    name: str
    lowers: list[_Ineq]
    uppers: list[_Ineq]


def fm_solve(system: LinSystem, max_vars: int = DEFAULT_MAX_VARS) -> FeasibilityResult:
    """Decide feasibility over Q.

    Equalities are used first to substitute variables away. The remaining
    variables are eliminated one at a time, fewest occurrences first; strict
    inequalities stay strict when combined with anything. A witness is then
    rebuilt backwards: midpoint of the bounds, or one step past a one-sided
    bound.
    """
    trace: list[str] = []
    substitutions: list[tuple[str, LinearForm]] = []
    eqs = list(system.eq)
    ineqs = [_Ineq(f, False) for f in system.ge] + [_Ineq(f, True) for f in system.gt]

    while eqs:
        form = eqs.pop(0)
        if form.is_constant():
            if form.const != 0:
                trace.append(f"equality reduces to {format_rational(form.const)} = 0")
                return FeasibilityResult(False, None, tuple(trace))
            continue
        name, c = form.coeffs[0]
        rest = LinearForm(form.coeffs[1:], form.const)
        value = rest.scale(-1 / c)
        substitutions.append((name, value))
        trace.append(f"substitute {name}")
        eqs = [e.substitute(name, value) for e in eqs]
        ineqs = [_Ineq(i.form.substitute(name, value), i.strict) for i in ineqs]

    substituted = {name for name, _ in substitutions}
    free = [v for v in system.variables if v not in substituted]
    if len(free) > max_vars:
        raise ResourceError(
            f"{len(free)} free variables after substitution, cap is {max_vars}",
            cap_name="max_vars",
            limit=max_vars,
        )

    stages: list[_Stage] = []
    remaining = list(free)
    ineqs = _dedupe(ineqs)
    while remaining:
        counts = {v: sum(1 for i in ineqs if i.form.coeff(v)) for v in remaining}
        name = min(remaining, key=lambda v: (counts[v], remaining.index(v)))
        remaining.remove(name)
        lowers = [i for i in ineqs if i.form.coeff(name) > 0]
        uppers = [i for i in ineqs if i.form.coeff(name) < 0]
        others = [i for i in ineqs if not i.form.coeff(name)]
        combined = []
        for lo in lowers:
            for up in uppers:
                form = lo.form.scale(1 / lo.form.coeff(name)) + up.form.scale(
                    1 / -up.form.coeff(name)
                )
                combined.append(_Ineq(form, lo.strict or up.strict))
        stages.append(_Stage(name, lowers, uppers))
        trace.append(f"eliminate {name} ({len(lowers)} lower, {len(uppers)} upper)")
        ineqs = _dedupe(others + combined)
        for i in ineqs:
            if i.form.is_constant() and not i.holds_constant():
                return FeasibilityResult(False, None, tuple(trace))

    for i in ineqs:
        if not i.holds_constant():
            return FeasibilityResult(False, None, tuple(trace))

    values: dict[str, Fraction] = {}
    for stage in reversed(stages):
        values[stage.name] = _pick(stage, values)
    for name, form in reversed(substitutions):
        values[name] = form.evaluate(values)
    witness = {v: values[v] for v in system.variables}
    if not system.check(witness):
        raise InvariantViolation("Fourier-Motzkin witness fails the original system")
    logger.debug(f"feasible system with {len(system.variables)} variables")
    return FeasibilityResult(True, witness, tuple(trace))


def _dedupe(ineqs: Sequence[_Ineq]) -> list[_Ineq]:
    seen: dict[LinearForm, bool] = {}
    for i in ineqs:
        if i.form.is_constant() and i.holds_constant():
            continue
        seen[i.form] = seen.get(i.form, False) or i.strict
    return [_Ineq(f, s) for f, s in seen.items()]


def _bound(ineq: _Ineq, name: str, values: Mapping[str, Fraction]) -> Fraction:
    c = ineq.form.coeff(name)
    rest = LinearForm(tuple((v, x) for v, x in ineq.form.coeffs if v != name), ineq.form.const)
    return -rest.evaluate(values) / c


def _pick(stage: _Stage, values: Mapping[str, Fraction]) -> Fraction:
    lows = [(_bound(i, stage.name, values), i.strict) for i in stage.lowers]
    ups = [(_bound(i, stage.name, values), i.strict) for i in stage.uppers]
    low = max((b for b, _ in lows), default=None)
    up = min((b for b, _ in ups), default=None)
    if low is not None and up is not None:
        return low if low == up else (low + up) / 2
    if low is not None:
        return low + 1
    if up is not None:
        return up - 1
    return ZERO


# ---------------------------------------------------------------------------
# Encodings
# ---------------------------------------------------------------------------


def encode_factor_system(f: PssHom, h: PssHom, pattern: BoolMap) -> LinSystem:
    """Unknown g: G -> B with g ∘ f = h and Idc g = pattern.

    Variables are the entries g[r,c]. Blocks that pattern requires to be
    zero are set to zero; the others get non-negative entries and positive
    row sums.
    """
    if f.src != h.src:
        raise ShapeError("f and h must start at the same space")
    space, tgt = f.tgt, h.tgt
    if pattern.src_arity != space.n_components or pattern.tgt_arity != tgt.n_components:
        raise ShapeError(f"pattern {pattern} does not match Idc G -> Idc B")
    names = [[f"g[{r},{c}]" for c in range(space.total_dim)] for r in range(tgt.total_dim)]
    variables = tuple(v for row in names for v in row)

    eq: list[LinearForm] = []
    ge: list[LinearForm] = []
    gt: list[LinearForm] = []
    for r in range(tgt.total_dim):
        for a in range(f.src.total_dim):
            coeffs = {names[r][c]: f.matrix[c, a] for c in range(space.total_dim)}
            eq.append(LinearForm.of(coeffs, -h.matrix[r, a]))
    for j in range(space.n_components):
        for k in range(tgt.n_components):
            cols = space.span(j)
            for r in tgt.span(k):
                if k in pattern.atom_images[j]:
                    ge.extend(LinearForm.var(names[r][c]) for c in cols)
                    gt.append(LinearForm.of({names[r][c]: 1 for c in cols}))
                else:
                    eq.extend(LinearForm.var(names[r][c]) for c in cols)
    return LinSystem(variables, tuple(eq), tuple(ge), tuple(gt))


def witness_matrix(result: FeasibilityResult, rows: int, cols: int) -> list[list[Fraction]]:
    """Read the g[r,c] entries of a feasible factor system back as rows."""
    if not result.feasible or result.witness is None:
        raise ShapeError("no witness to read")
    return [[result.witness[f"g[{r},{c}]"] for c in range(cols)] for r in range(rows)]


@dataclass(frozen=True, order=True)
class LexPair:
    """An element of Z x Z ordered lexicographically."""

    first: int
    second: int

    def is_nonneg(self) -> bool:
        return self.first > 0 or (self.first == 0 and self.second >= 0)
