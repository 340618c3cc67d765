"""
Machine checks for the diagrams that admit no lifting of the restricted kinds.

- nonsimpl-square: a square of Boolean maps has no lifting by simplicial
  spaces. Decided exactly with `fm_solve` for each choice of the lower maps.
- q-example: generic maps with mu = q * lambda are needed; mu = 1 does not
  factor while mu = 2 does.
- idempotent: an idempotent join-map with no idempotent pseudo-simplicial
  lifting, via an exact polynomial identity and a positivity argument.
- lex: a map out of Z x_lex Z that no pseudo-simplicial candidate lifts.

Each suite returns a `SuiteReport`; `confirmed == trials` means every trial
agreed with the expected verdict.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from tqdm import tqdm

from .boolsem import BoolMap, SemDiagram, SemIso, diagram_from_covers
from .errors import InputError, InvariantViolation, PreconditionError, ShapeError
from .exactnum import ZERO, BitSet, RatMatrix
from .genfact import factor_general, gen
from .oracle import (
    FeasibilityResult,
    LinearForm,
    LinSystem,
    encode_factor_system,
    fm_solve,
    linear_sum,
)
from .poset import Poset
from .pss import PssHom, PssSpace, PssVector, compact_ideal_of, in_cone
from .sampling import random_matrix, random_positive_block, random_positive_rational, sub_rng

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[dict], None]


@dataclass
class SuiteReport:
    name: str
    trials: int
    confirmed: int = 0
    summary: str = ""
    details: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.confirmed == self.trials

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "confirmed": self.confirmed,
            "passed": self.passed,
            "summary": self.summary,
            "details": self.details,
        }


def iterate(
    name: str, trials: int, progress: Optional[ProgressCallback] = None, show: bool = False
):
    """range(trials) with a tqdm bar and phase/total/update events."""
    if progress:
        progress({"phase": name, "total": trials})
    for k in tqdm(range(trials), desc=name, disable=not show, leave=False):
        yield k
        if progress:
            progress({"update": 1})


# ---------------------------------------------------------------------------
# Square with no simplicial lifting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SquareParams:
    """Entries of a lower map [[alpha, 0], [0, beta], [xi, eta]]: Q^2 -> Q^3."""

    alpha: Fraction
    beta: Fraction
    xi: Fraction
    eta: Fraction

    def __post_init__(self):
        for name in ("alpha", "beta", "xi", "eta"):
            if getattr(self, name) <= 0:
                raise PreconditionError(f"{name} must be strictly positive")

    @classmethod
    def ones(cls) -> "SquareParams":
        return cls(Fraction(1), Fraction(1), Fraction(1), Fraction(1))

    def matrix(self) -> RatMatrix:
        return RatMatrix.from_rows(
            [[self.alpha, 0], [0, self.beta], [self.xi, self.eta]], cols=2
        )


# Upper maps Q^3 -> Q^4; None marks an entry forced to zero by the Boolean map.
_G_SHAPE = (("a", None, None), (None, "b", None), (None, None, "c"), ("u", None, "w"))
_H_SHAPE = (("a'", None, None), (None, "b'", None), (None, None, "c'"), (None, "v'", "w'"))


def _symbolic_product(shape, numeric: RatMatrix) -> list[list[LinearForm]]:
    return [
        [
            linear_sum(
                LinearForm.var(name).scale(numeric[c, col])
                for c, name in enumerate(row)
                if name is not None
            )
            for col in range(numeric.cols)
        ]
        for row in shape
    ]


def nonsimpl_square_system(
    f0: SquareParams, f1: SquareParams, relaxed: bool = False
) -> LinSystem:
    """g ∘ f0 = h ∘ f1 with every unknown entry strictly positive.

    `relaxed` drops the equations of the fourth row.
    """
    left = _symbolic_product(_G_SHAPE, f0.matrix())
    right = _symbolic_product(_H_SHAPE, f1.matrix())
    rows = 3 if relaxed else 4
    eq = []
    for r in range(rows):
        for col in range(2):
            form = left[r][col] - right[r][col]
            if not form.is_constant() or form.const:
                eq.append(form)
    names = tuple(n for shape in (_G_SHAPE, _H_SHAPE) for row in shape for n in row if n)
    variables = tuple(dict.fromkeys(names))
    gt = tuple(LinearForm.var(v) for v in variables)
    return LinSystem(variables, tuple(eq), (), gt)


def check_nonsimpl_square(
    f0: SquareParams, f1: SquareParams, relaxed: bool = False
) -> FeasibilityResult:
    return fm_solve(nonsimpl_square_system(f0, f1, relaxed))


def nonsimpl_square_diagram() -> SemDiagram:
    """The square 2^2 -> 2^3 => 2^4 whose lifting needs non-simplicial spaces."""
    poset = Poset.from_covers(
        ["0", "a", "b", "1"], [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")]
    )
    f = BoolMap.from_lists(2, 3, [[0, 2], [1, 2]])
    g = BoolMap.from_lists(3, 4, [[0, 3], [1], [2, 3]])
    h = BoolMap.from_lists(3, 4, [[0], [1, 3], [2, 3]])
    idx = poset.index
    return diagram_from_covers(
        poset,
        (2, 3, 3, 4),
        {
            (idx("0"), idx("a")): f,
            (idx("0"), idx("b")): f,
            (idx("a"), idx("1")): g,
            (idx("b"), idx("1")): h,
        },
    )


def random_square_params(seed: int | str, k: int) -> tuple[SquareParams, SquareParams]:
    rng = sub_rng(seed, "nonsimpl-square", k)
    f0 = SquareParams(*(random_positive_rational(rng) for _ in range(4)))
    f1 = SquareParams(*(random_positive_rational(rng) for _ in range(4)))
    return f0, f1


def nonsimpl_square_suite(
    seed: int | str = 0,
    trials: int = 100,
    progress: Optional[ProgressCallback] = None,
    show: bool = False,
) -> SuiteReport:
    """Full systems must be infeasible; relaxed systems with f1 = f0 must be feasible."""
    report = SuiteReport("nonsimpl-square", trials)
    controls = 0
    for k in iterate(report.name, trials, progress, show):
        f0, f1 = random_square_params(seed, k)
        full = check_nonsimpl_square(f0, f1)
        control = check_nonsimpl_square(f0, f0, relaxed=True)
        controls += control.feasible
        if not full.feasible and control.feasible:
            report.confirmed += 1
        else:
            report.details.append(
                {"trial": k, "full_feasible": full.feasible, "control_feasible": control.feasible}
            )
    report.summary = (
        f"{report.confirmed}/{trials} infeasible; relaxed control feasible on {controls}/{trials}"
    )
    return report


# ---------------------------------------------------------------------------
# Why mu has to be q * lambda
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QExample:
    """A = Q^2, Idc f(x, y) = (x ∨ y, y), h(x, y) = x + y, Idc g(x, y) = x ∨ y."""

    source: PssSpace
    f_pattern: BoolMap
    g_pattern: BoolMap
    h: PssHom


def q_example() -> QExample:
    source = PssSpace.simplicial(2)
    target = PssSpace.simplicial(1, prefix="b")
    return QExample(
        source,
        BoolMap.from_lists(2, 2, [[0], [0, 1]]),
        BoolMap.from_lists(2, 1, [[0], [0]]),
        PssHom(source, target, RatMatrix.from_rows([[1, 1]], cols=2)),
    )


@dataclass(frozen=True)
class QExampleOutcome:
    mu1: FeasibilityResult
    mu2: PssHom

    @property
    def confirmed(self) -> bool:
        return not self.mu1.feasible

    def to_dict(self) -> dict:
        return {"mu1": self.mu1.to_dict(), "mu2": self.mu2.to_dict()}


def check_q_example() -> QExampleOutcome:
    ex = q_example()
    generic1 = gen(ex.source, ex.f_pattern, 1)
    mu1 = fm_solve(encode_factor_system(generic1.hom, ex.h, ex.g_pattern))
    generic2 = gen(ex.source, ex.f_pattern, 2)
    g = factor_general(generic2, ex.h, ex.g_pattern)
    return QExampleOutcome(mu1, g)


def q_example_suite(
    seed: int | str = 0,
    trials: int = 1,
    progress: Optional[ProgressCallback] = None,
    show: bool = False,
) -> SuiteReport:
    report = SuiteReport("q-example", trials)
    for _ in iterate(report.name, trials, progress, show):
        outcome = check_q_example()
        if outcome.confirmed:
            report.confirmed += 1
        else:
            report.details.append(outcome.to_dict())
    verdict = "infeasible" if report.passed else "FEASIBLE"
    report.summary = f"μ=1 {verdict}; μ=2 factored and verified"
    return report


# ---------------------------------------------------------------------------
# Idempotent map with no idempotent lifting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityResidual:
    r1: RatMatrix
    r2: RatMatrix
    r3: RatMatrix
    lhs: RatMatrix
    rhs: RatMatrix

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs

    @property
    def idempotent(self) -> bool:
        return self.r1.is_zero() and self.r2.is_zero() and self.r3.is_zero()


def idempotent_identity(alpha: RatMatrix, beta: RatMatrix, gamma: RatMatrix) -> IdentityResidual:
    """Residuals of t = [[alpha, beta], [0, gamma]] being idempotent.

    R1 = alpha^2 - alpha, R2 = gamma^2 - gamma, R3 = alpha beta + beta gamma - beta, and
    2 alpha beta gamma = alpha R3 + R3 gamma - R1 beta - beta R2 holds for every triple.
    """
    e, f = alpha.rows, gamma.rows
    if alpha.shape != (e, e) or gamma.shape != (f, f) or beta.shape != (e, f):
        raise ShapeError(
            f"shapes {alpha.shape}, {beta.shape}, {gamma.shape} are not conformable"
        )
    r1 = alpha @ alpha - alpha
    r2 = gamma @ gamma - gamma
    r3 = alpha @ beta + beta @ gamma - beta
    lhs = (alpha @ beta @ gamma).scale(2)
    rhs = alpha @ r3 + r3 @ gamma - r1 @ beta - beta @ r2
    residual = IdentityResidual(r1, r2, r3, lhs, rhs)
    if not residual.holds:
        raise InvariantViolation("2αβγ differs from its expansion in the residuals")
    return residual


def _require_block(name: str, block: RatMatrix) -> None:
    if block.is_zero():
        raise PreconditionError(f"{name} is the zero block")
    for r, row in enumerate(block.to_rows()):
        if any(x < 0 for x in row) or sum(row) <= 0:
            raise PreconditionError(f"{name} row {r} is not positive")


def check_positive_product_nonzero(alpha: RatMatrix, beta: RatMatrix, gamma: RatMatrix) -> bool:
    """2 alpha beta gamma is again a nonzero positive block."""
    for name, block in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        _require_block(name, block)
    if alpha.cols != beta.rows or beta.cols != gamma.rows:
        raise ShapeError("blocks are not composable")
    product = (alpha @ beta @ gamma).scale(2)
    try:
        _require_block("2αβγ", product)
    except PreconditionError as exc:
        raise InvariantViolation(f"product of positive blocks is not positive: {exc}") from exc
    return True


def idempotent_suite(
    seed: int | str = 0,
    trials: int = 200,
    progress: Optional[ProgressCallback] = None,
    show: bool = False,
) -> SuiteReport:
    report = SuiteReport("idempotent", trials)
    products = 0
    for k in iterate(report.name, trials, progress, show):
        rng = sub_rng(seed, "idempotent", k)
        e, f, g = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3)
        alpha, gamma = random_matrix(rng, e, e), random_matrix(rng, f, f)
        beta = random_matrix(rng, e, f)
        holds = idempotent_identity(alpha, beta, gamma).holds
        blocks = (
            random_positive_block(rng, e, f),
            random_positive_block(rng, f, g),
            random_positive_block(rng, g, rng.randint(1, 3)),
        )
        positive = check_positive_product_nonzero(*blocks)
        products += positive
        if holds and positive:
            report.confirmed += 1
        else:
            report.details.append({"trial": k, "identity": holds, "positive_product": positive})
    report.summary = (
        f"identity exact on {report.confirmed}/{trials} triples; "
        f"positive products nonzero on {products}/{trials}"
    )
    return report


# ---------------------------------------------------------------------------
# Lexicographic plane
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LexViolation:
    requirement: str
    detail: str
    witness: Optional[object] = None

    def to_dict(self) -> dict:
        witness = self.witness
        if isinstance(witness, BitSet):
            witness = str(witness)
        return {"requirement": self.requirement, "detail": self.detail, "witness": witness}


LEX_REQUIREMENTS = ("positivity", "square")

# Expected Idc of the lifted map: G(a) goes to atom 0, G(b) to both atoms.
_EXPECTED_A = BitSet(2, 0b01)
_EXPECTED_B = BitSet(2, 0b11)


def _first_bad_multiple(a: Sequence[Fraction], b: Sequence[Fraction]) -> int:
    """Least n >= 1 with b - n*a outside the cone of a simple space, for a > 0."""
    n = max(1, min(math.ceil(bc / ac) for ac, bc in zip(a, b)))
    block = [bc - n * ac for ac, bc in zip(a, b)]
    if not any(block):
        n += 1
    return n


def check_lex_candidate(
    space: PssSpace, image_b: PssVector, image_a: PssVector, alpha: SemIso
) -> LexViolation:
    """First requirement that f: (1,0) -> image_b, (0,1) -> image_a breaks.

    A lifting needs image_a >= 0 and image_b - n * image_a >= 0 for all n,
    and alpha ∘ Idc f must send G(a) to {0} and G(b) to {0, 1}.
    """
    if space.n_components != 2 or alpha.arity != 2:
        raise ShapeError("the target must have exactly two components")
    if image_a.space != space or image_b.space != space:
        raise ShapeError("images must live in the target space")
    if not in_cone(image_a):
        return LexViolation("positivity", "image of (0,1) is not positive", image_a.to_json())
    if not in_cone(image_b):
        return LexViolation("positivity", "image of (1,0) is not positive", image_b.to_json())
    for k in range(2):
        a_k, b_k = image_a.component(k), image_b.component(k)
        if any(a_k):
            n = _first_bad_multiple(a_k, b_k)
            return LexViolation(
                "positivity",
                f"(1,0) - {n}*(0,1) leaves the cone on component {k}",
                n,
            )
    mapped = _apply_iso(alpha, compact_ideal_of(image_a))
    if mapped != _EXPECTED_A:
        return LexViolation("square", f"G(a) goes to {mapped}, expected {_EXPECTED_A}", mapped)
    mapped = _apply_iso(alpha, compact_ideal_of(image_b))
    if mapped != _EXPECTED_B:
        return LexViolation("square", f"G(b) goes to {mapped}, expected {_EXPECTED_B}", mapped)
    raise InvariantViolation("lexicographic candidate satisfies every requirement")


def _apply_iso(alpha: SemIso, ideal: BitSet) -> BitSet:
    return BitSet.from_indices(ideal.width, (alpha.permutation[k] for k in ideal))


@dataclass(frozen=True)
class LexCandidate:
    space: PssSpace
    image_b: PssVector
    image_a: PssVector
    alpha: SemIso


def random_lex_candidate(seed: int | str, k: int, max_dim: int = 3) -> LexCandidate:
    rng = sub_rng(seed, "lex", k)
    space = PssSpace.of(
        [f"h{c}_{d}" for d in range(rng.randint(1, max_dim))] for c in range(2)
    )

    def draw() -> PssVector:
        coords = []
        for c in range(2):
            dim = len(space.span(c))
            mode = rng.random()
            if mode < 0.3:
                coords.extend([ZERO] * dim)
            elif mode < 0.8:
                coords.extend(Fraction(rng.randint(1, 5), rng.randint(1, 3)) for _ in range(dim))
            else:
                coords.extend(Fraction(rng.randint(-3, 3)) for _ in range(dim))
        return PssVector(space, tuple(coords))

    alpha = SemIso((0, 1)) if rng.random() < 0.5 else SemIso((1, 0))
    return LexCandidate(space, draw(), draw(), alpha)


def lex_suite(
    seed: int | str = 0,
    trials: int = 500,
    progress: Optional[ProgressCallback] = None,
    show: bool = False,
) -> SuiteReport:
    report = SuiteReport("lex", trials)
    kinds: dict[str, int] = {}
    for k in iterate(report.name, trials, progress, show):
        c = random_lex_candidate(seed, k)
        try:
            violation = check_lex_candidate(c.space, c.image_b, c.image_a, c.alpha)
        except InvariantViolation as exc:
            report.details.append({"trial": k, "error": str(exc)})
            continue
        if violation.requirement not in LEX_REQUIREMENTS:
            report.details.append({"trial": k, **violation.to_dict()})
            continue
        kinds[violation.requirement] = kinds.get(violation.requirement, 0) + 1
        report.confirmed += 1
    breakdown = ", ".join(f"{name} {count}" for name, count in sorted(kinds.items()))
    report.summary = f"{report.confirmed}/{trials} candidates violate a requirement ({breakdown})"
    return report


COUNTEREXAMPLES: dict[str, Callable[..., SuiteReport]] = {
    "nonsimpl-square": nonsimpl_square_suite,
    "q-example": q_example_suite,
    "idempotent": idempotent_suite,
    "lex": lex_suite,
}


def run_counterexample(name: str, seed: int | str = 0, trials: Optional[int] = None, **kwargs):
    try:
        suite = COUNTEREXAMPLES[name]
    except KeyError:
        raise InputError(
            f"unknown counterexample {name!r}; choose from {', '.join(COUNTEREXAMPLES)}"
        ) from None
    if trials is not None:
        kwargs["trials"] = trials
    report = suite(seed=seed, **kwargs)
    logger.info(f"{name}: {report.summary}")
    return report

