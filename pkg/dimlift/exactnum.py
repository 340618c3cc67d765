"""
Exact rational scalars, vectors, dense matrices and bitsets.

Everything here is immutable. Scalars are `fractions.Fraction`, which keeps
values normalized, so structural equality is exact equality. Vectors are plain
tuples of Fractions; matrices are `RatMatrix` values stored row-major.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from .errors import ParseError, ResourceError, ShapeError

logger = logging.getLogger(__name__)

Rational = Fraction
Vector = tuple  # tuple[Fraction, ...]
RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_POWERSET_CAP = 20
DEFAULT_MAX_DIM = 200_000
DEFAULT_MAX_VARS = 12
DEFAULT_MAX_POSET_ELEMENTS = 24


@dataclass(frozen=True)
class Caps:
    """Size caps shared by every construction."""

    max_dim: int = DEFAULT_MAX_DIM
    max_vars: int = DEFAULT_MAX_VARS
    powerset_cap: int = DEFAULT_POWERSET_CAP
    max_poset_elements: int = DEFAULT_MAX_POSET_ELEMENTS

    def to_dict(self) -> dict:
        return {
            "max_dim": self.max_dim,
            "max_vars": self.max_vars,
            "powerset_cap": self.powerset_cap,
            "max_poset_elements": self.max_poset_elements,
        }


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------


def as_rational(value: RationalLike) -> Fraction:
    """Coerce an int, Fraction or "p/q" string to a Fraction.

    Floats are rejected: they would silently import rounding error.
    """
    if isinstance(value, bool):
        raise ParseError(f"expected a rational, got boolean {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                num, den = text.split("/", 1)
                if not den.strip():
                    raise ValueError("empty denominator")
                return Fraction(int(num), int(den))
            return Fraction(int(text))
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f"invalid rational {value!r}: {e}") from e
    raise ParseError(f"expected a rational string or integer, got {type(value).__name__}")


def format_rational(x: Fraction) -> str:
    """Serialize as "p/q", or "p" when the denominator is 1."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def rat_cmp(a: Fraction, b: Fraction) -> int:
    """Exact three-way comparison by cross-multiplication: -1, 0 or 1."""
    left = a.numerator * b.denominator
    right = b.numerator * a.denominator
    return (left > right) - (left < right)


# ---------------------------------------------------------------------------
# Vectors
# ---------------------------------------------------------------------------


def vec(values: Iterable[RationalLike]) -> tuple:
    return tuple(as_rational(v) for v in values)


def zero_vec(dim: int) -> tuple:
    return (ZERO,) * dim


def _check_same_dim(x: Sequence, y: Sequence) -> None:
    if len(x) != len(y):
        raise ShapeError(f"vector length mismatch: {len(x)} vs {len(y)}")


def vec_add(x: Sequence[Fraction], y: Sequence[Fraction]) -> tuple:
    _check_same_dim(x, y)
    return tuple(a + b for a, b in zip(x, y))


def vec_sub(x: Sequence[Fraction], y: Sequence[Fraction]) -> tuple:
    _check_same_dim(x, y)
    return tuple(a - b for a, b in zip(x, y))


def vec_scale(c: Fraction, x: Sequence[Fraction]) -> tuple:
    return tuple(c * a for a in x)


def vec_sum(vectors: Iterable[Sequence[Fraction]], dim: int) -> tuple:
    total = [ZERO] * dim
    for v in vectors:
        if len(v) != dim:
            raise ShapeError(f"vector length mismatch: {len(v)} vs {dim}")
        for k, a in enumerate(v):
            if a:
                total[k] += a
    return tuple(total)


def vec_le(x: Sequence[Fraction], y: Sequence[Fraction]) -> bool:
    """Coordinatewise x <= y."""
    _check_same_dim(x, y)
    return all(a <= b for a, b in zip(x, y))


def vec_max(vectors: Sequence[Sequence[Fraction]]) -> tuple:
    if not vectors:
        raise ShapeError("coordinatewise maximum of an empty family")
    dim = len(vectors[0])
    for v in vectors:
        _check_same_dim(v, vectors[0])
    return tuple(max(v[k] for v in vectors) for k in range(dim))


def vec_is_zero(x: Sequence[Fraction]) -> bool:
    return not any(x)


def vec_is_nonneg(x: Sequence[Fraction]) -> bool:
    return all(a >= 0 for a in x)


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatMatrix:
    """Dense rational matrix, row-major."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ShapeError(f"negative matrix shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise ShapeError(
                f"matrix {self.rows}x{self.cols} needs {self.rows * self.cols} entries, "
                f"got {len(self.entries)}"
            )

    # Construction

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols, (ZERO,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        entries = [ZERO] * (n * n)
        for i in range(n):
            entries[i * n + i] = ONE
        return cls(n, n, tuple(entries))

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[RationalLike]], cols: int | None = None
    ) -> "RatMatrix":
        """Build from nested rows. `cols` is required when there are no rows."""
        n_rows = len(rows)
        if n_rows == 0:
            return cls(0, cols or 0, ())
        width = len(rows[0])
        if cols is not None and cols != width:
            raise ShapeError(f"expected {cols} columns, got {width}")
        flat = []
        for r, row in enumerate(rows):
            if len(row) != width:
                raise ShapeError(f"ragged matrix: row {r} has {len(row)} entries, expected {width}")
            flat.extend(as_rational(v) for v in row)
        return cls(n_rows, width, tuple(flat))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Fraction]], rows: int) -> "RatMatrix":
        n_cols = len(columns)
        entries = [ZERO] * (rows * n_cols)
        for j, col in enumerate(columns):
            if len(col) != rows:
                raise ShapeError(f"column {j} has {len(col)} entries, expected {rows}")
            for i, v in enumerate(col):
                entries[i * n_cols + j] = v
        return cls(rows, n_cols, tuple(entries))

    # Access

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"index {index} out of range for {self.rows}x{self.cols}")
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        start = i * self.cols
        return self.entries[start : start + self.cols]

    def column(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[tuple]:
        return [self.row(i) for i in range(self.rows)]

    def block(self, row_start: int, row_stop: int, col_start: int, col_stop: int) -> "RatMatrix":
        rows = [self.row(i)[col_start:col_stop] for i in range(row_start, row_stop)]
        return RatMatrix.from_rows(rows, cols=col_stop - col_start)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def apply(self, x: Sequence[Fraction]) -> tuple:
        """Matrix-vector product."""
        if len(x) != self.cols:
            raise ShapeError(f"cannot apply {self.rows}x{self.cols} matrix to vector of {len(x)}")
        out = []
        for i in range(self.rows):
            acc = ZERO
            for a, b in zip(self.row(i), x):
                if a and b:
                    acc += a * b
            out.append(acc)
        return tuple(out)

    # Arithmetic

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        summed = tuple(a + b for a, b in zip(self.entries, other.entries))
        return RatMatrix(self.rows, self.cols, summed)

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise ShapeError(f"cannot subtract {self.shape} and {other.shape}")
        diff = tuple(a - b for a, b in zip(self.entries, other.entries))
        return RatMatrix(self.rows, self.cols, diff)

    def scale(self, c: RationalLike) -> "RatMatrix":
        c = as_rational(c)
        return RatMatrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        return mat_mul(self, other)

    def transpose(self) -> "RatMatrix":
        return RatMatrix.from_columns(self.to_rows(), rows=self.cols)

    # Serialization

    def to_json(self) -> list[list[str]]:
        return [[format_rational(v) for v in self.row(i)] for i in range(self.rows)]

    @classmethod
    def from_json(cls, data: list, cols: int | None = None) -> "RatMatrix":
        if not isinstance(data, list) or any(not isinstance(r, list) for r in data):
            raise ParseError("matrix must be a list of rows")
        return cls.from_rows(data, cols=cols)


def mat_mul(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    """Exact matrix product a·b."""
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    n = b.cols
    b_rows = [b.row(k) for k in range(b.rows)]
    entries: list = []
    for i in range(a.rows):
        acc = [ZERO] * n
        for k, a_ik in enumerate(a.row(i)):
            if not a_ik:
                continue
            for j, b_kj in enumerate(b_rows[k]):
                if b_kj:
                    acc[j] += a_ik * b_kj
        entries.extend(acc)
    return RatMatrix(a.rows, n, tuple(entries))


def hstack(blocks: Sequence[RatMatrix], rows: int) -> RatMatrix:
    """Concatenate matrices side by side."""
    for m in blocks:
        if m.rows != rows:
            raise ShapeError(f"hstack row mismatch: {m.rows} vs {rows}")
    cols = sum(m.cols for m in blocks)
    entries: list = []
    for i in range(rows):
        for m in blocks:
            entries.extend(m.row(i))
    return RatMatrix(rows, cols, tuple(entries))


def vstack(blocks: Sequence[RatMatrix], cols: int) -> RatMatrix:
    """Stack matrices on top of each other."""
    for m in blocks:
        if m.cols != cols:
            raise ShapeError(f"vstack column mismatch: {m.cols} vs {cols}")
    entries: list = []
    for m in blocks:
        entries.extend(m.entries)
    return RatMatrix(sum(m.rows for m in blocks), cols, tuple(entries))


# ---------------------------------------------------------------------------
# Bitsets
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class BitSet:
    """A subset of range(width), stored as an integer mask."""

    width: int
    mask: int = 0

    def __post_init__(self):
        if self.width < 0:
            raise ShapeError(f"negative bitset width {self.width}")
        if self.mask < 0 or self.mask >> self.width:
            raise ShapeError(f"mask {self.mask:#b} has bits outside width {self.width}")

    @classmethod
    def from_indices(cls, width: int, indices: Iterable[int]) -> "BitSet":
        mask = 0
        for i in indices:
            if not 0 <= i < width:
                raise ShapeError(f"index {i} outside bitset width {width}")
            mask |= 1 << i
        return cls(width, mask)

    @classmethod
    def full(cls, width: int) -> "BitSet":
        return cls(width, (1 << width) - 1)

    def __contains__(self, i: int) -> bool:
        return 0 <= i < self.width and bool(self.mask >> i & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __bool__(self) -> bool:
        return self.mask != 0

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.width) if self.mask >> i & 1)

    def union(self, other: "BitSet") -> "BitSet":
        if self.width != other.width:
            raise ShapeError(f"bitset width mismatch: {self.width} vs {other.width}")
        return BitSet(self.width, self.mask | other.mask)

    def issubset(self, other: "BitSet") -> bool:
        return self.mask & ~other.mask == 0

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in self.indices()) + "}"


def powerset(width: int, cap: int = DEFAULT_POWERSET_CAP) -> list[BitSet]:
    """All subsets of range(width) in binary-counter order (bit 0 is element 0)."""
    if width > cap:
        raise ResourceError(
            f"powerset of width {width} exceeds cap {cap}", cap_name="powerset_cap", limit=cap
        )
    return [BitSet(width, mask) for mask in range(1 << width)]
