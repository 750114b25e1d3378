"""
Exact discrete memoryless channels.

Entries are Fractions, never floats: every finiteness decision downstream
(R_inf, C0_fb, expurgation gates) depends on the zero pattern of W, so that
pattern has to be exact. Floating point only appears when a module asks for
`as_array()` to evaluate a genuinely continuous quantity.

Index conventions: rows are inputs x, columns are outputs y, and products
of alphabets are flattened row-major, (x1, x2) -> x1 * |X2| + x2.
"""

import json
import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import List, NamedTuple, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ValidationError, field_validator

from .errors import (
    AlphabetMismatch,
    ChannelParseError,
    DegenerateMatrix,
    EmptyAlphabet,
    IndexOutOfRange,
    InvalidEpsilon,
    NegativeEntry,
    NonStochasticRow,
    RaggedRows,
    SizeOverflow,
)

DEFAULT_SIZE_CAP = 4096

RationalLike = Union[Fraction, int, str]

# "3/4", "-1", "0" -- decimal points and exponents are rejected on purpose.
_RATIONAL_RE = re.compile(r"^\s*-?\d+\s*(/\s*\d+\s*)?$")


@dataclass(frozen=True)
class Channel:
    """Row-stochastic matrix W(y|x) with exact rational entries."""
    rows: Tuple[Tuple[Fraction, ...], ...]

    @property
    def input_size(self) -> int:
        return len(self.rows)

    @property
    def output_size(self) -> int:
        return len(self.rows[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.input_size, self.output_size

    def entry(self, x: int, y: int) -> Fraction:
        return self.rows[x][y]

    @cached_property
    def _array(self) -> np.ndarray:
        arr = np.array([[float(v) for v in row] for row in self.rows], dtype=float)
        arr.setflags(write=False)
        return arr

    def as_array(self) -> np.ndarray:
        """Read-only float view, shape (|X|, |Y|)."""
        return self._array

    def min_positive_entry(self) -> Fraction:
        """min over x of the smallest positive W(y|x)."""
        return min(v for row in self.rows for v in row if v > 0)

    def has_identical_rows(self) -> bool:
        """True iff the output is independent of the input (C(W) = 0)."""
        first = self.rows[0]
        return all(row == first for row in self.rows[1:])

    def __str__(self) -> str:
        return f"Channel({self.input_size}x{self.output_size})"


@dataclass(frozen=True)
class SupportMatrix:
    """A(W): |Y| x |X| bit grid, A[y][x] = 1 iff W(y|x) > 0."""
    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        n_cols = len(self.entries[0])
        for col in range(n_cols):
            if not any(row[col] for row in self.entries):
                raise DegenerateMatrix(f"support matrix column {col} is all zero")

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.entries), len(self.entries[0])

    def kron(self, other: "SupportMatrix") -> "SupportMatrix":
        return SupportMatrix(
            tuple(
                tuple(a * b for a in row_a for b in row_b)
                for row_a in self.entries
                for row_b in other.entries
            )
        )

    def as_fractions(self) -> List[List[Fraction]]:
        return [[Fraction(v) for v in row] for row in self.entries]


class Bhattacharyya(NamedTuple):
    """Overlap of two inputs: exact zero bit plus the float coefficient."""
    is_zero: bool
    value: float


# =============================================================================
# CONSTRUCTION
# =============================================================================

def _to_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, float):
        raise TypeError("channel entries must be exact rationals, got float")
    return Fraction(value)


def new_channel(rows: Sequence[Sequence[RationalLike]]) -> Channel:
    """
    Validate rows and build a Channel.

    Args:
        rows: |X| rows of |Y| rationals (Fraction, int or "num/den" strings).

    Returns:
        The validated Channel.

    Raises:
        EmptyAlphabet, RaggedRows, NegativeEntry, NonStochasticRow.
    """
    if not rows:
        raise EmptyAlphabet("channel has no input letters")
    width = len(rows[0])
    if width == 0:
        raise EmptyAlphabet("channel has no output letters", row=0)

    exact_rows = []
    for x, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRows(
                f"row {x} has {len(row)} entries, expected {width}", row=x
            )
        exact = tuple(_to_fraction(v) for v in row)
        for y, v in enumerate(exact):
            if v < 0:
                raise NegativeEntry(f"row {x}, column {y} is negative ({v})", row=x)
        total = sum(exact, Fraction(0))
        if total != 1:
            raise NonStochasticRow(f"row {x} sums to {total}, not 1", row=x)
        exact_rows.append(exact)

    return Channel(tuple(exact_rows))


def identity(n: int) -> Channel:
    """Noiseless channel on n letters."""
    if n < 1:
        raise EmptyAlphabet("identity channel needs n >= 1")
    return new_channel([[1 if x == y else 0 for y in range(n)] for x in range(n)])


def flip() -> Channel:
    """Binary channel that swaps its two letters."""
    return new_channel([[0, 1], [1, 0]])


def bsc(p: RationalLike) -> Channel:
    """Binary symmetric channel with crossover p."""
    p = _to_fraction(p)
    return new_channel([[1 - p, p], [p, 1 - p]])


def uniform_rows(n_inputs: int, n_outputs: int) -> Channel:
    """Every input sees the uniform output distribution (C = 0)."""
    cell = Fraction(1, n_outputs)
    return new_channel([[cell] * n_outputs for _ in range(n_inputs)])


def typewriter(q: int, eps: RationalLike) -> Channel:
    """
    q-ary typewriter channel: W(x|x) = 1 - eps, W(x+1 mod q | x) = eps.

    Raises:
        InvalidEpsilon: q < 2 or eps outside [0, 1/2].
    """
    eps = _to_fraction(eps)
    if q < 2:
        raise InvalidEpsilon(f"typewriter needs q >= 2, got {q}")
    if eps < 0 or eps > Fraction(1, 2):
        raise InvalidEpsilon(f"typewriter eps must lie in [0, 1/2], got {eps}")
    rows = []
    for x in range(q):
        row = [Fraction(0)] * q
        row[x] += 1 - eps
        row[(x + 1) % q] += eps
        rows.append(row)
    return new_channel(rows)


def relabel(w: Channel, input_perm: Sequence[int], output_perm: Sequence[int]) -> Channel:
    """Channel with inputs/outputs renamed: new row i is old row input_perm[i]."""
    if sorted(input_perm) != list(range(w.input_size)) or sorted(output_perm) != list(
        range(w.output_size)
    ):
        raise AlphabetMismatch("relabel needs permutations of both alphabets")
    return Channel(
        tuple(tuple(w.rows[x][y] for y in output_perm) for x in input_perm)
    )


# =============================================================================
# ALGEBRA
# =============================================================================

def _check_size(size: int, size_cap: int, what: str) -> None:
    if size > size_cap:
        raise SizeOverflow(f"{what} has {size} letters, cap is {size_cap}")


def kronecker(w1: Channel, w2: Channel, size_cap: int = DEFAULT_SIZE_CAP) -> Channel:
    """W((y1,y2)|(x1,x2)) = W1(y1|x1) * W2(y2|x2), row-major in both alphabets."""
    _check_size(w1.input_size * w2.input_size, size_cap, "product input alphabet")
    _check_size(w1.output_size * w2.output_size, size_cap, "product output alphabet")
    return Channel(
        tuple(
            tuple(a * b for a in row1 for b in row2)
            for row1 in w1.rows
            for row2 in w2.rows
        )
    )


def extension(w: Channel, n: int, size_cap: int = DEFAULT_SIZE_CAP) -> Channel:
    """n-fold Kronecker power W^n."""
    if n < 1:
        raise ValueError(f"extension order must be >= 1, got {n}")
    _check_size(w.input_size ** n, size_cap, f"W^{n} input alphabet")
    _check_size(w.output_size ** n, size_cap, f"W^{n} output alphabet")
    result = w
    for _ in range(n - 1):
        result = kronecker(result, w, size_cap=size_cap)
    return result


def support_matrix(w: Channel) -> SupportMatrix:
    """A(W), laid out |Y| x |X|."""
    return SupportMatrix(
        tuple(
            tuple(1 if w.rows[x][y] > 0 else 0 for x in range(w.input_size))
            for y in range(w.output_size)
        )
    )


def output_support(w: Channel, x: int) -> frozenset:
    return frozenset(y for y, v in enumerate(w.rows[x]) if v > 0)


def bhattacharyya(w: Channel, x: int, x2: int) -> Bhattacharyya:
    """
    Bhattacharyya overlap of inputs x and x2.

    The zero bit is exact (disjoint output supports); the value is
    sum_y sqrt(W(y|x) W(y|x2)) in floating point.
    """
    for idx in (x, x2):
        if not 0 <= idx < w.input_size:
            raise IndexOutOfRange(f"input {idx} outside 0..{w.input_size - 1}")
    if x == x2:
        return Bhattacharyya(is_zero=False, value=1.0)
    common = output_support(w, x) & output_support(w, x2)
    if not common:
        return Bhattacharyya(is_zero=True, value=0.0)
    value = math.fsum(math.sqrt(float(w.rows[x][y] * w.rows[x2][y])) for y in common)
    return Bhattacharyya(is_zero=False, value=value)


def random_channel(rng: random.Random, n_inputs: int, n_outputs: int, max_weight: int = 3) -> Channel:
    """
    Channel with rows drawn as integer weights in 0..max_weight, normalized.

    Zero weights are common, so random channels exercise the exact support
    structure; each row keeps at least one positive entry.
    """
    rows = []
    for _ in range(n_inputs):
        weights = [rng.randint(0, max_weight) for _ in range(n_outputs)]
        if not any(weights):
            weights[rng.randrange(n_outputs)] = 1
        total = sum(weights)
        rows.append([Fraction(v, total) for v in weights])
    return new_channel(rows)


def channel_distance(w1: Channel, w2: Channel) -> Fraction:
    """d_C(W1, W2) = max_x sum_y |W1(y|x) - W2(y|x)|, exact."""
    if w1.shape != w2.shape:
        raise AlphabetMismatch(f"cannot compare {w1.shape} with {w2.shape}")
    return max(
        sum((abs(a - b) for a, b in zip(r1, r2)), Fraction(0))
        for r1, r2 in zip(w1.rows, w2.rows)
    )


# =============================================================================
# JSON DOCUMENT
# =============================================================================

class ChannelDocument(BaseModel):
    """{"input": q, "output": m, "rows": [["3/4", "1/4", "0"], ...]}"""
    input: int
    output: int
    rows: List[List[str]]

    @field_validator("rows", mode="before")
    @classmethod
    def _rationals_only(cls, rows):
        if not isinstance(rows, list):
            raise ValueError("rows must be a list of lists")
        for x, row in enumerate(rows):
            if not isinstance(row, list):
                raise ValueError(f"row {x} is not a list")
            for y, v in enumerate(row):
                if isinstance(v, bool) or isinstance(v, float):
                    raise ValueError(f"row {x}, column {y}: floats are not accepted ({v!r})")
                if isinstance(v, int):
                    continue
                if not isinstance(v, str) or not _RATIONAL_RE.match(v):
                    raise ValueError(f"row {x}, column {y}: {v!r} is not 'num/den' or an integer")
        return [[str(v) for v in row] for row in rows]


def parse_channel(text: str) -> Channel:
    """
    Parse a Channel JSON document.

    Raises:
        ChannelParseError: malformed JSON or document shape (exit 2).
        ChannelValidationError subclasses: the rows are not a valid DMC (exit 3).
    """
    try:
        doc = ChannelDocument.model_validate(json.loads(text))
    except json.JSONDecodeError as e:
        raise ChannelParseError(f"invalid JSON: {e}") from e
    except ValidationError as e:
        raise ChannelParseError(f"invalid channel document: {e}") from e

    try:
        rows = [[Fraction(v.replace(" ", "")) for v in row] for row in doc.rows]
    except ZeroDivisionError as e:
        raise ChannelParseError("zero denominator in channel entry") from e

    if len(rows) != doc.input or any(len(row) != doc.output for row in rows):
        raise AlphabetMismatch(
            f"header declares {doc.input}x{doc.output} but rows are "
            f"{len(rows)}x{len(rows[0]) if rows else 0}"
        )
    return new_channel(rows)


def load_channel(path: Union[str, Path]) -> Channel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ChannelParseError(f"cannot read {path}: {e}") from e
    return parse_channel(text)


def channel_to_document(w: Channel) -> dict:
    return {
        "input": w.input_size,
        "output": w.output_size,
        "rows": [[str(v) for v in row] for row in w.rows],
    }
