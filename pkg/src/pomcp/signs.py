"""Signs, sign vectors and combinatorial indexing.

Signs are plain ints in ``{-1, 0, 1}``; their product is ordinary integer
multiplication.  Ground-set elements are 1-based in every public function and
0-based inside the storage layouts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

from .errors import ArgumentError, DimensionError, ParseError

PLUS, MINUS, ZERO = 1, -1, 0

_TO_CHAR = {1: "+", -1: "-", 0: "0"}
_FROM_CHAR = {"+": 1, "-": -1, "0": 0, "−": -1}


def sign(x) -> int:
    """Sign of a number (works for ints, Fractions, floats)."""
    return (x > 0) - (x < 0)


def sign_char(s: int) -> str:
    return _TO_CHAR[s]


def parse_signs(text: str, allow_zero: bool = True) -> tuple[int, ...]:
    out = []
    for pos, ch in enumerate(text):
        v = _FROM_CHAR.get(ch)
        if v is None or (v == 0 and not allow_zero):
            raise ParseError(f"invalid sign character {ch!r}", offset=pos)
        out.append(v)
    return tuple(out)


def format_signs(values: Iterable[int]) -> str:
    return "".join(_TO_CHAR[v] for v in values)


@dataclass(frozen=True)
class SignVector:
    """An element of ``{+,-,0}^E``; ``entries[k]`` belongs to element ``k + 1``."""

    entries: tuple[int, ...]

    def __post_init__(self):
        if any(v not in (-1, 0, 1) for v in self.entries):
            raise ArgumentError("sign vector entries must be -1, 0 or 1")

    @classmethod
    def from_string(cls, text: str) -> SignVector:
        return cls(parse_signs(text))

    def __str__(self):
        return format_signs(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, element: int) -> int:
        if not 1 <= element <= len(self.entries):
            raise IndexError(element)
        return self.entries[element - 1]

    def __neg__(self) -> SignVector:
        return SignVector(tuple(-v for v in self.entries))

    def support(self) -> frozenset[int]:
        return frozenset(k + 1 for k, v in enumerate(self.entries) if v)


def _check_same_length(x: SignVector, y: SignVector):
    if len(x) != len(y):
        raise DimensionError(f"sign vectors of length {len(x)} and {len(y)}")


def compose(x: SignVector, y: SignVector) -> SignVector:
    _check_same_length(x, y)
    return SignVector(tuple(a if a else b for a, b in zip(x.entries, y.entries)))


def separation(x: SignVector, y: SignVector) -> frozenset[int]:
    """Elements on which ``x`` and ``y`` carry opposite nonzero signs."""
    _check_same_length(x, y)
    return frozenset(k + 1 for k, (a, b) in enumerate(zip(x.entries, y.entries)) if a and a == -b)


def conforms(x: SignVector, y: SignVector) -> bool:
    """True iff ``x`` conforms to ``y`` (``x_e`` is 0 or equal to ``y_e`` everywhere)."""
    _check_same_length(x, y)
    return all(a == 0 or a == b for a, b in zip(x.entries, y.entries))


# -- colexicographic ranking of r-subsets ----------------------------------


def colex_rank(subset: Iterable[int]) -> int:
    """Colex rank of a subset of 1-based elements; ``{1, .., r}`` has rank 0."""
    elems = sorted(subset)
    if len(set(elems)) != len(elems) or (elems and elems[0] < 1):
        raise ArgumentError(f"not a subset of positive integers: {elems}")
    return sum(comb(e - 1, k + 1) for k, e in enumerate(elems))


def colex_unrank(rank: int, r: int, n: int) -> tuple[int, ...]:
    """Inverse of :func:`colex_rank` restricted to r-subsets of ``[n]``."""
    if r < 0 or r > n or not 0 <= rank < comb(n, r):
        raise ArgumentError(f"rank {rank} out of range for {r}-subsets of [{n}]")
    out = []
    m = n
    for k in range(r, 0, -1):
        # largest m with comb(m - 1, k) <= rank
        while comb(m - 1, k) > rank:
            m -= 1
        out.append(m)
        rank -= comb(m - 1, k)
        m -= 1
    return tuple(reversed(out))


def _colex_rank0(subset0: Sequence[int]) -> int:
    return sum(comb(e, k + 1) for k, e in enumerate(subset0))


@lru_cache(maxsize=None)
def colex_subsets(n: int, r: int) -> tuple[tuple[int, ...], ...]:
    """All r-subsets of ``range(n)`` (0-based), in colex order."""
    subs = list(itertools.combinations(range(n), r))
    subs.sort(key=lambda s: s[::-1])
    return tuple(subs)


@lru_cache(maxsize=None)
def colex_index(n: int, r: int) -> dict[tuple[int, ...], int]:
    return {s: k for k, s in enumerate(colex_subsets(n, r))}


# -- permutation parity ------------------------------------------------------


@dataclass(frozen=True)
class SignedTuple:
    sorted_subset: tuple[int, ...]
    parity: int


def tuple_parity(t: Sequence[int]) -> int:
    """Sign of the permutation sorting ``t``; 0 if ``t`` has a repeated element."""
    s = 1
    for i in range(len(t)):
        ti = t[i]
        for j in range(i + 1, len(t)):
            if ti == t[j]:
                return 0
            if ti > t[j]:
                s = -s
    return s


def normalize_tuple(t: Sequence[int]) -> SignedTuple:
    return SignedTuple(tuple(sorted(set(t))), tuple_parity(t))
