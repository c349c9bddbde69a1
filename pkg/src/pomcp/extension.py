"""Uniform single-element extensions of rank r chirotopes on [N] by the element N + 1.

The extended chirotope on [N + 1] has colex value string ``base.values +
new_values``: every r-subset avoiding N + 1 precedes every subset containing
it, and the latter are ordered like their (r - 1)-subsets ``T`` of [N].
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .chirotope import (
    Chirotope,
    Symmetry,
    check_axioms,
    evaluate,
    flip_sign_table,
    gp_relations,
    is_uniform,
    relabel_tables,
)
from .errors import ArgumentError, DimensionError, ParseError
from .pmatroid import complementary_tuple
from .signs import format_signs, parse_signs


@dataclass(frozen=True)
class ExtensionSignature:
    base: Chirotope
    new_values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "new_values", tuple(int(v) for v in self.new_values))
        if len(self.new_values) != comb(self.base.n, self.base.r - 1):
            raise DimensionError(
                f"extension of rank {self.base.r} on [{self.base.n}] needs {comb(self.base.n, self.base.r - 1)} values"
            )

    @property
    def element(self) -> int:
        return self.base.n + 1

    def extended(self) -> Chirotope:
        return Chirotope(self.base.r, self.base.n + 1, self.base.values + self.new_values)

    @classmethod
    def from_extended(cls, chi: Chirotope) -> ExtensionSignature:
        k = comb(chi.n - 1, chi.r)
        return cls(Chirotope(chi.r, chi.n - 1, chi.values[:k]), chi.values[k:])

    def __str__(self):
        return f"{self.base} {format_signs(self.new_values)}"

    @classmethod
    def from_string(cls, text: str) -> ExtensionSignature:
        parts = text.split()
        if len(parts) != 4:
            raise ParseError(f"extension needs 'r n base new', got {text!r}")
        return cls(Chirotope.from_string(" ".join(parts[:3])), parse_signs(parts[3]))

    def is_uniform(self) -> bool:
        return all(self.new_values) and is_uniform(self.base)


@dataclass
class ExtensionSet:
    base: Chirotope
    new_values: np.ndarray  # (count, C(N, r-1)) int8, lexicographic with + first

    def __len__(self):
        return len(self.new_values)

    def __iter__(self) -> Iterator[ExtensionSignature]:
        for row in self.new_values:
            yield ExtensionSignature(self.base, tuple(int(v) for v in row))

    @property
    def signatures(self) -> list[ExtensionSignature]:
        return list(self)


@lru_cache(maxsize=None)
def _extension_setup(r: int, size: int):
    k = comb(size, r)
    kk = comb(size + 1, r)
    relpos, relsg = gp_relations(r, size + 1)
    keep = (relpos >= k).any(axis=1)
    free = np.arange(k, kk, dtype=np.int64)
    pos, sgn, start, _ = _kernels.order_relations(relpos[keep], relsg[keep], free, kk)
    return free, pos, sgn, start


def enumerate_uniform_extensions(base: Chirotope, validate: bool = True) -> ExtensionSet:
    """All uniform extensions, by sign backtracking with three-term
    Grassmann-Pluecker pruning; ``validate`` re-checks every leaf in full."""
    if not is_uniform(base):
        raise ArgumentError("extension enumeration needs a uniform base")
    free, pos, sgn, start = _extension_setup(base.r, base.n)
    x0 = np.zeros(comb(base.n + 1, base.r), dtype=np.int8)
    x0[: len(base.values)] = base.array
    leaves = _kernels.dfs_leaves(x0, free, pos, sgn, start).copy()
    if validate and len(leaves):
        full = np.concatenate([np.broadcast_to(base.array, (len(leaves), len(base.values))), leaves], axis=1)
        bad = gp_violations_batch(full, base.r, base.n + 1)
        if bad.any():
            raise AssertionError("extension search produced a sign map violating the exchange relations")
    return ExtensionSet(base, leaves)


def extension_prefixes(base: Chirotope, depth: int) -> list[tuple[int, ...]]:
    """Feasible sign assignments to the first ``depth`` new values (work-unit split)."""
    free, _, _, _ = _extension_setup(base.r, base.n)
    depth = min(depth, len(free))
    if depth == 0:
        return [()]
    k = comb(base.n + 1, base.r)
    relpos, relsg = gp_relations(base.r, base.n + 1)
    head = free[:depth]
    # relations touching only the base and the prefix positions
    inside = np.isin(relpos, np.concatenate([np.arange(len(base.values)), head])).all(axis=1)
    pos, sgn, start, _ = _kernels.order_relations(relpos[inside], relsg[inside], head, k)
    x0 = np.zeros(k, dtype=np.int8)
    x0[: len(base.values)] = base.array
    return [tuple(int(v) for v in row) for row in _kernels.dfs_leaves(x0, head, pos, sgn, start)]


def extension_subtree(base: Chirotope, prefix: Sequence[int] = ()) -> np.ndarray:
    """Uniform extensions whose first new values equal ``prefix`` (full rows)."""
    if not is_uniform(base):
        raise ArgumentError("extension enumeration needs a uniform base")
    free, _, _, _ = _extension_setup(base.r, base.n)
    k = comb(base.n + 1, base.r)
    relpos, relsg = gp_relations(base.r, base.n + 1)
    keep = (relpos >= len(base.values)).any(axis=1)
    x0 = np.zeros(k, dtype=np.int8)
    x0[: len(base.values)] = base.array
    x0[free[: len(prefix)]] = prefix
    rest = free[len(prefix) :]
    pos, sgn, start, (fpos, fsgn) = _kernels.order_relations(relpos[keep], relsg[keep], rest, k)
    if _kernels.violated_any(x0, fpos, fsgn):
        return np.zeros((0, len(free)), dtype=np.int8)
    leaves = _kernels.dfs_leaves(x0, rest, pos, sgn, start)
    head = np.broadcast_to(np.array(prefix, dtype=np.int8), (len(leaves), len(prefix)))
    return np.concatenate([head, leaves], axis=1).astype(np.int8)


def gp_violations_batch(values: np.ndarray, r: int, n: int) -> np.ndarray:
    """Per-row flag: does this uniform sign map violate some three-term relation?"""
    pos, sgn = gp_relations(r, n)
    out = np.zeros(len(values), dtype=bool)
    for lo in range(0, len(pos), 512):
        x = values[:, pos[lo : lo + 512]]  # (M, R, 6)
        t = sgn[lo : lo + 512] * x[..., 0::2] * x[..., 1::2]
        out |= ((t[..., 0] == t[..., 1]) & (t[..., 1] == t[..., 2])).any(axis=1)
    return out


def brute_force_extensions(base: Chirotope) -> np.ndarray:
    """Exhaustive filter of all +/- assignments (oracle; feasible for C(N, r-1) <= 16)."""
    m = comb(base.n, base.r - 1)
    if m > 16:
        raise ArgumentError("too many candidate assignments for brute force")
    codes = np.arange(2**m)
    cand = np.where((codes[:, None] >> np.arange(m - 1, -1, -1)) & 1, -1, 1).astype(np.int8)
    full = np.concatenate([np.broadcast_to(base.array, (len(cand), len(base.values))), cand], axis=1)
    ok = ~gp_violations_batch(full, base.r, base.n + 1)
    return cand[ok]


# -- transport -----------------------------------------------------------------


@lru_cache(maxsize=4096)
def _transport_table(r: int, size: int, perm: tuple[int, ...], flips: frozenset[int]):
    k = comb(size, r)
    perm0 = np.array([p - 1 for p in perm] + [size], dtype=np.int64)
    idx, par = relabel_tables(r, size + 1, perm0[None, :])
    mask = sum(1 << (a - 1) for a in flips)
    sgn = par[0] * flip_sign_table(r, size + 1, [mask])[0]
    return idx[0, k:] - k, sgn[k:].astype(np.int8)


def transport_values(new_values: np.ndarray, r: int, size: int, symmetry: Symmetry, sign: int = 1) -> np.ndarray:
    """Batch form of :func:`transport_extension` on a ``(L, C(N, r-1))`` array."""
    idx, sgn = _transport_table(r, size, symmetry.perm, symmetry.flips)
    return (np.asarray(new_values)[:, idx] * (sgn * sign)).astype(np.int8)


def transport_extension(ext: ExtensionSignature, sigma: Sequence[int], flips=(), sign: int = 1) -> ExtensionSignature:
    """``sign * _{-A}(sigma^ . ext)`` where ``sigma^`` fixes the new element.

    Extends the base map ``chi -> sign * _{-A}(sigma . chi)``.
    """
    if len(sigma) != ext.base.n:
        raise DimensionError("relabeling and extension live on different ground sets")
    sym = Symmetry(tuple(sigma), frozenset(flips))
    base = sym.apply(ext.base)
    if sign == -1:
        base = -base
    new = transport_values(np.array([ext.new_values], dtype=np.int8), ext.base.r, ext.base.n, sym, sign)[0]
    return ExtensionSignature(base, tuple(int(v) for v in new))


# -- complementarity ---------------------------------------------------------


def _check_pomcp(ext: ExtensionSignature) -> int:
    if ext.base.n != 2 * ext.base.r:
        raise ArgumentError("complementarity structure needs rank n on [2n]")
    return ext.base.r


def edge_product(ext: ExtensionSignature, vertex: int, i: int) -> int:
    """``chi^(b) * chi^(b with b_i replaced by the new element)`` for 0-based direction ``i``."""
    n = _check_pomcp(ext)
    hat = ext.extended()
    b = complementary_tuple(vertex, n)
    return evaluate(hat, b) * evaluate(hat, b[:i] + (2 * n + 1,) + b[i + 1 :])


def is_nondegenerate_pomcp(ext: ExtensionSignature) -> bool:
    n = _check_pomcp(ext)
    hat = ext.extended()
    for v in range(2**n):
        b = complementary_tuple(v, n)
        for i in range(n):
            if evaluate(hat, b[:i] + (2 * n + 1,) + b[i + 1 :]) == 0:
                return False
    return True


def is_valid_extension(ext: ExtensionSignature) -> bool:
    return check_axioms(ext.extended())

