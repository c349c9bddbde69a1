"""Chirotopes stored as sign strings over sorted bases in colex order.

A :class:`Chirotope` keeps the exact sign map (not just the oriented matroid
``{chi, -chi}``); :meth:`Chirotope.normalized` picks the representative whose
first nonzero basis value is ``+`` and is what canonical forms compare.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, DimensionError, ParseError
from .linalg import det_sign
from .signs import colex_index, colex_subsets, format_signs, parse_signs, tuple_parity


@dataclass(frozen=True)
class Chirotope:
    r: int
    n: int
    values: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.r <= self.n:
            raise ArgumentError(f"need 1 <= r <= n, got r={self.r}, n={self.n}")
        if len(self.values) != comb(self.n, self.r):
            raise DimensionError(
                f"rank {self.r} chirotope on {self.n} elements needs {comb(self.n, self.r)} values"
            )
        if any(v not in (-1, 0, 1) for v in self.values):
            raise ArgumentError("chirotope values must be -1, 0 or 1")

    @classmethod
    def from_string(cls, text: str) -> Chirotope:
        try:
            r, n, signs = text.split()
            return cls(int(r), int(n), parse_signs(signs))
        except ValueError as exc:
            raise ParseError(f"bad chirotope string {text!r}: {exc}") from None

    @classmethod
    def alternating(cls, r: int, n: int) -> Chirotope:
        return cls(r, n, (1,) * comb(n, r))

    @classmethod
    def from_array(cls, r: int, n: int, arr) -> Chirotope:
        return cls(r, n, tuple(int(v) for v in arr))

    def __str__(self):
        return f"{self.r} {self.n} {self.sign_string}"

    @property
    def sign_string(self) -> str:
        return format_signs(self.values)

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.values, dtype=np.int8)
        a.flags.writeable = False
        return a

    def __neg__(self) -> Chirotope:
        return Chirotope(self.r, self.n, tuple(-v for v in self.values))

    def normalized(self) -> Chirotope:
        first = next((v for v in self.values if v), 1)
        return self if first == 1 else -self

    def same_matroid(self, other: Chirotope) -> bool:
        """True iff both describe the same oriented matroid (equal up to global sign)."""
        return self.normalized() == other.normalized()

    def basis_value(self, subset: Iterable[int]) -> int:
        """Value on a sorted basis given as 1-based elements."""
        key = tuple(sorted(e - 1 for e in subset))
        return self.values[colex_index(self.n, self.r)[key]]


def evaluate(chi: Chirotope, t: Sequence[int]) -> int:
    """chi(t) for an ordered r-tuple of 1-based elements."""
    if len(t) != chi.r:
        raise ArgumentError(f"expected a {chi.r}-tuple, got {len(t)} elements")
    if any(not 1 <= e <= chi.n for e in t):
        raise ArgumentError(f"tuple {tuple(t)} not inside [{chi.n}]")
    p = tuple_parity(t)
    if p == 0:
        return 0
    return p * chi.basis_value(t)


def is_uniform(chi: Chirotope) -> bool:
    return all(chi.values)


# -- axiom checking ----------------------------------------------------------


def _pos_par(n: int, t: Sequence[int]) -> tuple[int, int]:
    """(colex position, parity) of a 0-based tuple; position 0 when degenerate."""
    p = tuple_parity(t)
    if p == 0:
        return 0, 0
    return colex_index(n, len(t))[tuple(sorted(t))], p


@lru_cache(maxsize=None)
def gp_relations(r: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Three-term Grassmann-Pluecker relations of a rank r chirotope on n elements.

    Returns ``(pos, sgn)`` with shapes ``(R, 6)`` and ``(R, 3)``: term ``j`` of
    relation ``q`` is ``sgn[q, j] * x[pos[q, 2j]] * x[pos[q, 2j+1]]``.  A uniform
    sign map is a chirotope iff no relation has three equal terms.
    """
    pos, sgn = [], []
    if r >= 2:
        for s in itertools.combinations(range(n), r - 2):
            rest = [e for e in range(n) if e not in s]
            for a, b, c, d in itertools.combinations(rest, 4):
                row, signs = [], []
                for t1, t2, eps in (((a, b), (c, d), 1), ((a, c), (b, d), -1), ((a, d), (b, c), 1)):
                    p1, s1 = _pos_par(n, s + t1)
                    p2, s2 = _pos_par(n, s + t2)
                    row += [p1, p2]
                    signs.append(eps * s1 * s2)
                pos.append(row)
                sgn.append(signs)
    return np.array(pos, dtype=np.int64).reshape(-1, 6), np.array(sgn, dtype=np.int8).reshape(-1, 3)


def gp_violations(values: np.ndarray, r: int, n: int) -> np.ndarray:
    """Boolean mask of violated three-term relations (meaningful for uniform maps)."""
    pos, sgn = gp_relations(r, n)
    if len(pos) == 0:
        return np.zeros(0, dtype=bool)
    x = np.asarray(values, dtype=np.int8)[pos]
    t = sgn * x[:, 0::2] * x[:, 1::2]
    return (t[:, 0] == t[:, 1]) & (t[:, 1] == t[:, 2])


@lru_cache(maxsize=None)
def _c3_table(r: int, n: int):
    """Index table for the symmetry-reduced (C3') check.

    By (C2) it suffices to take ``i_2 < .. < i_r`` and ``j_1 < .. < j_r``
    (reordering either only multiplies the whole sign set by -1 or permutes
    it); tuples with a repeated ``j`` or ``i_2..i_r`` satisfy the axiom
    automatically.
    """
    pos = []
    par = []
    for i1 in range(n):
        for ip in itertools.combinations(range(n), r - 1):
            for j in itertools.combinations(range(n), r):
                row_p, row_s = [], []
                for s in range(r):
                    p1, s1 = _pos_par(n, (j[s],) + ip)
                    jj = list(j)
                    jj[s] = i1
                    p2, s2 = _pos_par(n, jj)
                    row_p += [p1, p2]
                    row_s += [s1, s2]
                p1, s1 = _pos_par(n, (i1,) + ip)
                p2, s2 = _pos_par(n, j)
                row_p += [p1, p2]
                row_s += [-s1, s2]
                pos.append(row_p)
                par.append(row_s)
    return np.array(pos, dtype=np.int64), np.array(par, dtype=np.int8)


def satisfies_c3prime(chi: Chirotope) -> bool:
    pos, par = _c3_table(chi.r, chi.n)
    x = chi.array[pos] * par
    terms = x[:, 0::2] * x[:, 1::2]
    has_plus = (terms == 1).any(axis=1)
    has_minus = (terms == -1).any(axis=1)
    all_zero = (terms == 0).all(axis=1)
    return bool(((has_plus & has_minus) | all_zero).all())


def check_axioms(chi: Chirotope) -> bool:
    """(C1) and (C3'); (C2) holds by the storage convention."""
    if not any(chi.values):
        return False
    if is_uniform(chi):
        return not gp_violations(chi.array, chi.r, chi.n).any()
    return satisfies_c3prime(chi)


# -- group actions -----------------------------------------------------------


def _perm0(perm: Sequence[int], n: int) -> tuple[int, ...]:
    p = tuple(int(x) - 1 for x in perm)
    if sorted(p) != list(range(n)):
        raise ArgumentError(f"{tuple(perm)} is not a permutation of [{n}]")
    return p


@lru_cache(maxsize=4096)
def _relabel_table(r: int, n: int, perm0: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    index = colex_index(n, r)
    idx, par = [], []
    for s in colex_subsets(n, r):
        image = tuple(perm0[e] for e in s)
        idx.append(index[tuple(sorted(image))])
        par.append(tuple_parity(image))
    return np.array(idx, dtype=np.int64), np.array(par, dtype=np.int8)


def relabel_tables(r: int, n: int, perms0) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`_relabel_table` for a ``(P, n)`` array of 0-based permutations."""
    perms0 = np.asarray(perms0, dtype=np.int64).reshape(-1, n)
    subs = np.array(colex_subsets(n, r), dtype=np.int64).reshape(-1, r)
    img = perms0[:, subs]  # (P, K, r)
    par = np.ones(img.shape[:2], dtype=np.int8)
    for a in range(r):
        for b in range(a + 1, r):
            par[img[..., a] > img[..., b]] *= -1
    srt = np.sort(img, axis=2)
    binom = np.array([[comb(e, k + 1) for k in range(r)] for e in range(n)], dtype=np.int64)
    idx = binom[srt, np.arange(r)].sum(axis=2)
    return idx, par


def _flip_signs(r: int, n: int, flips0: Iterable[int]) -> np.ndarray:
    mask = 0
    for e in flips0:
        mask |= 1 << e
    return np.array(
        [-1 if bin(sum(1 << e for e in s) & mask).count("1") % 2 else 1 for s in colex_subsets(n, r)],
        dtype=np.int8,
    )


def flip_sign_table(r: int, n: int, masks) -> np.ndarray:
    """``(F, K)`` reorientation sign patterns for 0-based bitmasks of flipped elements."""
    masks = np.asarray(masks, dtype=np.int64).reshape(-1)
    sub_masks = np.array([sum(1 << e for e in s) for s in colex_subsets(n, r)], dtype=np.int64)
    both = masks[:, None] & sub_masks[None, :]
    odd = np.zeros(both.shape, dtype=np.int64)
    for e in range(n):
        odd ^= (both >> e) & 1
    return (1 - 2 * odd).astype(np.int8)


def reorient(chi: Chirotope, flipped: Iterable[int]) -> Chirotope:
    """The reorientation of ``chi`` on the 1-based element set ``flipped``."""
    flips0 = [e - 1 for e in flipped]
    if any(not 0 <= e < chi.n for e in flips0):
        raise ArgumentError("reorientation set not inside the ground set")
    return Chirotope.from_array(chi.r, chi.n, chi.array * _flip_signs(chi.r, chi.n, flips0))


def relabel(chi: Chirotope, perm: Sequence[int]) -> Chirotope:
    """``(sigma . chi)(t) = chi(sigma(t))``; ``perm[i-1]`` is ``sigma(i)``."""
    idx, par = _relabel_table(chi.r, chi.n, _perm0(perm, chi.n))
    return Chirotope.from_array(chi.r, chi.n, chi.array[idx] * par)


def restrict(chi: Chirotope, subset: Iterable[int]) -> Chirotope:
    """Restriction to ``subset``, relabelled order-preservingly onto ``[|subset|]``."""
    f = sorted(e - 1 for e in set(subset))
    if len(f) < chi.r:
        raise ArgumentError(f"restriction needs at least {chi.r} elements")
    if any(not 0 <= e < chi.n for e in f):
        raise ArgumentError("restriction set not inside the ground set")
    index = colex_index(chi.n, chi.r)
    vals = tuple(chi.values[index[tuple(f[e] for e in s)]] for s in colex_subsets(len(f), chi.r))
    return Chirotope(chi.r, len(f), vals)


def realize_chirotope(v) -> Chirotope:
    """chi_V for an r x n configuration given as rows."""
    r = len(v)
    n = len(v[0])
    vals = tuple(det_sign([[row[c] for c in s] for row in v]) for s in colex_subsets(n, r))
    return Chirotope(r, n, vals)


def perturb(chi: Chirotope, eps: Chirotope) -> Chirotope:
    """Basis-wise composition ``chi o eps`` with a uniform chirotope ``eps``."""
    if (chi.r, chi.n) != (eps.r, eps.n):
        raise ArgumentError("perturbation needs a chirotope of the same rank and size")
    if not is_uniform(eps):
        raise ArgumentError("perturbing chirotope must be uniform")
    return Chirotope(chi.r, chi.n, tuple(a if a else b for a, b in zip(chi.values, eps.values)))


# -- symmetries and orbit minimisation ----------------------------------------


@dataclass(frozen=True)
class Symmetry:
    """The map ``chi -> _{-A}(sigma . chi)``: relabel by ``perm`` then reorient ``flips``.

    ``perm[i-1] = sigma(i)`` and ``flips`` are 1-based.
    """

    perm: tuple[int, ...]
    flips: frozenset[int] = frozenset()

    def __post_init__(self):
        n = len(self.perm)
        if sorted(self.perm) != list(range(1, n + 1)):
            raise ArgumentError(f"{self.perm} is not a permutation")
        if any(not 1 <= e <= n for e in self.flips):
            raise ArgumentError("flip set not inside the ground set")
        object.__setattr__(self, "flips", frozenset(self.flips))

    @classmethod
    def identity(cls, n: int) -> Symmetry:
        return cls(tuple(range(1, n + 1)))

    def apply(self, chi: Chirotope) -> Chirotope:
        return reorient(relabel(chi, self.perm), self.flips)

    def then(self, other: Symmetry) -> Symmetry:
        """The symmetry applying ``self`` first and ``other`` second."""
        # R_A2 P_s2 R_A1 P_s1 = R_{A2 ^ s2^-1(A1)} P_{s1 o s2}
        inv2 = {v: i + 1 for i, v in enumerate(other.perm)}
        perm = tuple(self.perm[other.perm[i] - 1] for i in range(len(self.perm)))
        flips = other.flips.symmetric_difference(inv2[a] for a in self.flips)
        return Symmetry(perm, flips)

    def inverse(self) -> Symmetry:
        inv = [0] * len(self.perm)
        for i, v in enumerate(self.perm):
            inv[v - 1] = i + 1
        return Symmetry(tuple(inv), frozenset(self.perm[a - 1] for a in self.flips))


_LEX_KEY = np.array([1, 2, 0], dtype=np.int8)  # key[v + 1]: '+' < '-' < '0'


def lex_key(values) -> np.ndarray:
    return _LEX_KEY[np.asarray(values, dtype=np.int64) + 1]


def lexmin_row(keys: np.ndarray) -> int:
    """Index of the lexicographically smallest row of a 2-d key array."""
    cand = np.arange(keys.shape[0])
    for k in range(keys.shape[1]):
        col = keys[cand, k]
        m = col.min()
        cand = cand[col == m]
        if len(cand) == 1:
            break
    return int(cand[0])


class ActionTable:
    """A finite set of symmetries acting on rank r chirotopes on [n], vectorised.

    Row ``g`` of the image array is ``sgn[g] * values[idx[g]]``.
    """

    def __init__(self, r: int, n: int, symmetries: Sequence[Symmetry]):
        self.r, self.n = r, n
        self.symmetries = list(symmetries)
        perms0 = np.array([[p - 1 for p in g.perm] for g in self.symmetries], dtype=np.int64)
        masks = [sum(1 << (e - 1) for e in g.flips) for g in self.symmetries]
        idx, par = relabel_tables(r, n, perms0)
        self.idx = idx
        self.sgn = (par * flip_sign_table(r, n, masks)).astype(np.int8)

    def __len__(self):
        return len(self.symmetries)

    def images(self, chi: Chirotope, normalize: bool = True) -> np.ndarray:
        imgs = chi.array[self.idx] * self.sgn
        if normalize:
            nz = imgs != 0
            first = imgs[np.arange(len(imgs)), nz.argmax(axis=1)]
            first[first == 0] = 1
            imgs = imgs * first[:, None]
        return imgs

    def canonical(self, chi: Chirotope) -> tuple[Chirotope, Symmetry]:
        """Orbit minimum of the normalized images and a symmetry reaching it (up to sign)."""
        imgs = self.images(chi)
        g = lexmin_row(lex_key(imgs))
        return Chirotope.from_array(self.r, self.n, imgs[g]), self.symmetries[g]

    def stabilizer_size(self, chi: Chirotope) -> int:
        return int((self.images(chi) == chi.normalized().array).all(axis=1).sum())
