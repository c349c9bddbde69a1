"""P-matroids on the complementary ground set [2n]: recognition, symmetry, enumeration.

Elements ``i`` and ``i + n`` are complementary.  Two symmetry groups act on
P-matroids: C (relabelings commuting with complementation, order n! 2^n) and
CFS (C combined with reorientations of complement-closed sets, order
n! 4^n).  Canonical forms are orbit minima of normalized value strings in
colex order with ``+ < - < 0``.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .chirotope import (
    ActionTable,
    Chirotope,
    Symmetry,
    evaluate,
    flip_sign_table,
    gp_relations,
    lex_key,
    relabel,
    relabel_tables,
    reorient,
)
from .errors import ArgumentError, ParseError
from .signs import colex_index, colex_subsets, tuple_parity

log = logging.getLogger(__name__)

SUPPORTED_ORDERS = (2, 3, 4)


def complement(i: int, n: int) -> int:
    """The complementary element of ``i`` in ``[2n]``."""
    if not 1 <= i <= 2 * n:
        raise ArgumentError(f"{i} not in [{2 * n}]")
    return i + n if i <= n else i - n


def complementary_tuple(vertex: int, n: int) -> tuple[int, ...]:
    """``(b_1, .., b_n)`` with ``b_j = j + n`` if bit ``j-1`` of ``vertex`` is set, else ``j``."""
    return tuple(j + 1 + n if vertex >> j & 1 else j + 1 for j in range(n))


def _check_order(chi: Chirotope) -> int:
    if chi.n != 2 * chi.r:
        raise ArgumentError(f"need rank n on [2n], got rank {chi.r} on [{chi.n}]")
    return chi.r


def is_p_matroid(chi: Chirotope) -> bool:
    """Sign alternation on complementary tuples: swapping ``b_i`` for its
    complement flips the (nonzero) chirotope value."""
    n = _check_order(chi)
    for v in range(2**n):
        b = complementary_tuple(v, n)
        base = evaluate(chi, b)
        if base == 0:
            return False
        for i in range(n):
            swapped = b[:i] + (complement(b[i], n),) + b[i + 1 :]
            if evaluate(chi, swapped) != -base:
                return False
    return True


@lru_cache(maxsize=None)
def complementary_positions(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Colex positions of the complementary bases and the signs ``s`` with
    ``chi[pos] * s`` constant for every P-matroid."""
    index = colex_index(2 * n, n)
    pos, sgn = [], []
    for v in range(2**n):
        b = tuple(e - 1 for e in complementary_tuple(v, n))
        pos.append(index[tuple(sorted(b))])
        sgn.append(tuple_parity(b) * (-1) ** bin(v).count("1"))
    return np.array(pos, dtype=np.int64), np.array(sgn, dtype=np.int8)


def p_matroid_mask(values: np.ndarray, n: int) -> np.ndarray:
    """Vectorised :func:`is_p_matroid` over the rows of a ``(M, K)`` sign array."""
    pos, sgn = complementary_positions(n)
    v = np.asarray(values)[:, pos] * sgn
    return (v[:, :1] != 0).ravel() & (v == v[:, :1]).all(axis=1)


# -- the symmetry groups -------------------------------------------------------


@dataclass(frozen=True)
class CfsElement:
    """``chi -> sigma . (_{-A} chi)``: reorient by ``flips`` then relabel by ``perm``.

    ``perm[i-1] = sigma(i)`` on ``[2n]``; ``sigma`` commutes with complementation
    and ``flips`` is complement-closed.
    """

    perm: tuple[int, ...]
    flips: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(self.perm))
        object.__setattr__(self, "flips", frozenset(self.flips))
        size = len(self.perm)
        if size % 2 or sorted(self.perm) != list(range(1, size + 1)):
            raise ArgumentError(f"{self.perm} is not a permutation of [2n]")
        n = size // 2
        for i in range(1, size + 1):
            if self.perm[complement(i, n) - 1] != complement(self.perm[i - 1], n):
                raise ArgumentError(f"{self.perm} does not commute with complementation")
        for a in self.flips:
            if not 1 <= a <= size or complement(a, n) not in self.flips:
                raise ArgumentError(f"flip set {sorted(self.flips)} is not complement-closed")

    @property
    def n(self) -> int:
        return len(self.perm) // 2

    @classmethod
    def build(cls, pair_perm: Sequence[int], swapped: Iterable[int] = (), flipped: Iterable[int] = ()):
        """Element sending pair ``i`` to pair ``pair_perm[i-1]``, exchanging the two
        members for ``i`` in ``swapped`` and flipping the pairs in ``flipped``."""
        n = len(pair_perm)
        swapped = set(swapped)
        perm = [0] * (2 * n)
        for i in range(1, n + 1):
            a, b = pair_perm[i - 1], pair_perm[i - 1] + n
            if i in swapped:
                a, b = b, a
            perm[i - 1], perm[i + n - 1] = a, b
        flips = {e for i in flipped for e in (i, i + n)}
        return cls(tuple(perm), frozenset(flips))

    @classmethod
    def identity(cls, n: int) -> CfsElement:
        return cls(tuple(range(1, 2 * n + 1)))

    def as_symmetry(self) -> Symmetry:
        # relabel o reorient(A) == reorient(sigma^-1(A)) o relabel
        inv = {v: i + 1 for i, v in enumerate(self.perm)}
        return Symmetry(self.perm, frozenset(inv[a] for a in self.flips))

    def inverse(self) -> CfsElement:
        inv = [0] * len(self.perm)
        for i, v in enumerate(self.perm):
            inv[v - 1] = i + 1
        return CfsElement(tuple(inv), frozenset(self.perm[a - 1] for a in self.flips))


def cfs_apply(chi: Chirotope, g: CfsElement) -> Chirotope:
    if chi.n != len(g.perm):
        raise ArgumentError("group element and chirotope live on different ground sets")
    return relabel(reorient(chi, g.flips), g.perm)


@lru_cache(maxsize=None)
def c_group(n: int) -> tuple[CfsElement, ...]:
    return tuple(
        CfsElement.build([p + 1 for p in pi], [i + 1 for i in range(n) if m >> i & 1])
        for pi in itertools.permutations(range(n))
        for m in range(2**n)
    )


@lru_cache(maxsize=None)
def fs_group(n: int) -> tuple[CfsElement, ...]:
    ident = list(range(1, n + 1))
    return tuple(CfsElement.build(ident, (), [i + 1 for i in range(n) if f >> i & 1]) for f in range(2**n))


@lru_cache(maxsize=None)
def cfs_group(n: int) -> tuple[CfsElement, ...]:
    return tuple(
        CfsElement(g.perm, frozenset(f.flips)) for g in c_group(n) for f in fs_group(n)
    )


@lru_cache(maxsize=None)
def _action_table(n: int, kind: str) -> ActionTable:
    group = {"c": c_group, "cfs": cfs_group, "fs": fs_group}[kind](n)
    return ActionTable(n, 2 * n, [g.as_symmetry() for g in group])


def c_canonical_form(chi: Chirotope) -> Chirotope:
    return _action_table(_check_order(chi), "c").canonical(chi)[0]


def cfs_canonical_form(chi: Chirotope) -> Chirotope:
    return _action_table(_check_order(chi), "cfs").canonical(chi)[0]


def orbit_size(chi: Chirotope, kind: str = "cfs") -> int:
    """Number of oriented matroids (chirotopes up to sign) in the orbit of ``chi``."""
    table = _action_table(_check_order(chi), kind)
    return len(table) // table.stabilizer_size(chi)


# -- enumeration ---------------------------------------------------------------


@dataclass
class PMatroidClassTable:
    """CFS-class representatives (canonical, sorted) with orbit sizes, plus the
    C-classes stored compactly as an int8 value array."""

    n: int
    representatives: list[Chirotope]
    sizes: list[int]
    c_values: np.ndarray
    c_sizes: np.ndarray
    provenance: str = "backtracking"
    labeled_count: int = 0

    @property
    def cfs_count(self) -> int:
        return len(self.representatives)

    @property
    def c_count(self) -> int:
        return len(self.c_values)

    def c_representatives(self) -> list[Chirotope]:
        return [Chirotope.from_array(self.n, 2 * self.n, row) for row in self.c_values]

    def save(self, path) -> None:
        lines = [f"# n={self.n} provenance={self.provenance} labeled={self.labeled_count}"]
        lines += [f"cfs\t{chi}\t{size}\t{self.provenance}" for chi, size in zip(self.representatives, self.sizes)]
        n = self.n
        lines += [
            f"c\t{Chirotope.from_array(n, 2 * n, row)}\t{int(size)}\t{self.provenance}"
            for row, size in zip(self.c_values, self.c_sizes)
        ]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> PMatroidClassTable:
        reps, sizes, cvals, csizes = [], [], [], []
        n = labeled = None
        provenance = "backtracking"
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            if line.startswith("#"):
                meta = dict(kv.split("=", 1) for kv in line[1:].split())
                n, provenance, labeled = int(meta["n"]), meta["provenance"], int(meta["labeled"])
                continue
            try:
                kind, text, size, provenance = line.split("\t")
                chi = Chirotope.from_string(text)
            except ValueError as exc:
                raise ParseError(f"bad class table record: {exc}", line=lineno) from None
            if kind == "cfs":
                reps.append(chi)
                sizes.append(int(size))
            else:
                cvals.append(chi.values)
                csizes.append(int(size))
        if n is None:
            raise ParseError("class table has no header line", line=1)
        return cls(n, reps, sizes, np.array(cvals, dtype=np.int8).reshape(-1, math.comb(2 * n, n)),
                   np.array(csizes, dtype=np.int64), provenance, labeled)


def _key(values) -> bytes:
    return lex_key(values).tobytes()


def _sorted_unique(values: np.ndarray, sizes: np.ndarray):
    seen = {}
    for k in range(len(values)):
        seen.setdefault(values[k].tobytes(), k)
    order = sorted(seen.values(), key=lambda k: _key(values[k]))
    return values[order], sizes[order]


@lru_cache(maxsize=None)
def _search_setup(n: int):
    """Initial values with the forced complementary bases, free positions, relations."""
    size = math.comb(2 * n, n)
    pos, sgn = complementary_positions(n)
    x0 = np.zeros(size, dtype=np.int8)
    x0[pos] = sgn  # normalized: chi(1..n) = +
    free = np.array([k for k in range(size) if k not in set(pos.tolist())], dtype=np.int64)
    relpos, relsg = gp_relations(n, 2 * n)
    return x0, free, relpos, relsg


def search_prefixes(n: int, depth: int) -> list[tuple[int, ...]]:
    """Feasible sign assignments to the first ``depth`` free positions."""
    x0, free, relpos, relsg = _search_setup(n)
    depth = min(depth, len(free))
    if depth == 0:
        return [()]
    # only relations among preassigned and prefix positions are decided
    assigned = np.concatenate([np.flatnonzero(x0), free[:depth]])
    inside = np.isin(relpos, assigned).all(axis=1)
    pos, sgn, start, _ = _kernels.order_relations(relpos[inside], relsg[inside], free[:depth], len(x0))
    leaves = _kernels.dfs_leaves(x0, free[:depth], pos, sgn, start)
    return [tuple(int(v) for v in row) for row in leaves]


@dataclass
class SearchPart:
    """Result of searching one prefix subtree; parts merge by concatenation."""

    labeled: int = 0
    cfs_values: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), np.int8))
    cfs_stab: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    c_values: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), np.int8))
    c_stab: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))


def search_subtree(n: int, prefix: Sequence[int] = ()) -> SearchPart:
    """Backtracking over the free positions below ``prefix``; keeps orbit minima."""
    x0, free, relpos, relsg = _search_setup(n)
    x = x0.copy()
    x[free[: len(prefix)]] = prefix
    rest = free[len(prefix) :]
    pos, sgn, start, (fpos, fsgn) = _kernels.order_relations(relpos, relsg, rest, len(x))
    g = _action_table(n, "cfs")
    h = _action_table(n, "c")
    if _kernels.violated_any(x, fpos, fsgn):
        return SearchPart()
    if len(rest) == 0:
        sg_ = _kernels.orbit_min_stabilizer(x, g.idx, g.sgn)
        sh = _kernels.orbit_min_stabilizer(x, h.idx, h.sgn)
        return SearchPart(
            1,
            x[None, :] if sg_ else np.zeros((0, len(x)), np.int8),
            np.array([sg_] if sg_ else [], np.int64),
            x[None, :] if sh else np.zeros((0, len(x)), np.int8),
            np.array([sh] if sh else [], np.int64),
        )
    leaves, rg, sg_, rh, sh = _kernels.dfs_orbit_representatives(x, rest, pos, sgn, start, g.idx, g.sgn, h.idx, h.sgn)
    return SearchPart(int(leaves), rg.copy(), sg_.copy(), rh.copy(), sh.copy())


def assemble_table(n: int, parts: Iterable[SearchPart], provenance: str = "backtracking") -> PMatroidClassTable:
    parts = list(parts)
    size = math.comb(2 * n, n)
    g_order = len(cfs_group(n))
    h_order = len(c_group(n))

    def cat(attr, width):
        arrs = [getattr(p, attr).reshape(-1, width) if width else getattr(p, attr) for p in parts]
        arrs = [a for a in arrs if len(a)]
        if not arrs:
            return np.zeros((0, width), np.int8) if width else np.zeros(0, np.int64)
        return np.concatenate(arrs)

    cfs_vals, cfs_sizes = _sorted_unique(cat("cfs_values", size), g_order // cat("cfs_stab", 0))
    c_vals, c_sizes = _sorted_unique(cat("c_values", size), h_order // cat("c_stab", 0))
    return PMatroidClassTable(
        n,
        [Chirotope.from_array(n, 2 * n, row) for row in cfs_vals],
        [int(s) for s in cfs_sizes],
        c_vals,
        c_sizes.astype(np.int64),
        provenance,
        int(c_sizes.sum()),
    )


def enumerate_uniform_p_matroids(n: int, source: str = "backtracking", database=None) -> PMatroidClassTable:
    """All uniform P-matroids in OM(n, 2n) up to CFS (and C) equivalence.

    ``source="database"`` takes ``database``, an iterable of reorientation-class
    representatives (chirotopes of rank n on [2n]), instead of searching.
    """
    if n not in SUPPORTED_ORDERS:
        raise ArgumentError(f"unsupported order n={n}; expected one of {SUPPORTED_ORDERS}")
    if source == "backtracking":
        return assemble_table(n, [search_subtree(n)])
    if source == "database":
        if database is None:
            raise ArgumentError("database source needs representatives")
        return p_matroids_from_representatives(n, database)
    raise ArgumentError(f"unknown source {source!r}")


# -- reorientation classes -----------------------------------------------------


@lru_cache(maxsize=None)
def perfect_matchings(n: int) -> tuple[tuple[int, ...], ...]:
    """One relabeling per way of pairing up [2n]: ``perm`` with pairs
    ``(perm(i), perm(i+n))`` (1-based), first-element-minimal order."""

    def rec(rest):
        if not rest:
            yield ()
            return
        a = rest[0]
        for k in range(1, len(rest)):
            for m in rec(rest[1:k] + rest[k + 1 :]):
                yield ((a, rest[k]),) + m

    out = []
    for m in rec(tuple(range(1, 2 * n + 1))):
        out.append(tuple(p[0] for p in m) + tuple(p[1] for p in m))
    return tuple(out)


def p_matroids_in_reorientation_class(chi: Chirotope) -> np.ndarray:
    """All distinct normalized P-matroids ``_{-A}(tau . chi)`` with ``tau`` ranging
    over :func:`perfect_matchings` and ``A`` over all subsets of [2n].

    Every relabeling of ``chi`` is a C-relabeling of one of these ``tau``, so
    the C-orbits of the rows cover all P-matroids in the class.
    """
    n = _check_order(chi)
    size = 2 * n
    perms0 = np.array(perfect_matchings(n), dtype=np.int64) - 1
    idx, par = relabel_tables(n, size, perms0)
    flips = flip_sign_table(n, size, np.arange(2**size))
    found = set()
    rows = []
    for t in range(len(perms0)):
        cand = (chi.array[idx[t]] * par[t])[None, :] * flips
        cand = cand[p_matroid_mask(cand, n)]
        cand = cand * np.where(cand[:, :1] < 0, -1, 1).astype(np.int8)
        for row in cand:
            key = row.tobytes()
            if key not in found:
                found.add(key)
                rows.append(row)
    return np.array(rows, dtype=np.int8).reshape(-1, chi.array.shape[0])


def database_part(chi: Chirotope) -> SearchPart:
    """Canonical C- and CFS-representatives of the P-matroids in the reorientation class of ``chi``."""
    n = _check_order(chi)
    g = _action_table(n, "cfs")
    h = _action_table(n, "c")
    out = {}
    for table, name in ((g, "cfs"), (h, "c")):
        reps = {}
        for row in p_matroids_in_reorientation_class(chi):
            canon, _ = table.canonical(Chirotope.from_array(n, 2 * n, row))
            if canon.values not in reps:
                reps[canon.values] = table.stabilizer_size(canon)
        vals = np.array(list(reps), dtype=np.int8).reshape(-1, len(chi.values))
        out[name] = (vals, np.array(list(reps.values()), dtype=np.int64))
    return SearchPart(0, out["cfs"][0], out["cfs"][1], out["c"][0], out["c"][1])


def p_matroids_from_representatives(n: int, representatives: Iterable[Chirotope]) -> PMatroidClassTable:
    parts = []
    for rep in representatives:
        if (rep.r, rep.n) != (n, 2 * n):
            raise ArgumentError(f"representative {rep} is not in OM({n},{2 * n})")
        parts.append(database_part(rep))
    return assemble_table(n, parts, "database")


@lru_cache(maxsize=None)
def _reorientation_setup(r: int, size: int):
    perms0 = np.array(list(itertools.permutations(range(size))), dtype=np.int64)
    idx, par = relabel_tables(r, size, perms0)
    subsets = colex_subsets(size, r)
    k = len(subsets)
    # generators: flip element e, and the global sign (tag bit `size`)
    gens = [(np.array([e in s for s in subsets], dtype=np.uint8), 1 << e) for e in range(size)]
    gens.append((np.ones(k, dtype=np.uint8), 1 << size))
    rows, tags, pivots = [], [], []
    for vec, tag in gens:
        vec = vec.copy()
        for rv, rt, p in zip(rows, tags, pivots):
            if vec[p]:
                vec ^= rv
                tag ^= rt
        nz = np.flatnonzero(vec)
        if len(nz) == 0:
            continue
        p = int(nz[0])
        for j in range(len(rows)):
            if rows[j][p]:
                rows[j] ^= vec
                tags[j] ^= tag
        rows.append(vec)
        tags.append(tag)
        pivots.append(p)
    order = np.argsort(pivots)
    packed = [_kernels._pack(rows[j]) for j in order]
    return (
        perms0,
        idx.astype(np.int64),
        par,
        np.array([w[0] for w in packed], dtype=np.uint64),
        np.array([w[1] for w in packed], dtype=np.uint64),
        np.array([pivots[j] for j in order], dtype=np.int64),
        np.array([tags[j] for j in order], dtype=np.int64),
    )


def _unpack(w0: int, w1: int, k: int) -> tuple[int, ...]:
    bits = (int(w0) << 64) | int(w1)
    return tuple(-1 if bits >> (127 - j) & 1 else 1 for j in range(k))


@dataclass(frozen=True)
class Recovery:
    """``chi = sign * symmetry.apply(theta)`` for the class representative ``theta``."""

    symmetry: Symmetry
    sign: int = 1

    def apply(self, theta: Chirotope) -> Chirotope:
        out = self.symmetry.apply(theta)
        return out if self.sign == 1 else -out


def reorientation_canonical_form(chi: Chirotope) -> tuple[Chirotope, Recovery]:
    """Minimum of the reorientation class (all relabelings, reorientations and
    the global sign) of a uniform chirotope, and a map recovering ``chi``."""
    if not all(chi.values):
        raise ArgumentError("reorientation canonical form needs a uniform chirotope")
    perms0, idx, par, rows0, rows1, pivots, tags = _reorientation_setup(chi.r, chi.n)
    w0, w1, p, tag = _kernels.reorientation_minimum(chi.array, idx, par, rows0, rows1, pivots, tags)
    theta = Chirotope(chi.r, chi.n, _unpack(w0, w1, len(chi.values)))
    forward = Symmetry(tuple(int(e) + 1 for e in perms0[p]), frozenset(e + 1 for e in range(chi.n) if tag >> e & 1))
    sign = -1 if tag >> chi.n & 1 else 1
    rec = Recovery(forward.inverse(), sign)
    if rec.apply(theta) != chi:
        raise AssertionError("reorientation recovery map does not reproduce the input")
    return theta, rec


@dataclass
class CoverEntry:
    theta: Chirotope
    members: list[tuple[int, Recovery]]  # (index into the class table, recovery map)


def reorientation_class_cover(table: PMatroidClassTable) -> list[CoverEntry]:
    """Group the CFS representatives by reorientation class."""
    entries: dict[tuple, CoverEntry] = {}
    for k, chi in enumerate(table.representatives):
        theta, rec = reorientation_canonical_form(chi)
        entries.setdefault(theta.values, CoverEntry(theta, [])).members.append((k, rec))
    return [entries[key] for key in sorted(entries, key=_key)]
