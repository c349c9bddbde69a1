"""Orientations of the n-cube graph.

Vertices are bitmasks over ``[n]`` (bit ``i`` is coordinate ``i + 1``) and
directions are 0-based inside the encoding.  Edge ``(i, v)`` with bit ``i`` of
``v`` clear has index ``i * 2^(n-1) + rank(v)``, where ``rank`` deletes bit
``i``; its bit is 1 iff the edge points from ``v`` to ``v | 1 << i``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from graphlib import CycleError, TopologicalSorter
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import ArgumentError, DegeneracyError, DimensionError, DomainError, ParseError
from .extension import ExtensionSignature
from .lcp import edge_sign, is_p_matrix
from .pivoting import PivotRule, walk
from .pmatroid import complementary_tuple
from .signs import colex_index, tuple_parity


def vertex_of(elements: Iterable[int]) -> int:
    """Bitmask of a set of 1-based coordinates."""
    return sum(1 << (e - 1) for e in set(elements))


def vertex_set(v: int) -> frozenset[int]:
    return frozenset(i + 1 for i in range(v.bit_length()) if v >> i & 1)


def _compress(v: int, i: int) -> int:
    return (v & ((1 << i) - 1)) | ((v >> (i + 1)) << i)


def _expand(w: int, i: int) -> int:
    """Inverse of :func:`_compress` with bit ``i`` clear."""
    return (w & ((1 << i) - 1)) | ((w >> i) << (i + 1))


def edge_index(n: int, v: int, i: int) -> int:
    return i * 2 ** (n - 1) + _compress(v, i)


@dataclass(frozen=True)
class CubeOrientation:
    n: int
    code: int

    def __post_init__(self):
        if self.n < 1:
            raise ArgumentError("cube dimension must be positive")
        if not 0 <= self.code < 1 << self.num_edges:
            raise ArgumentError("orientation code out of range")

    @property
    def num_edges(self) -> int:
        return self.n * 2 ** (self.n - 1)

    def points_up(self, v: int, i: int) -> bool:
        """Edge in direction ``i`` (0-based) at ``v`` points toward the endpoint having bit ``i``."""
        return bool(self.code >> edge_index(self.n, v, i) & 1)

    def is_outgoing(self, v: int, i: int) -> bool:
        return self.points_up(v, i) != bool(v >> i & 1)

    def outmap(self, v: int) -> int:
        """Mask of outgoing directions at ``v``."""
        return sum(1 << i for i in range(self.n) if self.is_outgoing(v, i))

    def outmaps(self) -> list[int]:
        return [self.outmap(v) for v in range(2**self.n)]

    def outgoing(self, v: int) -> list[int]:
        return [i for i in range(self.n) if self.is_outgoing(v, i)]

    @classmethod
    def from_outmaps(cls, n: int, s) -> CubeOrientation:
        if len(s) != 2**n:
            raise DimensionError(f"need {2**n} outmap values")
        code = 0
        for v in range(2**n):
            for i in range(n):
                out = bool(s[v] >> i & 1)
                up = out != bool(v >> i & 1)
                other = not bool(s[v ^ (1 << i)] >> i & 1)
                if out != other:
                    raise ArgumentError(f"outmaps disagree on the edge at {v} in direction {i}")
                if up:
                    code |= 1 << edge_index(n, v, i)
        return cls(n, code)

    @classmethod
    def uniform(cls, n: int, sink: int) -> CubeOrientation:
        """Every edge points toward ``sink``."""
        return cls.from_outmaps(n, [v ^ sink for v in range(2**n)])

    def __str__(self):
        nbytes = (self.num_edges + 7) // 8
        return f"{self.n} {self.code.to_bytes(nbytes, 'little').hex()}"

    @classmethod
    def from_string(cls, text: str) -> CubeOrientation:
        try:
            n, hx = text.split()
            return cls(int(n), int.from_bytes(bytes.fromhex(hx), "little"))
        except ValueError as exc:
            raise ParseError(f"bad orientation {text!r}: {exc}") from None


# -- properties ----------------------------------------------------------------


def faces(n: int):
    """All ``3^n`` faces as ``(base, free)`` masks with ``base & free == 0``."""
    for free in range(2**n):
        fixed = (2**n - 1) ^ free
        sub = fixed
        while True:
            yield sub, free
            if sub == 0:
                break
            sub = (sub - 1) & fixed


def _face_vertices(base: int, free: int) -> list[int]:
    out = []
    sub = free
    while True:
        out.append(base | sub)
        if sub == 0:
            break
        sub = (sub - 1) & free
    return out


def is_uso(o: CubeOrientation) -> bool:
    """Exactly one sink and one source in every face."""
    s = o.outmaps()
    for base, free in faces(o.n):
        d = bin(free).count("1")
        sinks = sources = 0
        for v in _face_vertices(base, free):
            k = bin(s[v] & free).count("1")
            sinks += k == 0
            sources += k == d
        if sinks != 1 or sources != 1:
            return False
    return True


def is_acyclic(o: CubeOrientation) -> bool:
    graph = {v: [v ^ (1 << i) for i in range(o.n) if not o.is_outgoing(v, i)] for v in range(2**o.n)}
    try:
        TopologicalSorter(graph).prepare()
    except CycleError:
        return False
    return True


def find_sink(o: CubeOrientation) -> int:
    sinks = [v for v, s in enumerate(o.outmaps()) if s == 0]
    if len(sinks) != 1:
        raise DomainError(f"orientation has {len(sinks)} global sinks")
    return sinks[0]


def vertex_disjoint_paths(succ: dict[int, list[int]], source: int, target: int) -> int:
    """Maximum number of internally vertex-disjoint ``source -> target`` paths
    (unit-capacity max-flow on the vertex-split graph, BFS augmentation)."""
    cap: dict[tuple, dict[tuple, int]] = {}

    def add(a, b):
        cap.setdefault(a, {})[b] = cap.get(a, {}).get(b, 0) + 1
        cap.setdefault(b, {}).setdefault(a, 0)

    for v, targets in succ.items():
        if v not in (source, target):
            add((v, 0), (v, 1))
        for w in targets:
            add((v, 1) if v != target else (v, 0), (w, 0))
    s, t = (source, 1), (target, 0)
    if source == target:
        return 0
    cap.setdefault(s, {})
    flow = 0
    while True:
        parent = {s: None}
        queue = deque([s])
        while queue and t not in parent:
            a = queue.popleft()
            for b, c in cap.get(a, {}).items():
                if c > 0 and b not in parent:
                    parent[b] = a
                    queue.append(b)
        if t not in parent:
            return flow
        b = t
        while parent[b] is not None:
            a = parent[b]
            cap[a][b] -= 1
            cap[b][a] += 1
            b = a
        flow += 1


def holt_klee(o: CubeOrientation) -> bool:
    """Every d-face has d vertex-disjoint directed paths from its source to its sink."""
    if not is_uso(o):
        raise DomainError("Holt-Klee check needs a unique sink orientation")
    s = o.outmaps()
    for base, free in faces(o.n):
        d = bin(free).count("1")
        if d < 2:
            continue
        verts = _face_vertices(base, free)
        succ = {v: [v ^ (1 << i) for i in range(o.n) if free >> i & 1 and s[v] >> i & 1] for v in verts}
        src = next(v for v in verts if bin(s[v] & free).count("1") == d)
        snk = next(v for v in verts if s[v] & free == 0)
        if vertex_disjoint_paths(succ, src, snk) < d:
            return False
    return True


# -- symmetries ----------------------------------------------------------------


def facet_switch(o: CubeOrientation, i: int) -> CubeOrientation:
    """Reverse every edge in direction ``i`` (1-based)."""
    if not 1 <= i <= o.n:
        raise ArgumentError(f"direction {i} not in [{o.n}]")
    half = 2 ** (o.n - 1)
    return CubeOrientation(o.n, o.code ^ (((1 << half) - 1) << ((i - 1) * half)))


@dataclass(frozen=True)
class CubeIsomorphism:
    """``v -> perm(v) xor mask`` where ``perm[i]`` is the image of direction ``i`` (0-based)."""

    perm: tuple[int, ...]
    mask: int = 0

    def vertex(self, v: int) -> int:
        return sum(1 << p for i, p in enumerate(self.perm) if v >> i & 1) ^ self.mask

    def edge_map(self) -> tuple[list[int], int]:
        """New position of every edge bit and the xor mask applied afterwards."""
        n = len(self.perm)
        pos = [0] * (n * 2 ** (n - 1))
        xor = 0
        for i in range(n):
            pi = self.perm[i]
            for w in range(2 ** (n - 1)):
                v = _expand(w, i)
                low = self.vertex(v) & ~(1 << pi)
                e_new = edge_index(n, low, pi)
                pos[edge_index(n, v, i)] = e_new
                if self.mask >> pi & 1:
                    xor |= 1 << e_new
        return pos, xor

    def apply(self, o: CubeOrientation) -> CubeOrientation:
        pos, xor = self.edge_map()
        code = 0
        for e, p in enumerate(pos):
            if o.code >> e & 1:
                code |= 1 << p
        return CubeOrientation(o.n, code ^ xor)


def cube_isomorphisms(n: int) -> list[CubeIsomorphism]:
    return [CubeIsomorphism(p, m) for p in itertools.permutations(range(n)) for m in range(2**n)]


@lru_cache(maxsize=None)
def _group_luts(n: int, with_switches: bool) -> np.ndarray:
    """Per group element and code byte, the image bits of that byte: ``(G, B, 256)``."""
    edges = n * 2 ** (n - 1)
    nbytes = (edges + 7) // 8
    half = 2 ** (n - 1)
    switch_masks = [0]
    if with_switches:
        switch_masks = [
            sum(((1 << half) - 1) << (i * half) for i in range(n) if f >> i & 1) for f in range(2**n)
        ]
    luts = []
    for iso in cube_isomorphisms(n):
        pos, xor = iso.edge_map()
        for sw in switch_masks:
            # g(switch(o)): bit e goes to pos[e] after xoring sw
            lut = np.zeros((nbytes, 256), dtype=np.uint64)
            for b in range(nbytes):
                for val in range(256):
                    out = 0
                    for k in range(8):
                        e = 8 * b + k
                        if e < edges and ((val >> k & 1) ^ (sw >> e & 1)):
                            out |= 1 << pos[e]
                    lut[b, val] = out
            lut[0] ^= np.uint64(xor)
            luts.append(lut)
    return np.array(luts, dtype=np.uint64)


def canonical_codes(codes, n: int, with_switches: bool = False, chunk: int = 2048) -> np.ndarray:
    """Minimum image code under cube isomorphisms (and facet switches) for a batch of codes."""
    if n > 4:
        return np.array([_canonical_slow(CubeOrientation(n, int(c)), with_switches).code for c in codes], dtype=object)
    luts = _group_luts(n, with_switches)
    codes = np.asarray(codes, dtype=np.uint64).reshape(-1)
    out = np.empty(len(codes), dtype=np.uint64)
    nbytes = luts.shape[1]
    for lo in range(0, len(codes), chunk):
        c = codes[lo : lo + chunk]
        img = np.zeros((luts.shape[0], len(c)), dtype=np.uint64)
        for b in range(nbytes):
            byte = ((c >> np.uint64(8 * b)) & np.uint64(255)).astype(np.int64)
            img ^= luts[:, b, byte]
        out[lo : lo + chunk] = img.min(axis=0)
    return out


def _canonical_slow(o: CubeOrientation, with_switches: bool) -> CubeOrientation:
    variants = [o]
    if with_switches:
        variants = []
        for f in range(2**o.n):
            x = o
            for i in range(o.n):
                if f >> i & 1:
                    x = facet_switch(x, i + 1)
            variants.append(x)
    best = min(g.apply(x).code for g in cube_isomorphisms(o.n) for x in variants)
    return CubeOrientation(o.n, best)


def iso_canonical_form(o: CubeOrientation) -> CubeOrientation:
    return CubeOrientation(o.n, int(canonical_codes([o.code], o.n)[0]))


def iso_fs_canonical_form(o: CubeOrientation) -> CubeOrientation:
    return CubeOrientation(o.n, int(canonical_codes([o.code], o.n, True)[0]))


# -- orientations from complementarity data -----------------------------------


def orient_from_extension(ext: ExtensionSignature) -> CubeOrientation:
    """Edge at ``B`` in direction ``i`` leaves ``B`` iff
    ``chi^(b_1..b_n) * chi^(b_1..p..b_n) = +`` with ``p`` in slot ``i``."""
    n = ext.base.r
    if ext.base.n != 2 * n:
        raise ArgumentError("orientation needs an extension of a rank n chirotope on [2n]")
    tables = _edge_tables(n)
    base = np.array(ext.base.values, dtype=np.int8)
    new = np.array(ext.new_values, dtype=np.int8)
    prod = tables[1] * base[tables[0]] * new[tables[2]]
    if (prod == 0).any():
        raise DegeneracyError("extension is degenerate on a complementary slot")
    code = int(((prod > 0).astype(np.int64) << np.arange(len(prod))).sum())
    return CubeOrientation(n, code)


@lru_cache(maxsize=None)
def _edge_tables(n: int):
    """Per edge (from its low endpoint): base position, combined parity, new-value position."""
    size = 2 * n
    base_index = colex_index(size, n)
    new_index = colex_index(size, n - 1)
    edges = n * 2 ** (n - 1)
    bpos = np.zeros(edges, dtype=np.int64)
    npos = np.zeros(edges, dtype=np.int64)
    par = np.zeros(edges, dtype=np.int8)
    for i in range(n):
        for w in range(2 ** (n - 1)):
            v = _expand(w, i)
            e = edge_index(n, v, i)
            b = tuple(x - 1 for x in complementary_tuple(v, n))
            swapped = b[:i] + (size,) + b[i + 1 :]
            bpos[e] = base_index[tuple(sorted(b))]
            rest = tuple(sorted(x for x in swapped if x != size))
            npos[e] = new_index[rest]
            par[e] = tuple_parity(b) * tuple_parity(swapped)
    return bpos, par, npos


def orientation_codes(base_values, new_values: np.ndarray, n: int) -> np.ndarray:
    """Batch :func:`orient_from_extension` for uniform extensions of one base."""
    bpos, par, npos = _edge_tables(n)
    base = np.asarray(base_values, dtype=np.int8)
    prod = (par * base[bpos])[None, :] * np.asarray(new_values)[:, npos]
    weights = np.uint64(1) << np.arange(len(bpos), dtype=np.uint64)
    return ((prod > 0).astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)


def orient_from_lcp(m, q) -> CubeOrientation:
    """Edge at ``B`` in direction ``i`` leaves ``B`` iff ``det(A_B) det(A_B[i, q]) < 0``."""
    if not is_p_matrix(m):
        raise DomainError("matrix is not a P-matrix")
    n = len(q)
    code = 0
    for i in range(n):
        for w in range(2 ** (n - 1)):
            v = _expand(w, i)
            s = edge_sign(m, q, v, i + 1)
            if s == 0:
                raise DegeneracyError(f"degenerate instance at basis {v:b}, index {i + 1}")
            if s < 0:
                code |= 1 << edge_index(n, v, i)
    return CubeOrientation(n, code)


# -- pivot simulation ----------------------------------------------------------


@dataclass(frozen=True)
class SppRun:
    path: tuple[int, ...]  # vertices visited after the start
    cycled: bool = False

    @property
    def end(self) -> int | None:
        return None if self.cycled else (self.path[-1] if self.path else None)


def spp_simulate(o: CubeOrientation, start: int, rule="least-index", seed: int | None = None) -> SppRun:
    """Follow outgoing edges chosen by the pivot rule until a sink is reached."""
    if not 0 <= start < 2**o.n:
        raise ArgumentError(f"vertex {start} not in the {o.n}-cube")
    path, cut = walk(start, o.n, o.outgoing, PivotRule.parse(rule, seed))
    return SppRun(tuple(path), cut)


# -- classification ------------------------------------------------------------


@dataclass
class ClassInfo:
    acyclic: bool
    holt_klee: bool
    witness: str = ""
    members: int = 1  # raw orientations seen in this class


@dataclass
class OrientationClassTable:
    n: int
    iso: dict[int, ClassInfo] = field(default_factory=dict)
    iso_fs: dict[int, ClassInfo] = field(default_factory=dict)

    @property
    def iso_count(self) -> int:
        return len(self.iso)

    @property
    def acyclic_count(self) -> int:
        return sum(c.acyclic for c in self.iso.values())

    @property
    def fs_count(self) -> int:
        return len(self.iso_fs)

    def add_codes(self, witnesses: dict[int, str]) -> None:
        """Merge raw orientation codes (with one witness string each)."""
        if not witnesses:
            return
        raw = np.array(sorted(witnesses), dtype=np.uint64)
        for table, fs in ((self.iso, False), (self.iso_fs, True)):
            canon = canonical_codes(raw, self.n, fs)
            for c, key in zip(raw.tolist(), canon.tolist()):
                key = int(key)
                info = table.get(key)
                if info is None:
                    o = CubeOrientation(self.n, key)
                    uso = is_uso(o)
                    table[key] = ClassInfo(is_acyclic(o), uso and holt_klee(o), witnesses[c], 1)
                else:
                    info.members += 1

    def merge(self, other: OrientationClassTable) -> None:
        for mine, theirs in ((self.iso, other.iso), (self.iso_fs, other.iso_fs)):
            for key, info in theirs.items():
                if key in mine:
                    mine[key].members += info.members
                    if info.witness < mine[key].witness:
                        mine[key].witness = info.witness
                else:
                    mine[key] = ClassInfo(info.acyclic, info.holt_klee, info.witness, info.members)

    def records(self) -> list[str]:
        out = []
        for kind, table in (("iso", self.iso), ("iso-fs", self.iso_fs)):
            for key in sorted(table):
                c = table[key]
                o = CubeOrientation(self.n, key)
                out.append(f"{kind}\t{o}\t{int(c.acyclic)}\t{int(c.holt_klee)}\t{c.witness}")
        return out

    def save(self, path) -> None:
        Path(path).write_text("".join(line + "\n" for line in self.records()))

    @classmethod
    def load(cls, path, n: int) -> OrientationClassTable:
        t = cls(n)
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            try:
                kind, text, acyc, hk, witness = line.split("\t")
                o = CubeOrientation.from_string(text)
            except ValueError as exc:
                raise ParseError(f"bad orientation record: {exc}", line=lineno) from None
            table = t.iso if kind == "iso" else t.iso_fs
            table[o.code] = ClassInfo(acyc == "1", hk == "1", witness, 0)
        return t


def classify_orientations(extensions: Iterable[ExtensionSignature], n: int | None = None) -> OrientationClassTable:
    """Deduplicate the induced orientations and classify them at both granularities."""
    witnesses: dict[int, str] = {}
    for ext in extensions:
        n = ext.base.r if n is None else n
        code = orient_from_extension(ext).code
        text = str(ext)
        if code not in witnesses or text < witnesses[code]:
            witnesses[code] = text
    table = OrientationClassTable(n or 0)
    table.add_codes(witnesses)
    return table


def all_usos(n: int) -> list[CubeOrientation]:
    """Brute force over all ``2^(n 2^(n-1))`` orientations (small n only)."""
    edges = n * 2 ** (n - 1)
    if edges > 16:
        raise ArgumentError("brute-force USO search is limited to n <= 3")
    return [o for o in (CubeOrientation(n, c) for c in range(2**edges)) if is_uso(o)]

