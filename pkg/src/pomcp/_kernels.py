"""Compiled inner loops: sign backtracking, orbit-minimality tests, reorientation keys.

Everything here works on int8 sign arrays indexed by colex position and is
called from the pure-Python modules, which own the combinatorial set-up.
"""

from __future__ import annotations

import numpy as np
from numba import njit


def order_relations(relpos: np.ndarray, relsg: np.ndarray, free: np.ndarray, size: int):
    """Sort relations by the depth at which their last free position is assigned.

    Returns ``(pos, sgn, start, fixed)``: relations triggered at depth ``d``
    occupy rows ``start[d]:start[d+1]``; ``fixed`` holds the relations whose
    positions are all preassigned (to be checked once before searching).
    """
    depth = np.full(size, -1, dtype=np.int64)
    depth[free] = np.arange(len(free))
    trig = depth[relpos].max(axis=1) if len(relpos) else np.zeros(0, dtype=np.int64)
    order = np.argsort(trig, kind="stable")
    trig = trig[order]
    pos, sgn = relpos[order], relsg[order]
    start = np.searchsorted(trig, np.arange(len(free) + 1)).astype(np.int64)
    n_fixed = int((trig < 0).sum())
    return pos, sgn, start, (pos[:n_fixed], sgn[:n_fixed])


@njit(cache=True)
def violated_any(x, pos, sgn):
    for q in range(pos.shape[0]):
        t1 = sgn[q, 0] * x[pos[q, 0]] * x[pos[q, 1]]
        t2 = sgn[q, 1] * x[pos[q, 2]] * x[pos[q, 3]]
        t3 = sgn[q, 2] * x[pos[q, 4]] * x[pos[q, 5]]
        if t1 == t2 and t2 == t3:
            return True
    return False


@njit(cache=True)
def _grow(buf, count):
    if count < buf.shape[0]:
        return buf
    out = np.zeros((2 * buf.shape[0], buf.shape[1]), dtype=buf.dtype)
    out[: buf.shape[0]] = buf
    return out


@njit(cache=True)
def _relations_ok(x, pos, sgn, lo, hi):
    for q in range(lo, hi):
        t1 = sgn[q, 0] * x[pos[q, 0]] * x[pos[q, 1]]
        t2 = sgn[q, 1] * x[pos[q, 2]] * x[pos[q, 3]]
        t3 = sgn[q, 2] * x[pos[q, 4]] * x[pos[q, 5]]
        if t1 == t2 and t2 == t3:
            return False
    return True


@njit(cache=True)
def dfs_leaves(x0, free, pos, sgn, start):
    """All +/- completions of ``x0`` on ``free`` with no violated relation.

    Values are tried in the order ``+`` then ``-``, so leaves come out in
    lexicographic order of their free values.  Returns an ``(L, len(free))``
    int8 array.
    """
    x = x0.copy()
    D = free.shape[0]
    buf = np.zeros((64, max(D, 1)), dtype=np.int8)
    count = 0
    if D == 0:
        buf[0, 0] = 0
        return buf[:1, :0]
    ch = np.zeros(D, dtype=np.int64)
    d = 0
    while d >= 0:
        if ch[d] >= 2:
            ch[d] = 0
            d -= 1
            if d >= 0:
                ch[d] += 1
            continue
        x[free[d]] = 1 if ch[d] == 0 else -1
        if not _relations_ok(x, pos, sgn, start[d], start[d + 1]):
            ch[d] += 1
            continue
        if d == D - 1:
            buf = _grow(buf, count)
            for k in range(D):
                buf[count, k] = x[free[k]]
            count += 1
            ch[d] += 1
        else:
            d += 1
            ch[d] = 0
    return buf[:count]


@njit(cache=True)
def orbit_min_stabilizer(x, gidx, gsg):
    """0 if some normalized image of uniform ``x`` is lexicographically smaller
    (``+`` before ``-``), else the stabilizer order of ``x``.

    ``x`` must itself be normalized (``x[0] == 1``).
    """
    G = gidx.shape[0]
    K = x.shape[0]
    stab = 0
    for g in range(G):
        f = gsg[g, 0] * x[gidx[g, 0]]
        res = 0
        for k in range(K):
            v = f * gsg[g, k] * x[gidx[g, k]]
            if v != x[k]:
                res = 1 if v > x[k] else 2
                break
        if res == 1:
            return 0
        if res == 0:
            stab += 1
    return stab


@njit(cache=True)
def dfs_orbit_representatives(x0, free, pos, sgn, start, gidx, gsg, hidx, hsg):
    """Backtrack like :func:`dfs_leaves` but keep only orbit minima.

    Two groups are tested at every leaf (``g`` and its subgroup ``h``).
    Returns ``(leaves, reps_g, stab_g, reps_h, stab_h)`` where reps are full
    value arrays.  Needs at least one free position.
    """
    x = x0.copy()
    K = x.shape[0]
    D = free.shape[0]
    rg = np.zeros((64, K), dtype=np.int8)
    sg_ = np.zeros((64, 1), dtype=np.int64)
    rh = np.zeros((64, K), dtype=np.int8)
    sh = np.zeros((64, 1), dtype=np.int64)
    ng = 0
    nh = 0
    leaves = 0
    ch = np.zeros(D, dtype=np.int64)
    d = 0
    while d >= 0:
        if ch[d] >= 2:
            ch[d] = 0
            d -= 1
            if d >= 0:
                ch[d] += 1
            continue
        x[free[d]] = 1 if ch[d] == 0 else -1
        if not _relations_ok(x, pos, sgn, start[d], start[d + 1]):
            ch[d] += 1
            continue
        if d < D - 1:
            d += 1
            ch[d] = 0
            continue
        leaves += 1
        s = orbit_min_stabilizer(x, gidx, gsg)
        if s > 0:
            rg = _grow(rg, ng)
            sg_ = _grow(sg_, ng)
            rg[ng] = x
            sg_[ng, 0] = s
            ng += 1
        s = orbit_min_stabilizer(x, hidx, hsg)
        if s > 0:
            rh = _grow(rh, nh)
            sh = _grow(sh, nh)
            rh[nh] = x
            sh[nh, 0] = s
            nh += 1
        ch[d] += 1
    return leaves, rg[:ng], sg_[:ng, 0], rh[:nh], sh[:nh, 0]


# -- reorientation-class keys --------------------------------------------------


@njit(cache=True)
def _pack(bits):
    """Pack a 0/1 vector into two words, position 0 most significant."""
    w0 = np.uint64(0)
    w1 = np.uint64(0)
    for k in range(bits.shape[0]):
        if bits[k]:
            if k < 64:
                w0 |= np.uint64(1) << np.uint64(63 - k)
            else:
                w1 |= np.uint64(1) << np.uint64(127 - k)
    return w0, w1


@njit(cache=True)
def reorientation_minimum(x, pidx, psg, rows0, rows1, pivots, tags):
    """Lexicographic minimum of the reorientation class of uniform ``x``.

    Each relabelled image is reduced modulo the GF(2) span of reorientations
    (given as reduced echelon rows with their pivots, packed with
    :func:`_pack`), which makes every pivot position ``+``.  Returns
    ``(w0, w1, perm_index, tag)`` where ``tag`` is the xor of the ``tags`` of
    the rows used, i.e. the reorientation applied after the relabelling.
    """
    P = pidx.shape[0]
    K = x.shape[0]
    R = pivots.shape[0]
    best0 = np.uint64(0xFFFFFFFFFFFFFFFF)
    best1 = np.uint64(0xFFFFFFFFFFFFFFFF)
    best_p = -1
    best_tag = 0
    bits = np.zeros(K, dtype=np.uint8)
    one = np.uint64(1)
    for p in range(P):
        for k in range(K):
            bits[k] = 1 if psg[p, k] * x[pidx[p, k]] < 0 else 0
        w0, w1 = _pack(bits)
        tag = 0
        for j in range(R):
            pv = pivots[j]
            if pv < 64:
                hit = (w0 >> np.uint64(63 - pv)) & one
            else:
                hit = (w1 >> np.uint64(127 - pv)) & one
            if hit:
                w0 ^= rows0[j]
                w1 ^= rows1[j]
                tag ^= tags[j]
        if w0 < best0 or (w0 == best0 and w1 < best1):
            best0 = w0
            best1 = w1
            best_p = p
            best_tag = tag
    return best0, best1, best_p, best_tag
