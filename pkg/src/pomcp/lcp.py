"""Exact-rational linear complementarity: P-matrix tests, orientation signs, pivoting.

Bases are bitmasks over ``[n]`` (bit ``i - 1`` set means index ``i`` is in the
basis, i.e. ``z_i`` is basic); matrix and vector entries are Fractions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .chirotope import Chirotope, realize_chirotope
from .errors import CyclingError, DegeneracyError, DimensionError, DomainError, GenerationError, ParseError
from .linalg import RationalMatrix, RationalVector, det_sign, determinant, identity, solve, to_matrix, to_vector
from .pivoting import PivotRule, walk

STRATEGIES = ("diagonal-dominant", "accept-reject")


@dataclass(frozen=True)
class LcpInstance:
    m: RationalMatrix
    q: RationalVector

    def __post_init__(self):
        m, q = to_matrix(self.m), to_vector(self.q)
        if len(m) != len(m[0]) or len(q) != len(m):
            raise DimensionError(f"need n x n matrix and n-vector, got {len(m)}x{len(m[0])} and {len(q)}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "q", q)

    @property
    def n(self) -> int:
        return len(self.q)

    def to_text(self) -> str:
        rows = [" ".join(str(x) for x in row) for row in self.m]
        return "\n".join([str(self.n), *rows, " ".join(str(x) for x in self.q)]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> LcpInstance:
        tokens = text.split()
        try:
            n = int(tokens[0])
            vals = [Fraction(t) for t in tokens[1:]]
        except (IndexError, ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad instance file: {exc}") from None
        if n < 1 or len(vals) != n * n + n:
            raise ParseError(f"instance of order {n} needs {n * n + n} numbers, got {len(vals)}")
        return cls([vals[i * n : (i + 1) * n] for i in range(n)], vals[n * n :])


@dataclass(frozen=True)
class LcpSolution:
    w: RationalVector
    z: RationalVector
    basis: int


@dataclass(frozen=True)
class SppResult:
    solution: LcpSolution
    path: tuple[int, ...]  # bases visited after the start

    @property
    def pivots(self) -> int:
        return len(self.path)


def _square(m) -> RationalMatrix:
    m = to_matrix(m)
    if len(m) != len(m[0]):
        raise DimensionError("expected a square matrix")
    return m


def principal_minors(m) -> dict[int, Fraction]:
    """``det(M[B, B])`` for every nonempty ``B`` (bitmask)."""
    m = _square(m)
    n = len(m)
    out = {}
    for k in range(1, n + 1):
        for idx in combinations(range(n), k):
            out[sum(1 << i for i in idx)] = determinant([[m[i][j] for j in idx] for i in idx])
    return out


def basis_matrix(m, basis: int) -> RationalMatrix:
    """``A_B``: column ``j`` of ``(I_n, -M)`` taken from ``-M`` when ``j`` is in ``B``."""
    m = _square(m)
    n = len(m)
    eye = identity(n)
    return tuple(tuple(-m[r][c] if basis >> c & 1 else eye[r][c] for c in range(n)) for r in range(n))


def _replace_column(a, i: int, col) -> RationalMatrix:
    return tuple(tuple(col[r] if c == i else a[r][c] for c in range(len(a))) for r in range(len(a)))


def is_p_matrix(m, method: str = "minors") -> bool:
    """All principal minors positive (``method="minors"``), or equivalently the
    basis determinants alternate in sign across every edge of the cube
    (``method="alternation"``)."""
    m = _square(m)
    n = len(m)
    if method == "minors":
        return all(v > 0 for v in principal_minors(m).values())
    if method == "alternation":
        dets = [det_sign(basis_matrix(m, b)) for b in range(2**n)]
        return all(dets[b] * dets[b ^ (1 << i)] < 0 for b in range(2**n) for i in range(n))
    raise ValueError(f"unknown method {method!r}")


def edge_sign(m, q, basis: int, i: int) -> int:
    """Sign of ``det(A_B) det(A_B[i, q])`` for the 1-based index ``i``; ``-`` means
    the edge at ``B`` in direction ``i`` leaves ``B``."""
    a = basis_matrix(m, basis)
    return det_sign(a) * det_sign(_replace_column(a, i - 1, to_vector(q)))


def basic_solution(m, q, basis: int) -> RationalVector:
    """``A_B^{-1} q``; its ``i``-th entry has the sign of ``edge_sign(.., B, i + 1)``."""
    return solve(basis_matrix(m, basis), to_vector(q))


def _require_p(m):
    if not is_p_matrix(m):
        raise DomainError("matrix is not a P-matrix")


def solve_spp(inst: LcpInstance, rule="least-index", start: int = 0, seed: int | None = None) -> SppResult:
    """Simple principal pivoting from basis ``start``: while some basic variable is
    negative, exchange one such index (chosen by the rule) with its complement."""
    _require_p(inst.m)
    rule = PivotRule.parse(rule, seed)
    cache: dict[int, RationalVector] = {}

    def values(b: int) -> RationalVector:
        if b not in cache:
            x = basic_solution(inst.m, inst.q, b)
            if any(v == 0 for v in x):
                raise DegeneracyError(f"degenerate basis {b:b}: zero basic variable")
            cache[b] = x
        return cache[b]

    def outgoing(b: int) -> list[int]:
        return [i for i, v in enumerate(values(b)) if v < 0]

    path, cut = walk(start, inst.n, outgoing, rule)
    if cut:
        raise CyclingError("pivot walk did not reach a solution", path)
    end = path[-1] if path else start
    x = values(end)
    w = tuple(Fraction(0) if end >> j & 1 else x[j] for j in range(inst.n))
    z = tuple(x[j] if end >> j & 1 else Fraction(0) for j in range(inst.n))
    return SppResult(LcpSolution(w, z, end), tuple(path))


def check_solution(inst: LcpInstance, sol: LcpSolution) -> bool:
    n = inst.n
    for r in range(n):
        if sol.w[r] - sum(inst.m[r][c] * sol.z[c] for c in range(n)) != inst.q[r]:
            return False
    return all(v >= 0 for v in sol.w + sol.z) and all(a * b == 0 for a, b in zip(sol.w, sol.z))


# -- realizations --------------------------------------------------------------


def realization_of_p_matroid(m) -> Chirotope:
    """Chirotope of the columns of ``(I_n, -M)``."""
    _require_p(m)
    m = _square(m)
    n = len(m)
    eye = identity(n)
    return realize_chirotope([list(eye[r]) + [-x for x in m[r]] for r in range(n)])


def extended_realization(m, q) -> Chirotope:
    """Chirotope of ``(I_n, -M, -q)``, rank n on [2n + 1]."""
    m = _square(m)
    q = to_vector(q)
    n = len(m)
    eye = identity(n)
    return realize_chirotope([list(eye[r]) + [-x for x in m[r]] + [-q[r]] for r in range(n)])


# -- random instances ----------------------------------------------------------


def _rand_fraction(rng: random.Random, lo: int = -9, hi: int = 9, max_den: int = 4) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, max_den))


def random_p_matrix(n: int, seed, strategy: str = "diagonal-dominant", max_tries: int = 10_000) -> RationalMatrix:
    """A seeded random rational P-matrix, certified before it is returned."""
    if not 1 <= n <= 5:
        raise DimensionError("random P-matrices are generated for 1 <= n <= 5")
    rng = random.Random(seed)
    for _ in range(max_tries):
        if strategy == "diagonal-dominant":
            rows = []
            for r in range(n):
                row = [_rand_fraction(rng) if c != r else Fraction(0) for c in range(n)]
                row[r] = sum(abs(x) for x in row) + Fraction(rng.randint(1, 9), rng.randint(1, 4))
                rows.append(row)
        elif strategy == "accept-reject":
            rows = [
                [Fraction(rng.randint(1, 9), rng.randint(1, 4)) if c == r else _rand_fraction(rng) for c in range(n)]
                for r in range(n)
            ]
        else:
            raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
        m = to_matrix(rows)
        if is_p_matrix(m):
            return m
    raise GenerationError(f"no P-matrix of order {n} after {max_tries} draws")


def random_matrix(n: int, seed) -> RationalMatrix:
    """Unconstrained random rational matrix (for P/non-P comparisons)."""
    rng = random.Random(seed)
    return to_matrix([[_rand_fraction(rng, -5, 9) for _ in range(n)] for _ in range(n)])


def is_nondegenerate(m, q) -> bool:
    n = len(q)
    return all(edge_sign(m, q, b, i + 1) != 0 for b in range(2**n) for i in range(n))


def random_instance(n: int, seed, strategy: str = "diagonal-dominant", max_tries: int = 1000) -> LcpInstance:
    """Random P-matrix LCP whose orientation signs are all nonzero."""
    rng = random.Random(seed)
    m = random_p_matrix(n, rng.getrandbits(64), strategy)
    for _ in range(max_tries):
        q = [_rand_fraction(rng, -9, 9, 5) for _ in range(n)]
        if is_nondegenerate(m, q):
            return LcpInstance(m, q)
    raise GenerationError("could not draw a nondegenerate right-hand side")


