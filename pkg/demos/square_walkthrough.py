"""From a 2x2 P-matrix to a unique sink orientation of the square, both ways.

Run: python demos/square_walkthrough.py
"""

from fractions import Fraction as F

from pomcp.cube import orient_from_extension, orient_from_lcp, spp_simulate
from pomcp.extension import ExtensionSignature
from pomcp.lcp import LcpInstance, extended_realization, is_p_matrix, solve_spp

m = [[F(2), F(1)], [F(-1), F(3)]]
q = [F(-1), F(2)]
inst = LcpInstance(m, q)
print("M is a P-matrix:", is_p_matrix(m))

# numeric side: signs of basic solutions decide each edge
o = orient_from_lcp(m, q)
print("orientation from basic solutions:", o)

# combinatorial side: only the chirotope of (I, -M, -q) is used
ext = ExtensionSignature.from_extended(extended_realization(m, q))
print("extension signature:", ext)
print("orientation from chirotope signs:", orient_from_extension(ext))

res = solve_spp(inst)
print("pivot path:", res.path, "solution w =", res.solution.w, "z =", res.solution.z)
print("cube walk  :", spp_simulate(o, 0).path)
