"""Agreement between exact-rational LCP computations and the oriented-matroid side."""

from __future__ import annotations

from dataclasses import dataclass

from .cube import CubeOrientation, holt_klee, is_uso, orient_from_extension, orient_from_lcp, spp_simulate
from .extension import ExtensionSignature
from .lcp import LcpInstance, check_solution, extended_realization, random_instance, solve_spp


@dataclass(frozen=True)
class CrossCheck:
    orientation: CubeOrientation
    orientations_agree: bool
    uso: bool
    holt_klee: bool
    paths_agree: bool
    solution_ok: bool

    @property
    def ok(self) -> bool:
        return self.orientations_agree and self.uso and self.holt_klee and self.paths_agree and self.solution_ok


def cross_check(inst: LcpInstance, rule: str = "least-index", seed: int | None = None, start: int = 0) -> CrossCheck:
    """Orientation from determinants vs from the chirotope of ``(I, -M, -q)``,
    and the SPP trace on the numbers vs the walk on the cube."""
    o = orient_from_lcp(inst.m, inst.q)
    ext = ExtensionSignature.from_extended(extended_realization(inst.m, inst.q))
    o2 = orient_from_extension(ext)
    run = solve_spp(inst, rule, start, seed)
    sim = spp_simulate(o, start, rule, seed)
    return CrossCheck(
        o,
        o == o2,
        is_uso(o),
        holt_klee(o),
        not sim.cycled and sim.path == run.path,
        check_solution(inst, run.solution) and run.solution.basis == (sim.end if sim.path else start),
    )


def seeded_instances(count: int, seed: int, orders=(2, 3, 4), strategy: str = "diagonal-dominant"):
    """``count`` instances cycling through ``orders``; instance ``k`` uses seed ``(seed, k)``."""
    for k in range(count):
        n = orders[k % len(orders)]
        yield random_instance(n, f"{seed}:{k}", strategy)
