"""Pivot rules shared by the combinatorial simulator and the exact LCP solver.

Keeping one implementation guarantees that both walk the same path when given
the same outgoing directions, rule and seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import ArgumentError

RULES = ("least-index", "random")


@dataclass(frozen=True)
class PivotRule:
    name: str = "least-index"
    seed: int | None = None

    def __post_init__(self):
        if self.name not in RULES:
            raise ArgumentError(f"unknown pivot rule {self.name!r}; expected one of {RULES}")
        if self.name == "random" and self.seed is None:
            raise ArgumentError("the random rule needs a seed")

    @classmethod
    def parse(cls, rule, seed=None) -> PivotRule:
        if isinstance(rule, PivotRule):
            return rule
        return cls(rule, seed)

    @property
    def deterministic(self) -> bool:
        return self.name == "least-index"

    def chooser(self):
        """A fresh stateful chooser: call it with the sorted candidate directions."""
        if self.name == "least-index":
            return lambda candidates: candidates[0]
        rng = random.Random(self.seed)
        return lambda candidates: rng.choice(candidates)


def step_cap(n: int) -> int:
    return 3 * 2**n


def walk(start: int, n: int, outgoing, rule: PivotRule) -> tuple[list[int], bool]:
    """Follow ``outgoing(v) -> sorted 0-based directions`` from ``start``.

    Returns the visited vertices after ``start`` and whether the walk was cut
    off (step cap, or a revisit under a deterministic rule).
    """
    choose = rule.chooser()
    path: list[int] = []
    seen = {start}
    v = start
    for _ in range(step_cap(n)):
        cand: Sequence[int] = outgoing(v)
        if not cand:
            return path, False
        v ^= 1 << choose(list(cand))
        path.append(v)
        if rule.deterministic and v in seen:
            return path, True
        seen.add(v)
    return path, bool(outgoing(v))
