"""Seeded random systems: benchmark-style scenarios and tiny instances for cross-checks."""
from __future__ import annotations

import random

from .core import Goal, Mra, ResourceType


def scenario(n_agents: int, n_types: int, types_per_goal: tuple[int, int],
             deadlines: tuple[int, int], seed: int = 0, instances: int = 2,
             period: int = 1, general: bool = False, agent_price: int = 1) -> Mra:
    """One goal per agent; type ``i`` (1-based) costs ``i``.

    Each goal draws its number of types from ``types_per_goal`` and its
    deadline from ``deadlines`` (both inclusive).
    """
    rng = random.Random(seed)
    lo, hi = types_per_goal
    hi = min(hi, n_types)
    types = tuple(ResourceType(f"t{i}", i, instances) for i in range(1, n_types + 1))
    goals = []
    for a in range(1, n_agents + 1):
        comp = tuple(sorted(rng.sample(range(n_types), rng.randint(lo, hi))))
        d = rng.randint(*deadlines)
        goals.append(Goal(comp, min(period, d), d, None if general else a))
    agents = tuple(f"a{i}" for i in range(1, n_agents + 1))
    return Mra(agents, types, tuple(goals), agent_price if general else None)


def small_random(rng: random.Random, max_agents: int = 3, max_resources: int = 4,
                 max_horizon: int = 4, max_price: int = 3, general: bool = False) -> Mra:
    """A tiny arbitrary system; winnable or not, with any periods."""
    n_agents = rng.randint(1, max_agents)
    n_res = rng.randint(1, max_resources)
    n_types = rng.randint(1, n_res)
    counts = [1] * n_types
    for _ in range(n_res - n_types):
        counts[rng.randrange(n_types)] += 1
    types = tuple(ResourceType(f"t{i + 1}", rng.randint(0, max_price), c)
                  for i, c in enumerate(counts))
    goals = []
    owners = list(range(1, n_agents + 1))
    for _ in range(rng.randint(1, max(1, n_agents))):
        comp = tuple(sorted(rng.sample(range(n_types), rng.randint(1, min(2, n_types)))))
        d = rng.randint(1, max_horizon)
        p = rng.choice([0, 0, 0, rng.randint(0, d)])
        goals.append(Goal(comp, p, d, None if general else rng.choice(owners)))
    agents = tuple(f"a{i}" for i in range(1, n_agents + 1))
    return Mra(agents, types, tuple(goals), rng.randint(1, max_price) if general else None)
