"""Brute-force optimum by explicit search over runs, for small systems only.

Costs and goals depend on the states of a run alone, and two profiles with
the same successor are interchangeable.  The search therefore walks
successor *states*: from each state it branches over the distinct states
reachable by one executable profile.  Uniformity along the path becomes a
commitment ``state -> successor`` (a revisited state must move to the same
successor again, which the deterministic choice of profile per transition
turns into the same profile).  Branch-and-bound on the accumulated cost
and an optimistic goal check keep the search small.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product

from .core import (
    FREE,
    Goal,
    Mra,
    Schedule,
    State,
    _successor,
    available_actions,
    horizon as mra_horizon,
    initial_state,
    window_satisfied,
)
from .encoder import EncodeOptions
from .errors import TooLarge

PROFILE_CAP = 50_000  # executable profiles per state


def _profile_bound(mra: Mra) -> int:
    return (2 * mra.n_resources + 2) ** mra.n_agents


def _action_order(mra: Mra):
    order = {x: i for i, x in enumerate(mra.all_actions())}
    return lambda x: order[x]


class _Search:
    def __init__(self, mra: Mra, mode: str, k: int, first_only: bool):
        self.mra, self.mode, self.k, self.first_only = mra, mode, k, first_only
        self.best: int | None = None
        self.best_path: list[State] | None = None
        self.nodes = 0
        key = _action_order(mra)
        self._key = key
        self.successors = lru_cache(maxsize=None)(self._successors)
        self.goal_agents = [
            [g.owner] if g.owner is not None else list(mra.agent_ids()) for g in mra.goals]

    def _successors(self, s: State) -> tuple[tuple[State, tuple], ...]:
        """Distinct successors with the first profile (in action order) reaching each."""
        mra = self.mra
        choices = [sorted(available_actions(s, a, mra), key=self._key)
                   for a in mra.agent_ids()]
        seen: dict[State, tuple] = {}
        for ap in product(*choices):
            seen.setdefault(_successor(s, ap), ap)
        out = list(seen.items())
        out.sort(key=lambda item: (self.cost_of([item[0]], frozenset(), frozenset())[0],
                                   item[0]))
        return tuple(out)

    def cost_of(self, states, used_r: frozenset, used_a: frozenset):
        mra = self.mra
        used_r = set(used_r)
        used_a = set(used_a)
        for s in states:
            for r, o in enumerate(s):
                if o != FREE:
                    used_r.add(r)
                    used_a.add(o)
        cost = 0
        if self.mode in ("resources", "mra"):
            cost += sum(mra.resources[r].price for r in used_r)
        if self.mode == "mra":
            cost += len(used_a) * mra.agent_price
        return cost, frozenset(used_r), frozenset(used_a)

    def _goal_possible(self, goal: Goal, agents, path: list[State]) -> bool:
        """Optimistic: can ``goal`` still be met by some extension of ``path``?"""
        mra, t = self.mra, len(path) - 1
        p, last_start = goal.period, goal.deadline - goal.period
        for a in agents:
            if window_satisfied(path, mra, goal, a, last=min(t, goal.deadline)):
                return True
            # windows already open at t: every type held without a break so far
            for start in range(max(0, t - p + 1), min(t, last_start) + 1):
                span = path[start:]
                if all(any(all(st[r] == a for st in span) for r in mra.by_type[tau])
                       for tau in goal.types):
                    return True
            # windows starting after t: an agent gains at most one resource per step
            if last_start > t:
                now = path[t]
                missing = sum(1 for tau in goal.types
                              if not any(now[r] == a for r in mra.by_type[tau]))
                if missing <= last_start - t:
                    return True
        return False

    def _viable(self, path: list[State]) -> bool:
        return all(self._goal_possible(g, ag, path)
                   for g, ag in zip(self.mra.goals, self.goal_agents))

    def run(self):
        s0 = initial_state(self.mra)
        cost, ur, ua = self.cost_of([s0], frozenset(), frozenset())
        self._dfs([s0], {}, cost, ur, ua)

    def _dfs(self, path, commit, cost, used_r, used_a) -> bool:
        self.nodes += 1
        if self.best is not None and (cost >= self.best or self.first_only):
            return True
        if not self._viable(path):
            return False
        t = len(path) - 1
        if t == self.k:
            self.best, self.best_path = cost, list(path)
            return True
        s = path[-1]
        if s in commit:
            options = [(commit[s], None)]
        else:
            options = self.successors(s)
        for nxt, _ in options:
            c, ur, ua = self.cost_of([nxt], used_r, used_a)
            if self.best is not None and c >= self.best:
                continue
            fresh = s not in commit
            if fresh:
                commit[s] = nxt
            path.append(nxt)
            self._dfs(path, commit, c, ur, ua)
            path.pop()
            if fresh:
                del commit[s]
            if self.first_only and self.best is not None:
                return True
        return False

    def witness(self) -> Schedule:
        profiles = []
        table = {}
        for s, nxt in zip(self.best_path, self.best_path[1:]):
            if s not in table:
                table[s] = dict(self.successors(s))[nxt]
            profiles.append(table[s])
        return Schedule.from_profiles(profiles, self.mra.n_agents)


def _search(mra: Mra, mode: str, first_only: bool, horizon: int | None,
            cap: int) -> _Search:
    bound = _profile_bound(mra)
    if bound > cap:
        raise TooLarge(
            f"up to {bound} action profiles per state ((2*{mra.n_resources}+2)^"
            f"{mra.n_agents}) exceed the oracle cap of {cap}")
    k = mra_horizon(mra) if horizon is None else horizon
    search = _Search(mra, mode, k, first_only)
    search.run()
    return search


def oracle_optimum(mra: Mra, mode: str = "resources", horizon: int | None = None,
                   cap: int = PROFILE_CAP) -> tuple[int, Schedule] | None:
    """Minimal cost over all winning path-uniform runs and a witness, or ``None``."""
    mode = EncodeOptions(mode).mode
    if mode == "mra" and mra.agent_price is None:
        raise ValueError("mra cost needs an agent price")
    search = _search(mra, mode, False, horizon, cap)
    if search.best is None:
        return None
    return search.best, search.witness()


def oracle_decide(mra: Mra, horizon: int | None = None, cap: int = PROFILE_CAP) -> bool:
    """Whether some uniform joint strategy wins within the horizon."""
    return _search(mra, "none", True, horizon, cap).best is not None
