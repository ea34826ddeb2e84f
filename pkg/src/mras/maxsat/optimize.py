"""Weighted Max-SAT for instances whose soft clauses are positive unit literals."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import NotUnitSoft, TooLarge
from .sat import SatOracle, satisfies

EXHAUSTIVE_CAP = 26


@dataclass
class MaxSatInstance:
    n_vars: int
    hard: list[list[int]] = field(default_factory=list)
    soft: list[tuple[int, int]] = field(default_factory=list)  # (positive literal, weight)

    @classmethod
    def from_formula(cls, formula) -> "MaxSatInstance":
        return cls(formula.n_vars, list(formula.hard), list(formula.soft))


@dataclass
class MaxSatResult:
    model: list[bool]
    achieved: int
    forfeited: int


@dataclass
class SearchStats:
    queries: int = 0
    nodes: int = 0
    pruned: int = 0
    cores: int = 0


def _unit_softs(inst: MaxSatInstance) -> list[tuple[int, int]]:
    softs = []
    for lit, w in inst.soft:
        if not isinstance(lit, int):
            if len(lit) != 1:
                raise NotUnitSoft(f"soft clause {list(lit)} is not a unit clause")
            (lit,) = lit
        if lit <= 0 or lit > inst.n_vars:
            raise NotUnitSoft(f"soft literal {lit} is not a positive declared variable")
        if w < 1:
            raise NotUnitSoft(f"soft weight {w} must be >= 1")
        softs.append((lit, w))
    if len({lit for lit, _ in softs}) != len(softs):
        raise NotUnitSoft("soft literals must be distinct")
    return softs


def achieved_weight(model: Sequence[bool], softs) -> int:
    return sum(w for lit, w in softs if model[lit - 1])


def maxsat_builtin(inst: MaxSatInstance, backend: str = "auto", prune: bool = True,
                   stats: SearchStats | None = None) -> MaxSatResult | None:
    """Exact optimum by branch-and-bound over sets of soft literals forced true.

    A node fixes a set ``S`` of softs to true and excludes some others; one SAT
    query under assumptions ``S`` either kills the node (and records the
    reported core as a nogood) or yields a model ``m``.  Every better solution
    below the node must contain a soft that is open and false in ``m``, so the
    children branch on exactly those, heaviest first.  Returns ``None`` iff the
    hard clauses alone are unsatisfiable.
    """
    softs = _unit_softs(inst)
    stats = stats if stats is not None else SearchStats()
    total = sum(w for _, w in softs)
    order = sorted(range(len(softs)), key=lambda i: (-softs[i][1], softs[i][0]))
    var_to_soft = {softs[i][0]: i for i in order}
    weight = [w for _, w in softs]

    with SatOracle(inst.n_vars, inst.hard, backend) as oracle:
        stats.queries += 1
        first = oracle.solve()
        if not first:
            return None
        best_model = first.model
        best = achieved_weight(best_model, softs)
        nogoods: list[frozenset[int]] = []

        def explore(chosen: list[int], chosen_w: int, open_: list[int]):
            nonlocal best, best_model
            stats.nodes += 1
            if prune and chosen_w + sum(weight[i] for i in open_) <= best:
                stats.pruned += 1
                return
            chosen_set = set(chosen)
            if any(ng <= chosen_set for ng in nogoods):
                stats.pruned += 1
                return
            stats.queries += 1
            res = oracle.solve([softs[i][0] for i in chosen])
            if not res:
                core = frozenset(var_to_soft[v] for v in res.core or () if v in var_to_soft)
                nogoods.append(core if core else frozenset(chosen))
                stats.cores += 1
                return
            w = achieved_weight(res.model, softs)
            if w > best:
                best, best_model = w, res.model
            candidates = [i for i in open_ if not res.model[softs[i][0] - 1]]
            for pos, j in enumerate(candidates):
                skipped = set(candidates[:pos + 1])
                explore(chosen + [j], chosen_w + weight[j],
                        [i for i in open_ if i not in skipped])

        explore([], 0, order)
    return MaxSatResult(best_model, best, total - best)


def maxsat_exhaustive(inst: MaxSatInstance, cap: int = EXHAUSTIVE_CAP,
                      chunk: int = 1 << 16) -> MaxSatResult | None:
    """Optimum by enumerating every assignment (``x1`` most significant, false first)."""
    n = inst.n_vars
    if n > cap:
        raise TooLarge(f"{n} variables exceed the exhaustive cap of {cap}")
    softs = []
    for lit, w in inst.soft:
        clause = [lit] if isinstance(lit, int) else list(lit)
        softs.append((clause, w))
    total = sum(w for _, w in softs)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    best_w, best_idx = -1, None
    for start in range(0, 1 << n, chunk):
        idx = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        bits = ((idx[:, None] >> shifts[None, :]) & 1).astype(bool)

        def holds(clause):
            sat = np.zeros(len(idx), dtype=bool)
            for lit in clause:
                col = bits[:, abs(lit) - 1]
                sat |= col if lit > 0 else ~col
            return sat

        ok = np.ones(len(idx), dtype=bool)
        for clause in inst.hard:
            ok &= holds(clause)
        if not ok.any():
            continue
        gained = np.zeros(len(idx), dtype=np.int64)
        for clause, w in softs:
            gained += w * holds(clause)
        gained = np.where(ok, gained, -1)
        i = int(np.argmax(gained))
        if gained[i] > best_w:
            best_w, best_idx = int(gained[i]), int(idx[i])
    if best_idx is None:
        return None
    model = [bool((best_idx >> s) & 1) for s in range(n - 1, -1, -1)]
    assert satisfies(model, inst.hard)
    return MaxSatResult(model, best_w, total - best_w)
