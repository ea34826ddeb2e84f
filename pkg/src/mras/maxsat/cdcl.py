"""A small incremental CDCL SAT solver.

Two watched literals, first-UIP learning with local minimisation, VSIDS
branching (ties go to the lowest variable), phase saving with ``False`` as the
initial phase, and Luby restarts.  Assumptions are decided first, one per
decision level; when they cannot all hold, :attr:`core` is a subset of them
that is already contradictory.

Internally literal ``v`` is coded ``2v`` and ``-v`` is ``2v + 1``.
"""
from __future__ import annotations

import heapq
from typing import Iterable, Sequence


def _code(lit: int) -> int:
    return 2 * lit if lit > 0 else -2 * lit + 1


def _lit(code: int) -> int:
    return code >> 1 if not code & 1 else -(code >> 1)


def _luby(i: int) -> int:
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i %= size
    return 1 << seq


class CdclSolver:
    restart_base = 100

    def __init__(self, clauses: Iterable[Sequence[int]] = (), n_vars: int = 0):
        self.n_vars = 0
        self.values: list[int] = [0, 0]  # per literal code: 1 true, -1 false, 0 open
        self.level: list[int] = [0]
        self.reason: list[int] = [-1]
        self.activity: list[float] = [0.0]
        self.phase: list[bool] = [False]
        self.watches: list[list[int]] = [[], []]
        self.clauses: list[list[int]] = []
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.heap: list[tuple[float, int]] = []
        self.var_inc = 1.0
        self.ok = True
        self.model: list[bool] | None = None
        self.core: list[int] | None = None
        self.conflicts = 0
        self._ensure(n_vars)
        for c in clauses:
            self.add_clause(c)

    # -- bookkeeping -------------------------------------------------------

    def _ensure(self, n: int):
        while self.n_vars < n:
            self.n_vars += 1
            self.values += [0, 0]
            self.level.append(0)
            self.reason.append(-1)
            self.activity.append(0.0)
            self.phase.append(False)
            self.watches += [[], []]
            heapq.heappush(self.heap, (0.0, self.n_vars))

    def _decision_level(self) -> int:
        return len(self.trail_lim)

    def _assign(self, code: int, reason: int):
        v = code >> 1
        self.values[code] = 1
        self.values[code ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(code)

    def _cancel_until(self, lvl: int):
        if len(self.trail_lim) <= lvl:
            return
        stop = self.trail_lim[lvl]
        values, heap, act = self.values, self.heap, self.activity
        for code in reversed(self.trail[stop:]):
            v = code >> 1
            values[code] = values[code ^ 1] = 0
            self.reason[v] = -1
            self.phase[v] = not code & 1
            heapq.heappush(heap, (-act[v], v))
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = min(self.qhead, stop)

    def _bump(self, v: int):
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for i in range(1, self.n_vars + 1):
                act[i] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[i], i) for i in range(1, self.n_vars + 1)
                         if self.values[2 * i] == 0]
            heapq.heapify(self.heap)
        elif self.values[2 * v] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    # -- clauses -----------------------------------------------------------

    def add_clause(self, clause: Sequence[int]) -> bool:
        if not self.ok:
            return False
        self._cancel_until(0)
        self._ensure(max((abs(x) for x in clause), default=0))
        seen, lits = set(), []
        for x in clause:
            code = _code(x)
            if code ^ 1 in seen or self.values[code] == 1:
                return True  # tautology or satisfied at level 0
            if code in seen or self.values[code] == -1:
                continue
            seen.add(code)
            lits.append(code)
        if not lits:
            self.ok = False
            return False
        if len(lits) == 1:
            self._assign(lits[0], -1)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self._attach(lits)
        return True

    def _attach(self, lits: list[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.watches[lits[0]].append(ci)
        self.watches[lits[1]].append(ci)
        return ci

    # -- propagation -------------------------------------------------------

    def _propagate(self) -> int | None:
        values, clauses, watches, trail = self.values, self.clauses, self.watches, self.trail
        while self.qhead < len(trail):
            false_lit = trail[self.qhead] ^ 1
            self.qhead += 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                if values[first] == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    if values[c[k]] != -1:
                        c[1], c[k] = c[k], false_lit
                        watches[c[1]].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if values[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return ci
                    self._assign(first, ci)
            del ws[j:]
        return None

    # -- conflict analysis -------------------------------------------------

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        level, reason, clauses, trail = self.level, self.reason, self.clauses, self.trail
        seen = set()
        learnt = [0]
        counter = 0
        p = -1
        idx = len(trail) - 1
        cur = len(self.trail_lim)
        c = clauses[confl]
        while True:
            for q in (c if p < 0 else c[1:]):
                v = q >> 1
                if v not in seen and level[v] > 0:
                    seen.add(v)
                    self._bump(v)
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while (trail[idx] >> 1) not in seen:
                idx -= 1
            p = trail[idx]
            idx -= 1
            counter -= 1
            if counter == 0:
                break
            c = clauses[reason[p >> 1]]
        learnt[0] = p ^ 1

        # drop literals implied by other literals of the clause
        keep = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r < 0 or any((x >> 1) not in seen and level[x >> 1] > 0
                            for x in clauses[r][1:]):
                keep.append(q)
        learnt = keep

        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda i: level[learnt[i] >> 1])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _analyze_final(self, code: int) -> list[int]:
        """Assumptions responsible for ``code`` (a negated assumption) being true."""
        out = [_lit(code ^ 1)]
        if not self.trail_lim:
            return out
        seen = {code >> 1}
        for x in reversed(self.trail[self.trail_lim[0]:]):
            v = x >> 1
            if v not in seen:
                continue
            r = self.reason[v]
            if r < 0:
                if self.level[v] > 0:
                    out.append(_lit(x))
            else:
                for q in self.clauses[r][1:]:
                    if self.level[q >> 1] > 0:
                        seen.add(q >> 1)
        return out

    # -- search ------------------------------------------------------------

    def _pick_branch(self) -> int:
        heap, values, act = self.heap, self.values, self.activity
        while heap:
            neg_act, v = heapq.heappop(heap)
            if values[2 * v] == 0 and -neg_act == act[v]:
                return 2 * v if self.phase[v] else 2 * v + 1
        return -1

    def propagate_units(self, assumptions: Sequence[int] = ()) -> set[int] | None:
        """Literals implied by unit propagation under ``assumptions``; ``None`` on conflict."""
        self.model = self.core = None
        if not self.ok:
            return None
        self._cancel_until(0)
        self._ensure(max((abs(x) for x in assumptions), default=0))
        self.trail_lim.append(len(self.trail))
        result = None
        for a in assumptions:
            code = _code(a)
            if self.values[code] == -1:
                break
            if self.values[code] == 0:
                self._assign(code, -1)
            if self._propagate() is not None:
                break
        else:
            result = {_lit(c) for c in self.trail}
        self._cancel_until(0)
        return result

    def solve(self, assumptions: Sequence[int] = ()) -> bool:
        self.model = self.core = None
        if not self.ok:
            self.core = []
            return False
        self._cancel_until(0)
        self._ensure(max((abs(x) for x in assumptions), default=0))
        if self._propagate() is not None:
            self.ok = False
            self.core = []
            return False
        codes = [_code(a) for a in assumptions]
        restarts = 0
        budget = self.restart_base * _luby(restarts)
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                budget -= 1
                if not self.trail_lim:
                    self.ok = False
                    self.core = []
                    return False
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], -1)
                else:
                    self._assign(learnt[0], self._attach(learnt))
                self.var_inc /= 0.95
                continue
            if budget <= 0:
                restarts += 1
                budget = self.restart_base * _luby(restarts)
                self._cancel_until(0)
                continue
            dl = len(self.trail_lim)
            if dl < len(codes):
                code = codes[dl]
                if self.values[code] == -1:
                    self.core = self._analyze_final(code ^ 1)
                    self._cancel_until(0)
                    return False
                self.trail_lim.append(len(self.trail))
                if self.values[code] == 0:
                    self._assign(code, -1)
                continue
            code = self._pick_branch()
            if code < 0:
                values = self.values
                self.model = [values[2 * v] == 1 for v in range(1, self.n_vars + 1)]
                self._cancel_until(0)
                return True
            self.trail_lim.append(len(self.trail))
            self._assign(code, -1)
