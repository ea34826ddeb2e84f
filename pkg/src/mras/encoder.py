"""CNF/WCNF encoding of (cost-optimal) winning-strategy synthesis.

The formula is the conjunction of

* state space: owner of every resource at every step ``0..k`` is one-hot
  over ``a0..an``, and everything starts free;
* actions and protocol: one action per agent and step ``0..k-1``, each only
  when available;
* evolution: the successor owner of each resource;
* uniformity: equal states on the path carry equal action profiles;
* goals: the bounded window formula per goal;
* ``nu`` definitions for resources (and agents) plus unit soft clauses
  weighted by their prices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .core import (
    FREE,
    RELEASE_ALL,
    Action,
    ActionKind,
    Goal,
    Mra,
    Schedule,
    horizon as mra_horizon,
    simulate,
)
from .errors import DeadlineExceedsHorizon, ValidationError


@dataclass(frozen=True)
class Own:
    resource: int
    t: int
    owner: int


@dataclass(frozen=True)
class Act:
    agent: int
    t: int
    action: Action


@dataclass(frozen=True)
class SoleReq:
    resource: int
    t: int
    agent: int


@dataclass(frozen=True)
class Eq:
    t: int
    t2: int


@dataclass(frozen=True)
class Diff:
    """Witness that states ``t`` and ``t2`` differ: ``resource`` is owned by
    ``owner`` at ``t`` but not at ``t2``."""

    t: int
    t2: int
    resource: int
    owner: int


@dataclass(frozen=True)
class NuRes:
    resource: int


@dataclass(frozen=True)
class NuAgt:
    agent: int


@dataclass(frozen=True)
class Aux:
    index: int


class VarPool:
    """Injective registry of semantic keys to DIMACS variables."""

    def __init__(self):
        self._var: dict = {}
        self._key: list = [None]
        # Tseitin definitions: var -> ("and" | "or", child literals); var implies it
        self.definitions: dict[int, tuple[str, tuple[int, ...]]] = {}

    def __call__(self, key) -> int:
        v = self._var.get(key)
        if v is None:
            v = len(self._key)
            self._var[key] = v
            self._key.append(key)
        return v

    def __contains__(self, key) -> bool:
        return key in self._var

    def lookup(self, key) -> int:
        return self._var[key]

    def fresh(self) -> int:
        return self(Aux(len(self._key)))

    def decode(self, v: int):
        return self._key[v]

    @property
    def n_vars(self) -> int:
        return len(self._key) - 1

    def items(self):
        return self._var.items()


MODES = ("none", "resources", "mra")
_MODE_ALIASES = {"res": "resources", "m": "mra"}


@dataclass(frozen=True)
class EncodeOptions:
    mode: str = "resources"
    horizon: int | None = None

    def __post_init__(self):
        mode = _MODE_ALIASES.get(self.mode, self.mode)
        if mode not in MODES:
            raise ValueError(f"unknown optimisation mode {self.mode!r}")
        object.__setattr__(self, "mode", mode)


@dataclass
class WcnfFormula:
    mra: Mra
    mode: str
    horizon: int
    pool: VarPool
    hard: list[list[int]] = field(default_factory=list)
    soft: list[tuple[int, int]] = field(default_factory=list)

    @property
    def n_vars(self) -> int:
        return self.pool.n_vars

    @property
    def soft_total(self) -> int:
        return sum(w for _, w in self.soft)


def _k(mra: Mra, k: int | None) -> int:
    return mra_horizon(mra) if k is None else k


def exactly_one(lits: Sequence[int]) -> list[list[int]]:
    """Pairwise at-most-one plus at-least-one."""
    clauses = [list(lits)]
    clauses += [[-a, -b] for a, b in combinations(lits, 2)]
    return clauses


def _owners(mra: Mra) -> range:
    return range(0, mra.n_agents + 1)


def encode_state_space(mra: Mra, pool: VarPool, k: int | None = None) -> list[list[int]]:
    k = _k(mra, k)
    clauses = []
    for r in range(mra.n_resources):
        for t in range(k + 1):
            clauses += exactly_one([pool(Own(r, t, o)) for o in _owners(mra)])
        clauses.append([pool(Own(r, 0, FREE))])
    return clauses


def encode_actions_and_protocol(mra: Mra, pool: VarPool,
                                k: int | None = None) -> list[list[int]]:
    k = _k(mra, k)
    actions = mra.all_actions()
    clauses = []
    for a in mra.agent_ids():
        for t in range(k):
            clauses += exactly_one([pool(Act(a, t, x)) for x in actions])
            for x in actions:
                act = pool(Act(a, t, x))
                if x.kind is ActionKind.REQUEST:
                    clauses.append([-act, pool(Own(x.resource, t, FREE))])
                elif x.kind is ActionKind.RELEASE:
                    clauses.append([-act, pool(Own(x.resource, t, a))])
                elif x.kind is ActionKind.RELEASE_ALL:
                    clauses.append([-act] + [pool(Own(r, t, a))
                                             for r in range(mra.n_resources)])
    return clauses


def encode_evolution(mra: Mra, pool: VarPool, k: int | None = None) -> list[list[int]]:
    k = _k(mra, k)
    clauses = []
    agents = list(mra.agent_ids())
    for r in range(mra.n_resources):
        req = Action.request(r)
        rel = Action.release(r)
        for t in range(k):
            free_now = pool(Own(r, t, FREE))
            free_next = pool(Own(r, t + 1, FREE))
            sole = {}
            for a in agents:
                s = sole[a] = pool(SoleReq(r, t, a))
                mine = pool(Act(a, t, req))
                others = [pool(Act(b, t, req)) for b in agents if b != a]
                clauses.append([-s, mine])
                clauses += [[-s, -o] for o in others]
                clauses.append([s, -mine] + others)
                # a free resource requested by a alone goes to a
                clauses.append([-free_now, -s, pool(Own(r, t + 1, a))])
            # nobody requests it alone: it stays free
            clauses.append([-free_now] + [sole[a] for a in agents] + [free_next])
            for a in agents:
                held = pool(Own(r, t, a))
                rel_one = pool(Act(a, t, rel))
                rel_all = pool(Act(a, t, RELEASE_ALL))
                clauses.append([-held, -rel_one, free_next])
                clauses.append([-held, -rel_all, free_next])
                clauses.append([-held, rel_one, rel_all, pool(Own(r, t + 1, a))])
    return clauses


def encode_uniformity(mra: Mra, pool: VarPool, k: int | None = None) -> list[list[int]]:
    k = _k(mra, k)
    clauses = []
    actions = mra.all_actions()
    for t, t2 in combinations(range(k), 2):
        eq = pool(Eq(t, t2))
        witnesses = []
        for r in range(mra.n_resources):
            for o in _owners(mra):
                x, y = pool(Own(r, t, o)), pool(Own(r, t2, o))
                clauses.append([-eq, -x, y])
                clauses.append([-eq, x, -y])
                d = pool(Diff(t, t2, r, o))
                clauses += [[-d, x], [-d, -y], [d, -x, y]]
                witnesses.append(d)
        clauses.append([eq] + witnesses)
        for a in mra.agent_ids():
            for act in actions:
                clauses.append([-eq, -pool(Act(a, t, act)), pool(Act(a, t2, act))])
    return clauses


# -- goals -----------------------------------------------------------------

def _node(op: str, children):
    """Build an and/or node, flattening same-operator children."""
    flat = []
    for c in children:
        if isinstance(c, tuple) and c[0] == op:
            flat.extend(c[1])
        else:
            flat.append(c)
    flat = list(dict.fromkeys(flat))
    if len(flat) == 1:
        return flat[0]
    return (op, tuple(flat))


class _Tseitin:
    """Polarity-aware (positive occurrence only) clause generation."""

    def __init__(self, pool: VarPool, clauses: list[list[int]]):
        self.pool = pool
        self.clauses = clauses
        self.memo: dict = {}

    def literal(self, node) -> int:
        if isinstance(node, int):
            return node
        if node in self.memo:
            return self.memo[node]
        op, children = node
        lits = tuple(self.literal(c) for c in children)
        v = self.pool.fresh()
        if op == "and":
            self.clauses += [[-v, c] for c in lits]
        else:
            self.clauses.append([-v, *lits])
        self.pool.definitions[v] = (op, lits)
        self.memo[node] = v
        return v

    def require(self, node):
        if isinstance(node, int):
            self.clauses.append([node])
        elif node[0] == "and":
            for c in node[1]:
                self.require(c)
        else:
            self.clauses.append([self.literal(c) for c in node[1]])


def goal_formula(mra: Mra, goal: Goal, agent: int, pool: VarPool):
    p = goal.period
    windows = []
    for start in range(goal.deadline - p + 1):
        per_type = []
        for tau in goal.types:
            held = [_node("and", [pool(Own(r, t, agent)) for t in range(start, start + p + 1)])
                    for r in mra.by_type[tau]]
            per_type.append(_node("or", held))
        windows.append(_node("and", per_type))
    return _node("or", windows)


def encode_goals(mra: Mra, pool: VarPool, k: int | None = None) -> list[list[int]]:
    k = _k(mra, k)
    clauses: list[list[int]] = []
    tseitin = _Tseitin(pool, clauses)
    for goal in mra.goals:
        if goal.deadline > k:
            raise DeadlineExceedsHorizon(
                f"goal deadline {goal.deadline} exceeds the horizon {k}")
        owners = [goal.owner] if goal.owner is not None else list(mra.agent_ids())
        tseitin.require(_node("or", [goal_formula(mra, goal, a, pool) for a in owners]))
    return clauses


# -- cost auxiliaries ------------------------------------------------------

def encode_aux_res(mra: Mra, pool: VarPool, k: int | None = None) -> list[list[int]]:
    k = _k(mra, k)
    clauses = []
    for r in range(mra.n_resources):
        nu = pool(NuRes(r))
        free = [pool(Own(r, t, FREE)) for t in range(k + 1)]
        clauses += [[-nu, f] for f in free]
        clauses.append([nu] + [-f for f in free])
    return clauses


def encode_aux_agt(mra: Mra, pool: VarPool, k: int | None = None) -> list[list[int]]:
    k = _k(mra, k)
    clauses = []
    for a in mra.agent_ids():
        nu = pool(NuAgt(a))
        held = [pool(Own(r, t, a)) for t in range(k + 1) for r in range(mra.n_resources)]
        clauses += [[-nu, -h] for h in held]
        clauses.append([nu] + held)
    return clauses


def encode_soft(mra: Mra, mode: str, pool: VarPool) -> list[tuple[int, int]]:
    """Unit soft clauses ``(nu, price)``; zero prices carry no weight and are skipped."""
    mode = EncodeOptions(mode).mode
    soft = []
    if mode in ("resources", "mra"):
        soft += [(pool(NuRes(res.index)), res.price) for res in mra.resources if res.price > 0]
    if mode == "mra" and mra.agent_price:
        soft += [(pool(NuAgt(a)), mra.agent_price) for a in mra.agent_ids()]
    return soft


def build(mra: Mra, options: EncodeOptions | None = None) -> WcnfFormula:
    options = options or EncodeOptions()
    k = _k(mra, options.horizon)
    if k < 1:
        raise ValidationError("horizon must be at least 1")
    if options.mode == "mra" and (not mra.is_general or mra.agent_price is None):
        raise ValidationError("mra optimisation needs unassigned goals and an agent price")
    pool = VarPool()
    hard = encode_state_space(mra, pool, k)
    hard += encode_actions_and_protocol(mra, pool, k)
    hard += encode_evolution(mra, pool, k)
    hard += encode_uniformity(mra, pool, k)
    hard += encode_goals(mra, pool, k)
    if options.mode in ("resources", "mra"):
        hard += encode_aux_res(mra, pool, k)
    if options.mode == "mra":
        hard += encode_aux_agt(mra, pool, k)
    soft = encode_soft(mra, options.mode, pool)
    return WcnfFormula(mra, options.mode, k, pool, hard, soft)


def assignment_for(formula: WcnfFormula, schedule: Schedule) -> list[bool]:
    """The assignment a schedule induces on every variable of ``formula``.

    Tseitin auxiliaries take the truth value of the subformula they name.
    """
    mra, k = formula.mra, formula.horizon
    run = simulate(mra, schedule)
    if run.horizon < k:
        raise ValidationError(f"schedule covers {run.horizon} steps, {k} are required")
    states, profiles = run.states, run.profiles
    model = [False] * formula.n_vars
    for key, v in formula.pool.items():
        kind = type(key)
        if kind is Own:
            value = states[key.t][key.resource] == key.owner
        elif kind is Act:
            value = profiles[key.t][key.agent - 1] == key.action
        elif kind is SoleReq:
            req = Action.request(key.resource)
            ap = profiles[key.t]
            value = [b for b, x in enumerate(ap, start=1) if x == req] == [key.agent]
        elif kind is Eq:
            value = states[key.t] == states[key.t2]
        elif kind is Diff:
            value = (states[key.t][key.resource] == key.owner
                     and states[key.t2][key.resource] != key.owner)
        elif kind is NuRes:
            value = all(s[key.resource] == FREE for s in states[:k + 1])
        elif kind is NuAgt:
            value = all(key.agent not in s for s in states[:k + 1])
        else:
            continue
        model[v - 1] = value
    for v in sorted(formula.pool.definitions):
        op, lits = formula.pool.definitions[v]
        vals = [model[abs(x) - 1] == (x > 0) for x in lits]
        model[v - 1] = all(vals) if op == "and" else any(vals)
    return model
