"""Executable semantics of multi-agent resource allocation systems.

Agents are numbered ``1..n``; owner ``0`` (:data:`FREE`) is the dummy agent
that holds every unallocated resource.  Resources are numbered ``0..|Res|-1``
in declaration order.  A state is a plain tuple ``owner[r]`` so that it can be
hashed, compared and used as a dictionary key by the search code.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    HorizonTooShort,
    NotExecutable,
    NotExecutableAtStep,
    UnknownAgent,
    ValidationError,
)

FREE = 0

State = tuple  # tuple[int, ...], owner per resource


class ActionKind(enum.Enum):
    REQUEST = "req"
    RELEASE = "rel"
    RELEASE_ALL = "rel_all"
    IDLE = "idle"


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    resource: int | None = None

    def __post_init__(self):
        needs_resource = self.kind in (ActionKind.REQUEST, ActionKind.RELEASE)
        if needs_resource != (self.resource is not None):
            raise ValueError(f"malformed action {self.kind.value} {self.resource}")

    @staticmethod
    def request(r: int) -> "Action":
        return Action(ActionKind.REQUEST, r)

    @staticmethod
    def release(r: int) -> "Action":
        return Action(ActionKind.RELEASE, r)

    def label(self, mra: "Mra | None" = None) -> str:
        if self.resource is None:
            return self.kind.value
        name = mra.resources[self.resource].label if mra else f"#{self.resource}"
        return f"{self.kind.value}_{name}"

    def __str__(self):
        return self.label()


IDLE = Action(ActionKind.IDLE)
RELEASE_ALL = Action(ActionKind.RELEASE_ALL)

ActionProfile = tuple  # tuple[Action, ...], one entry per agent 1..n


@dataclass(frozen=True)
class ResourceType:
    name: str
    price: int
    count: int


@dataclass(frozen=True)
class Resource:
    index: int
    type_index: int
    instance: int
    name: str  # "<type>#<i>"
    label: str  # "r<j>", the global alias used in reports
    price: int


@dataclass(frozen=True)
class Goal:
    """Hold one resource of every type in ``types`` for ``period + 1``
    consecutive states, starting no later than ``deadline - period``."""

    types: tuple[int, ...]
    period: int
    deadline: int
    owner: int | None = None


@dataclass(frozen=True)
class Mra:
    agents: tuple[str, ...]
    types: tuple[ResourceType, ...]
    goals: tuple[Goal, ...]
    agent_price: int | None = None
    resource_labels: tuple[str, ...] | None = None
    resources: tuple[Resource, ...] = field(init=False, repr=False, compare=False)
    by_type: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "types", tuple(self.types))
        object.__setattr__(self, "goals", tuple(self.goals))
        if self.resource_labels is not None:
            labels = tuple(self.resource_labels)
            default = tuple(f"r{j + 1}" for j in range(len(labels)))
            object.__setattr__(self, "resource_labels", None if labels == default else labels)
        resources, by_type = [], []
        for ti, rt in enumerate(self.types):
            members = []
            for i in range(1, rt.count + 1):
                idx = len(resources)
                label = (self.resource_labels[idx] if self.resource_labels
                         else f"r{idx + 1}")
                resources.append(Resource(idx, ti, i, f"{rt.name}#{i}", label, rt.price))
                members.append(idx)
            by_type.append(tuple(members))
        object.__setattr__(self, "resources", tuple(resources))
        object.__setattr__(self, "by_type", tuple(by_type))
        self._validate()

    def _validate(self):
        if not self.agents:
            raise ValidationError("an MRA needs at least one agent")
        if len(set(self.agents)) != len(self.agents):
            raise ValidationError("duplicate agent names")
        if len({t.name for t in self.types}) != len(self.types):
            raise ValidationError("duplicate resource type names")
        for t in self.types:
            if t.price < 0 or t.count < 0:
                raise ValidationError(f"resource type {t.name}: negative price or count")
        if not self.resources:
            raise ValidationError("an MRA needs at least one resource")
        if self.resource_labels is not None and (
                len(self.resource_labels) != len(self.resources)
                or len(set(self.resource_labels)) != len(self.resource_labels)):
            raise ValidationError("resource labels must be unique, one per resource")
        if not self.goals:
            raise ValidationError("an MRA needs at least one goal")
        owned = {g.owner is not None for g in self.goals}
        if len(owned) > 1:
            raise ValidationError("goals must be either all assigned or all unassigned")
        for g in self.goals:
            if not g.types:
                raise ValidationError("goal with empty resource composition")
            if len(set(g.types)) != len(g.types):
                raise ValidationError("duplicate type in goal composition")
            if any(t < 0 or t >= len(self.types) for t in g.types):
                raise ValidationError("goal refers to an unknown resource type")
            if g.period < 0 or g.deadline < 1:
                raise ValidationError("goal period must be >= 0 and deadline >= 1")
            if g.period > g.deadline:
                raise ValidationError(f"goal period {g.period} exceeds deadline {g.deadline}")
            if g.owner is not None and not 1 <= g.owner <= len(self.agents):
                raise ValidationError(f"goal owner {g.owner} is not an agent")
        if self.agent_price is not None and self.agent_price < 0:
            raise ValidationError("agent price must be non-negative")
        if self.is_general and self.agent_price is None:
            raise ValidationError("general-goal systems require an agent price")

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    @property
    def n_resources(self) -> int:
        return len(self.resources)

    @property
    def is_general(self) -> bool:
        return self.goals[0].owner is None

    def agent_ids(self) -> range:
        return range(1, len(self.agents) + 1)

    def agent_name(self, a: int) -> str:
        return "a0" if a == FREE else self.agents[a - 1]

    def agent_id(self, name: str) -> int:
        try:
            return self.agents.index(name) + 1
        except ValueError:
            raise UnknownAgent(f"unknown agent {name!r}") from None

    def resource_id(self, name: str) -> int:
        for res in self.resources:
            if name in (res.name, res.label):
                return res.index
        raise ValidationError(f"unknown resource {name!r}")

    def all_actions(self) -> list[Action]:
        """Every action an agent could ever take, in encoding order."""
        acts = [Action.request(r) for r in range(self.n_resources)]
        acts += [Action.release(r) for r in range(self.n_resources)]
        return acts + [RELEASE_ALL, IDLE]


@dataclass(frozen=True)
class Schedule:
    """Per-agent action rows; ``rows[a - 1][t]`` is agent ``a``'s action at step ``t``."""

    rows: tuple[tuple[Action, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if len({len(r) for r in self.rows}) > 1:
            raise ValidationError("schedule rows have different lengths")

    @property
    def steps(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def profile(self, t: int) -> ActionProfile:
        return tuple(row[t] for row in self.rows)

    @classmethod
    def from_profiles(cls, profiles: Sequence[ActionProfile], n_agents: int) -> "Schedule":
        return cls(tuple(tuple(p[a] for p in profiles) for a in range(n_agents)))

    @classmethod
    def idle(cls, n_agents: int, steps: int) -> "Schedule":
        return cls(tuple((IDLE,) * steps for _ in range(n_agents)))


@dataclass(frozen=True)
class Run:
    states: tuple[State, ...]
    profiles: tuple[ActionProfile, ...]

    @property
    def horizon(self) -> int:
        return len(self.states) - 1


def horizon(mra: Mra) -> int:
    return max(g.deadline for g in mra.goals)


def initial_state(mra: Mra) -> State:
    return (FREE,) * mra.n_resources


def _check_agent(a: int, mra: Mra):
    if not 1 <= a <= mra.n_agents:
        raise UnknownAgent(f"agent id {a} out of range 1..{mra.n_agents}")


def available_actions(s: State, a: int, mra: Mra) -> set[Action]:
    _check_agent(a, mra)
    acts = {IDLE}
    held = False
    for r, owner in enumerate(s):
        if owner == FREE:
            acts.add(Action.request(r))
        elif owner == a:
            acts.add(Action.release(r))
            held = True
    if held:
        acts.add(RELEASE_ALL)
    return acts


def is_available(s: State, a: int, act: Action) -> bool:
    kind = act.kind
    if kind is ActionKind.IDLE:
        return True
    if kind is ActionKind.REQUEST:
        return 0 <= act.resource < len(s) and s[act.resource] == FREE
    if kind is ActionKind.RELEASE:
        return 0 <= act.resource < len(s) and s[act.resource] == a
    return a in s


def is_executable(s: State, ap: ActionProfile, mra: Mra) -> bool:
    if len(ap) != mra.n_agents:
        return False
    return all(is_available(s, a, act) for a, act in enumerate(ap, start=1))


def step(s: State, ap: ActionProfile, mra: Mra) -> State:
    if not is_executable(s, ap, mra):
        raise NotExecutable("action profile is not executable in this state")
    return _successor(s, ap)


def _successor(s: State, ap: ActionProfile) -> State:
    requesters: dict[int, int] = {}
    releasing_all = set()
    released = set()
    for a, act in enumerate(ap, start=1):
        kind = act.kind
        if kind is ActionKind.REQUEST:
            requesters[act.resource] = -1 if act.resource in requesters else a
        elif kind is ActionKind.RELEASE:
            released.add(act.resource)
        elif kind is ActionKind.RELEASE_ALL:
            releasing_all.add(a)
    nxt = list(s)
    for r, owner in enumerate(s):
        if owner == FREE:
            who = requesters.get(r, -1)
            if who > 0:
                nxt[r] = who
        elif owner in releasing_all or r in released:
            nxt[r] = FREE
    return tuple(nxt)


def simulate(mra: Mra, schedule: Schedule) -> Run:
    if len(schedule.rows) != mra.n_agents:
        raise ValidationError(
            f"schedule has {len(schedule.rows)} rows for {mra.n_agents} agents")
    s = initial_state(mra)
    states, profiles = [s], []
    for t in range(schedule.steps):
        ap = schedule.profile(t)
        for a, act in enumerate(ap, start=1):
            if not is_available(s, a, act):
                raise NotExecutableAtStep(t, mra.agent_name(a), act.label(mra))
        s = _successor(s, ap)
        states.append(s)
        profiles.append(ap)
    return Run(tuple(states), tuple(profiles))


def window_satisfied(states: Sequence[State], mra: Mra, goal: Goal, a: int,
                     last: int | None = None) -> bool:
    """Goal check over ``states``; windows must end at or before index ``last``."""
    if last is None:
        last = len(states) - 1
    p = goal.period
    for start in range(0, min(goal.deadline - p, last - p) + 1):
        span = states[start:start + p + 1]
        if all(any(all(st[r] == a for st in span) for r in mra.by_type[tau])
               for tau in goal.types):
            return True
    return False


def goal_satisfied(run: Run, goal: Goal, a: int, mra: Mra) -> bool:
    if run.horizon < goal.deadline:
        raise HorizonTooShort(
            f"run of horizon {run.horizon} cannot decide a goal with deadline {goal.deadline}")
    return window_satisfied(run.states, mra, goal, a)


def goal_achievers(run: Run, goal: Goal, mra: Mra) -> list[int]:
    """Agents satisfying ``goal`` on ``run`` (only the owner is eligible for owned goals)."""
    candidates = [goal.owner] if goal.owner is not None else list(mra.agent_ids())
    return [a for a in candidates if goal_satisfied(run, goal, a, mra)]


def all_goals_satisfied(run: Run, mra: Mra) -> bool:
    return all(goal_achievers(run, g, mra) for g in mra.goals)


def used_resources(states: Iterable[State], mra: Mra) -> set[int]:
    used = set()
    for s in states:
        used.update(r for r, owner in enumerate(s) if owner != FREE)
    return used


def used_agents(states: Iterable[State]) -> set[int]:
    used = set()
    for s in states:
        used.update(owner for owner in s if owner != FREE)
    return used


def resource_cost(run: Run, mra: Mra) -> int:
    return sum(mra.resources[r].price for r in used_resources(run.states, mra))


def agent_cost(run: Run, mra: Mra) -> int:
    return len(used_agents(run.states)) * (mra.agent_price or 0)


def mra_cost(run: Run, mra: Mra) -> int:
    return resource_cost(run, mra) + agent_cost(run, mra)
