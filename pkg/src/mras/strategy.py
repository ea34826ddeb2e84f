"""From optimal assignments to validated schedules, strategy maps and pruned systems."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import (
    FREE,
    IDLE,
    Action,
    ActionKind,
    Mra,
    ResourceType,
    Run,
    Schedule,
    State,
    ActionProfile,
    agent_cost,
    all_goals_satisfied,
    horizon as mra_horizon,
    resource_cost,
    simulate,
    used_agents,
    used_resources,
)
from .encoder import Act, EncodeOptions, NuAgt, NuRes, Own, WcnfFormula, build
from .errors import InconsistentModel, NonUniform, PruneBrokeWinning
from .maxsat import MaxSatInstance, MaxSatResult, maxsat_builtin, maxsat_external


def decode(model: Sequence[bool], formula: WcnfFormula) -> Schedule:
    """Read the action one-hots of ``model`` and replay them.

    Raises :class:`InconsistentModel` when the model's owner variables
    disagree with the replayed run, or an agent-step has no chosen action.
    """
    mra, k, pool = formula.mra, formula.horizon, formula.pool
    actions = mra.all_actions()
    rows = []
    for a in mra.agent_ids():
        row = []
        for t in range(k):
            chosen = [x for x in actions if model[pool.lookup(Act(a, t, x)) - 1]]
            if len(chosen) != 1:
                raise InconsistentModel(
                    f"agent {mra.agent_name(a)} has {len(chosen)} actions at step {t}")
            row.append(chosen[0])
        rows.append(tuple(row))
    schedule = Schedule(tuple(rows))
    try:
        run = simulate(mra, schedule)
    except Exception as exc:
        raise InconsistentModel(f"decoded schedule does not replay: {exc}") from exc
    for t, s in enumerate(run.states):
        for r, owner in enumerate(s):
            if not model[pool.lookup(Own(r, t, owner)) - 1]:
                raise InconsistentModel(
                    f"model disagrees with replay on {mra.resources[r].label} at step {t}")
    return schedule


def extract_strategy_map(schedule: Schedule, run: Run) -> dict[State, ActionProfile]:
    """The partial state -> profile map realised on ``run`` (insertion order = first visit)."""
    strategy: dict[State, ActionProfile] = {}
    for t in range(schedule.steps):
        s, ap = run.states[t], schedule.profile(t)
        prev = strategy.setdefault(s, ap)
        if prev != ap:
            raise NonUniform(f"state at step {t} was already mapped to a different profile")
    return strategy


def normalize(mra: Mra, schedule: Schedule) -> Schedule:
    """Replace requests that are not granted (contested resources) by idle.

    The run is unchanged, uniformity is preserved (the rewrite depends only on
    the state and the profile), and afterwards no action mentions a resource
    that is never allocated or belongs to an agent that never allocates.
    """
    run = simulate(mra, schedule)
    rows = [list(row) for row in schedule.rows]
    for t in range(schedule.steps):
        nxt = run.states[t + 1]
        for a in mra.agent_ids():
            act = rows[a - 1][t]
            if act.kind is ActionKind.REQUEST and nxt[act.resource] != a:
                rows[a - 1][t] = IDLE
    return Schedule(tuple(tuple(r) for r in rows))


def _restrict(mra: Mra, keep_res: Sequence[int], keep_agents: Sequence[int]):
    res_map = {r: i for i, r in enumerate(keep_res)}
    agent_map = {a: i + 1 for i, a in enumerate(keep_agents)}
    types = tuple(ResourceType(t.name, t.price,
                               sum(1 for r in mra.by_type[ti] if r in res_map))
                  for ti, t in enumerate(mra.types))
    # keep_res is sorted, so the type-major order of the original is kept
    labels = tuple(mra.resources[r].label for r in keep_res)
    goals = tuple(g if g.owner is None else type(g)(g.types, g.period, g.deadline,
                                                     agent_map[g.owner])
                  for g in mra.goals)
    pruned = Mra(tuple(mra.agent_name(a) for a in keep_agents), types, goals,
                 mra.agent_price, labels)
    return pruned, res_map, agent_map


def prune(mra: Mra, schedule: Schedule, mode: str) -> tuple[Mra, Schedule]:
    """Drop never-allocated resources (and in ``mra`` mode never-allocating agents).

    Returns the pruned system together with the schedule rewritten for it;
    the pair is re-simulated and must still win.
    """
    mode = EncodeOptions(mode).mode
    if mode == "none":
        return mra, schedule
    norm = normalize(mra, schedule)
    run = simulate(mra, norm)
    keep_res = sorted(used_resources(run.states, mra))
    keep_agents = (sorted(used_agents(run.states)) if mode == "mra"
                   else list(mra.agent_ids()))
    if not keep_res or not keep_agents:
        raise PruneBrokeWinning("pruning would leave an empty system")
    pruned, res_map, agent_map = _restrict(mra, keep_res, keep_agents)

    def remap(act: Action) -> Action:
        return act if act.resource is None else Action(act.kind, res_map[act.resource])

    rows = tuple(tuple(remap(x) for x in norm.rows[a - 1]) for a in keep_agents)
    pruned_schedule = Schedule(rows)
    pruned_run = simulate(pruned, pruned_schedule)
    if not all_goals_satisfied(pruned_run, pruned):
        raise PruneBrokeWinning("schedule no longer wins on the pruned system")
    back = {i: r for r, i in res_map.items()}
    agents_back = {i: a for a, i in agent_map.items()}
    for s, ps in zip(run.states, pruned_run.states):
        expanded = [FREE] * mra.n_resources
        for i, o in enumerate(ps):
            expanded[back[i]] = agents_back.get(o, FREE)
        if tuple(expanded) != s:
            raise PruneBrokeWinning("pruned run diverges from the original run")
    return pruned, pruned_schedule


@dataclass
class SynthesisResult:
    mra: Mra
    mode: str
    formula: WcnfFormula
    model: list[bool]
    schedule: Schedule  # normalised: contested requests shown as idle
    raw_schedule: Schedule  # exactly as decoded from the model
    run: Run
    strategy_map: dict
    achieved: int
    forfeited: int
    pruned_mra: Mra
    pruned_schedule: Schedule

    @property
    def resource_cost(self) -> int:
        return resource_cost(self.run, self.mra)

    @property
    def agent_cost(self) -> int:
        return agent_cost(self.run, self.mra)

    @property
    def mra_cost(self) -> int:
        return self.resource_cost + self.agent_cost

    @property
    def used_resources(self) -> set[int]:
        return used_resources(self.run.states, self.mra)

    @property
    def unused_resources(self) -> set[int]:
        return set(range(self.mra.n_resources)) - self.used_resources

    @property
    def used_agents(self) -> set[int]:
        return used_agents(self.run.states)

    @property
    def unused_agents(self) -> set[int]:
        return set(self.mra.agent_ids()) - self.used_agents

    @property
    def cost(self) -> int:
        """The cost the optimisation mode minimises."""
        return {"none": 0, "resources": self.resource_cost, "mra": self.mra_cost}[self.mode]


def check_cost_identity(formula: WcnfFormula, model: Sequence[bool], run: Run):
    """Replayed costs must equal the prices of components whose nu literal is false."""
    mra, pool = formula.mra, formula.pool
    if formula.mode == "none":
        return
    flagged = sum(res.price for res in mra.resources
                  if not model[pool.lookup(NuRes(res.index)) - 1])
    if flagged != resource_cost(run, mra):
        raise InconsistentModel(
            f"resource cost {resource_cost(run, mra)} differs from nu weight {flagged}")
    if formula.mode == "mra":
        flagged = sum(mra.agent_price for a in mra.agent_ids()
                      if not model[pool.lookup(NuAgt(a)) - 1])
        if flagged != agent_cost(run, mra):
            raise InconsistentModel(
                f"agent cost {agent_cost(run, mra)} differs from nu weight {flagged}")


def tiebreak_instance(formula: WcnfFormula) -> MaxSatInstance:
    """Lexicographic weights: price first, then leave later-declared components unused.

    Soft ``i`` gets ``price * 2^n + 2^i``; the bonuses sum below ``2^n`` so
    they only separate optima of equal price.
    """
    n = len(formula.soft)
    soft = [(v, (w << n) + (1 << i)) for i, (v, w) in enumerate(formula.soft)]
    return MaxSatInstance(formula.n_vars, list(formula.hard), soft)


def solve_formula(formula: WcnfFormula, solver: str = "builtin", backend: str = "auto",
                  solver_cmd: str | None = None, wcnf_format: str = "classic",
                  timeout: float | None = None) -> MaxSatResult | None:
    if solver == "builtin":
        res = maxsat_builtin(tiebreak_instance(formula), backend=backend)
        if res is None:
            return None
        achieved = sum(w for v, w in formula.soft if res.model[v - 1])
        return MaxSatResult(res.model, achieved, formula.soft_total - achieved)
    if solver == "external":
        return maxsat_external(formula, solver_cmd, wcnf_format, timeout)
    raise ValueError(f"unknown solver {solver!r}")


def result_from_model(formula: WcnfFormula, model: Sequence[bool],
                      achieved: int | None = None) -> SynthesisResult:
    mra, mode = formula.mra, formula.mode
    model = list(model)
    total = formula.soft_total
    if achieved is None:
        achieved = sum(w for v, w in formula.soft if model[v - 1])
    forfeited = total - achieved
    raw = decode(model, formula)
    run = simulate(mra, raw)
    if not all_goals_satisfied(run, mra):
        raise InconsistentModel("decoded schedule is not winning")
    extract_strategy_map(raw, run)
    check_cost_identity(formula, model, run)
    schedule = normalize(mra, raw)
    strategy_map = extract_strategy_map(schedule, run)
    pruned, pruned_schedule = prune(mra, schedule, mode)
    return SynthesisResult(mra, mode, formula, model, schedule, raw, run, strategy_map,
                           achieved, forfeited, pruned, pruned_schedule)


def synthesize(mra: Mra, mode: str = "resources", solver: str = "builtin",
               backend: str = "auto", solver_cmd: str | None = None,
               wcnf_format: str = "classic", horizon: int | None = None,
               timeout: float | None = None) -> SynthesisResult | None:
    """Cost-optimal winning strategy, or ``None`` when no winning strategy exists."""
    if horizon is not None and horizon < mra_horizon(mra):
        raise ValueError(f"horizon {horizon} is shorter than the latest deadline")
    formula = build(mra, EncodeOptions(mode, horizon))
    res = solve_formula(formula, solver, backend, solver_cmd, wcnf_format, timeout)
    if res is None:
        return None
    result = result_from_model(formula, res.model, res.achieved)
    expected = {"none": 0, "resources": result.resource_cost, "mra": result.mra_cost}
    if formula.mode != "none" and expected[formula.mode] != result.forfeited:
        raise InconsistentModel(
            f"replayed cost {expected[formula.mode]} differs from forfeited weight "
            f"{result.forfeited}")
    return result
