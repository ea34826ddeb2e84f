"""Text formats: MRA system files, WCNF, solver output and schedule reports.

MRA files are YAML documents::

    agents: [a1, a2, a3]
    resource_types:
      - {name: t1, price: 1, count: 2}
    goals:
      - {agent: a1, types: [t1], period: 0, deadline: 4}
    agent_price: 5          # optional; required when goals carry no agent

Resource instances are named ``<type>#<i>`` in declaration order and also get
the global alias ``r<j>`` (1-based over all resources), which is what schedule
tables use.
"""
from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

import yaml

from .core import (
    IDLE,
    RELEASE_ALL,
    Action,
    Goal,
    Mra,
    ResourceType,
    Run,
    Schedule,
    agent_cost,
    goal_achievers,
    horizon,
    resource_cost,
    used_agents,
    used_resources,
)
from .errors import MalformedOutput, ParseError, ValidationError

if TYPE_CHECKING:
    from .strategy import SynthesisResult

MAX_WEIGHT = 2**63 - 1


# --------------------------------------------------------------------------
# MRA system documents
# --------------------------------------------------------------------------

def _pos(node):
    return node.start_mark.line + 1, node.start_mark.column + 1


def _fail(node, message):
    line, col = _pos(node)
    raise ValidationError(message, line, col)


def _scalar(node, what):
    if not isinstance(node, yaml.ScalarNode):
        _fail(node, f"{what} must be a scalar")
    return node.value


def _int(node, what, lo=0, hi=MAX_WEIGHT):
    raw = _scalar(node, what)
    try:
        value = int(raw)
    except ValueError:
        _fail(node, f"{what} must be an integer, got {raw!r}")
    if value < lo:
        _fail(node, f"{what} must be >= {lo}, got {value}")
    if value > hi:
        _fail(node, f"{what} exceeds the 64-bit weight range")
    return value


def _seq(node, what):
    if not isinstance(node, yaml.SequenceNode):
        _fail(node, f"{what} must be a list")
    return node.value


def _mapping(node, what, allowed, required):
    if not isinstance(node, yaml.MappingNode):
        _fail(node, f"{what} must be a mapping")
    out = {}
    for key, value in node.value:
        name = _scalar(key, "key")
        if name not in allowed:
            _fail(key, f"unknown key {name!r} in {what}")
        if name in out:
            _fail(key, f"duplicate key {name!r} in {what}")
        out[name] = value
    for name in required:
        if name not in out:
            _fail(node, f"{what} is missing {name!r}")
    return out


def parse_mra(text: str) -> Mra:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise ParseError(str(exc.problem), mark.line + 1, mark.column + 1) from None
    if root is None:
        raise ParseError("empty document", 1, 1)
    doc = _mapping(root, "document", {"agents", "resource_types", "goals", "agent_price"},
                   ("agents", "resource_types", "goals"))

    agents = [_scalar(n, "agent name") for n in _seq(doc["agents"], "agents")]
    if not agents:
        _fail(doc["agents"], "at least one agent is required")
    if len(set(agents)) != len(agents):
        _fail(doc["agents"], "duplicate agent names")

    types, labels, type_index = [], [], {}
    for tnode in _seq(doc["resource_types"], "resource_types"):
        t = _mapping(tnode, "resource type", {"name", "price", "count", "labels"},
                     ("name", "price", "count"))
        name = _scalar(t["name"], "type name")
        if name in type_index:
            _fail(t["name"], f"duplicate resource type {name!r}")
        count = _int(t["count"], "count")
        if "labels" in t:
            lab = [_scalar(n, "label") for n in _seq(t["labels"], "labels")]
            if len(lab) != count:
                _fail(t["labels"], "one label per instance is required")
            labels.append(lab)
        else:
            labels.append(None)
        type_index[name] = len(types)
        types.append(ResourceType(name, _int(t["price"], "price"), count))
    if sum(t.count for t in types) == 0:
        _fail(doc["resource_types"], "at least one resource is required")

    goals, owned = [], None
    for gnode in _seq(doc["goals"], "goals"):
        g = _mapping(gnode, "goal", {"agent", "types", "period", "deadline"},
                     ("types", "deadline"))
        owner = None
        if "agent" in g:
            aname = _scalar(g["agent"], "agent")
            if aname not in agents:
                _fail(g["agent"], f"unknown agent {aname!r}")
            owner = agents.index(aname) + 1
        if owned is None:
            owned = owner is not None
        elif owned != (owner is not None):
            _fail(gnode, "goals must be either all assigned to agents or all unassigned")
        comp = []
        for tn in _seq(g["types"], "types"):
            tname = _scalar(tn, "type")
            if tname not in type_index:
                _fail(tn, f"unknown resource type {tname!r}")
            if type_index[tname] in comp:
                _fail(tn, f"duplicate type {tname!r} in goal")
            comp.append(type_index[tname])
        if not comp:
            _fail(g["types"], "goal composition must not be empty")
        period = _int(g["period"], "period") if "period" in g else 0
        deadline = _int(g["deadline"], "deadline", lo=1)
        if period > deadline:
            _fail(gnode, f"period {period} exceeds deadline {deadline}")
        goals.append(Goal(tuple(comp), period, deadline, owner))
    if not goals:
        _fail(doc["goals"], "at least one goal is required")

    agent_price = None
    if "agent_price" in doc:
        agent_price = _int(doc["agent_price"], "agent_price")
    elif not owned:
        _fail(root, "agent_price is required when goals are not assigned to agents")

    flat_labels = None
    if any(lab is not None for lab in labels):
        flat_labels, j = [], 0
        for t, lab in zip(types, labels):
            for i in range(t.count):
                j += 1
                flat_labels.append(lab[i] if lab else f"r{j}")
    try:
        return Mra(tuple(agents), tuple(types), tuple(goals), agent_price,
                   tuple(flat_labels) if flat_labels else None)
    except ValidationError as exc:
        line, col = _pos(root)
        raise ValidationError(str(exc), line, col) from None


def _default_labels(mra: Mra) -> bool:
    return all(res.label == f"r{res.index + 1}" for res in mra.resources)


def emit_mra(mra: Mra) -> str:
    lines = [f"agents: [{', '.join(mra.agents)}]", "resource_types:"]
    custom = not _default_labels(mra)
    for ti, t in enumerate(mra.types):
        entry = f"  - {{name: {t.name}, price: {t.price}, count: {t.count}"
        if custom:
            labs = [mra.resources[r].label for r in mra.by_type[ti]]
            entry += f", labels: [{', '.join(labs)}]"
        lines.append(entry + "}")
    lines.append("goals:")
    for g in mra.goals:
        comp = ", ".join(mra.types[t].name for t in g.types)
        owner = f"agent: {mra.agent_name(g.owner)}, " if g.owner is not None else ""
        lines.append(f"  - {{{owner}types: [{comp}], period: {g.period}, deadline: {g.deadline}}}")
    if mra.agent_price is not None:
        lines.append(f"agent_price: {mra.agent_price}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# WCNF
# --------------------------------------------------------------------------

@dataclass
class WcnfDocument:
    n_vars: int
    hard: list[list[int]] = field(default_factory=list)
    soft: list[tuple[list[int], int]] = field(default_factory=list)


def _soft_clauses(formula) -> list[tuple[list[int], int]]:
    out = []
    for clause, weight in formula.soft:
        out.append(([clause] if isinstance(clause, int) else list(clause), weight))
    return out


def emit_wcnf(formula, fmt: str = "classic") -> str:
    """Serialize anything with ``n_vars``, ``hard`` and ``soft`` attributes.

    Soft entries may be ``(literal, weight)`` or ``(clause, weight)``.
    """
    soft = _soft_clauses(formula)
    for _, w in soft:
        if w <= 0:
            raise ValidationError("soft clauses must have positive weight")
    out = []
    if fmt == "classic":
        top = 1 + sum(w for _, w in soft)
        if top > MAX_WEIGHT:
            raise ValidationError("total soft weight exceeds the 64-bit range")
        out.append(f"p wcnf {formula.n_vars} {len(formula.hard) + len(soft)} {top}")
        out.extend(_clause_line(top, c) for c in formula.hard)
    elif fmt == "2022":
        out.extend(_clause_line("h", c) for c in formula.hard)
    else:
        raise ValueError(f"unknown WCNF format {fmt!r}")
    out.extend(_clause_line(w, c) for c, w in soft)
    return "\n".join(out) + "\n"


def _clause_line(head, clause) -> str:
    return " ".join([str(head), *map(str, clause), "0"])


def parse_wcnf(text: str) -> WcnfDocument:
    """Parse classic (``p wcnf`` header) or 2022 (``h`` markers) WCNF."""
    n_vars, top = None, None
    hard, soft = [], []
    max_var = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        fields = line.split()
        if not fields or fields[0] == "c":
            continue
        if fields[0] == "p":
            if len(fields) < 4 or fields[1] != "wcnf":
                raise ParseError(f"bad header {line!r}", lineno, 1)
            n_vars = int(fields[2])
            top = int(fields[4]) if len(fields) > 4 else None
            continue
        if fields[-1] != "0":
            raise ParseError("clause line must end with 0", lineno, len(line))
        lits = [int(x) for x in fields[1:-1]]
        if any(lit == 0 for lit in lits):
            raise ParseError("literal 0 inside clause", lineno, 1)
        max_var = max([max_var] + [abs(x) for x in lits])
        if fields[0] == "h":
            hard.append(lits)
            continue
        weight = int(fields[0])
        if top is not None and weight >= top:
            hard.append(lits)
        else:
            if weight <= 0:
                raise ParseError("soft clause with non-positive weight", lineno, 1)
            soft.append((lits, weight))
    if n_vars is not None and max_var > n_vars:
        raise ParseError(f"variable {max_var} exceeds declared count {n_vars}", 1, 1)
    return WcnfDocument(n_vars if n_vars is not None else max_var, hard, soft)


# --------------------------------------------------------------------------
# External solver output
# --------------------------------------------------------------------------

class SolverStatus(enum.Enum):
    OPTIMUM_FOUND = "OPTIMUM FOUND"
    UNSATISFIABLE = "UNSATISFIABLE"
    UNKNOWN = "UNKNOWN"


@dataclass
class SolverVerdict:
    status: SolverStatus
    model: list[bool] | None = None  # model[v - 1] is the value of variable v
    objective: int | None = None


_BINARY = re.compile(r"^[01]+$")


def parse_solver_output(text: str, var_count: int) -> SolverVerdict:
    """Read ``s``/``v``/``o`` lines of a MaxSAT solver.

    ``v`` lines are either signed literal lists (possibly spread over several
    lines, optionally 0-terminated) or one contiguous 0/1 string.  Variables
    the solver does not mention default to false.
    """
    status, objective = None, None
    v_tokens: list[str] = []
    for line in text.splitlines():
        fields = line.split()
        if not fields:
            continue
        tag = fields[0]
        if tag == "s":
            word = " ".join(fields[1:]).upper()
            if word == "OPTIMUM FOUND":
                status = SolverStatus.OPTIMUM_FOUND
            elif word == "UNSATISFIABLE":
                status = SolverStatus.UNSATISFIABLE
            else:
                status = SolverStatus.UNKNOWN
        elif tag == "o" and len(fields) > 1:
            objective = int(fields[1])
        elif tag == "v":
            v_tokens.extend(fields[1:])
    if status is None:
        raise MalformedOutput("solver output has no status line")
    if status is SolverStatus.UNSATISFIABLE:
        return SolverVerdict(status, None, objective)
    if not v_tokens:
        if status is SolverStatus.OPTIMUM_FOUND:
            raise MalformedOutput("optimum reported without a model")
        return SolverVerdict(status, None, objective)

    model = [False] * var_count
    if len(v_tokens) == 1 and _BINARY.match(v_tokens[0]) and (
            len(v_tokens[0]) > 1 or var_count == 1):
        for i, ch in enumerate(v_tokens[0][:var_count]):
            model[i] = ch == "1"
    else:
        for tok in v_tokens:
            try:
                lit = int(tok)
            except ValueError:
                raise MalformedOutput(f"bad literal {tok!r} in v line") from None
            if lit != 0 and abs(lit) <= var_count:
                model[abs(lit) - 1] = lit > 0
    return SolverVerdict(status, model, objective)


def emit_solver_output(model: Sequence[bool], objective: int | None = None,
                       binary: bool = False) -> str:
    """Inverse of :func:`parse_solver_output` for an optimum."""
    lines = []
    if objective is not None:
        lines.append(f"o {objective}")
    lines.append("s OPTIMUM FOUND")
    if binary:
        lines.append("v " + "".join("1" if b else "0" for b in model))
    else:
        lits = [str(i if b else -i) for i, b in enumerate(model, start=1)]
        lines.append("v " + " ".join(lits + ["0"]))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Schedules and reports
# --------------------------------------------------------------------------

def parse_action(token: str, mra: Mra) -> Action:
    if token == "idle":
        return IDLE
    if token == "rel_all":
        return RELEASE_ALL
    kind, _, res = token.partition("_")
    if kind == "req" and res:
        return Action.request(mra.resource_id(res))
    if kind == "rel" and res:
        return Action.release(mra.resource_id(res))
    raise ValidationError(f"unknown action {token!r}")


def parse_schedule(text: str, mra: Mra, steps: int | None = None) -> Schedule:
    """Read a schedule table or a JSON report carrying a ``schedule`` object.

    Actions past ``steps`` (default: the horizon) are dropped; they cannot
    influence any goal.
    """
    steps = horizon(mra) if steps is None else steps
    stripped = text.lstrip()
    rows: dict[str, list[str]] = {}
    if stripped.startswith("{"):
        data = json.loads(stripped)
        rows = {a: list(acts) for a, acts in data.get("schedule", data).items()}
    else:
        for lineno, line in enumerate(text.splitlines(), start=1):
            # '#' also occurs in resource names, so only whole-line comments
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            name, sep, acts = line.partition(":")
            if not sep:
                raise ParseError("expected '<agent>: <actions>'", lineno, 1)
            name = name.strip()
            if name in rows:
                raise ParseError(f"duplicate row for agent {name!r}", lineno, 1)
            rows[name] = acts.replace(",", " ").split()
    table = []
    for a in mra.agent_ids():
        name = mra.agent_name(a)
        if name not in rows:
            raise ValidationError(f"schedule has no row for agent {name!r}")
        acts = rows.pop(name)
        if len(acts) < steps:
            raise ValidationError(
                f"agent {name!r} has {len(acts)} actions, {steps} steps are required")
        table.append(tuple(parse_action(tok, mra) for tok in acts[:steps]))
    if rows:
        raise ValidationError(f"schedule rows for unknown agents: {sorted(rows)}")
    return Schedule(tuple(table))


def schedule_table(mra: Mra, schedule: Schedule) -> dict[str, list[str]]:
    return {mra.agent_name(a): [act.label(mra) for act in schedule.rows[a - 1]]
            for a in mra.agent_ids()}


def emit_schedule_text(mra: Mra, schedule: Schedule) -> str:
    table = schedule_table(mra, schedule)
    return "".join(f"{name}: {' '.join(acts)}\n" for name, acts in table.items())


def _state_text(mra: Mra, state) -> str:
    held = [f"{mra.resources[r].label}={mra.agent_name(o)}"
            for r, o in enumerate(state) if o]
    return "{" + ", ".join(held) + "}"


def run_summary(mra: Mra, schedule: Schedule, run: Run) -> dict:
    used_r = used_resources(run.states, mra)
    used_a = used_agents(run.states)
    goals = []
    for g in mra.goals:
        achievers = goal_achievers(run, g, mra)
        goals.append({
            "agent": mra.agent_name(g.owner) if g.owner is not None else None,
            "types": [mra.types[t].name for t in g.types],
            "period": g.period,
            "deadline": g.deadline,
            "satisfied": bool(achievers),
            "achieved_by": [mra.agent_name(a) for a in achievers],
        })
    rc, ac = resource_cost(run, mra), agent_cost(run, mra)
    return {
        "horizon": run.horizon,
        "schedule": schedule_table(mra, schedule),
        "states": [_state_text(mra, s) for s in run.states],
        "goals": goals,
        "winning": all(g["satisfied"] for g in goals),
        "costs": {"resource": rc, "agent": ac, "mra": rc + ac},
        "used_resources": [mra.resources[r].label for r in sorted(used_r)],
        "unused_resources": [res.label for res in mra.resources if res.index not in used_r],
        "used_agents": [mra.agent_name(a) for a in sorted(used_a)],
        "unused_agents": [mra.agent_name(a) for a in mra.agent_ids() if a not in used_a],
    }


def _table_lines(mra: Mra, schedule: Schedule) -> list[str]:
    table = schedule_table(mra, schedule)
    header = ["time step:"] + [str(t) for t in range(schedule.steps)]
    body = [[f"{name}:"] + acts for name, acts in table.items()]
    widths = [max(len(row[i]) for row in [header] + body) for i in range(len(header))]
    fmt = lambda row: " | ".join(c.rjust(w) if i == 0 else c.ljust(w)
                                 for i, (c, w) in enumerate(zip(row, widths))).rstrip()
    return [fmt(header)] + [fmt(row) for row in body]


def _summary_lines(mra: Mra, summary: dict) -> list[str]:
    c = summary["costs"]
    lines = [f"winning: {'yes' if summary['winning'] else 'no'}"]
    for g in summary["goals"]:
        who = g["agent"] or "any agent"
        by = f" (by {', '.join(g['achieved_by'])})" if g["achieved_by"] else ""
        lines.append(f"  goal {who} {{{', '.join(g['types'])}}} p={g['period']} "
                     f"d={g['deadline']}: {'satisfied' if g['satisfied'] else 'violated'}{by}")
    lines.append(f"resource cost: {c['resource']}")
    if mra.agent_price is not None:
        lines.append(f"agent cost: {c['agent']}")
        lines.append(f"mra cost: {c['mra']}")
    lines.append(f"used resources: {', '.join(summary['used_resources']) or '-'}")
    lines.append(f"unused resources: {', '.join(summary['unused_resources']) or '-'}")
    lines.append(f"used agents: {', '.join(summary['used_agents']) or '-'}")
    lines.append(f"unused agents: {', '.join(summary['unused_agents']) or '-'}")
    return lines


def emit_schedule(mra: Mra, schedule: Schedule, run: Run, fmt: str = "text") -> str:
    summary = run_summary(mra, schedule, run)
    if fmt == "json":
        return json.dumps(summary, indent=2) + "\n"
    lines = _table_lines(mra, schedule) + [""]
    lines += [f"s{t} = {s}" for t, s in enumerate(summary["states"])] + [""]
    return "\n".join(lines + _summary_lines(mra, summary)) + "\n"


def emit_report(result: "SynthesisResult", fmt: str = "text") -> str:
    mra = result.mra
    summary = run_summary(mra, result.schedule, result.run)
    strategy = [{"state": _state_text(mra, s),
                 "profile": [act.label(mra) for act in ap]}
                for s, ap in result.strategy_map.items()]
    if fmt == "json":
        summary.update({
            "mode": result.mode,
            "forfeited_weight": result.forfeited,
            "achieved_weight": result.achieved,
            "strategy_map": {"kind": "partial, path-realized", "entries": strategy},
            "pruned_mra": emit_mra(result.pruned_mra),
            "pruned_schedule": schedule_table(result.pruned_mra, result.pruned_schedule),
        })
        return json.dumps(summary, indent=2) + "\n"
    lines = [f"optimisation mode: {result.mode}", ""]
    lines += _table_lines(mra, result.schedule) + [""]
    lines += _summary_lines(mra, summary)
    lines.append(f"forfeited soft weight: {result.forfeited}")
    lines += ["", "strategy map (partial, path-realized):"]
    lines += [f"  {e['state']} -> ({', '.join(e['profile'])})" for e in strategy]
    lines += ["", "pruned system:"]
    lines += ["  " + ln for ln in emit_mra(result.pruned_mra).splitlines()]
    return "\n".join(lines) + "\n"
