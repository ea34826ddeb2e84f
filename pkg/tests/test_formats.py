import json
import random
from types import SimpleNamespace

import pytest
from hypothesis import given, settings, strategies as st

from mras.core import Schedule, simulate
from mras.errors import MalformedOutput, ParseError, ValidationError
from mras.formats import (
    SolverStatus,
    emit_mra,
    emit_schedule,
    emit_solver_output,
    emit_wcnf,
    parse_mra,
    parse_schedule,
    parse_solver_output,
    parse_wcnf,
)
from mras.generator import small_random

from conftest import fixture_text

SMALL = SimpleNamespace(n_vars=3, hard=[[1, -2]], soft=[(3, 5)])


# -- system files ----------------------------------------------------------

def test_parse_example(mex):
    assert mex.n_agents == 3 and mex.n_resources == 6
    assert [t.price for t in mex.types] == [1, 2, 3]
    assert [r.name for r in mex.resources][:3] == ["t1#1", "t1#2", "t2#1"]
    assert mex.resource_id("r5") == mex.resource_id("t3#1") == 4


BASE = """agents: [a1, a2]
resource_types:
  - {name: t1, price: 1, count: 1}
goals:
"""


def test_period_beyond_deadline_rejected():
    with pytest.raises(ValidationError) as info:
        parse_mra(BASE + "  - {agent: a1, types: [t1], period: 3, deadline: 1}\n")
    assert info.value.line == 5


def test_mixed_goal_modes_rejected():
    text = BASE + ("  - {agent: a1, types: [t1], deadline: 1}\n"
                   "  - {types: [t1], deadline: 2}\n")
    with pytest.raises(ValidationError) as info:
        parse_mra(text)
    assert info.value.line == 6


@pytest.mark.parametrize("goal, col", [("{agent: a1, types: [t9], deadline: 1}", 25),
                                       ("{agent: a7, types: [t1], deadline: 1}", 13)])
def test_unknown_names_positioned(goal, col):
    with pytest.raises(ValidationError) as info:
        parse_mra(BASE + f"  - {goal}\n")
    assert (info.value.line, info.value.column) == (5, col)


def test_general_goals_need_agent_price():
    with pytest.raises(ValidationError, match="agent_price"):
        parse_mra(BASE + "  - {types: [t1], deadline: 1}\n")


def test_oversized_price_rejected():
    with pytest.raises(ValidationError):
        parse_mra(BASE.replace("price: 1", f"price: {2**64}")
                  + "  - {agent: a1, types: [t1], deadline: 1}\n")


def test_syntax_error_positioned():
    with pytest.raises(ParseError) as info:
        parse_mra("agents: [a1\n")
    assert info.value.line is not None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_system_round_trip(seed, general):
    m = small_random(random.Random(seed), general=general)
    assert parse_mra(emit_mra(m)) == m


def test_fixture_round_trip(mex, mex_general):
    assert parse_mra(emit_mra(mex)) == mex
    assert parse_mra(emit_mra(mex_general)) == mex_general


# -- WCNF ------------------------------------------------------------------

def test_classic_wcnf():
    assert emit_wcnf(SMALL).splitlines() == ["p wcnf 3 2 6", "6 1 -2 0", "5 3 0"]


def test_classic_wcnf_without_softs():
    f = SimpleNamespace(n_vars=2, hard=[[1], [-2]], soft=[])
    assert emit_wcnf(f).splitlines()[0] == "p wcnf 2 2 1"


def test_2022_wcnf():
    assert emit_wcnf(SMALL, "2022").splitlines() == ["h 1 -2 0", "5 3 0"]


def test_zero_weight_soft_rejected():
    with pytest.raises(ValidationError):
        emit_wcnf(SimpleNamespace(n_vars=1, hard=[], soft=[(1, 0)]))


@st.composite
def formulas(draw):
    n = draw(st.integers(1, 12))
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v]))
    hard = draw(st.lists(st.lists(lit, min_size=0, max_size=4), max_size=10))
    soft = draw(st.lists(st.tuples(st.lists(lit, min_size=1, max_size=3),
                                   st.integers(1, 2**40)), max_size=6))
    return SimpleNamespace(n_vars=n, hard=hard, soft=soft)


def _multiset(clauses):
    return sorted(tuple(c) for c in clauses)


@settings(max_examples=200, deadline=None)
@given(formulas(), st.sampled_from(["classic", "2022"]))
def test_wcnf_round_trip(f, fmt):
    doc = parse_wcnf(emit_wcnf(f, fmt))
    assert _multiset(doc.hard) == _multiset(f.hard)
    assert sorted((tuple(c), w) for c, w in doc.soft) == sorted((tuple(c), w) for c, w in f.soft)
    if fmt == "classic":
        assert doc.n_vars == f.n_vars


@settings(max_examples=100, deadline=None)
@given(formulas())
def test_top_exceeds_soft_sum(f):
    top = int(emit_wcnf(f).splitlines()[0].split()[4])
    assert top > sum(w for _, w in f.soft)


def test_wcnf_rejects_undeclared_variable():
    with pytest.raises(ParseError):
        parse_wcnf("p wcnf 2 1 3\n3 1 5 0\n")


# -- solver output ---------------------------------------------------------

def test_literal_list_model():
    v = parse_solver_output("s OPTIMUM FOUND\nv 1 -2 3 0", 3)
    assert v.status is SolverStatus.OPTIMUM_FOUND and v.model == [True, False, True]


def test_unsatisfiable_has_no_model():
    v = parse_solver_output("s UNSATISFIABLE", 3)
    assert v.status is SolverStatus.UNSATISFIABLE and v.model is None


def test_binary_string_model():
    v = parse_solver_output("o 4\ns OPTIMUM FOUND\nv 101", 3)
    assert v.model == [True, False, True] and v.objective == 4


def test_missing_status_line():
    with pytest.raises(MalformedOutput):
        parse_solver_output("v 1 2 3 0\n", 3)


def test_multi_line_literal_model():
    v = parse_solver_output("s OPTIMUM FOUND\nv -1 2\nv 3 0\n", 3)
    assert v.model == [False, True, True]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.booleans(), min_size=1, max_size=80), st.booleans())
def test_solver_output_round_trip(model, binary):
    assert parse_solver_output(emit_solver_output(model, 3, binary), len(model)).model == model


# -- schedules and reports -------------------------------------------------

def test_cheapest_report(mex, cheapest):
    text = emit_schedule(mex, cheapest, simulate(mex, cheapest))
    a2 = next(line for line in text.splitlines() if line.strip().startswith("a2:"))
    assert [c.strip() for c in a2.split("|")][1:3] == ["idle", "req_r2"]
    assert "resource cost: 7" in text
    data = json.loads(emit_schedule(mex, cheapest, simulate(mex, cheapest), "json"))
    assert data["schedule"]["a2"][:2] == ["idle", "req_r2"]
    assert data["costs"]["resource"] == 7 and data["unused_resources"] == ["r4", "r6"]


def test_idle_report(mex):
    idle = Schedule.idle(3, 4)
    data = json.loads(emit_schedule(mex, idle, simulate(mex, idle), "json"))
    assert all(acts == ["idle"] * 4 for acts in data["schedule"].values())
    assert data["costs"]["resource"] == 0 and not data["winning"]


def test_two_agents_report(mex_general, two_agents):
    data = json.loads(emit_schedule(mex_general, two_agents, simulate(mex_general, two_agents), "json"))
    assert data["schedule"]["a3"] == ["idle"] * 4
    assert data["used_agents"] == ["a1", "a2"] and data["unused_agents"] == ["a3"]


def test_schedule_drops_step_k_actions(mex):
    # the bundled tables list an action at step k as well
    assert len(fixture_text("mex_cost7.sched").splitlines()[1].split()) == 6
    assert parse_schedule(fixture_text("mex_cost7.sched"), mex).steps == 4


def test_schedule_reads_json_report(mex, cheapest):
    report = emit_schedule(mex, cheapest, simulate(mex, cheapest), "json")
    assert parse_schedule(report, mex) == cheapest


def test_schedule_errors(mex):
    with pytest.raises(ValidationError):
        parse_schedule("a1: idle idle\na2: idle idle\na3: idle idle\n", mex)
    with pytest.raises(ValidationError):
        parse_schedule("a1: idle idle idle idle\na2: idle idle idle idle\n", mex)
    with pytest.raises(ValidationError):
        parse_schedule("a1: fly idle idle idle\na2: idle idle idle idle\n"
                       "a3: idle idle idle idle\n", mex)
