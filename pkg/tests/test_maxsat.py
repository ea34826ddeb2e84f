import random

import pytest
from hypothesis import given, settings, strategies as st

from mras.encoder import EncodeOptions, build
from mras.errors import (
    MalformedOutput,
    ModelViolatesHardClauses,
    NotUnitSoft,
    SolverSpawnFailure,
    TooLarge,
)
from mras.maxsat import (
    SOLVER_ENV,
    CnfInstance,
    MaxSatInstance,
    SatOracle,
    SearchStats,
    maxsat_builtin,
    maxsat_exhaustive,
    maxsat_external,
    sat_decide,
    satisfies,
)
from mras.maxsat.cdcl import CdclSolver

from conftest import solver_cmd

BACKENDS = ["cdcl", "pysat"]


def random_cnf(rng, n, m, width=3):
    return [[v if rng.random() < 0.5 else -v
             for v in rng.sample(range(1, n + 1), rng.randint(1, min(width, n)))]
            for _ in range(m)]


def random_unit_soft(rng, max_vars=14, max_hard=40):
    n = rng.randint(2, max_vars)
    hard = random_cnf(rng, n, rng.randint(0, max_hard))
    softs = rng.sample(range(1, n + 1), rng.randint(1, n))
    return MaxSatInstance(n, hard, [(v, rng.randint(1, 9)) for v in softs])


# -- SAT oracle ------------------------------------------------------------

@pytest.mark.parametrize("backend", BACKENDS)
def test_sat_examples(backend, mex):
    res = sat_decide(CnfInstance(2, [[1, 2], [-1]]), backend=backend)
    assert res and res.model == [False, True]
    assert not sat_decide(CnfInstance(1, [[1], [-1]]), backend=backend)
    f = build(mex, EncodeOptions("none"))
    res = sat_decide(CnfInstance(f.n_vars, f.hard), backend=backend)
    assert res and satisfies(res.model, f.hard)


@pytest.mark.parametrize("backend", BACKENDS)
def test_assumptions_and_core(backend):
    with SatOracle(3, [[-1, -2], [2, 3]], backend) as oracle:
        assert oracle.solve([1]).model[:2] == [True, False]
        res = oracle.solve([3, 1, 2])
        assert not res and set(res.core) <= {1, 2, 3} and {1, 2} <= set(res.core)
        assert oracle.solve([-3]).model[1]


@pytest.mark.parametrize("backend", BACKENDS)
def test_empty_clause_is_unsat(backend):
    assert not sat_decide(CnfInstance(2, [[1], []]), backend=backend)


def test_undeclared_variable_rejected():
    with pytest.raises(ValueError):
        SatOracle(2, [[3]], "cdcl")


def _brute_sat(n, clauses, assumptions=()):
    for bits in range(1 << n):
        model = [bool(bits >> i & 1) for i in range(n)]
        if satisfies(model, clauses) and all(model[abs(a) - 1] == (a > 0) for a in assumptions):
            return True
    return False


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_cdcl_agrees_with_enumeration(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 12)
    clauses = random_cnf(rng, n, rng.randint(1, 5 * n))
    assumptions = [v if rng.random() < 0.5 else -v
                   for v in rng.sample(range(1, n + 1), rng.randint(0, min(3, n)))]
    solver = CdclSolver(clauses, n)
    ok = solver.solve(assumptions)
    assert ok == _brute_sat(n, clauses, assumptions)
    if ok:
        assert satisfies(solver.model, clauses)
        assert all(solver.model[abs(a) - 1] == (a > 0) for a in assumptions)
    else:
        assert set(solver.core) <= set(assumptions)
        assert not _brute_sat(n, clauses, solver.core)


def test_cdcl_incremental_reuse():
    rng = random.Random(5)
    n = 18
    clauses = random_cnf(rng, n, 70)
    solver = CdclSolver(clauses, n)
    with SatOracle(n, clauses, "pysat") as reference:
        for _ in range(30):
            assumptions = [v if rng.random() < 0.5 else -v
                           for v in rng.sample(range(1, n + 1), 4)]
            assert solver.solve(assumptions) == bool(reference.solve(assumptions))


def test_propagate_units():
    solver = CdclSolver([[-1, 2], [-2, 3]], 3)
    assert solver.propagate_units([1]) >= {1, 2, 3}
    assert CdclSolver([[-1, 2], [-1, -2]], 2).propagate_units([1]) is None


# -- optimiser -------------------------------------------------------------

@pytest.mark.parametrize("backend", BACKENDS)
def test_mutual_exclusion_picks_heavier(backend):
    inst = MaxSatInstance(3, [[1], [-2, -3]], [(2, 3), (3, 2)])
    res = maxsat_builtin(inst, backend)
    assert (res.achieved, res.forfeited) == (3, 2)
    assert res.model[1] and not res.model[2]
    assert maxsat_exhaustive(inst).achieved == 3


@pytest.mark.parametrize("backend", BACKENDS)
def test_hard_unsat_gives_none(backend):
    inst = MaxSatInstance(2, [[1], [-1]], [(2, 4)])
    assert maxsat_builtin(inst, backend) is None
    assert maxsat_exhaustive(inst) is None


@pytest.mark.parametrize("backend", BACKENDS)
def test_example_forfeits_seven(backend, mex):
    f = build(mex, EncodeOptions("resources"))
    res = maxsat_builtin(MaxSatInstance.from_formula(f), backend)
    assert res.forfeited == 7 and satisfies(res.model, f.hard)


@pytest.mark.parametrize("soft", [[((1, 2), 3)], [(-1, 3)], [(1, 0)], [(1, 2), (1, 3)], [(5, 1)]])
def test_not_unit_soft(soft):
    with pytest.raises(NotUnitSoft):
        maxsat_builtin(MaxSatInstance(2, [], soft))


def test_exhaustive_cap():
    with pytest.raises(TooLarge):
        maxsat_exhaustive(MaxSatInstance(30, [], []))


@pytest.mark.parametrize("seed", range(100))
def test_builtin_matches_exhaustive(seed):
    inst = random_unit_soft(random.Random(seed), max_vars=10)
    ex, bb = maxsat_exhaustive(inst), maxsat_builtin(inst, "cdcl")
    assert (ex is None) == (bb is None)
    if ex is not None:
        assert ex.achieved == bb.achieved and ex.forfeited == bb.forfeited
        assert satisfies(bb.model, inst.hard)
        assert bb.achieved + bb.forfeited == sum(w for _, w in inst.soft)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_pruning_never_changes_optimum(seed):
    inst = random_unit_soft(random.Random(seed), max_vars=12)
    with_stats, without_stats = SearchStats(), SearchStats()
    a = maxsat_builtin(inst, "pysat", prune=True, stats=with_stats)
    b = maxsat_builtin(inst, "pysat", prune=False, stats=without_stats)
    assert (a and a.achieved) == (b and b.achieved)
    assert with_stats.queries <= without_stats.queries


# -- external bridge -------------------------------------------------------

@pytest.mark.parametrize("fmt, extra", [("classic", ""), ("2022", ""), ("classic", " --binary")])
def test_external_matches_builtin(mex, fmt, extra):
    f = build(mex, EncodeOptions("resources"))
    res = maxsat_external(f, solver_cmd("rc2_solver.py") + extra, fmt)
    assert res.forfeited == 7 and satisfies(res.model, f.hard)


def test_external_unsat(unwinnable):
    f = build(unwinnable, EncodeOptions("resources"))
    assert maxsat_external(f, solver_cmd("rc2_solver.py")) is None


@pytest.mark.parametrize("kind, error", [("silent", MalformedOutput),
                                         ("unknown", MalformedOutput),
                                         ("all-false", ModelViolatesHardClauses)])
def test_external_misbehaviour(mex, kind, error):
    f = build(mex, EncodeOptions("resources"))
    with pytest.raises(error):
        maxsat_external(f, solver_cmd("fake_solver.py") + f" {kind}")


def test_external_spawn_failure(mex, monkeypatch):
    f = build(mex, EncodeOptions("none"))
    with pytest.raises(SolverSpawnFailure):
        maxsat_external(f, "/nonexistent/solver-binary")
    monkeypatch.delenv(SOLVER_ENV, raising=False)
    with pytest.raises(SolverSpawnFailure):
        maxsat_external(f)


def test_external_uses_environment(mex, monkeypatch):
    monkeypatch.setenv(SOLVER_ENV, solver_cmd("fake_solver.py") + " unsat")
    assert maxsat_external(build(mex, EncodeOptions("none"))) is None
