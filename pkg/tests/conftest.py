import random
import sys
from importlib.resources import files
from pathlib import Path

import pytest

from mras.formats import parse_mra, parse_schedule

DATA = files("mras") / "data"
SOLVERS = Path(__file__).parent / "solvers"


def fixture_text(name: str) -> str:
    return (DATA / name).read_text(encoding="utf-8")


def load(name: str):
    return parse_mra(fixture_text(name))


def schedule_for(mra, name: str):
    return parse_schedule(fixture_text(name), mra)


def solver_cmd(script: str) -> str:
    return f"{sys.executable} {SOLVERS / script}"


@pytest.fixture(scope="session")
def mex():
    return load("mex.mra")


@pytest.fixture(scope="session")
def mex_general():
    return load("mex_general.mra")


@pytest.fixture(scope="session")
def unwinnable():
    return load("unwinnable.mra")


@pytest.fixture(scope="session")
def costly(mex):
    return schedule_for(mex, "mex_cost10.sched")


@pytest.fixture(scope="session")
def cheapest(mex):
    return schedule_for(mex, "mex_cost7.sched")


@pytest.fixture(scope="session")
def two_agents(mex_general):
    return schedule_for(mex_general, "mex_general_two_agents.sched")


@pytest.fixture
def rng():
    return random.Random(20240611)


def sample_models(formula, count, seed=0, backend="pysat"):
    """Distinct hard-satisfying models, steered by random action assumptions.

    Each model is blocked on its action variables, so every sample decodes
    to a different schedule.
    """
    from mras.encoder import Act
    from mras.maxsat import SatOracle

    rng = random.Random(seed)
    act_vars = sorted(v for key, v in formula.pool.items() if isinstance(key, Act))
    models = []
    with SatOracle(formula.n_vars, formula.hard, backend) as oracle:
        attempts = 0
        while len(models) < count and attempts < 50 * count:
            attempts += 1
            picks = rng.sample(act_vars, min(len(act_vars), rng.randint(0, 4)))
            res = oracle.solve(picks)
            if not res:
                continue
            models.append(res.model)
            oracle.add_clause([-v if res.model[v - 1] else v for v in act_vars])
    return models
