"""Bridge to an external Max-SAT solver executable.

The solver receives the WCNF file path as its last argument and reports on
standard output in the usual ``s``/``o``/``v`` line format.  Its exit code is
ignored; the status line decides.  The returned weights are recomputed from
the model, the ``o`` line is never trusted.
"""
from __future__ import annotations

import os
import shlex
import subprocess
import tempfile

from ..errors import MalformedOutput, ModelViolatesHardClauses, SolverSpawnFailure
from ..formats import SolverStatus, emit_wcnf, parse_solver_output
from .optimize import MaxSatResult
from .sat import clause_satisfied, satisfies

SOLVER_ENV = "MRAS_SOLVER_CMD"


def maxsat_external(formula, solver_cmd: str | None = None, fmt: str = "classic",
                    timeout: float | None = None) -> MaxSatResult | None:
    solver_cmd = solver_cmd or os.environ.get(SOLVER_ENV)
    if not solver_cmd:
        raise SolverSpawnFailure(f"no solver command given and ${SOLVER_ENV} is unset")
    argv = shlex.split(solver_cmd)
    fd, path = tempfile.mkstemp(suffix=".wcnf")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(emit_wcnf(formula, fmt))
        try:
            proc = subprocess.run(argv + [path], capture_output=True, text=True,
                                  timeout=timeout)
        except (OSError, subprocess.SubprocessError) as exc:
            raise SolverSpawnFailure(f"cannot run {argv[0]!r}: {exc}") from exc
    finally:
        os.unlink(path)

    verdict = parse_solver_output(proc.stdout, formula.n_vars)
    if verdict.status is SolverStatus.UNSATISFIABLE:
        return None
    if verdict.status is not SolverStatus.OPTIMUM_FOUND:
        raise MalformedOutput("solver did not report an optimum")
    model = verdict.model
    if not satisfies(model, formula.hard):
        raise ModelViolatesHardClauses("solver model violates a hard clause")
    softs = [([c] if isinstance(c, int) else list(c), w) for c, w in formula.soft]
    total = sum(w for _, w in softs)
    achieved = sum(w for c, w in softs if clause_satisfied(model, c))
    return MaxSatResult(model, achieved, total - achieved)
