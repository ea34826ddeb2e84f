"""SAT decision oracle with assumption literals.

Two interchangeable backends sit behind :class:`SatOracle`: the in-package
CDCL solver (``"cdcl"``) and Glucose through python-sat (``"pysat"``).
``"auto"`` prefers python-sat when it can be imported.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cdcl import CdclSolver

try:  # pragma: no cover - exercised implicitly
    from pysat.solvers import Solver as _PysatSolver
except ImportError:  # pragma: no cover
    _PysatSolver = None

BACKENDS = ("auto", "pysat", "cdcl")


@dataclass
class CnfInstance:
    n_vars: int
    clauses: list[list[int]] = field(default_factory=list)


@dataclass
class SatResult:
    satisfiable: bool
    model: list[bool] | None = None  # model[v - 1] is the value of variable v
    core: list[int] | None = None  # subset of the assumptions, on UNSAT

    def __bool__(self):
        return self.satisfiable


def resolve_backend(backend: str) -> str:
    if backend not in BACKENDS:
        raise ValueError(f"unknown SAT backend {backend!r}")
    if backend == "auto":
        return "pysat" if _PysatSolver is not None else "cdcl"
    if backend == "pysat" and _PysatSolver is None:
        raise ValueError("python-sat is not installed")
    return backend


def lit_value(model: Sequence[bool], lit: int) -> bool:
    v = model[abs(lit) - 1]
    return v if lit > 0 else not v


def clause_satisfied(model: Sequence[bool], clause: Iterable[int]) -> bool:
    return any(lit_value(model, lit) for lit in clause)


def satisfies(model: Sequence[bool], clauses: Iterable[Iterable[int]]) -> bool:
    return all(clause_satisfied(model, c) for c in clauses)


class SatOracle:
    """Incremental solver over a fixed variable range ``1..n_vars``."""

    def __init__(self, n_vars: int, clauses: Iterable[Sequence[int]] = (),
                 backend: str = "auto"):
        self.n_vars = n_vars
        self.backend = resolve_backend(backend)
        self.queries = 0
        if self.backend == "pysat":
            self._solver = _PysatSolver(name="g4")
            self._ok = True
            for c in clauses:
                self.add_clause(c)
        else:
            self._solver = CdclSolver(n_vars=n_vars)
            for c in clauses:
                self.add_clause(c)

    def add_clause(self, clause: Sequence[int]):
        if any(lit == 0 or abs(lit) > self.n_vars for lit in clause):
            raise ValueError(f"clause {list(clause)} mentions an undeclared variable")
        if self.backend == "pysat":
            if not clause:
                self._ok = False
                return
            self._solver.add_clause([int(x) for x in clause])
        else:
            self._solver.add_clause(clause)

    def solve(self, assumptions: Sequence[int] = ()) -> SatResult:
        self.queries += 1
        assumptions = [int(a) for a in assumptions]
        if any(a == 0 or abs(a) > self.n_vars for a in assumptions):
            raise ValueError("assumption mentions an undeclared variable")
        if self.backend == "pysat":
            if not self._ok:
                return SatResult(False, core=[])
            if self._solver.solve(assumptions=assumptions):
                model = [False] * self.n_vars
                for lit in self._solver.get_model() or ():
                    if abs(lit) <= self.n_vars:
                        model[abs(lit) - 1] = lit > 0
                return SatResult(True, model)
            core = self._solver.get_core() if assumptions else []
            return SatResult(False, core=list(core or []))
        s = self._solver
        if s.solve(assumptions):
            model = (s.model + [False] * self.n_vars)[:self.n_vars]
            return SatResult(True, model)
        return SatResult(False, core=list(s.core or []))

    def close(self):
        if self.backend == "pysat":
            self._solver.delete()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def sat_decide(inst: CnfInstance, assumptions: Sequence[int] = (),
               backend: str = "auto") -> SatResult:
    with SatOracle(inst.n_vars, inst.clauses, backend) as oracle:
        return oracle.solve(assumptions)
