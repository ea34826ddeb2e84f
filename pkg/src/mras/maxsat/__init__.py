"""Max-SAT engines: SAT oracle, unit-soft branch-and-bound, exhaustive oracle, external bridge."""
from .external import SOLVER_ENV, maxsat_external
from .optimize import (
    MaxSatInstance,
    MaxSatResult,
    SearchStats,
    achieved_weight,
    maxsat_builtin,
    maxsat_exhaustive,
)
from .sat import CnfInstance, SatOracle, SatResult, sat_decide, satisfies

__all__ = [
    "CnfInstance", "MaxSatInstance", "MaxSatResult", "SOLVER_ENV", "SatOracle",
    "SatResult", "SearchStats", "achieved_weight", "maxsat_builtin",
    "maxsat_exhaustive", "maxsat_external", "sat_decide", "satisfies",
]
