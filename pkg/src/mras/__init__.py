"""Cost-optimal winning strategy synthesis for multi-agent resource allocation."""
from .core import (
    FREE,
    IDLE,
    RELEASE_ALL,
    Action,
    ActionKind,
    Goal,
    Mra,
    ResourceType,
    Run,
    Schedule,
    agent_cost,
    all_goals_satisfied,
    available_actions,
    goal_satisfied,
    horizon,
    initial_state,
    is_executable,
    mra_cost,
    resource_cost,
    simulate,
    step,
)
from .encoder import EncodeOptions, WcnfFormula, assignment_for, build
from .formats import emit_mra, emit_report, emit_schedule, emit_wcnf, parse_mra, parse_schedule
from .oracle import oracle_decide, oracle_optimum
from .strategy import SynthesisResult, decode, extract_strategy_map, prune, synthesize

__all__ = [
    "FREE", "IDLE", "RELEASE_ALL", "Action", "ActionKind", "EncodeOptions", "Goal", "Mra",
    "ResourceType", "Run", "Schedule", "SynthesisResult", "WcnfFormula", "agent_cost",
    "all_goals_satisfied", "assignment_for", "available_actions", "build", "decode",
    "emit_mra", "emit_report", "emit_schedule", "emit_wcnf", "extract_strategy_map",
    "goal_satisfied", "horizon", "initial_state", "is_executable", "mra_cost",
    "oracle_decide", "oracle_optimum", "parse_mra", "parse_schedule", "prune",
    "resource_cost", "simulate", "step", "synthesize",
]
