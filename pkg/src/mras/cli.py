"""``mras`` command line: synth, encode, simulate, check, oracle, gen."""
from __future__ import annotations

import argparse
import os
import sys
from importlib.resources import files
from pathlib import Path

from .core import all_goals_satisfied, mra_cost, resource_cost, simulate
from .encoder import EncodeOptions, build
from .errors import MraError, NotExecutableAtStep, TooLarge, ValidationError
from .formats import emit_mra, emit_report, emit_schedule, emit_wcnf, parse_mra, parse_schedule
from .maxsat import SOLVER_ENV
from .oracle import PROFILE_CAP, oracle_optimum
from .generator import scenario
from .strategy import synthesize

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_NO_STRATEGY = 10
NO_STRATEGY = "no winning strategy exists"


def _resolve(path: str) -> Path:
    """A file path, or the name of a bundled fixture such as ``mex.mra``."""
    p = Path(path)
    if p.exists():
        return p
    bundled = files("mras") / "data" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    raise FileNotFoundError(f"no such file: {path}")


def _load_mra(path: str):
    p = _resolve(path)
    try:
        return parse_mra(p.read_text(encoding="utf-8"))
    except ValidationError as exc:
        exc.args = (f"{p}: {exc}",)
        raise


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _solver_args(args):
    if args.solver_cmd or args.solver == "external":
        cmd = args.solver_cmd or os.environ.get(SOLVER_ENV)
        if not cmd:
            raise ValidationError(f"external solver needs --solver-cmd or ${SOLVER_ENV}")
        return {"solver": "external", "solver_cmd": cmd}
    return {"solver": "builtin", "backend": args.backend}


def cmd_synth(args) -> int:
    mra = _load_mra(args.input)
    result = synthesize(mra, args.opt, horizon=args.horizon,
                        wcnf_format=args.wcnf_format, **_solver_args(args))
    if result is None:
        print(NO_STRATEGY)
        return EXIT_NO_STRATEGY
    _write(emit_report(result, args.format), args.out)
    if args.pruned_out:
        Path(args.pruned_out).write_text(emit_mra(result.pruned_mra), encoding="utf-8")
    return EXIT_OK


def cmd_encode(args) -> int:
    mra = _load_mra(args.input)
    formula = build(mra, EncodeOptions(args.opt, args.horizon))
    text = emit_wcnf(formula, args.wcnf_format)
    counts = (f"variables: {formula.n_vars}  hard clauses: {len(formula.hard)}  "
              f"soft clauses: {len(formula.soft)}  soft weight: {formula.soft_total}\n")
    if args.out:
        _write(text, args.out)
        sys.stdout.write(counts)
    else:
        sys.stdout.write(text)
        sys.stderr.write(counts)
    return EXIT_OK


def _replay(args):
    mra = _load_mra(args.input)
    steps = args.horizon
    schedule = parse_schedule(_resolve(args.schedule).read_text(encoding="utf-8"), mra, steps)
    return mra, schedule, simulate(mra, schedule)


def cmd_simulate(args) -> int:
    mra, schedule, run = _replay(args)
    _write(emit_schedule(mra, schedule, run, args.format), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    mra, schedule, run = _replay(args)
    _write(emit_schedule(mra, schedule, run, args.format), args.out)
    if not all_goals_satisfied(run, mra):
        print("check failed: schedule is not winning")
        return EXIT_FAILED_CHECK
    if args.bound is not None:
        cost = mra_cost(run, mra) if args.opt == "mra" else resource_cost(run, mra)
        if cost > args.bound:
            print(f"check failed: cost {cost} exceeds bound {args.bound}")
            return EXIT_FAILED_CHECK
    print("check passed")
    return EXIT_OK


def cmd_oracle(args) -> int:
    mra = _load_mra(args.input)
    mode = "resources" if args.opt == "none" else args.opt
    found = oracle_optimum(mra, mode, horizon=args.horizon, cap=args.cap)
    if found is None:
        print(NO_STRATEGY)
        return EXIT_NO_STRATEGY
    cost, witness = found
    text = f"optimal {EncodeOptions(mode).mode} cost: {cost}\n\nwitness:\n"
    text += emit_schedule(mra, witness, simulate(mra, witness))
    _write(text, args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    mra = scenario(args.agents, args.types, tuple(args.goal_types), tuple(args.deadlines),
                   seed=args.seed, instances=args.instances, period=args.period,
                   general=args.general, agent_price=args.agent_price)
    _write(f"# generated with seed {args.seed}\n" + emit_mra(mra), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mras", description="Cost-optimal strategy synthesis for resource allocation systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, schedule=False):
        p.add_argument("input", help="system file (.mra) or bundled fixture name")
        if schedule:
            p.add_argument("schedule", help="schedule file (.sched or JSON report)")
        p.add_argument("--opt", choices=["none", "res", "mra"], default="res")
        p.add_argument("--horizon", type=int, help="override the horizon (default: latest deadline)")
        p.add_argument("--out", help="write the main output here instead of stdout")

    p = sub.add_parser("synth", help="synthesise a cost-optimal winning strategy")
    common(p)
    p.add_argument("--solver", choices=["builtin", "external"], default="builtin")
    p.add_argument("--solver-cmd", help=f"external solver command (default ${SOLVER_ENV})")
    p.add_argument("--backend", choices=["auto", "pysat", "cdcl"], default="auto",
                   help="SAT backend of the builtin optimiser")
    p.add_argument("--wcnf-format", choices=["classic", "2022"], default="classic")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--pruned-out", help="also write the pruned system here")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("encode", help="write the WCNF encoding")
    common(p)
    p.add_argument("--wcnf-format", choices=["classic", "2022"], default="classic")
    p.set_defaults(func=cmd_encode)

    for name, func, helptext in (("simulate", cmd_simulate, "replay a schedule"),
                                 ("check", cmd_check, "replay and verify a schedule")):
        p = sub.add_parser(name, help=helptext)
        common(p, schedule=True)
        p.add_argument("--format", choices=["text", "json"], default="text")
        if name == "check":
            p.add_argument("--bound", type=int, help="maximal admissible cost")
        p.set_defaults(func=func)

    p = sub.add_parser("oracle", help="brute-force optimum (small systems only)")
    common(p)
    p.add_argument("--cap", type=int, default=PROFILE_CAP,
                   help="maximal number of action profiles per state")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="generate a random scenario")
    p.add_argument("--agents", type=int, default=4)
    p.add_argument("--types", type=int, default=4)
    p.add_argument("--goal-types", type=int, nargs=2, default=[1, 3], metavar=("LO", "HI"))
    p.add_argument("--deadlines", type=int, nargs=2, default=[5, 15], metavar=("LO", "HI"))
    p.add_argument("--instances", type=int, default=2, help="resources per type")
    p.add_argument("--period", type=int, default=1)
    p.add_argument("--general", action="store_true", help="leave goals unassigned")
    p.add_argument("--agent-price", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, NotExecutableAtStep, TooLarge, FileNotFoundError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
