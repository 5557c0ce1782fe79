"""Command-line front end.

Subcommands: cost-table, schedule, simulate, crossover, adjoint-demo,
report.  `--units` is always checkpointing units; each algorithm converts
to its own checkpoint count internally, so equal units means equal memory.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from .adjoint import (
    PROBLEMS,
    TABLEAUS,
    finite_difference_gradient,
    gradient_via_policy,
)
from .cams import CamsVariant, build_tables, total_cost
from .consultant import Policy, consultant_schedule, predicted_cost
from .core import (
    Advance,
    CheckpointType,
    DomainError,
    InfeasibleScheduleError,
    Restore,
    ReverseStep,
    Schedule,
    SchemeInfo,
    Store,
    unit_cost,
)
from .executor import CountingEngine, ValidationError, execute
from .mrevolve import crossover_steps, modified_cost
from .revolve import revolve_cost

ALGORITHMS = ("revolve", "mrevolve", "cams-sa", "cams-gen")


def _scheme(args) -> SchemeInfo:
    return SchemeInfo(args.stages, args.stiffly_accurate)


def _checkpoints_for(algorithm: str, units: int, scheme: SchemeInfo) -> int:
    """Units -> per-algorithm checkpoint count (combined records for the
    modified scheme, plain units otherwise)."""
    if algorithm == "mrevolve":
        return units // unit_cost(CheckpointType.SOLUTION_WITH_STAGES, scheme)
    return units


def algorithm_cost(algorithm: str, m: int, units: int, scheme: SchemeInfo) -> float:
    if algorithm == "revolve":
        return revolve_cost(m, units)
    if algorithm == "mrevolve":
        s = _checkpoints_for(algorithm, units, scheme)
        return modified_cost(m, s) if s >= 1 else math.inf
    if algorithm == "cams-sa":
        sa = SchemeInfo(scheme.num_stages, True)
        return total_cost(build_tables(m, units, sa, CamsVariant.SA))
    if algorithm == "cams-gen":
        return total_cost(build_tables(m, units, scheme, CamsVariant.GEN))
    raise DomainError(f"unknown algorithm {algorithm!r}")


def _parse_range(text: str) -> list:
    """'300' -> [300]; '10:300' -> 10..300; '10:300:10' -> arithmetic."""
    parts = [int(p) for p in text.split(":")]
    if len(parts) == 1:
        return parts
    if len(parts) == 2:
        return list(range(parts[0], parts[1] + 1))
    if len(parts) == 3:
        return list(range(parts[0], parts[1] + 1, parts[2]))
    raise DomainError(f"bad range {text!r}")


def cmd_cost_table(args) -> int:
    scheme = _scheme(args)
    steps = _parse_range(args.steps)
    units = _parse_range(args.units)
    if not steps or not units or min(steps) < 1 or min(units) < 1:
        raise DomainError(f"need steps >= 1 and units >= 1, got {args.steps!r}, {args.units!r}")
    algorithms = args.algorithms.split(",") if args.algorithms else list(ALGORITHMS)
    for alg in algorithms:
        if alg not in ALGORITHMS:
            raise DomainError(f"unknown algorithm {alg!r}")
    writer = csv.writer(sys.stdout)
    writer.writerow(["m", "s", "l", "algorithm", "recomputations"])
    # one table build per algorithm covers every smaller (m, s) cell
    m_max, s_max = max(steps), max(units)
    tables = {}
    if "cams-sa" in algorithms:
        tables["cams-sa"] = build_tables(
            m_max, s_max, SchemeInfo(scheme.num_stages, True), CamsVariant.SA
        )
    if "cams-gen" in algorithms:
        tables["cams-gen"] = build_tables(m_max, s_max, scheme, CamsVariant.GEN)
    for m in steps:
        for s in units:
            for alg in algorithms:
                if alg in tables:
                    cost = total_cost(tables[alg], m, s)
                else:
                    cost = algorithm_cost(alg, m, s, scheme)
                text = "inf" if math.isinf(cost) else str(int(cost))
                writer.writerow([m, s, scheme.num_stages, alg, text])
    return 0


def _policy_for(variant: str) -> Policy:
    return {
        "revolve": Policy.REVOLVE,
        "mrevolve": Policy.MODIFIED_REVOLVE,
        "cams-sa": Policy.CAMS_SA,
        "cams-gen": Policy.CAMS_GEN,
        "full-storage": Policy.FULL_STORAGE,
    }[variant]


def build_schedule(variant: str, m: int, units: int, scheme: SchemeInfo) -> Schedule:
    policy = _policy_for(variant)
    if policy is Policy.CAMS_SA:
        scheme = SchemeInfo(scheme.num_stages, True)
    s = _checkpoints_for(variant, units, scheme)
    if s < 1 and policy is not Policy.FULL_STORAGE:
        raise InfeasibleScheduleError(f"{units} units fit no {variant} checkpoint")
    return consultant_schedule(m, s, scheme, policy)


def _render_text(schedule: Schedule) -> str:
    lines = [
        f"steps={schedule.m} budget_units={schedule.budget_units} "
        f"stages={schedule.scheme.num_stages} stiffly_accurate={schedule.scheme.stiffly_accurate}"
    ]
    for act in schedule.actions:
        if isinstance(act, Advance):
            lines.append(f"  advance {act.start} -> {act.end}")
        elif isinstance(act, Store):
            r = act.record
            lines.append(f"  store   {r.kind.value} @ {r.step_index} ({r.units}u)")
        elif isinstance(act, Restore):
            r = act.record
            tail = ", discard" if act.discard else ""
            lines.append(f"  restore {r.kind.value} @ {r.step_index}{tail}")
        elif isinstance(act, ReverseStep):
            lines.append(f"  reverse step {act.step}")
    return "\n".join(lines)


def cmd_schedule(args) -> int:
    scheme = _scheme(args)
    schedule = build_schedule(args.variant, args.steps, args.units, scheme)
    if args.format == "json":
        print(schedule.to_json())
    else:
        print(_render_text(schedule))
    return 0


def cmd_simulate(args) -> int:
    if args.schedule == "-":
        text = sys.stdin.read()
    else:
        with open(args.schedule) as fh:
            text = fh.read()
    schedule = Schedule.from_dict(json.loads(text))
    engine = CountingEngine()
    metrics = execute(schedule, engine)
    print(
        f"recomputations={metrics.recomputations} first_sweep_steps={metrics.first_sweep_steps} "
        f"stores={metrics.stores} restores={metrics.restores} peak_units={metrics.peak_units}"
    )
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(engine.trace_json())
    return 0


def cmd_crossover(args) -> int:
    m = crossover_steps(args.units, args.extra_stages)
    print(m)
    return 0


def cmd_adjoint_demo(args) -> int:
    problem = PROBLEMS[args.problem](steps=args.steps)
    tableau = TABLEAUS[args.tableau]
    policy = _policy_for(args.policy)
    if policy is Policy.CAMS_SA and not tableau.stiffly_accurate:
        raise DomainError(f"tableau {tableau.name} is not stiffly accurate")
    scheme = tableau.scheme_info()
    s = _checkpoints_for(args.policy, args.units, scheme)
    grad, metrics = gradient_via_policy(problem, tableau, policy, s)
    fd = finite_difference_gradient(problem, tableau)
    denom = max(float(np.max(np.abs(fd))), 1e-300)
    rel_err = float(np.max(np.abs(grad - fd))) / denom
    if policy is Policy.FULL_STORAGE:
        predicted = 0.0
    else:
        predicted = predicted_cost(problem.steps, s, scheme, policy)
    grad_full, _ = gradient_via_policy(problem, tableau, Policy.FULL_STORAGE)
    bitwise = bool(np.array_equal(grad, grad_full))
    print(f"problem={args.problem} dim={problem.dimension} steps={problem.steps} tableau={tableau.name}")
    print(f"gradient_norm={float(np.linalg.norm(grad)):.12e}")
    print(f"fd_rel_error={rel_err:.3e}")
    print(f"recomputations measured={metrics.recomputations} predicted={predicted:.0f}")
    print(f"bitwise_equal_to_full_storage={bitwise}")
    ok = rel_err <= args.tolerance and metrics.recomputations == predicted and bitwise
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def cmd_report(args) -> int:
    from . import report as report_mod  # matplotlib import kept off the hot path

    paths = report_mod.write_report(args.out_dir, stages=args.stages)
    for p in paths:
        print(p)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ckpsched",
        description="Checkpoint schedules for reverse-mode time integration",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cost-table", help="CSV of recomputation counts per algorithm")
    p.add_argument("--steps", required=True, help="step count or range a:b[:stride]")
    p.add_argument("--units", required=True, help="unit budget or range a:b[:stride]")
    p.add_argument("--stages", type=int, default=1)
    p.add_argument("--stiffly-accurate", action="store_true")
    p.add_argument("--algorithms", help="comma list among revolve,mrevolve,cams-sa,cams-gen")
    p.set_defaults(func=cmd_cost_table)

    p = sub.add_parser("schedule", help="emit a schedule as JSON or a text timeline")
    p.add_argument("-m", "--steps", type=int, required=True)
    p.add_argument("-u", "--units", type=int, required=True)
    p.add_argument("--stages", type=int, default=1)
    p.add_argument("--stiffly-accurate", action="store_true")
    p.add_argument(
        "--variant",
        required=True,
        choices=["revolve", "mrevolve", "cams-sa", "cams-gen", "full-storage"],
    )
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("simulate", help="replay a schedule JSON file and print metrics")
    p.add_argument("schedule", help="path to schedule JSON, or - for stdin")
    p.add_argument("--trace", help="write the engine call trace JSON here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("crossover", help="step count where classical catches the combined scheme")
    p.add_argument("--units", type=int, required=True)
    p.add_argument("--extra-stages", type=int, required=True)
    p.set_defaults(func=cmd_crossover)

    p = sub.add_parser("adjoint-demo", help="gradient check under a checkpointing policy")
    p.add_argument("--problem", choices=sorted(PROBLEMS), default="reaction-1d")
    p.add_argument(
        "--policy",
        choices=["revolve", "mrevolve", "cams-sa", "cams-gen", "full-storage"],
        default="cams-gen",
    )
    p.add_argument("--units", type=int, default=8)
    p.add_argument("--steps", type=int, default=30)
    p.add_argument("--tableau", choices=sorted(TABLEAUS), default="rk4")
    p.add_argument("--tolerance", type=float, default=1e-5)
    p.set_defaults(func=cmd_adjoint_demo)

    p = sub.add_parser("report", help="write cost-curve CSVs and figures to a directory")
    p.add_argument("--out-dir", default="report")
    p.add_argument("--stages", type=int, default=2)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, InfeasibleScheduleError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
