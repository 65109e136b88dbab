"""Command line: solve, schedule, simulate, verify.

Machine-readable JSON goes to standard output, human notes to standard
error.  Exit status is 0 exactly when the command's contract held: the
solve/schedule pipeline produced its artifact, the simulation campaign
completed, or every requested verification check passed (checks skipped
by an enumeration guard are reported as such and do not fail the run).
Failures print a JSON error object and exit nonzero.  All rationals are
printed as ``num/den`` strings.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from fractions import Fraction

from . import codec as cd
from . import oracle, simeng
from ._limits import GuardExceeded
from .adversary import AdversaryError
from .exactlp import (
    LpError,
    build_lp1,
    build_lp1_prime,
    build_lp2,
    solve_exact,
    solve_rate,
)
from .flowplan import PlanError, ScheduleError, make_plan, make_schedule, quantize
from .gf import GFError, smallest_prime_above
from .netgraph import GraphError, internal_subsets
from .oracle import OracleError

_ERRORS = (
    GraphError,
    LpError,
    PlanError,
    ScheduleError,
    cd.CodecError,
    AdversaryError,
    simeng.SimError,
    OracleError,
    GFError,
    GuardExceeded,
    OSError,
    ValueError,
)

_BUILDERS = {"1": build_lp1, "1'": build_lp1_prime, "2": build_lp2}


def _rat(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2, sort_keys=False)
    sys.stdout.write("\n")


def _fail(exc: Exception) -> int:
    _emit({"error": {"type": type(exc).__name__, "message": str(exc)}})
    print(f"error: {exc}", file=sys.stderr)
    return 1


# -- solve ---------------------------------------------------------------


def cmd_solve(args: argparse.Namespace) -> int:
    net = simeng.resolve_network(args.graph)
    problem = _BUILDERS[args.lp](net, args.z)
    solution = solve_exact(problem)
    payload = {"command": "solve", "network": args.graph}
    payload.update(solution.to_json_dict())
    _emit(payload)
    print(
        f"{args.graph}: LP{args.lp} objective {_rat(solution.objective)}, "
        f"lambda {_rat(solution.lam)}",
        file=sys.stderr,
    )
    return 0


# -- schedule ------------------------------------------------------------


def cmd_schedule(args: argparse.Namespace) -> int:
    net = simeng.resolve_network(args.graph)
    solution = solve_rate(net, args.z)
    payload = {"command": "schedule", "network": args.graph, "z": args.z}
    if args.tau_fixed is None:
        plan = make_plan(net, solution)
    else:
        plan, cert = quantize(net, solution, args.tau_fixed)
        payload["quantize"] = cert.to_json_dict()
    schedule = make_schedule(plan)
    payload["plan"] = plan.to_json_dict()
    payload["schedule"] = schedule.to_json_dict()
    _emit(payload)
    print(
        f"{args.graph}: tau={plan.tau}, {plan.total_packets} packets "
        f"({plan.key_packets} key), rate {_rat(plan.rate)}",
        file=sys.stderr,
    )
    return 0


# -- simulate ------------------------------------------------------------


def cmd_simulate(args: argparse.Namespace) -> int:
    config = simeng.config_from_toml(args.config)
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    if overrides:
        config = replace(config, **overrides)
    report = simeng.run_campaign(config)
    payload = {"command": "simulate", "config": str(args.config)}
    payload.update(report.to_json_dict())
    _emit(payload)
    return 0


# -- verify --------------------------------------------------------------


def _mi_subset(graph: str, z: int, q: int, subset: tuple[str, ...]):
    """Enumerated MI for one observed subset; worker for --jobs."""
    net = simeng.resolve_network(graph)
    plan = make_plan(net, solve_rate(net, z))
    params = cd.params_for_plan(plan, "eaves", q=q)
    mi = oracle.mi_for_observation(params, plan.packets_through(subset))
    return mi.numerator, mi.denominator


def _check_mi(args: argparse.Namespace) -> tuple[dict, bool]:
    net = simeng.resolve_network(args.graph)
    plan = make_plan(net, solve_rate(net, args.z))
    q = args.q if args.q is not None else 5
    if q <= plan.total_packets:
        q = smallest_prime_above(plan.total_packets + 1)
    try:
        cd.params_for_plan(plan, "eaves", q=q)
        subsets = list(
            internal_subsets(net, min(args.z, len(net.internal_nodes)))
        )
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                parts = list(
                    pool.map(
                        _mi_subset,
                        [args.graph] * len(subsets),
                        [args.z] * len(subsets),
                        [q] * len(subsets),
                        subsets,
                    )
                )
            values = [Fraction(n, d) for n, d in parts]
        else:
            values = [
                Fraction(*_mi_subset(args.graph, args.z, q, s))
                for s in subsets
            ]
        worst = max(values) if values else Fraction(0)
        report = {
            "q": q,
            "subsets": len(values),
            "max_leakage": _rat(worst),
        }
        return report, worst == 0
    except (GuardExceeded, OracleError) as exc:
        return {"q": q, "max_leakage": None, "skipped": str(exc)}, True


def _check_converse(args: argparse.Namespace) -> tuple[dict, bool]:
    net = simeng.resolve_network(args.graph)
    solution = solve_rate(net, 1)
    cert = oracle.exhaustive_routing_converse(net)
    report = cert.to_json_dict()
    report["lp_rate"] = _rat(solution.objective)
    equal = cert.rate == solution.objective
    report["equal"] = equal
    return report, equal


def _check_nodecut(args: argparse.Namespace) -> tuple[dict, bool]:
    net = simeng.resolve_network(args.graph)
    cert = oracle.nodecut_structure_check(net)
    if cert is None:
        return {"cut": None}, False
    return cert.to_json_dict(), True


def _check_lpcross(args: argparse.Namespace) -> tuple[dict, bool]:
    net = simeng.resolve_network(args.graph)
    result = oracle.lp_crosscheck(net, args.z)
    report = {
        "z": result["z"],
        "lp1": _rat(result["lp1"]),
        "lp1_prime": _rat(result["lp1_prime"]),
        "lp2": None if result["lp2"] is None else _rat(result["lp2"]),
        "equal": result["equal"],
    }
    return report, result["equal"]


_CHECKS = {
    "mi": _check_mi,
    "converse": _check_converse,
    "nodecut": _check_nodecut,
    "lpcross": _check_lpcross,
}


def cmd_verify(args: argparse.Namespace) -> int:
    names = list(_CHECKS) if args.checks == "all" else [args.checks]
    payload: dict = {
        "command": "verify",
        "network": args.graph,
        "z": args.z,
        "checks": names,
    }
    ok = True
    for name in names:
        report, passed = _CHECKS[name](args)
        if name == "mi":
            payload["max_leakage"] = report.pop("max_leakage")
        payload[name] = report
        ok = ok and passed
        print(
            f"{name}: {'ok' if passed else 'FAILED'}", file=sys.stderr
        )
    payload["ok"] = ok
    _emit(payload)
    return 0 if ok else 1


# -- entry point ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="advflow",
        description=(
            "Balanced routing, adversary-resilient codecs, and "
            "verification oracles for unit-capacity networks."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a routing program exactly")
    p.add_argument("graph", help="bundled graph name or path to a graph file")
    p.add_argument("--z", type=int, default=1, help="adversary node budget")
    p.add_argument(
        "--lp",
        choices=sorted(_BUILDERS),
        default="1'",
        help="program form (default 1')",
    )
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("schedule", help="emit a packet plan and slot schedule")
    p.add_argument("graph")
    p.add_argument("--z", type=int, default=1)
    p.add_argument(
        "--tau-fixed",
        type=int,
        default=None,
        metavar="T",
        help="quantize to a fixed generation length",
    )
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("simulate", help="run a trial campaign from a TOML config")
    p.add_argument("config", help="path to a TOML campaign config")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run independent ground-truth checks")
    p.add_argument("graph")
    p.add_argument("--z", type=int, default=1)
    p.add_argument(
        "--checks",
        choices=sorted(_CHECKS) + ["all"],
        default="all",
    )
    p.add_argument("--q", type=int, default=None, help="field order for mi")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _ERRORS as exc:
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())
