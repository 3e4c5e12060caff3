"""Command line front end.

Exit codes: 0 when every task passed, 1 when a check/harness/invariance
verdict is not passing (violated, unknown, falsified, counterexample), 2 on
operational errors (bad file, unknown reference, invalid configuration).
"""

from __future__ import annotations

import argparse
import sys

from .scenario_io import (
    BUILTIN_SCENARIOS,
    ScenarioError,
    _run_check_task,
    _run_harness_task,
    _run_invariance_task,
    _run_simulation_task,
    exit_code,
    load_scenario,
    run_scenario,
    write_outputs,
)
from .systems import SimulationError


def _add_policy_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dt", type=float, help="integrator step")
    p.add_argument("--event-tol", type=float, help="event localization tolerance")
    p.add_argument("--max-time", type=float, help="flow-time budget")
    p.add_argument("--max-jumps", type=int, help="jump budget")
    p.add_argument("--max-branches", type=int, help="enumeration cap")
    p.add_argument("--overlap", choices=["jump", "flow", "enumerate"],
                   help="overlap rule where both flowing and jumping are enabled")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("scenario", help="scenario file path or builtin:<name>")
    p.add_argument("--out", metavar="DIR", help="write reports and CSVs here")
    p.add_argument("--quiet", action="store_true", help="suppress stdout")
    _add_policy_flags(p)


def _policy_overrides(args) -> dict:
    overrides = {}
    for key in ("dt", "event_tol", "max_time", "max_jumps", "max_branches",
                "overlap"):
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    return overrides


def _apply_overrides(sc, args) -> None:
    from dataclasses import replace

    from .scenario_io import _OVERLAP_RULES

    kw = _policy_overrides(args)
    if "overlap" in kw:
        kw["overlap_rule"] = _OVERLAP_RULES[kw.pop("overlap")]
    if kw:
        sc.policy = replace(sc.policy, **kw)


def _print_results(results, quiet: bool) -> None:
    if quiet:
        return
    for res in results:
        print(f"{res['name']:<20} {res['kind']:<13} {res['status']}")
        rep = res["report"]
        if res["kind"] in ("check_weak", "check_strong"):
            for row in rep["results"]:
                extra = ""
                if row.get("delta_witness") is not None:
                    extra = f"  delta={row['delta_witness']:.6g}"
                if row.get("first_violation"):
                    fv = row["first_violation"]
                    extra = f"  violated at (t={fv['t']:.6g}, j={fv['j']}, {fv['which']})"
                print(f"    {row['arc']:<24} {row['status']}{extra}")
        elif res["kind"] == "harness":
            print(f"    hypotheses: {rep.get('hypotheses')}")
            if "premise_strong" in rep:
                print(f"    premise_strong: {rep['premise_strong']} "
                      f"({rep.get('premise_source')})")
            print(f"    branches: {rep.get('branch_count')}, "
                  f"violations: {len(rep.get('violations', []))}, "
                  f"counterexamples: {len(rep.get('counterexamples', []))}")
        elif res["kind"] == "invariance":
            for key in ("i", "ii", "iii"):
                cond = rep["conditions"][key]
                print(f"    condition ({key}): {cond['status']} "
                      f"[{cond['arithmetic']}]")
            print(f"    conclusions: {rep['conclusions']}")
        elif res["kind"] == "shared_domain":
            merged = rep["merged"]
            print(f"    breaks: {merged['breaks']}")
            print(f"    sup: (T, J) = ({merged['sup'][0]:.6g}, "
                  f"{merged['sup'][1]})")
        elif res["status"] == "error":
            print(f"    {rep['error']}")


def _finish(sc, results, args) -> int:
    _print_results(results, args.quiet)
    if args.out:
        write_outputs(sc, results, args.out)
    return exit_code(results)


def _cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    if args.task is not None:
        names = [t["name"] for t in sc.tasks]
        if args.task not in names:
            raise ScenarioError(f"no task named {args.task!r} "
                                f"(have: {', '.join(names)})")
        sc.tasks = sc.tasks[: names.index(args.task) + 1]
    results = run_scenario(sc, _policy_overrides(args))
    _print_results(results, args.quiet)
    if args.out:
        write_outputs(sc, results, args.out)
    if args.task is not None:
        return exit_code([results[-1]])
    return exit_code(results)


def _cmd_simulate(args) -> int:
    sc = load_scenario(args.scenario)
    _apply_overrides(sc, args)
    task = {"name": "simulate", "kind": "feedback" if args.closed else "simulate",
            "system": args.system}
    if not args.closed:
        if args.input is None:
            raise ScenarioError("--input is required unless --closed is set")
        if args.input not in sc.inputs:
            raise ScenarioError(f"unknown input {args.input!r}")
        task["input"] = args.input
    if args.system not in sc.systems:
        raise ScenarioError(f"unknown system {args.system!r}")
    if args.x0 is not None:
        task["x0"] = [float(v) for v in args.x0.split(",")]
    if args.enumerate:
        task["enumerate"] = True
    res = _run_simulation_task(sc, task, sc.policy)
    res["name"], res["kind"] = task["name"], task["kind"]
    return _finish(sc, [res], args)


def _cmd_check(args) -> int:
    sc = load_scenario(args.scenario)
    _apply_overrides(sc, args)
    if args.arcs not in sc.arcs:
        raise ScenarioError(f"unknown declared arc {args.arcs!r}")
    if args.contract not in sc.contracts:
        raise ScenarioError(f"unknown contract {args.contract!r}")
    task = {"name": "check", "kind": "check_strong" if args.strong else "check_weak",
            "arcs": args.arcs, "contract": args.contract}
    if args.delta_min is not None:
        task["delta_min"] = args.delta_min
    res = _run_check_task(sc, task, sc.policy, {})
    res["name"], res["kind"] = task["name"], task["kind"]
    return _finish(sc, [res], args)


def _cmd_compose(args) -> int:
    sc = load_scenario(args.scenario)
    _apply_overrides(sc, args)
    for name in (args.first, args.second):
        if name not in sc.systems:
            raise ScenarioError(f"unknown system {name!r}")
    for name in (args.contract_first, args.contract_second):
        if name not in sc.contracts:
            raise ScenarioError(f"unknown contract {name!r}")
    task = {"name": "compose", "kind": "harness", "theorem": "cascade",
            "first": args.first, "second": args.second,
            "contract_first": args.contract_first,
            "contract_second": args.contract_second}
    res = _run_harness_task(sc, task, sc.policy, {})
    res["name"], res["kind"] = task["name"], task["kind"]
    return _finish(sc, [res], args)


def _cmd_invariance(args) -> int:
    sc = load_scenario(args.scenario)
    _apply_overrides(sc, args)
    if args.system not in sc.systems:
        raise ScenarioError(f"unknown system {args.system!r}")
    if args.contract not in sc.contracts:
        raise ScenarioError(f"unknown contract {args.contract!r}")
    task = {"name": "invariance", "kind": "invariance",
            "system": args.system, "contract": args.contract, "K": args.K}
    if args.resolution is not None:
        task["boundary_resolution"] = args.resolution
        task["aw_resolution"] = args.resolution
        task["jumpset_resolution"] = args.resolution
    if args.cone_tol is not None:
        task["cone_tol"] = args.cone_tol
    res = _run_invariance_task(sc, task, sc.policy, {})
    res["name"], res["kind"] = task["name"], task["kind"]
    return _finish(sc, [res], args)


def _cmd_builtins(args) -> int:
    for name in sorted(BUILTIN_SCENARIOS):
        sc = load_scenario(f"builtin:{name}")
        kinds = ", ".join(t["kind"] for t in sc.tasks)
        print(f"{name:<24} {len(sc.tasks)} tasks: {kinds}")
    return 0


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="hybridcontracts",
        description="Simulate hybrid systems and check assume-guarantee "
                    "contracts from scenario files.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run every task in a scenario")
    _add_common(p)
    p.add_argument("--task", help="run tasks up to this one; exit code "
                                  "reflects the named task only")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("simulate", help="simulate one system from a scenario")
    _add_common(p)
    p.add_argument("--system", required=True)
    p.add_argument("--input", help="declared input signal name")
    p.add_argument("--closed", action="store_true",
                   help="close the loop with w = h(x) instead of an input")
    p.add_argument("--x0", help="comma-separated start state")
    p.add_argument("--enumerate", action="store_true",
                   help="enumerate nondeterministic branches")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("check", help="check a declared arc against a contract")
    _add_common(p)
    p.add_argument("--arcs", required=True, help="declared arc name")
    p.add_argument("--contract", required=True)
    p.add_argument("--strong", action="store_true",
                   help="strong satisfaction instead of weak")
    p.add_argument("--delta-min", type=float,
                   help="minimum certified post-horizon extension")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("compose", help="exercise the cascade theorems")
    _add_common(p)
    p.add_argument("--first", required=True)
    p.add_argument("--second", required=True)
    p.add_argument("--contract-first", required=True)
    p.add_argument("--contract-second", required=True)
    p.set_defaults(func=_cmd_compose)

    p = sub.add_parser("invariance", help="check pre-invariance of a box")
    _add_common(p)
    p.add_argument("--system", required=True)
    p.add_argument("--contract", required=True)
    p.add_argument("--K", required=True, help="box literal for the candidate")
    p.add_argument("--resolution", type=int,
                   help="set all three sampling resolutions")
    p.add_argument("--cone-tol", type=float)
    p.set_defaults(func=_cmd_invariance)

    p = sub.add_parser("builtins", help="list embedded scenarios")
    p.set_defaults(func=_cmd_builtins)
    return top


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, SimulationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
