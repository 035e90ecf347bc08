"""``khier`` command line: generate instances, solve, verify, report, colour, check.

Exit codes: 0 success, 2 verification failure, 3 budget exhausted, 4 input error.
Budgets default from ``KH_NODE_BUDGET`` (branch-and-bound nodes per knapsack
solve) and ``KH_ITERATION_BUDGET`` (master solves per hierarchy run); the
``--node-budget`` / ``--iteration-budget`` flags win over the environment.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
from pathlib import Path

from . import __version__
from .anf_tree import TreeInstance, generate_fg, generate_random_tree, generate_staircase, to_pip
from .coloring import (
    ColoringError,
    UniformMembership,
    _check_partition,
    partition_certificate,
    partition_to_json,
    s_routable_partition,
    staircase_partition,
    verify_uniform,
)
from .exact_lp import Optimal, outcome_from_json, outcome_to_json, solve_lp, verify_lp_outcome
from .hierarchy import (
    NO_RANK_CUTS,
    BudgetExhausted,
    EnumerationBudgetExceeded,
    RankCutFamily,
    dump_result,
    gap_report,
    generate_rank_cuts,
    master_lp,
    optimize_level,
    parse_family,
    result_from_json,
    verify_hierarchy_result,
)
from .hull_oracle import certificate_from_json
from .knapsack import NodeBudgetExceeded, rank as column_rank, solve_ip
from .lemmas import run_all
from .numerics import DimensionError, dot, rat_from_string, rat_to_string
from .pip_model import InstanceError, PipInstance

EXIT_OK, EXIT_VERIFY, EXIT_BUDGET, EXIT_INPUT = 0, 2, 3, 4


class InputError(Exception):
    """Bad arguments, files or environment; maps to exit code 4."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# -- helpers ----------------------------------------------------------------------

def _env_int(name: str):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"{name} must be an integer, got {raw!r}") from None
    if value < 1:
        raise InputError(f"{name} must be positive")
    return value


def _budgets(args):
    node = args.node_budget if args.node_budget is not None else _env_int("KH_NODE_BUDGET")
    iters = (
        args.iteration_budget if args.iteration_budget is not None else _env_int("KH_ITERATION_BUDGET")
    )
    return node, iters


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def _read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def load_instance(path):
    """Return ``(pip, tree_or_None)`` from a tree or pip JSON file."""
    data = _read_json(path)
    kind = data.get("kind") if isinstance(data, dict) else None
    try:
        if kind == "tree":
            tree = TreeInstance.from_json(data)
            return to_pip(tree), tree
        if kind == "pip":
            return PipInstance.from_json(data), None
    except (InstanceError, DimensionError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None
    raise InputError(f"{path}: expected an instance of kind 'tree' or 'pip', got {kind!r}")


def _write_json(data: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")


def _rank_family(args, pip, tree, node_limit) -> RankCutFamily:
    if not getattr(args, "rank", None):
        return NO_RANK_CUTS
    try:
        kind, extra = parse_family(args.rank)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return generate_rank_cuts(pip, kind, tree=tree, node_limit=node_limit, **extra)


def _default_out(instance: str, suffix: str) -> str:
    p = Path(instance)
    return str(p.with_name(f"{p.stem}.{suffix}.json"))


# -- commands ---------------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.family == "staircase":
        if args.k is None or args.k < 1:
            raise InputError("gen staircase needs --k >= 1")
        tree = generate_staircase(args.k)
    elif args.family == "fg":
        if args.h is None or args.h < 2:
            raise InputError("gen fg needs --h >= 2")
        tree = generate_fg(args.h)
    else:
        if args.vertices < 2 or args.requests < 0:
            raise InputError("gen random needs --vertices >= 2 and --requests >= 0")
        tree = generate_random_tree(
            args.vertices, args.requests, args.seed, max_capacity=args.max_capacity,
            single_sink=args.single_sink,
        )
    data = tree.to_json()
    if args.out:
        _write_json(data, args.out)
        print(f"wrote {args.out}: {tree.k} requests, {tree.m} edges", file=sys.stderr)
    else:
        json.dump(data, sys.stdout, indent=1)
        sys.stdout.write("\n")
    return EXIT_OK


def cmd_solve(args) -> int:
    pip, tree = load_instance(args.instance)
    node_limit, iters = _budgets(args)
    out_path = args.out or _default_out(args.instance, args.kind if args.kind != "hierarchy" else f"t{args.t}")
    rank_cuts = _rank_family(args, pip, tree, node_limit)
    if args.kind == "lp":
        lp = master_lp(pip, rank_cuts, [])
        outcome = solve_lp(lp)
        assert isinstance(outcome, Optimal)
        value = outcome.value
        data = {
            "kind": "lp_result",
            "instance": pip.to_json(),
            "rank_cuts": _rank_json(rank_cuts),
            "outcome": outcome_to_json(outcome),
        }
    elif args.kind == "ip":
        best = solve_ip(pip, node_limit=node_limit)
        value = best.value
        data = {
            "kind": "ip_result",
            "instance": pip.to_json(),
            "point": "".join(str(v) for v in best.point),
            "value": rat_to_string(value),
        }
    else:
        if args.t is None:
            raise InputError("solve hierarchy needs --t")
        if not (1 <= args.t <= pip.m):
            raise InputError(f"--t must be in [1, {pip.m}]")
        res = optimize_level(
            pip, args.t, rank_cuts=rank_cuts, subset_filter=not args.no_filter,
            iteration_budget=iters, node_limit=node_limit, jobs=args.jobs,
        )
        value = res.value
        dump_result(res, out_path, pip)
        data = None
        print(f"iterations {res.iterations}, cuts {len(res.cuts_added)}", file=sys.stderr)
    if data is not None:
        _write_json(data, out_path)
    print(rat_to_string(value))
    print(f"wrote {out_path}", file=sys.stderr)
    return EXIT_OK


def _rank_json(rc: RankCutFamily) -> dict:
    return {"family": rc.kind, "cuts": [{"columns": list(c), "rank": r} for c, r in rc.cuts]}


def _rank_from_json(data: dict) -> RankCutFamily:
    return RankCutFamily(
        data["family"], tuple((tuple(c["columns"]), int(c["rank"])) for c in data["cuts"])
    )


def verify_result_data(data: dict) -> tuple[bool, str]:
    """Check a result file's certificates; returns ``(ok, message)``."""
    kind = data.get("kind")
    if kind == "s_routable_partition":
        tree = TreeInstance.from_json(data["instance"])
        return _verify_partition(tree, data)
    pip = PipInstance.from_json(data["instance"])
    if kind == "lp_result":
        rank_cuts = _rank_from_json(data["rank_cuts"])
        for cols, r in rank_cuts.cuts:
            if column_rank(pip, cols) != r:
                return False, f"rank cut on {list(cols)} has the wrong rank"
        ok = verify_lp_outcome(master_lp(pip, rank_cuts, []), outcome_from_json(data["outcome"]))
        return ok, "LP optimality certificate " + ("verified" if ok else "rejected")
    if kind == "ip_result":
        point = [int(ch) for ch in data["point"]]
        value = rat_from_string(data["value"])
        chosen = [j for j, v in enumerate(point) if v]
        if len(point) != pip.n or any(v not in (0, 1) for v in point):
            return False, "point has the wrong shape"
        if not pip.is_feasible(chosen):
            return False, "point violates a row"
        if dot(pip.w, point) != value:
            return False, "value does not match the point"
        if solve_ip(pip).value != value:
            return False, "value is not optimal (re-solved)"
        return True, "IP point feasible and optimal (re-solved)"
    if kind == "hierarchy_result":
        ok = verify_hierarchy_result(pip, result_from_json(data))
        return ok, "hierarchy certificates " + ("verified" if ok else "rejected")
    return False, f"unknown result kind {kind!r}"


def _verify_partition(tree: TreeInstance, data: dict) -> tuple[bool, str]:
    S = tuple(data["S"])
    classes = tuple(tuple(cl) for cl in data["classes"])
    try:
        _check_partition(tree, S, classes)
    except ColoringError as exc:
        return False, str(exc)
    if "certificate" in data:
        comb = certificate_from_json(data["certificate"])
        cert = UniformMembership(S, len(classes), comb)
        if rat_from_string(data["point"]) != rat_from_string(f"1/{len(classes)}"):
            return False, "certified point does not match the class count"
        if not verify_uniform(tree, cert):
            return False, "uniform membership certificate rejected"
    return True, f"{len(classes)} S-routable classes verified"


def cmd_verify(args) -> int:
    data = _read_json(args.result)
    try:
        ok, message = verify_result_data(data)
    except (AttributeError, KeyError, TypeError, ValueError, IndexError) as exc:
        ok, message = False, f"malformed result: {exc}"
    print(("OK  " if ok else "FAIL  ") + message)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_report(args) -> int:
    pip, tree = load_instance(args.instance)
    node_limit, iters = _budgets(args)
    t_list = _int_list(args.t)
    for t in t_list:
        if not (0 <= t <= pip.m):
            raise InputError(f"t = {t} outside [0, {pip.m}]")
    rank_cuts = _rank_family(args, pip, tree, node_limit) if args.rank else None
    rows = gap_report(
        pip, t_list, rank_cuts=rank_cuts, subset_filter=not args.no_filter,
        iteration_budget=iters, node_limit=node_limit, jobs=args.jobs,
    )
    instance_id = args.instance_id or Path(args.instance).stem
    k = tree.k if tree is not None else pip.n
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["instance_id", "k", "m", "t", "formulation", "value", "ip_value", "gap",
                         "iterations", "cuts"])
        for row in rows:
            writer.writerow([
                instance_id, k, pip.m, row.t, row.formulation, rat_to_string(row.value),
                rat_to_string(row.ip_value), "" if row.gap is None else rat_to_string(row.gap),
                row.iterations, row.cuts,
            ])
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


def cmd_color(args) -> int:
    pip, tree = load_instance(args.instance)
    if tree is None:
        raise InputError("color needs a tree instance")
    if args.edges is not None:
        S = _int_list(args.edges)
    elif args.random_size is not None:
        if not (0 <= args.random_size <= tree.m):
            raise InputError(f"--random-size must be in [0, {tree.m}]")
        S = sorted(random.Random(args.seed).sample(range(tree.m), args.random_size))
    else:
        raise InputError("color needs --edges or --random-size")
    if any(not (0 <= k < tree.m) for k in S):
        raise InputError(f"edge indices must be in [0, {tree.m})")
    try:
        if tree.family == "staircase":
            part = staircase_partition(tree, S)
        elif tree.family == "fg":
            part = s_routable_partition(tree, S)
        else:
            raise InputError("color supports staircase and fg trees")
    except ColoringError as exc:
        print(f"FAIL  {exc}")
        return EXIT_VERIFY
    except ValueError as exc:
        raise InputError(str(exc)) from None
    cert = partition_certificate(tree, part, pip)
    ok = verify_uniform(tree, cert, pip)
    print(f"S = {list(part.S)}: {len(part.classes)} classes (c = {part.c}), "
          f"point 1/{cert.q} certificate {'verified' if ok else 'REJECTED'}")
    for cl in part.classes:
        print("  " + " ".join(str(r) for r in cl))
    if args.out:
        data = partition_to_json(part, cert)
        data["instance"] = tree.to_json()
        _write_json(data, args.out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_check_lemmas(args) -> int:
    checks = run_all(h=args.h, k=args.k, t_values=_int_list(args.t), jobs=args.jobs,
                     layers=not args.skip_layers)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="khier", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def budgets(p):
        p.add_argument("--node-budget", type=int, help="branch-and-bound nodes per knapsack solve")
        p.add_argument("--iteration-budget", type=int, help="master LP solves per hierarchy run")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for membership queries")

    p = sub.add_parser("gen", help="generate an instance")
    p.add_argument("family", choices=["staircase", "fg", "random"])
    p.add_argument("--k", type=int, help="staircase length")
    p.add_argument("--h", type=int, help="FG tree height")
    p.add_argument("--vertices", type=int, default=8)
    p.add_argument("--requests", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-capacity", type=int, default=16)
    p.add_argument("--single-sink", action="store_true")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="solve the LP, the IP or a hierarchy level")
    p.add_argument("kind", choices=["lp", "ip", "hierarchy"])
    p.add_argument("instance")
    p.add_argument("--t", type=int, help="hierarchy level")
    p.add_argument("--rank", help="rank family: pairs, rows, paths or exhaustive:K")
    p.add_argument("--no-filter", action="store_true", help="query every t-subset")
    p.add_argument("--out", help="result JSON (default: next to the instance)")
    budgets(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="re-check every certificate in a result file")
    p.add_argument("result")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="gap table as CSV")
    p.add_argument("instance")
    p.add_argument("--t", required=True, help="comma-separated levels; 0 is the plain LP")
    p.add_argument("--rank", help="also report the rank formulation with this family")
    p.add_argument("--no-filter", action="store_true")
    p.add_argument("--instance-id")
    p.add_argument("--out", help="CSV file (default: stdout)")
    budgets(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("color", help="S-routable partition with its membership certificate")
    p.add_argument("instance")
    p.add_argument("--edges", help="comma-separated edge indices")
    p.add_argument("--random-size", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("check-lemmas", help="run the structural check suites")
    p.add_argument("--h", type=int, default=3)
    p.add_argument("--k", type=int, default=7)
    p.add_argument("--t", default="1,2,3", help="staircase levels")
    p.add_argument("--skip-layers", action="store_true", help="skip the hierarchy-based block checks")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_check_lemmas)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) is not None and getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be positive")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"khier: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InstanceError, DimensionError, EnumerationBudgetExceeded) as exc:
        print(f"khier: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BudgetExhausted, NodeBudgetExceeded) as exc:
        print(f"khier: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
