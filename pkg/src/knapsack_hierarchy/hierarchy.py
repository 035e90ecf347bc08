"""Optimize over the knapsack intersection hierarchy ``P^t`` by certified cutting planes.

``P^t`` is the natural LP relaxation intersected with the integer hulls
``K_I(S)`` of every ``t``-row subsystem ``S``.  ``optimize_level`` runs a
Kelley loop: solve the master LP (base rows, rank cuts, hull cuts found so far),
ask the hull oracle about the optimum for every ``t``-subset, add every
violated cut, and repeat until all subsets answer ``Inside``.

The returned ``HierarchyResult`` is self-certifying.  ``verify_hierarchy_result``
re-checks, with exact arithmetic only,

* each hull cut against the master point of the round that produced it,
* each rank cut's right-hand side against a fresh rank computation,
* LP optimality of ``x_star`` for the final master (duals included), and
* a membership combination for every ``t``-subset whose support meets
  ``supp(x_star)`` (the others contain ``x_star`` trivially via the zero atom).

Together these prove ``value = max{w.x : x in P^t ∩ rank cuts}``.
"""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .exact_lp import LE, LinearProgram, Optimal, Row, solve_lp, verify_lp_outcome
from .hull_oracle import (
    ConvexCombination,
    CutCertificate,
    Inside,
    Outside,
    certificate_from_json,
    certificate_to_json,
    membership,
    verify_membership_certificate,
)
from .knapsack import rank as column_rank
from .knapsack import solve_ip
from .numerics import ONE, ZERO, Rat, dot, rat_from_string, rat_to_string
from .pip_model import PipInstance, subsystem


class BudgetExhausted(RuntimeError):
    """The cutting-plane loop hit its iteration budget; ``partial`` holds the last state."""

    def __init__(self, message: str, partial: "HierarchyResult"):
        super().__init__(message)
        self.partial = partial


class EnumerationBudgetExceeded(ValueError):
    """A rank family would enumerate more subsets than allowed."""


# -- rank cuts -----------------------------------------------------------------

FAMILY_KINDS = ("pairs", "per_row_supports", "root_to_leaf_paths", "explicit", "exhaustive")


@dataclass(frozen=True)
class RankCutFamily:
    kind: str
    cuts: tuple  # ((columns, rank), ...), columns sorted; only cuts with rank < |columns|

    def rows(self, n: int) -> list:
        out = []
        for cols, r in self.cuts:
            coeffs = [ZERO] * n
            for j in cols:
                coeffs[j] = ONE
            out.append(Row(coeffs, Rat(r), LE))
        return out


NO_RANK_CUTS = RankCutFamily("explicit", ())


def _root_to_leaf_sets(tree) -> list:
    # columns of requests whose whole path lies on one root-to-leaf path
    leaves = [v for v in tree.vertices if v != tree.root and not tree.children[v]]
    paths = []
    for j, r in enumerate(tree.requests):
        paths.append(set(tree._path(r.s, r.t)))
    out = []
    for leaf in leaves:
        chain = set()
        v = leaf
        while v != tree.root:
            chain.add(tree.edge_index[v])
            v = tree.parent[v]
        out.append(tuple(j for j, p in enumerate(paths) if p <= chain))
    return out


def generate_rank_cuts(
    pip: PipInstance,
    family: Union[str, tuple],
    tree=None,
    sets: Optional[Iterable[Iterable[int]]] = None,
    size: Optional[int] = None,
    enum_limit: int = 100_000,
    node_limit: Optional[int] = None,
) -> RankCutFamily:
    """Rank inequalities ``sum_{j in S} x_j <= rank(S)`` for a family of column sets.

    ``family`` is one of ``pairs``, ``per_row_supports``, ``root_to_leaf_paths``
    (needs ``tree``), ``explicit`` (needs ``sets``) or ``exhaustive`` (all sets up
    to ``size`` columns, refused past ``enum_limit`` sets).  Sets whose rank equals
    their size give redundant cuts and are dropped.
    """
    if family == "pairs":
        candidates = itertools.combinations(range(pip.n), 2)
    elif family == "per_row_supports":
        candidates = pip.row_supports
    elif family == "root_to_leaf_paths":
        if tree is None:
            raise ValueError("root_to_leaf_paths needs the tree instance")
        candidates = _root_to_leaf_sets(tree)
    elif family == "explicit":
        candidates = sets or ()
    elif family == "exhaustive":
        if size is None or size < 1:
            raise ValueError("exhaustive family needs size >= 1")
        count = sum(math.comb(pip.n, s) for s in range(2, size + 1))
        if count > enum_limit:
            raise EnumerationBudgetExceeded(
                f"exhaustive rank family would enumerate {count} sets (limit {enum_limit})"
            )
        candidates = itertools.chain.from_iterable(
            itertools.combinations(range(pip.n), s) for s in range(2, size + 1)
        )
    else:
        raise ValueError(f"unknown rank family {family!r}")
    seen = set()
    cuts = []
    for cols in candidates:
        cols = tuple(sorted(set(cols)))
        if not cols or cols in seen:
            continue
        seen.add(cols)
        r = column_rank(pip, cols, node_limit=node_limit)
        if r < len(cols):
            cuts.append((cols, r))
    return RankCutFamily(family, tuple(cuts))


def parse_family(text: str) -> tuple[str, dict]:
    """``"pairs"``, ``"rows"``, ``"paths"`` or ``"exhaustive:K"`` -> (kind, kwargs)."""
    aliases = {"rows": "per_row_supports", "paths": "root_to_leaf_paths"}
    if text.startswith("exhaustive:"):
        return "exhaustive", {"size": int(text.split(":", 1)[1])}
    kind = aliases.get(text, text)
    if kind not in FAMILY_KINDS or kind in ("explicit", "exhaustive"):
        raise ValueError(f"unknown rank family {text!r}")
    return kind, {}


# -- results ---------------------------------------------------------------------

@dataclass(frozen=True)
class HullCut:
    rows: tuple  # the subset S
    cut: CutCertificate  # coefficients indexed by the support of S
    round: int  # index into HierarchyResult.round_points


@dataclass
class HierarchyResult:
    t: int
    x_star: tuple
    value: Rat
    cuts_added: list
    memberships: list  # [(S, ConvexCombination)] for every S meeting supp(x_star)
    iterations: int
    rank_cuts: RankCutFamily = NO_RANK_CUTS
    round_points: list = field(default_factory=list)
    duals: tuple = ()


def master_lp(pip: PipInstance, rank_cuts: RankCutFamily, cuts: Sequence[HullCut]) -> LinearProgram:
    rows = [Row(pip.A[i], pip.b[i], LE) for i in range(pip.m)]
    rows.extend(rank_cuts.rows(pip.n))
    for hc in cuts:
        sub = subsystem(pip, hc.rows)
        rows.append(Row(sub.lift(hc.cut.coeffs), hc.cut.rhs, LE))
    bounds = [(ZERO, ONE)] * pip.n
    return LinearProgram(pip.w, rows, bounds)


def _support_meets(pip: PipInstance, S: Sequence[int], x: Sequence) -> bool:
    return any(x[j] != 0 for i in S for j in pip.row_supports[i])


def _subsets(pip: PipInstance, t: int, x: Sequence, subset_filter: bool):
    for S in itertools.combinations(range(pip.m), t):
        if not subset_filter or _support_meets(pip, S, x):
            yield S


# Worker state for --jobs fan-out; each process keeps its own copy of the instance.
_WORKER: dict = {}


def _init_worker(pip, node_limit):
    _WORKER["pip"] = pip
    _WORKER["node_limit"] = node_limit


def _query(args):
    S, x, pool = args
    pip = _WORKER["pip"]
    return membership(subsystem(pip, S), x, node_limit=_WORKER["node_limit"], pool=pool)


class _Fanout:
    """Runs membership queries serially or on a process pool; order is preserved.

    Atoms from each subset's previous answer seed its next master.  The seeds
    depend only on earlier answers, never on which worker ran them, so serial
    and parallel runs stay identical.
    """

    def __init__(self, pip, node_limit, jobs):
        self.pip = pip
        self.node_limit = node_limit
        self.seeds: dict = {}
        self.pool = None
        if jobs and jobs > 1:
            self.pool = ProcessPoolExecutor(
                max_workers=jobs, initializer=_init_worker, initargs=(pip, node_limit)
            )

    def run(self, subsets, x):
        tasks = [(S, x, self.seeds.get(S)) for S in subsets]
        if self.pool is None:
            answers = [
                membership(subsystem(self.pip, S), x, node_limit=self.node_limit, pool=seed)
                for S, x, seed in tasks
            ]
        else:
            chunk = max(1, len(subsets) // (8 * self.pool._max_workers))
            answers = list(self.pool.map(_query, tasks, chunksize=chunk))
        for S, ans in zip(subsets, answers):
            self.seeds[S] = ans.pool
        return answers

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()


def default_iteration_budget(m: int, t: int) -> int:
    return 10 * math.comb(m, t)


def optimize_level(
    pip: PipInstance,
    t: int,
    rank_cuts: Optional[RankCutFamily] = None,
    subset_filter: bool = True,
    iteration_budget: Optional[int] = None,
    node_limit: Optional[int] = None,
    jobs: int = 1,
) -> HierarchyResult:
    """Maximize ``w.x`` over ``P^t`` (intersected with ``rank_cuts``) with certificates."""
    if not (1 <= t <= pip.m):
        raise ValueError(f"level t = {t} outside [1, {pip.m}]")
    rank_cuts = rank_cuts or NO_RANK_CUTS
    budget = iteration_budget if iteration_budget is not None else default_iteration_budget(pip.m, t)
    cuts: list[HullCut] = []
    seen_cuts = set()
    round_points = []
    fan = _Fanout(pip, node_limit, jobs)
    try:
        while True:
            if len(round_points) >= budget:
                x = round_points[-1]
                partial = HierarchyResult(
                    t, x, dot(pip.w, x), cuts, [], len(round_points), rank_cuts, round_points
                )
                raise BudgetExhausted(
                    f"no certified optimum after {budget} master solves", partial
                )
            out = solve_lp(master_lp(pip, rank_cuts, cuts))
            assert isinstance(out, Optimal)  # the box keeps the master bounded and 0 feasible
            x = out.x
            rnd = len(round_points)
            round_points.append(x)
            subsets = list(_subsets(pip, t, x, subset_filter))
            answers = fan.run(subsets, x)
            fresh = []
            for S, ans in zip(subsets, answers):
                if isinstance(ans, Outside):
                    sub = subsystem(pip, S)
                    key = (sub.lift(ans.cut.coeffs), ans.cut.rhs)
                    if key not in seen_cuts:
                        seen_cuts.add(key)
                        fresh.append(HullCut(S, ans.cut, rnd))
            if not fresh:
                combos = [(S, ans.combination) for S, ans in zip(subsets, answers)]
                return HierarchyResult(
                    t, x, out.value, cuts, combos, len(round_points), rank_cuts,
                    round_points, out.duals,
                )
            cuts.extend(fresh)
    finally:
        fan.close()


@dataclass(frozen=True)
class LevelMembership:
    inside: bool
    certificates: tuple  # ((S, Inside | Outside), ...); ends at the first Outside


def point_in_level(
    pip: PipInstance,
    t: int,
    x: Sequence,
    node_limit: Optional[int] = None,
    jobs: int = 1,
) -> LevelMembership:
    """Whether ``x`` lies in ``K_I(S)`` for every ``t``-subset ``S``, with certificates."""
    if not (1 <= t <= pip.m):
        raise ValueError(f"level t = {t} outside [1, {pip.m}]")
    certs = []
    fan = _Fanout(pip, node_limit, jobs)
    try:
        subsets = list(itertools.combinations(range(pip.m), t))
        batch = max(1, 4 * jobs)
        for start in range(0, len(subsets), batch):
            chunk = subsets[start:start + batch]
            for S, ans in zip(chunk, fan.run(chunk, x)):
                certs.append((S, ans))
                if isinstance(ans, Outside):
                    return LevelMembership(False, tuple(certs))
    finally:
        fan.close()
    return LevelMembership(True, tuple(certs))


# -- verification -----------------------------------------------------------------

def verify_hierarchy_result(pip: PipInstance, res: HierarchyResult, check_ranks: bool = True) -> bool:
    """Exact check of every certificate carried by ``res`` (see module docstring)."""
    try:
        return _verify(pip, res, check_ranks)
    except (TypeError, ValueError, IndexError, KeyError, ZeroDivisionError):
        return False


def _verify(pip, res, check_ranks) -> bool:
    t, x = res.t, tuple(res.x_star)
    if not (1 <= t <= pip.m) or len(x) != pip.n:
        return False
    if not res.round_points or tuple(res.round_points[-1]) != x:
        return False
    if res.iterations != len(res.round_points):
        return False
    for cols, r in res.rank_cuts.cuts:
        if list(cols) != sorted(set(cols)) or r >= len(cols):
            return False
        if check_ranks and column_rank(pip, cols) != r:
            return False
    keys = set()
    for hc in res.cuts_added:
        S = tuple(hc.rows)
        if len(S) != t or len(set(S)) != t or list(S) != sorted(S):
            return False
        if not (0 <= hc.round < len(res.round_points) - 1):
            return False
        sub = subsystem(pip, S)
        if not verify_membership_certificate(sub, res.round_points[hc.round], hc.cut):
            return False
        keys.add((sub.lift(hc.cut.coeffs), hc.cut.rhs))
    if len(keys) != len(res.cuts_added):
        return False
    lp = master_lp(pip, res.rank_cuts, res.cuts_added)
    if not verify_lp_outcome(lp, Optimal(x, res.value, tuple(res.duals))):
        return False
    covered = set()
    for S, comb in res.memberships:
        S = tuple(S)
        if len(S) != t or S in covered or not isinstance(comb, ConvexCombination):
            return False
        covered.add(S)
        if not verify_membership_certificate(subsystem(pip, S), x, comb):
            return False
    for S in itertools.combinations(range(pip.m), t):
        if S not in covered and _support_meets(pip, S, x):
            return False
    return True


# -- JSON -------------------------------------------------------------------------

def _vec(v) -> list:
    return [rat_to_string(a) for a in v]


def _unvec(v) -> tuple:
    return tuple(rat_from_string(a) for a in v)


def result_to_json(res: HierarchyResult, pip: Optional[PipInstance] = None) -> dict:
    out = {
        "kind": "hierarchy_result",
        "t": res.t,
        "value": rat_to_string(res.value),
        "x_star": _vec(res.x_star),
        "iterations": res.iterations,
        "rank_cuts": {
            "family": res.rank_cuts.kind,
            "cuts": [{"columns": list(c), "rank": r} for c, r in res.rank_cuts.cuts],
        },
        "round_points": [_vec(p) for p in res.round_points],
        "cuts": [
            {"rows": list(hc.rows), "round": hc.round, "certificate": certificate_to_json(hc.cut)}
            for hc in res.cuts_added
        ],
        "memberships": [
            {"rows": list(S), "certificate": certificate_to_json(c)} for S, c in res.memberships
        ],
        "duals": _vec(res.duals),
    }
    if pip is not None:
        out["instance"] = pip.to_json()
    return out


def result_from_json(data: dict) -> HierarchyResult:
    if data.get("kind") != "hierarchy_result":
        raise ValueError(f"expected kind 'hierarchy_result', got {data.get('kind')!r}")
    rc = data["rank_cuts"]
    return HierarchyResult(
        t=int(data["t"]),
        x_star=_unvec(data["x_star"]),
        value=rat_from_string(data["value"]),
        cuts_added=[
            HullCut(tuple(c["rows"]), certificate_from_json(c["certificate"]), int(c["round"]))
            for c in data["cuts"]
        ],
        memberships=[
            (tuple(mb["rows"]), certificate_from_json(mb["certificate"])) for mb in data["memberships"]
        ],
        iterations=int(data["iterations"]),
        rank_cuts=RankCutFamily(
            rc["family"], tuple((tuple(c["columns"]), int(c["rank"])) for c in rc["cuts"])
        ),
        round_points=[_unvec(p) for p in data["round_points"]],
        duals=_unvec(data["duals"]),
    )


def dump_result(res: HierarchyResult, path, pip: Optional[PipInstance] = None) -> None:
    with open(path, "w") as fh:
        json.dump(result_to_json(res, pip), fh, indent=1)
        fh.write("\n")


# -- gap tables --------------------------------------------------------------------

@dataclass(frozen=True)
class GapRow:
    t: int
    formulation: str  # "plain" or "rank"
    value: Rat
    ip_value: Rat
    gap: Optional[Rat]  # None when the IP optimum is 0
    iterations: int
    cuts: int


def lp_value(pip: PipInstance, rank_cuts: Optional[RankCutFamily] = None) -> Rat:
    out = solve_lp(master_lp(pip, rank_cuts or NO_RANK_CUTS, []))
    assert isinstance(out, Optimal)
    return out.value


def gap_report(
    pip: PipInstance,
    t_list: Iterable[int],
    rank_cuts: Optional[RankCutFamily] = None,
    ip_value: Optional[Rat] = None,
    **opts,
) -> list[GapRow]:
    """One row per (t, formulation); ``t = 0`` is the natural LP.

    The ``rank`` formulation is reported only when ``rank_cuts`` is given.
    """
    if ip_value is None:
        ip_value = solve_ip(pip).value
    forms = [("plain", NO_RANK_CUTS)]
    if rank_cuts is not None:
        forms.append(("rank", rank_cuts))
    rows = []
    for t in t_list:
        for name, family in forms:
            if t == 0:
                value, iters, ncuts = lp_value(pip, family), 1, 0
            else:
                res = optimize_level(pip, t, rank_cuts=family, **opts)
                value, iters, ncuts = res.value, res.iterations, len(res.cuts_added)
            gap = value / ip_value if ip_value else None
            rows.append(GapRow(t, name, value, ip_value, gap, iters, ncuts))
    return rows
