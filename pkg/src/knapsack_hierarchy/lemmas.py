"""Executable checks of the structural facts behind the gap constructions.

Each ``check_*`` function returns a list of ``Check`` records (name, verdict,
one-line detail) instead of raising, so callers can report every failure.
Facts covered:

* staircase: ``(1/(t+1)) * 1`` lies in ``K_I(S)`` for every ``t``-edge set ``S``,
  both by the saturating-request partition and by the hull oracle;
* FG subtree: the requests strictly below ``v`` fit the edge above ``v``;
* FG paths: the requests on a root-to-leaf path are routable, total demand
  ``2**(h*h) - 1``;
* FG halves: ``(1/2) * 1`` lies in ``K_I(e)`` for every edge ``e``;
* FG layer blocks: at a certified ``P^t`` optimum with ``t >= n(l)``, each block
  of ``l``-level subtrees collects profit at most 2.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .anf_tree import (
    TreeInstance,
    fg_meta,
    generate_fg,
    generate_staircase,
    is_routable,
    n_of_level,
    to_pip,
)
from .coloring import (
    check_layer_partition,
    layer_partition,
    layer_profit_check,
    partition_certificate,
    staircase_partition,
    verify_uniform,
)
from .hierarchy import optimize_level, point_in_level, verify_hierarchy_result
from .hull_oracle import Inside, membership, verify_membership_certificate
from .numerics import ONE, ZERO, Rat, rat_to_string
from .pip_model import subsystem


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  {self.detail}".rstrip()


def check_staircase_uniform(tree: TreeInstance, t_values: Iterable[int], jobs: int = 1) -> list[Check]:
    pip = to_pip(tree)
    out = []
    for t in t_values:
        bad = 0
        subsets = list(itertools.combinations(range(tree.m), t))
        for S in subsets:
            cert = partition_certificate(tree, staircase_partition(tree, S), pip)
            if cert.q != t + 1 or not verify_uniform(tree, cert, pip):
                bad += 1
        out.append(Check(f"staircase-partition t={t}", bad == 0, f"{len(subsets) - bad}/{len(subsets)} subsets"))
        x = (Rat(1, t + 1),) * pip.n
        level = point_in_level(pip, t, x, jobs=jobs)
        ok = level.inside and all(
            verify_membership_certificate(subsystem(pip, S), x, ans) for S, ans in level.certificates
        )
        out.append(Check(f"staircase-oracle t={t}", ok, f"x = 1/{t + 1}, {len(level.certificates)} certificates"))
    return out


def check_fg_subtrees(tree: TreeInstance) -> list[Check]:
    pip = to_pip(tree)
    bad_route, bad_hull = [], []
    for k in range(tree.m):
        v = tree.child_of_edge(k)
        below = [u for u in tree.subtree_vertices(v) if u != v]
        ids = [r.id for r in tree.requests if r.s in below]
        if not is_routable(tree, ids, [k]):
            bad_route.append(k)
        sub = subsystem(pip, [k])
        x = [ZERO] * pip.n
        for rid in ids:
            x[tree.request_index[rid]] = ONE
        ans = membership(sub, x)
        if not (isinstance(ans, Inside) and verify_membership_certificate(sub, x, ans)):
            bad_hull.append(k)
    return [
        Check("fg-subtree-routable-on-edge", not bad_route, f"failing edges {bad_route}" if bad_route else f"{tree.m} edges"),
        Check("fg-subtree-in-edge-hull", not bad_hull, f"failing edges {bad_hull}" if bad_hull else f"{tree.m} edges"),
    ]


def check_fg_paths(tree: TreeInstance) -> list[Check]:
    h = fg_meta(tree).h
    target = Rat(2 ** (h * h) - 1)
    leaves = [v for v in tree.vertices if not tree.children[v]]
    bad = []
    for leaf in leaves:
        chain = []
        v = leaf
        while v != tree.root:
            chain.append(v)
            v = tree.parent[v]
        ids = [r.id for r in tree.requests if r.s in chain]
        total = sum((tree.requests[tree.request_index[i]].demand for i in ids), ZERO)
        if total != target or not is_routable(tree, ids):
            bad.append(leaf)
    detail = f"{len(leaves)} paths, demand {rat_to_string(target)} each" if not bad else f"failing leaves {bad}"
    return [Check("fg-path-routable", not bad, detail)]


def check_fg_halves(tree: TreeInstance) -> list[Check]:
    pip = to_pip(tree)
    x = (Rat(1, 2),) * pip.n
    bad = []
    for k in range(pip.m):
        sub = subsystem(pip, [k])
        ans = membership(sub, x)
        if not (isinstance(ans, Inside) and verify_membership_certificate(sub, x, ans)):
            bad.append(k)
    return [Check("fg-halves-in-edge-hull", not bad, f"{pip.m} edges" if not bad else f"failing edges {bad}")]


def layer_levels(tree: TreeInstance, subset_limit: int = 2000) -> dict:
    """Hierarchy level used for each block height: ``n(l)`` when the number of
    ``n(l)``-subsets is at most ``subset_limit``, else ``m`` (``P^m`` lies inside
    every ``P^t``, so the block bound must hold there too)."""
    h = fg_meta(tree).h
    m = tree.m
    out = {}
    for ell in range(1, h + 1):
        t = n_of_level(h, ell)
        out[ell] = t if math.comb(m, t) <= subset_limit else m
    return out


def check_fg_layers(
    tree: TreeInstance,
    ells: Optional[Iterable[int]] = None,
    iteration_budget: int = 10_000,
    jobs: int = 1,
    results: Optional[dict] = None,
) -> list[Check]:
    """``results`` (t -> HierarchyResult) is filled in and reused across calls."""
    pip = to_pip(tree)
    h = fg_meta(tree).h
    levels = layer_levels(tree)
    results = {} if results is None else results
    out = []
    for ell in ells or range(1, h + 1):
        part = layer_partition(tree, ell)
        out.append(Check(f"fg-layer-partition l={ell}", check_layer_partition(tree, part),
                         f"{len(part.blocks)} blocks"))
        t = levels[ell]
        if t not in results:
            results[t] = optimize_level(pip, t, iteration_budget=iteration_budget, jobs=jobs)
        res = results[t]
        certified = verify_hierarchy_result(pip, res)
        prof = layer_profit_check(tree, part, res.x_star)
        blocks = len(part.blocks)
        ok = certified and prof.within(2) and prof.total <= 2 * blocks
        detail = (
            f"t={t} value={rat_to_string(res.value)} block profits "
            f"[{', '.join(rat_to_string(p) for p in prof.profits)}] <= 2, total <= {2 * blocks}"
        )
        out.append(Check(f"fg-layer-profit l={ell}", ok, detail))
    return out


def run_all(h: int = 3, k: int = 7, t_values=(1, 2, 3), jobs: int = 1, layers: bool = True) -> list[Check]:
    checks = check_staircase_uniform(generate_staircase(k), t_values, jobs=jobs)
    fg = generate_fg(h)
    checks += check_fg_subtrees(fg)
    checks += check_fg_paths(fg)
    checks += check_fg_halves(fg)
    if layers:
        checks += check_fg_layers(fg, jobs=jobs)
    return checks
