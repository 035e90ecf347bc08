"""Constructive membership certificates on FG and staircase trees.

An edge set ``S`` (edge indices, which are also the PIP row indices) makes a
request set ``X`` *S-routable* when no edge of ``S`` is overloaded by ``X``.  A
partition of all requests into ``q`` S-routable classes proves that the
uniform point ``(1/q) * 1`` lies in ``K_I(S)``: it is the average of the class
indicator vectors.  Every construction here is checked, never assumed.

* ``closure_subtree`` / ``layered_coloring`` / ``s_routable_partition``: FG
  trees, at most ``c + 1`` classes where ``c`` is least with
  ``|S| <= 2**(h*(c-1))``.
* ``staircase_partition``: one singleton per edge of ``S`` plus the rest.
* ``layer_partition`` / ``layer_profit_check``: blocks of ``l``-level subtrees
  and the profit a point collects inside each block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .anf_tree import TreeInstance, fg_meta, is_routable, n_of_level, to_pip
from .hull_oracle import ConvexCombination, certificate_to_json, verify_membership_certificate
from .numerics import ZERO, Rat, rat_to_string
from .pip_model import PipInstance, subsystem


class ColoringError(RuntimeError):
    """A construction produced a class that fails its routability check."""


@dataclass(frozen=True)
class ClosureSubtree:
    apex: object  # the least common ancestor of the endpoints of S
    vertices: tuple  # apex first, then breadth-first
    edges: tuple  # edge indices: every edge below the apex plus the apex's parent edge
    widths: tuple  # number of vertices per layer, apex layer first


@dataclass(frozen=True)
class SRoutablePartition:
    S: tuple
    classes: tuple  # tuples of request ids
    c: int  # colour bound the construction was run with


@dataclass(frozen=True)
class UniformMembership:
    S: tuple
    q: int  # number of classes; the certified point is (1/q) * 1
    combination: ConvexCombination  # over the support of S

    def point(self, n: int) -> tuple:
        return (Rat(1, self.q),) * n


def _requests_at(tree: TreeInstance) -> dict:
    at = {v: [] for v in tree.vertices}
    for r in tree.requests:
        at[r.s].append(r.id)
    return at


def _layers(tree: TreeInstance, sub: ClosureSubtree) -> list:
    base = tree.depth[sub.apex]
    out = [[] for _ in sub.widths]
    for v in sub.vertices:
        out[tree.depth[v] - base].append(v)
    return out


def closure_subtree(tree: TreeInstance, S: Iterable[int]) -> ClosureSubtree:
    """Smallest subtree holding every edge of ``S`` together with the paths that
    join them at their common ancestor, plus that ancestor's parent edge."""
    S = sorted(set(S))
    if not S:
        raise ValueError("closure of an empty edge set is undefined")
    ends = set()
    for k in S:
        e = tree.edges[k]
        ends.update((e.u, e.v))
    ends = sorted(ends, key=lambda v: (tree.depth[v], tree.vertices.index(v)))
    apex = ends[0]
    for v in ends[1:]:
        apex = tree.lca(apex, v)
    members = {apex}
    for v in ends:
        while v not in members:
            members.add(v)
            v = tree.parent[v]
    order = [apex]
    for v in order:
        order.extend(ch for ch in tree.children[v] if ch in members)
    edges = [tree.edge_index[v] for v in order if v != tree.root]
    base = tree.depth[apex]
    widths = [0] * (max(tree.depth[v] for v in order) - base + 1)
    for v in order:
        widths[tree.depth[v] - base] += 1
    return ClosureSubtree(apex, tuple(order), tuple(sorted(edges)), tuple(widths))


def _colour_layers(tree: TreeInstance, members: set, v, c: int) -> dict:
    # Colour the subtree at v with v in class 0.  Each child's colouring also
    # starts at class 0, so it is rotated by one before merging.
    colour = {v: 0}
    for ch in tree.children[v]:
        if ch in members:
            for u, k in _colour_layers(tree, members, ch, c).items():
                colour[u] = (k + 1) % c
    return colour


def layered_coloring(
    tree: TreeInstance, sub: ClosureSubtree, c: int, width_limit: Optional[int] = None
) -> tuple:
    """Classes ``L_i ∪ L_{i+c} ∪ ...`` of the layers of ``sub``, each verified
    routable on every edge of ``sub``.  Empty classes are dropped."""
    if c < 1:
        raise ValueError("need at least one colour")
    if width_limit is None:
        width_limit = 2 ** (fg_meta(tree).h * (c - 1))
    if max(sub.widths) > width_limit:
        raise ValueError(f"subtree has a layer of width {max(sub.widths)} > {width_limit}")
    colour = _colour_layers(tree, set(sub.vertices), sub.apex, c)
    at = _requests_at(tree)
    classes = [[] for _ in range(c)]
    for v in sub.vertices:
        classes[colour[v]].extend(at[v])
    out = tuple(tuple(sorted(cl)) for cl in classes if cl)
    for cl in out:
        if not is_routable(tree, cl, sub.edges):
            raise ColoringError(f"layered class {cl} overloads an edge of the subtree")
    return out


def colour_bound(h: int, size: int) -> int:
    """Least ``c >= 1`` with ``size <= 2**(h*(c-1))``."""
    c = 1
    while size > 2 ** (h * (c - 1)):
        c += 1
    return c


def _check_partition(tree: TreeInstance, S: Sequence[int], classes: Sequence) -> None:
    seen = [rid for cl in classes for rid in cl]
    if sorted(seen) != sorted(r.id for r in tree.requests) or len(seen) != len(set(seen)):
        raise ColoringError("classes do not partition the requests")
    for cl in classes:
        if not is_routable(tree, cl, S):
            raise ColoringError(f"class {cl} is not S-routable")


def s_routable_partition(tree: TreeInstance, S: Iterable[int]) -> SRoutablePartition:
    """Partition all requests into at most ``c + 1`` S-routable classes (FG trees)."""
    S = tuple(sorted(set(S)))
    if not S:
        return SRoutablePartition((), (tuple(r.id for r in tree.requests),), 0)
    h = fg_meta(tree).h
    c = colour_bound(h, len(S))
    sub = closure_subtree(tree, S)
    classes = list(layered_coloring(tree, sub, c))
    inside = set(sub.vertices)
    # requests hanging below the subtree and those above it share one class
    rest = tuple(sorted(r.id for r in tree.requests if r.s not in inside))
    if rest:
        classes.append(rest)
    _check_partition(tree, S, classes)
    return SRoutablePartition(S, tuple(classes), c)


def staircase_partition(tree: TreeInstance, S: Iterable[int]) -> SRoutablePartition:
    """One class per edge of ``S`` holding the request that saturates it, plus
    one class with everything else.  Classes are verified S-routable."""
    S = tuple(sorted(set(S)))
    if not S:
        raise ValueError("staircase partition needs at least one edge")
    at = _requests_at(tree)
    singles = []
    for k in S:
        child = tree.child_of_edge(k)
        saturating = [
            rid for rid in at[child]
            if tree.requests[tree.request_index[rid]].demand == tree.edges[k].capacity
        ]
        if len(saturating) != 1:
            raise ValueError(f"edge {k} has no unique saturating request")
        singles.append(saturating[0])
    used = set(singles)
    classes = [(rid,) for rid in singles]
    rest = tuple(r.id for r in tree.requests if r.id not in used)
    if rest:
        classes.append(rest)
    _check_partition(tree, S, classes)
    return SRoutablePartition(S, tuple(classes), len(S))


def partition_certificate(
    tree: TreeInstance, partition: SRoutablePartition, pip: Optional[PipInstance] = None
) -> UniformMembership:
    """Average of the class indicators, as a combination over the support of S."""
    pip = pip or to_pip(tree)
    sub = subsystem(pip, partition.S, allow_empty=True)
    q = len(partition.classes)
    weights: dict = {}
    for cl in partition.classes:
        members = {tree.request_index[rid] for rid in cl}
        pt = tuple(1 if j in members else 0 for j in sub.support)
        weights[pt] = weights.get(pt, ZERO) + Rat(1, q)
    comb = ConvexCombination(tuple(weights.items()))
    return UniformMembership(partition.S, q, comb)


def uniform_membership_certificate(
    tree: TreeInstance, S: Iterable[int], pip: Optional[PipInstance] = None
) -> UniformMembership:
    return partition_certificate(tree, s_routable_partition(tree, S), pip)


def verify_uniform(tree: TreeInstance, cert: UniformMembership, pip: Optional[PipInstance] = None) -> bool:
    pip = pip or to_pip(tree)
    sub = subsystem(pip, cert.S, allow_empty=True)
    return verify_membership_certificate(sub, cert.point(pip.n), cert.combination)


def layered_demand_bound(tree: TreeInstance, sub: ClosureSubtree, c: int) -> bool:
    """Within the subtree of each vertex ``u`` of layer ``(i-1)c + 2``, the
    requests of layer ``ic + 1`` weigh at most the demand of ``u``'s request."""
    layers = _layers(tree, sub)
    at = _requests_at(tree)
    demand = {r.id: r.demand for r in tree.requests}

    def vertex_demand(v):
        return sum((demand[rid] for rid in at[v]), ZERO)

    i = 1
    while i * c < len(layers):
        upper = (i - 1) * c + 1  # 0-based index of layer (i-1)c+2
        lower = i * c  # 0-based index of layer ic+1
        for u in layers[upper]:
            below = set(tree.subtree_vertices(u))
            total = sum((vertex_demand(v) for v in layers[lower] if v in below), ZERO)
            if total > vertex_demand(u):
                return False
        i += 1
    return True


def chromatic_number(tree: TreeInstance, S: Iterable[int], limit: int = 12) -> int:
    """Exact least number of S-routable classes, by search; small instances only."""
    S = tuple(sorted(set(S)))
    ids = [r.id for r in tree.requests]
    if len(ids) > limit:
        raise ValueError(f"exact search is limited to {limit} requests")
    for q in range(1, len(ids) + 1):
        classes: list[list] = [[] for _ in range(q)]

        def place(k):
            if k == len(ids):
                return True
            tried_empty = False
            for cl in classes:
                if not cl:
                    if tried_empty:
                        continue
                    tried_empty = True
                cl.append(ids[k])
                if is_routable(tree, cl, S) and place(k + 1):
                    return True
                cl.pop()
            return False

        if place(0):
            return q
    return len(ids)


# -- layer partition ------------------------------------------------------------

@dataclass(frozen=True)
class LayerPartition:
    h: int
    ell: int
    blocks: tuple  # blocks[i] = ((apex, vertices), ...) for apex in level i*ell + 1

    def block_vertices(self, i: int) -> list:
        return [v for _, vs in self.blocks[i] for v in vs]


def layer_partition(tree: TreeInstance, ell: int) -> LayerPartition:
    meta = fg_meta(tree)
    h = meta.h
    if not (1 <= ell <= h):
        raise ValueError(f"block height must be in [1, {h}]")
    blocks = []
    i = 0
    while i * ell + 1 <= h:
        members = []
        for v in meta.levels[i * ell + 1]:
            limit = tree.depth[v] + ell - 1
            vs = tuple(u for u in tree.subtree_vertices(v) if tree.depth[u] <= limit)
            members.append((v, vs))
        blocks.append(tuple(members))
        i += 1
    return LayerPartition(h, ell, tuple(blocks))


def check_layer_partition(tree: TreeInstance, part: LayerPartition) -> bool:
    """Blocks are vertex- and edge-disjoint, cover every non-root vertex, and no
    subtree is larger than ``n(ell)``."""
    seen = []
    for block in part.blocks:
        for _, vs in block:
            if len(vs) > n_of_level(part.h, part.ell):
                return False
            seen.extend(vs)
    non_root = [v for v in tree.vertices if v != tree.root]
    # each non-root vertex owns exactly its parent edge, so vertex-disjointness
    # and cover carry over to edges
    return len(seen) == len(set(seen)) and set(seen) == set(non_root)


@dataclass(frozen=True)
class LayerProfits:
    profits: tuple  # w . x restricted to each block
    total: Rat  # w . x

    def within(self, bound) -> bool:
        return all(p <= bound for p in self.profits)


def layer_profit_check(tree: TreeInstance, part: LayerPartition, x: Sequence) -> LayerProfits:
    if len(x) != tree.k:
        raise ValueError(f"point has length {len(x)}, expected {tree.k}")
    if any(v < 0 or v > 1 for v in x):
        raise ValueError("point is outside the box")
    at = _requests_at(tree)
    profits = []
    for i in range(len(part.blocks)):
        acc = ZERO
        for v in part.block_vertices(i):
            for rid in at[v]:
                j = tree.request_index[rid]
                acc += tree.requests[j].profit * x[j]
        profits.append(acc)
    total = sum((r.profit * xj for r, xj in zip(tree.requests, x)), ZERO)
    if total > sum(profits, ZERO):
        raise ColoringError("blocks miss part of the profit")
    return LayerProfits(tuple(profits), total)


def partition_to_json(part: SRoutablePartition, cert: Optional[UniformMembership] = None) -> dict:
    out = {
        "kind": "s_routable_partition",
        "S": list(part.S),
        "c": part.c,
        "classes": [list(cl) for cl in part.classes],
    }
    if cert is not None:
        out["point"] = rat_to_string(Rat(1, cert.q))
        out["certificate"] = certificate_to_json(cert.combination)
    return out
