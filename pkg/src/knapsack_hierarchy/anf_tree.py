"""All-or-nothing flow on trees: instances, generators, routability, PIP conversion.

Edges are identified by their child vertex (the endpoint farther from the
root), so ``edge_index[v]`` is the edge between ``v`` and its parent.  Rows of
``to_pip`` follow the order of ``tree.edges``; columns follow ``tree.requests``.

Two families are generated: the staircase path and the "FG" tree, a
self-similar single-sink tree of height ``h`` whose level capacities, demands
and profits are fixed powers of two.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Optional, Sequence

from .numerics import ONE, ZERO, Rat, as_rat, rat_to_string
from .pip_model import InstanceError, PipInstance


@dataclass(frozen=True)
class Edge:
    u: Hashable
    v: Hashable
    capacity: Rat


@dataclass(frozen=True)
class Request:
    id: Hashable
    s: Hashable
    t: Hashable
    demand: Rat
    profit: Rat


@dataclass(frozen=True)
class FgMeta:
    """Level bookkeeping for a self-similar gap tree of height ``h``."""

    h: int
    levels: tuple  # levels[l] = tuple of vertices at distance l from the root

    def capacity(self, level: int) -> int:
        return 2 ** (self.h * (self.h - level + 1))

    def demand(self, level: int) -> int:
        return 2 ** (self.h * (self.h - level + 1)) - 2 ** (self.h * (self.h - level))

    def profit(self, level: int) -> Rat:
        return Rat(1, 2 ** ((self.h - 1) * (level - 1)))


@dataclass(frozen=True)
class TreeInstance:
    root: Hashable
    vertices: tuple
    edges: tuple
    requests: tuple
    family: Optional[str] = None
    meta: Optional[FgMeta] = field(default=None, compare=False)
    # derived
    parent: dict = field(init=False, repr=False, compare=False)
    depth: dict = field(init=False, repr=False, compare=False)
    children: dict = field(init=False, repr=False, compare=False)
    edge_index: dict = field(init=False, repr=False, compare=False)
    request_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vertices = tuple(self.vertices)
        edges = tuple(
            e if isinstance(e, Edge) else Edge(e[0], e[1], as_rat(e[2])) for e in self.edges
        )
        requests = tuple(
            r if isinstance(r, Request) else Request(r[0], r[1], r[2], as_rat(r[3]), as_rat(r[4]))
            for r in self.requests
        )
        vset = set(vertices)
        if len(vset) != len(vertices):
            raise InstanceError("duplicate vertex ids")
        if self.root not in vset:
            raise InstanceError("root is not a vertex")
        if len(edges) != len(vertices) - 1:
            raise InstanceError("a tree on k vertices has k-1 edges")
        adj = {v: [] for v in vertices}
        for e in edges:
            if e.u not in vset or e.v not in vset:
                raise InstanceError(f"edge {e.u}-{e.v} has an unknown endpoint")
            if not e.capacity > 0:
                raise InstanceError(f"edge {e.u}-{e.v} needs positive capacity")
            adj[e.u].append(e.v)
            adj[e.v].append(e.u)
        parent = {self.root: None}
        depth = {self.root: 0}
        queue = deque([self.root])
        while queue:
            a = queue.popleft()
            for b in adj[a]:
                if b in parent:
                    if parent[a] != b:
                        raise InstanceError("edges contain a cycle")
                    continue
                parent[b] = a
                depth[b] = depth[a] + 1
                queue.append(b)
        if len(parent) != len(vertices):
            raise InstanceError("edges do not connect all vertices")
        edge_index = {}
        for k, e in enumerate(edges):
            child = e.v if parent.get(e.v) == e.u else e.u
            edge_index[child] = k
        children = {v: [] for v in vertices}
        for v in vertices:
            if parent[v] is not None:
                children[parent[v]].append(v)
        request_index = {}
        for k, r in enumerate(requests):
            if r.id in request_index:
                raise InstanceError(f"duplicate request id {r.id!r}")
            if r.s not in vset or r.t not in vset:
                raise InstanceError(f"request {r.id!r} has an unknown endpoint")
            if r.s == r.t:
                raise InstanceError(f"request {r.id!r} has s == t")
            if r.demand < 0 or r.profit < 0:
                raise InstanceError(f"request {r.id!r} has negative demand or profit")
            request_index[r.id] = k
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "requests", requests)
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "edge_index", edge_index)
        object.__setattr__(self, "request_index", request_index)
        for r in requests:
            for k in self._path(r.s, r.t):
                if r.demand > edges[k].capacity:
                    raise InstanceError(
                        f"request {r.id!r} is not routable on its own (edge {k})"
                    )

    @property
    def k(self) -> int:
        return len(self.requests)

    @property
    def m(self) -> int:
        return len(self.edges)

    def lca(self, a, b):
        depth, parent = self.depth, self.parent
        while depth[a] > depth[b]:
            a = parent[a]
        while depth[b] > depth[a]:
            b = parent[b]
        while a != b:
            a, b = parent[a], parent[b]
        return a

    def _path(self, s, t) -> list[int]:
        top = self.lca(s, t)
        up, down = [], []
        while s != top:
            up.append(self.edge_index[s])
            s = self.parent[s]
        while t != top:
            down.append(self.edge_index[t])
            t = self.parent[t]
        return up + down[::-1]

    def edge_between(self, child) -> int:
        return self.edge_index[child]

    def child_of_edge(self, k: int):
        e = self.edges[k]
        return e.v if self.parent.get(e.v) == e.u else e.u

    def subtree_vertices(self, v) -> list:
        out = []
        stack = [v]
        while stack:
            a = stack.pop()
            out.append(a)
            stack.extend(reversed(self.children[a]))
        return out

    def to_json(self) -> dict:
        out = {
            "kind": "tree",
            "root": self.root,
            "vertices": list(self.vertices),
            "edges": [
                {"u": e.u, "v": e.v, "capacity": rat_to_string(e.capacity)} for e in self.edges
            ],
            "requests": [
                {
                    "id": r.id,
                    "s": r.s,
                    "t": r.t,
                    "demand": rat_to_string(r.demand),
                    "profit": rat_to_string(r.profit),
                }
                for r in self.requests
            ],
        }
        if self.family is not None:
            out["family"] = self.family
        if self.meta is not None:
            out["h"] = self.meta.h
        return out

    @classmethod
    def from_json(cls, data: dict) -> "TreeInstance":
        if data.get("kind") != "tree":
            raise InstanceError(f"expected kind 'tree', got {data.get('kind')!r}")
        try:
            tree = cls(
                root=data["root"],
                vertices=data["vertices"],
                edges=[Edge(e["u"], e["v"], as_rat(e["capacity"])) for e in data["edges"]],
                requests=[
                    Request(r["id"], r["s"], r["t"], as_rat(r["demand"]), as_rat(r["profit"]))
                    for r in data["requests"]
                ],
                family=data.get("family"),
            )
        except KeyError as exc:
            raise InstanceError(f"missing field {exc}") from None
        except (TypeError, ZeroDivisionError) as exc:
            raise InstanceError(str(exc)) from None
        if tree.family == "fg":
            meta = fg_meta(tree)
            object.__setattr__(tree, "meta", meta)
        return tree


def request_path(tree: TreeInstance, r_id) -> list[int]:
    """Edge indices of the request's path, ordered from ``s`` to ``t``."""
    r = tree.requests[tree.request_index[r_id]]
    return tree._path(r.s, r.t)


def edge_loads(tree: TreeInstance, request_ids: Iterable) -> list:
    loads = [ZERO] * tree.m
    for rid in request_ids:
        r = tree.requests[tree.request_index[rid]]
        if not r.demand:
            continue
        for k in tree._path(r.s, r.t):
            loads[k] += r.demand
    return loads


def is_routable(tree: TreeInstance, request_ids: Iterable, edges: Optional[Iterable[int]] = None) -> bool:
    """Whether the requests fit every edge capacity (or only those in ``edges``)."""
    loads = edge_loads(tree, request_ids)
    check = range(tree.m) if edges is None else edges
    return all(loads[k] <= tree.edges[k].capacity for k in check)


def to_pip(tree: TreeInstance) -> PipInstance:
    A = [[ZERO] * tree.k for _ in range(tree.m)]
    for j, r in enumerate(tree.requests):
        for k in tree._path(r.s, r.t):
            A[k][j] = r.demand
    return PipInstance(
        A=A,
        b=[e.capacity for e in tree.edges],
        w=[r.profit for r in tree.requests],
        row_labels=[f"{e.u}-{e.v}" for e in tree.edges],
        col_labels=[str(r.id) for r in tree.requests],
    )


# -- generators ----------------------------------------------------------------

def generate_staircase(k: int) -> TreeInstance:
    """Path ``0-1-...-k`` rooted at 0; edge i (i-th from the root) has capacity
    ``2**(k-i)``, and request i runs from vertex i to the root with that demand."""
    if k < 1:
        raise ValueError("staircase needs k >= 1")
    edges = [Edge(i - 1, i, Rat(2 ** (k - i))) for i in range(1, k + 1)]
    requests = [Request(i, i, 0, Rat(2 ** (k - i)), ONE) for i in range(1, k + 1)]
    return TreeInstance(0, tuple(range(k + 1)), edges, requests, family="staircase")


def n_of_level(h: int, level: int) -> int:
    """Number of vertices in levels ``1..level`` of the height-``h`` tree."""
    if not (0 <= level <= h):
        raise ValueError(f"level must be in [0, {h}]")
    branching = 2 ** (h - 1)
    return sum(branching ** i for i in range(level))


def generate_fg(h: int, max_requests: int = 200_000) -> TreeInstance:
    if h < 2:
        raise ValueError("FG trees need h >= 2")
    total = n_of_level(h, h)
    if total > max_requests:
        raise MemoryError(f"h = {h} gives {total} requests, above the limit {max_requests}")
    branching = 2 ** (h - 1)
    levels = [[0], [1]]
    nxt = 2
    for _ in range(2, h + 1):
        layer = []
        for _ in range(len(levels[-1]) * branching):
            layer.append(nxt)
            nxt += 1
        levels.append(layer)
    meta = FgMeta(h, tuple(tuple(l) for l in levels))
    edges, requests = [], []
    for level in range(1, h + 1):
        parents = levels[level - 1]
        per_parent = 1 if level == 1 else branching
        cap = Rat(meta.capacity(level))
        dem = Rat(meta.demand(level))
        prof = meta.profit(level)
        for idx, v in enumerate(levels[level]):
            p = parents[idx // per_parent]
            edges.append(Edge(p, v, cap))
            requests.append(Request(v, v, 0, dem, prof))
    vertices = tuple(v for l in levels for v in l)
    return TreeInstance(0, vertices, edges, requests, family="fg", meta=meta)


def fg_meta(tree: TreeInstance) -> FgMeta:
    """Recover and validate level structure of a self-similar gap tree."""
    levels: list[list] = []
    for v in tree.vertices:
        d = tree.depth[v]
        while len(levels) <= d:
            levels.append([])
        levels[d].append(v)
    h = len(levels) - 1
    if h < 2 or len(levels[1]) != 1:
        raise InstanceError("tree does not have the FG shape")
    for v in tree.vertices:
        want = 0 if tree.depth[v] == h else (1 if v == tree.root else 2 ** (h - 1))
        if len(tree.children[v]) != want:
            raise InstanceError("tree does not have the FG shape")
    meta = FgMeta(h, tuple(tuple(l) for l in levels))
    for e in tree.edges:
        child = e.v if tree.parent.get(e.v) == e.u else e.u
        if e.capacity != meta.capacity(tree.depth[child]):
            raise InstanceError("capacities do not match the FG pattern")
    return meta


def generate_random_tree(
    n_vertices: int,
    n_requests: int,
    seed: int,
    max_capacity: int = 16,
    single_sink: bool = False,
) -> TreeInstance:
    """Seeded random instance; demands are drawn below the path bottleneck so
    every request is routable on its own."""
    if n_vertices < 2:
        raise ValueError("need at least two vertices")
    rng = random.Random(seed)
    edges = []
    for v in range(1, n_vertices):
        edges.append(Edge(rng.randrange(v), v, Rat(rng.randint(1, max_capacity))))
    skeleton = TreeInstance(0, tuple(range(n_vertices)), edges, ())
    requests = []
    for rid in range(n_requests):
        s = rng.randrange(1, n_vertices)
        t = 0 if single_sink else rng.choice([u for u in range(n_vertices) if u != s])
        bottleneck = min(edges[k].capacity for k in skeleton._path(s, t))
        requests.append(
            Request(rid, s, t, Rat(rng.randint(1, int(bottleneck))), Rat(rng.randint(1, 5)))
        )
    return TreeInstance(0, skeleton.vertices, edges, requests, family="random")


def load_tree(path) -> TreeInstance:
    with open(path) as fh:
        return TreeInstance.from_json(json.load(fh))
