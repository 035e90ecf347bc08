import itertools
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from knapsack_hierarchy.anf_tree import (
    Edge,
    Request,
    TreeInstance,
    edge_loads,
    fg_meta,
    generate_fg,
    generate_random_tree,
    generate_staircase,
    is_routable,
    load_tree,
    n_of_level,
    request_path,
    to_pip,
)
from knapsack_hierarchy.knapsack import solve_ip
from knapsack_hierarchy.numerics import Rat
from knapsack_hierarchy.pip_model import InstanceError

from oracles import knapsack_brute


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 9), st.integers(1, 8), st.integers(0, 10**6), st.booleans())
def test_routable_iff_pip_feasible(nv, nr, seed, sink):
    tree = generate_random_tree(nv, nr, seed, single_sink=sink)
    pip = to_pip(tree)
    rng = random.Random(seed)
    for _ in range(10):
        ids = [r.id for r in tree.requests if rng.random() < 0.5]
        chosen = [tree.request_index[i] for i in ids]
        assert is_routable(tree, ids) == pip.is_feasible(chosen)


def test_random_generator_is_seeded_and_individually_routable():
    a = generate_random_tree(8, 10, 42)
    assert a == generate_random_tree(8, 10, 42)
    assert a != generate_random_tree(8, 10, 43)
    for r in a.requests:
        assert is_routable(a, [r.id])


def test_staircase_shape():
    tree = generate_staircase(7)
    assert (tree.k, tree.m) == (7, 7)
    # request i saturates edge i and every pair of requests collides
    for k, e in enumerate(tree.edges):
        assert edge_loads(tree, [k + 1])[k] == e.capacity
    for a, b in itertools.combinations(range(1, 8), 2):
        assert not is_routable(tree, [a, b])
    pip = to_pip(tree)
    value, _ = knapsack_brute([(pip.A[i], pip.b[i]) for i in range(pip.m)], pip.w)
    assert value == 1 == solve_ip(pip).value


@pytest.mark.parametrize("h", [2, 3, 4])
def test_fg_levels(h):
    tree = generate_fg(h)
    meta = fg_meta(tree)
    assert tree.k == tree.m == n_of_level(h, h)
    for level in range(1, h + 1):
        reqs = [r for r in tree.requests if tree.depth[r.s] == level]
        assert sum((r.profit for r in reqs), Rat(0)) == 1
        assert all(r.demand == meta.demand(level) for r in reqs)
    assert all(r.t == tree.root for r in tree.requests)


def test_fg3_size():
    assert n_of_level(3, 3) == 21
    assert n_of_level(3, 2) == 5
    with pytest.raises(ValueError):
        generate_fg(1)


def test_paths_and_lca():
    tree = generate_fg(2)
    leaf = tree.meta.levels[2][0]
    assert tree.lca(leaf, tree.meta.levels[2][1]) == tree.meta.levels[1][0]
    assert request_path(tree, leaf) == [tree.edge_index[leaf], tree.edge_index[1]]


def test_json_round_trip(tmp_path):
    for tree in (generate_fg(3), generate_staircase(5), generate_random_tree(6, 5, 1)):
        path = tmp_path / "t.json"
        path.write_text(json.dumps(tree.to_json()))
        back = load_tree(path)
        assert back == tree
        assert to_pip(back) == to_pip(tree)


def test_validation():
    with pytest.raises(InstanceError):
        TreeInstance(0, (0, 1), [Edge(0, 1, Rat(1))], [Request("a", 1, 0, Rat(2), Rat(1))])
    with pytest.raises(InstanceError):
        TreeInstance(0, (0, 1, 2), [Edge(0, 1, Rat(1))], [])
    with pytest.raises(InstanceError):
        TreeInstance(0, (0, 1), [Edge(0, 1, Rat(1))], [Request("a", 1, 1, Rat(1), Rat(1))])
    with pytest.raises(InstanceError):
        TreeInstance.from_json({"kind": "tree", "root": 0})
    with pytest.raises(ValueError):
        generate_staircase(0)
