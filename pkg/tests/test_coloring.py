import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from knapsack_hierarchy.anf_tree import generate_fg, generate_staircase, is_routable, to_pip
from knapsack_hierarchy.coloring import (
    ColoringError,
    _check_partition,
    chromatic_number,
    check_layer_partition,
    closure_subtree,
    colour_bound,
    layer_partition,
    layer_profit_check,
    layered_coloring,
    layered_demand_bound,
    partition_certificate,
    partition_to_json,
    s_routable_partition,
    staircase_partition,
    uniform_membership_certificate,
    verify_uniform,
)
from knapsack_hierarchy.numerics import Rat

FG3 = generate_fg(3)
FG3_PIP = to_pip(FG3)


def test_colour_bound():
    assert [colour_bound(3, s) for s in (1, 2, 8, 9, 64, 65)] == [1, 2, 2, 3, 3, 4]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([1, 2, 3, 4, 8]))
def test_partition_properties_h3(seed, size):
    S = random.Random(seed).sample(range(FG3.m), size)
    part = s_routable_partition(FG3, S)
    assert len(part.classes) <= colour_bound(3, size) + 1
    assert all(is_routable(FG3, cl, part.S) for cl in part.classes)
    assert sorted(r for cl in part.classes for r in cl) == sorted(r.id for r in FG3.requests)
    assert verify_uniform(FG3, partition_certificate(FG3, part, FG3_PIP), FG3_PIP)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 8))
def test_closure_and_demand_bound(seed, size):
    S = random.Random(seed).sample(range(FG3.m), size)
    sub = closure_subtree(FG3, S)
    assert set(S) <= set(sub.edges)
    assert sub.widths[0] == 1 and sum(sub.widths) == len(sub.vertices)
    for c in (1, 2, 3):
        assert layered_demand_bound(FG3, sub, c)


def test_layer_colours_follow_depth():
    S = list(range(FG3.m))
    sub = closure_subtree(FG3, S)
    classes = layered_coloring(FG3, sub, 3, width_limit=64)
    for cl in classes:
        depths = {FG3.depth[r] for r in cl}  # request id equals its source vertex
        assert len({d % 3 for d in depths}) == 1
    with pytest.raises(ValueError):
        layered_coloring(FG3, sub, 1)


def test_exact_chromatic_number_small():
    s5 = generate_staircase(5)
    for t in (1, 2, 3):
        for S in itertools.combinations(range(5), t):
            # the saturating requests of S pairwise collide, so at least t classes
            chi = chromatic_number(s5, S)
            assert t <= chi <= len(staircase_partition(s5, S).classes) == t + 1
    fg2 = generate_fg(2)
    for S in itertools.chain.from_iterable(itertools.combinations(range(3), t) for t in (1, 2, 3)):
        assert chromatic_number(fg2, S) <= len(s_routable_partition(fg2, S).classes)
    with pytest.raises(ValueError):
        chromatic_number(FG3, [0])


def test_empty_set_is_one_class():
    part = s_routable_partition(FG3, [])
    assert len(part.classes) == 1
    cert = uniform_membership_certificate(FG3, [])
    assert cert.q == 1


def test_staircase_certificates():
    s7 = generate_staircase(7)
    pip = to_pip(s7)
    for S in itertools.combinations(range(7), 2):
        cert = partition_certificate(s7, staircase_partition(s7, S), pip)
        assert cert.q == 3
        assert cert.point(7) == (Rat(1, 3),) * 7
        assert verify_uniform(s7, cert, pip)


def test_bad_partition_detected():
    s3 = generate_staircase(3)
    with pytest.raises(ColoringError):
        _check_partition(s3, (0,), ((1, 2), (3,)))


@pytest.mark.parametrize("h", [3, 4])
def test_layer_partitions(h):
    tree = FG3 if h == 3 else generate_fg(4)
    for ell in range(1, h + 1):
        part = layer_partition(tree, ell)
        assert check_layer_partition(tree, part)
        prof = layer_profit_check(tree, part, [Rat(1)] * tree.k)
        # every level carries profit 1, and a block spans ell levels
        expected = [min(ell, h - i * ell) for i in range(len(part.blocks))]
        assert list(prof.profits) == expected
        assert prof.total == h


def test_partition_json():
    part = s_routable_partition(FG3, [0, 5])
    cert = partition_certificate(FG3, part)
    data = partition_to_json(part, cert)
    assert data["point"] == f"1/{len(part.classes)}"
    assert [tuple(c) for c in data["classes"]] == list(part.classes)
