import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from knapsack_hierarchy import to_pip
from knapsack_hierarchy.hierarchy import (
    BudgetExhausted,
    EnumerationBudgetExceeded,
    gap_report,
    generate_rank_cuts,
    lp_value,
    optimize_level,
    parse_family,
    point_in_level,
    result_from_json,
    result_to_json,
    verify_hierarchy_result,
)
from knapsack_hierarchy.knapsack import solve_ip
from knapsack_hierarchy.numerics import Rat
from knapsack_hierarchy.pip_model import subsystem

from conftest import random_pip
from oracles import feasible_points, in_hull


def small_pip(seed):
    rng = random.Random(seed)
    return random_pip(rng, rng.randint(2, 5), 3, density=0.8)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_levels_are_monotone_and_reach_ip(seed):
    pip = small_pip(seed)
    values = []
    for t in range(1, pip.m + 1):
        res = optimize_level(pip, t)
        assert verify_hierarchy_result(pip, res)
        values.append(res.value)
    assert lp_value(pip) >= values[0]
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert values[-1] == solve_ip(pip).value


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_optimum_lies_in_every_hull(seed):
    pip = small_pip(seed)
    res = optimize_level(pip, 2)
    for S in [(0, 1), (0, 2), (1, 2)]:
        sub = subsystem(pip, S)
        assert in_hull(feasible_points(sub.row_data(), len(sub.support)), sub.restrict(res.x_star))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rank_cuts_only_tighten(seed):
    pip = small_pip(seed)
    fam = generate_rank_cuts(pip, "pairs")
    for t in (1, 2):
        plain = optimize_level(pip, t)
        ranked = optimize_level(pip, t, rank_cuts=fam)
        assert verify_hierarchy_result(pip, ranked)
        assert ranked.value <= plain.value
    assert lp_value(pip, fam) <= lp_value(pip)


def test_staircase_levels(s7):
    pip = to_pip(s7)
    expected = {1: Rat(7, 2), 2: Rat(7, 3), 3: Rat(7, 4)}
    for t, value in expected.items():
        res = optimize_level(pip, t)
        assert res.value == value
        assert verify_hierarchy_result(pip, res)


def test_fg2_levels(fg2_pip):
    assert [optimize_level(fg2_pip, t).value for t in (1, 2, 3)] == [Rat(3, 2)] * 3


def test_filter_does_not_change_value():
    for seed in range(8):
        pip = small_pip(seed)
        a = optimize_level(pip, 1)
        b = optimize_level(pip, 1, subset_filter=False)
        assert a.value == b.value
        assert verify_hierarchy_result(pip, b)


def test_budget_exhausted_keeps_partial_state(s7):
    pip = to_pip(s7)
    with pytest.raises(BudgetExhausted) as err:
        optimize_level(pip, 1, iteration_budget=2)
    partial = err.value.partial
    assert partial.iterations == 2
    assert len(partial.round_points) == 2


def test_parallel_matches_serial(s7):
    pip = to_pip(s7)
    serial = result_to_json(optimize_level(pip, 2))
    parallel = result_to_json(optimize_level(pip, 2, jobs=2))
    assert json.dumps(serial) == json.dumps(parallel)


def test_json_round_trip(fg2_pip):
    res = optimize_level(fg2_pip, 1)
    back = result_from_json(json.loads(json.dumps(result_to_json(res))))
    assert verify_hierarchy_result(fg2_pip, back)
    assert result_to_json(back) == result_to_json(res)


def test_point_in_level(s7):
    pip = to_pip(s7)
    assert point_in_level(pip, 2, [Rat(1, 3)] * 7).inside
    out = point_in_level(pip, 2, [Rat(1, 2)] * 7)
    assert not out.inside
    assert not out.certificates[-1][1].inside


def test_rank_families(fg2):
    pip = to_pip(fg2)
    for text in ("pairs", "rows", "paths"):
        kind, extra = parse_family(text)
        fam = generate_rank_cuts(pip, kind, tree=fg2, **extra)
        assert all(r < len(cols) for cols, r in fam.cuts)
    with pytest.raises(ValueError):
        parse_family("nonsense")
    with pytest.raises(EnumerationBudgetExceeded):
        generate_rank_cuts(to_pip(fg2), "exhaustive", size=3, enum_limit=1)


def test_gap_report(fg2_pip):
    fam = generate_rank_cuts(fg2_pip, "per_row_supports")
    rows = gap_report(fg2_pip, [0, 1], rank_cuts=fam)
    table = {(r.t, r.formulation): r.value for r in rows}
    assert table == {
        (0, "plain"): Rat(11, 6), (0, "rank"): Rat(3, 2),
        (1, "plain"): Rat(3, 2), (1, "rank"): Rat(3, 2),
    }
    assert rows[0].gap == Rat(11, 9)


def test_bad_level(fg2_pip):
    with pytest.raises(ValueError):
        optimize_level(fg2_pip, 0)
    with pytest.raises(ValueError):
        optimize_level(fg2_pip, 4)
