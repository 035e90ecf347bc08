import random

import pytest
from hypothesis import given, settings, strategies as st

from knapsack_hierarchy.hull_oracle import (
    BoxError,
    Inside,
    Outside,
    certificate_from_json,
    certificate_to_json,
    level_set_combination,
    membership,
    verify_membership_certificate,
)
from knapsack_hierarchy.numerics import Rat, dot
from knapsack_hierarchy.pip_model import subsystem

from conftest import random_pip
from oracles import feasible_points, in_hull


def random_case(seed, n=6, m=3):
    rng = random.Random(seed)
    pip = random_pip(rng, n, m)
    S = sorted(rng.sample(range(m), rng.randint(1, m)))
    den = rng.choice([2, 3, 4, 6])
    scale = rng.choice([1, 2, 3])
    x = [Rat(rng.randint(0, den), den * scale) for _ in range(n)]
    return pip, S, x


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_agrees_with_exhaustive_hull(seed):
    pip, S, x = random_case(seed)
    sub = subsystem(pip, S)
    points = feasible_points(sub.row_data(), len(sub.support))
    ans = membership(sub, x)
    assert ans.inside == in_hull(points, sub.restrict(x))
    assert verify_membership_certificate(sub, x, ans)
    if isinstance(ans, Outside):
        cut = ans.cut
        assert all(dot(cut.coeffs, [Rat(v) for v in p]) <= cut.rhs for p in points)
        assert dot(cut.coeffs, sub.restrict(x)) > cut.rhs


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fewer_rows_never_reject_more(seed):
    # K_I(S) is contained in K_I(S') whenever S' is a subset of S
    pip, S, x = random_case(seed, m=3)
    if membership(subsystem(pip, S), x).inside:
        for i in S:
            assert membership(subsystem(pip, [i]), x).inside


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_feasible_points_are_inside(seed):
    rng = random.Random(seed)
    pip = random_pip(rng, 6, 2)
    sub = subsystem(pip, [0, 1])
    for p in feasible_points(sub.row_data(), len(sub.support)):
        assert isinstance(membership(sub, sub.lift([Rat(v) for v in p])), Inside)


def test_pool_does_not_change_answer():
    for seed in range(40):
        pip, S, x = random_case(seed)
        sub = subsystem(pip, S)
        cold = membership(sub, x)
        warm = membership(sub, x, pool=cold.pool)
        assert cold.inside == warm.inside
        assert verify_membership_certificate(sub, x, warm)


def test_level_sets_reproduce_point():
    xs = (Rat(1, 3), Rat(1), Rat(0), Rat(2, 3))
    assert level_set_combination(xs).point(4) == xs


def test_box_check():
    pip = random_pip(random.Random(0), 3, 1)
    with pytest.raises(BoxError):
        membership(subsystem(pip, [0]), [Rat(3, 2), 0, 0])


def test_json_round_trip():
    for seed in range(30):
        pip, S, x = random_case(seed)
        sub = subsystem(pip, S)
        ans = membership(sub, x)
        cert = ans.combination if ans.inside else ans.cut
        back = certificate_from_json(certificate_to_json(cert))
        assert back == cert
        assert verify_membership_certificate(sub, x, back)
