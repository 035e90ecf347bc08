from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from knapsack_hierarchy.numerics import (
    DimensionError,
    Rat,
    as_rat,
    dot,
    rat_from_string,
    rat_to_string,
    scale_to_ints,
    vec_add,
)

fractions = st.fractions(max_denominator=10**6)


@given(fractions)
def test_string_round_trip(q):
    r = as_rat(q)
    assert rat_from_string(rat_to_string(r)) == r
    assert Fraction(rat_to_string(r)) == q


@given(fractions, fractions)
def test_canonical_form(a, b):
    r = as_rat(a) * as_rat(b) + as_rat(a)
    assert r.denominator > 0
    assert Fraction(int(r.numerator), int(r.denominator)) == a * b + a


@pytest.mark.parametrize("text", ["", "1.5", "1/0", "a/b", "1/-2"])
def test_bad_strings(text):
    with pytest.raises((ValueError, ZeroDivisionError)):
        rat_from_string(text)


def test_floats_refused():
    with pytest.raises(TypeError):
        as_rat(0.5)


def test_dimension_checks():
    with pytest.raises(DimensionError):
        dot([Rat(1)], [Rat(1), Rat(2)])
    with pytest.raises(DimensionError):
        vec_add([Rat(1)], [])


@given(st.lists(fractions, min_size=1, max_size=8))
def test_scale_to_ints(values):
    rats = [as_rat(v) for v in values]
    ints, den = scale_to_ints(rats)
    assert all(isinstance(i, int) for i in ints)
    assert [Rat(i, den) for i in ints] == rats


def test_fallback_backends_give_same_answers():
    import os
    import subprocess
    import sys

    code = (
        "from knapsack_hierarchy import generate_fg, to_pip, optimize_level, verify_hierarchy_result\n"
        "from knapsack_hierarchy import exact_lp, knapsack, numerics\n"
        "pip = to_pip(generate_fg(2))\n"
        "res = optimize_level(pip, 2)\n"
        "assert verify_hierarchy_result(pip, res)\n"
        "print(numerics.RAT_BACKEND, exact_lp.PIVOT_BACKEND, knapsack.BACKEND, res.value)\n"
    )
    env = dict(os.environ, KH_RAT_BACKEND="fractions", KH_FORCE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["fractions", "python", "python", "3/2"]
