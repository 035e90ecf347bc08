from knapsack_hierarchy.anf_tree import generate_fg
from knapsack_hierarchy.lemmas import Check, layer_levels, run_all


def test_all_checks_pass_small():
    checks = run_all(h=2, k=5, t_values=(1, 2))
    assert checks and all(c.passed for c in checks), [c.line() for c in checks if not c.passed]


def test_layer_levels_fall_back_to_full_level():
    assert layer_levels(generate_fg(2)) == {1: 1, 2: 3}
    # C(21, 5) is far above the subset limit, so l = 2 is checked at t = m
    assert layer_levels(generate_fg(3)) == {1: 1, 2: 21, 3: 21}


def test_check_line():
    assert Check("x", True, "ok").line() == "PASS  x  ok"
    assert Check("y", False).line() == "FAIL  y"
