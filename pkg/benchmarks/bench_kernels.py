"""Compiled vs pure-Python kernels: knapsack branch and bound and simplex pivots.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--size 24]

Both paths are run on identical inputs and their answers compared before any
timing is reported.
"""

import argparse
import random
import statistics
import sys
import time

from knapsack_hierarchy import exact_lp, knapsack
from knapsack_hierarchy.anf_tree import generate_fg, to_pip
from knapsack_hierarchy.exact_lp import LinearProgram, Row, solve_lp
from knapsack_hierarchy.numerics import Rat


def _time(fn, repeat):
    runs = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        runs.append(time.perf_counter() - start)
    return statistics.median(runs), out


def knapsack_cases(size, count, seed=1):
    rng = random.Random(seed)
    cases = []
    for _ in range(count):
        rows = []
        for _ in range(3):
            coeffs = [Rat(rng.randint(5, 60)) for _ in range(size)]
            rows.append((coeffs, Rat(sum(coeffs) // 3)))
        obj = [Rat(rng.randint(1, 100), rng.randint(1, 7)) for _ in range(size)]
        cases.append((rows, obj))
    return cases


def bench_bnb(size, repeat):
    cases = knapsack_cases(size, 20)

    def run(backend):
        return [knapsack.solve_rows(rows, obj, backend=backend) for rows, obj in cases]

    py_t, py_out = _time(lambda: run("python"), repeat)
    if knapsack.BACKEND != "cython":
        return py_t, None
    cy_t, cy_out = _time(lambda: run("cython"), repeat)
    assert cy_out == py_out, "backends disagree"
    return py_t, cy_t


def lp_cases(count, seed=2):
    rng = random.Random(seed)
    pip = to_pip(generate_fg(3))
    out = [LinearProgram(pip.w, [Row(pip.A[i], pip.b[i]) for i in range(pip.m)], [(0, 1)] * pip.n)]
    for _ in range(count - 1):
        n, m = 60, 50
        rows = [Row([rng.randint(0, 9) for _ in range(n)], rng.randint(20, 80)) for _ in range(m)]
        out.append(LinearProgram([Rat(rng.randint(1, 20), rng.randint(1, 5)) for _ in range(n)], rows))
    return out


def bench_pivot(repeat):
    lps = lp_cases(10)

    def run():
        return [solve_lp(lp) for lp in lps]

    native = exact_lp._eliminate
    exact_lp._eliminate = None
    try:
        py_t, py_out = _time(run, repeat)
    finally:
        exact_lp._eliminate = native
    if native is None:
        return py_t, None
    cy_t, cy_out = _time(run, repeat)
    assert cy_out == py_out, "pivot kernels disagree"
    return py_t, cy_t


def bench_level(repeat):
    """End to end: level 1 of the height-3 gap tree, both kernels swapped together."""
    from knapsack_hierarchy.hierarchy import optimize_level

    pip = to_pip(generate_fg(3))
    native = (exact_lp._eliminate, knapsack._bnb_native)

    def run():
        return optimize_level(pip, 1).value

    exact_lp._eliminate, knapsack._bnb_native = None, None
    try:
        py_t, py_out = _time(run, repeat)
    finally:
        exact_lp._eliminate, knapsack._bnb_native = native
    if native == (None, None):
        return py_t, None
    cy_t, cy_out = _time(run, repeat)
    assert cy_out == py_out
    return py_t, cy_t


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--size", type=int, default=36, help="items per knapsack instance")
    parser.add_argument("--level", action="store_true", help="also time a full hierarchy run (slow)")
    args = parser.parse_args(argv)
    print(f"{'kernel':<26}{'python s':>10}{'compiled s':>12}{'speedup':>9}")
    for name, (py_t, cy_t) in [
        (f"branch and bound n={args.size}", bench_bnb(args.size, args.repeat)),
        ("simplex pivots", bench_pivot(args.repeat)),
    ] + ([("hierarchy level, fg h=3", bench_level(1))] if args.level else []):
        if cy_t is None:
            print(f"{name:<26}{py_t:>10.3f}{'n/a':>12}{'':>9}")
        else:
            print(f"{name:<26}{py_t:>10.3f}{cy_t:>12.3f}{py_t / cy_t:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
