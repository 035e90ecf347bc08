"""Brute-force reference solvers built on ``fractions.Fraction`` only.

Nothing here imports the package under test, so agreement with these oracles
is evidence from an independent code path.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def F(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator)) if not isinstance(v, int) else Fraction(v)


def knapsack_brute(rows, objective):
    """Best 0-1 vector for ``objective`` under ``coeffs . x <= cap``; returns
    ``(value, lexicographically smallest optimal vector)``."""
    n = len(objective)
    best = None
    for x in itertools.product((0, 1), repeat=n):
        if all(sum(F(a) * v for a, v in zip(coeffs, x)) <= F(cap) for coeffs, cap in rows):
            val = sum(F(c) * v for c, v in zip(objective, x))
            if best is None or val > best[0] or (val == best[0] and x < best[1]):
                best = (val, x)
    return best


def feasible_points(rows, n):
    return [
        x for x in itertools.product((0, 1), repeat=n)
        if all(sum(F(a) * v for a, v in zip(coeffs, x)) <= F(cap) for coeffs, cap in rows)
    ]


def solve_square(M, rhs):
    """Solve ``M z = rhs`` by Gauss-Jordan; None when singular."""
    n = len(M)
    aug = [list(map(Fraction, row)) + [Fraction(r)] for row, r in zip(M, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def lp_vertex_enumeration(objective, rows, bounds):
    """Maximum of a bounded LP by enumerating every basic solution.

    ``rows`` are ``(coeffs, rhs, sense)`` with sense in ``<=, >=, ==``;
    every variable has finite ``(lo, hi)``.  Returns None when infeasible.
    """
    n = len(objective)
    cons = []
    for coeffs, rhs, sense in rows:
        cons.append(([F(a) for a in coeffs], F(rhs), sense))
    for j, (lo, hi) in enumerate(bounds):
        e = [Fraction(0)] * n
        e[j] = Fraction(1)
        cons.append((e, F(lo), ">="))
        cons.append((e, F(hi), "<="))

    def ok(x):
        for coeffs, rhs, sense in cons:
            act = sum(a * v for a, v in zip(coeffs, x))
            if (sense == "<=" and act > rhs) or (sense == ">=" and act < rhs) or (sense == "==" and act != rhs):
                return False
        return True

    best = None
    for square in itertools.combinations(cons, n):
        z = solve_square([c[0] for c in square], [c[1] for c in square])
        if z is not None and ok(z):
            val = sum(F(c) * v for c, v in zip(objective, z))
            if best is None or val > best:
                best = val
    return best


def in_hull(points, x) -> bool:
    """Whether ``x`` is a convex combination of ``points`` (phase-1 simplex, Bland)."""
    if not points:
        return False
    d = len(x)
    k = len(points)
    # equalities: sum_i p_i[j] lam_i = x_j (j < d), sum lam = 1; artificials a_r >= 0
    A = [[Fraction(p[j]) for p in points] for j in range(d)] + [[Fraction(1)] * k]
    b = [F(v) for v in x] + [Fraction(1)]
    m = len(A)
    tab = [A[r] + [Fraction(int(r == s)) for s in range(m)] + [b[r]] for r in range(m)]
    basis = [k + r for r in range(m)]
    cost = [Fraction(0)] * k + [Fraction(1)] * m
    while True:
        red = [cost[c] - sum(cost[basis[r]] * tab[r][c] for r in range(m)) for c in range(k + m)]
        enter = next((c for c in range(k + m) if red[c] < 0), None)
        if enter is None:
            break
        best = None
        for r in range(m):
            if tab[r][enter] > 0:
                ratio = tab[r][-1] / tab[r][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        r = best[1]
        p = tab[r][enter]
        tab[r] = [v / p for v in tab[r]]
        for s in range(m):
            if s != r and tab[s][enter] != 0:
                f = tab[s][enter]
                tab[s] = [a - f * c for a, c in zip(tab[s], tab[r])]
        basis[r] = enter
    return sum(tab[r][-1] for r in range(m) if basis[r] >= k) == 0


# -- certificate validity from first principles ----------------------------------

def combination_valid(points, xs, atoms) -> bool:
    """``atoms`` = [(0-1 point, weight)] is a convex combination of ``points`` equal to ``xs``."""
    feasible = set(points)
    if not atoms or any(F(w) <= 0 or tuple(p) not in feasible for p, w in atoms):
        return False
    if sum(F(w) for _, w in atoms) != 1:
        return False
    return all(sum(F(w) * p[j] for p, w in atoms) == F(xs[j]) for j in range(len(xs)))


def cut_valid(points, xs, coeffs, rhs, witness_point, witness_value, violation) -> bool:
    """Normalized valid inequality with an optimal witness that ``xs`` violates by ``violation``."""
    coeffs = [F(c) for c in coeffs]
    if not coeffs or max(abs(c) for c in coeffs) != 1:
        return False
    best = max(sum(c * v for c, v in zip(coeffs, p)) for p in points)
    wit = tuple(witness_point)
    if wit not in set(points) or sum(c * v for c, v in zip(coeffs, wit)) != F(witness_value):
        return False
    if F(witness_value) != best or F(rhs) < best:
        return False
    viol = sum(c * F(v) for c, v in zip(coeffs, xs)) - F(rhs)
    return viol > 0 and viol == F(violation)


def _box_max(g, bounds):
    total = Fraction(0)
    for gj, (lo, hi) in zip(g, bounds):
        if gj > 0:
            if hi is None:
                return None
            total += gj * F(hi)
        elif gj < 0:
            total += gj * F(lo)
    return total


def _sign_ok(y, senses):
    return all(
        (s != "<=" or yi >= 0) and (s != ">=" or yi <= 0) for yi, s in zip(y, senses)
    )


def optimal_valid(objective, rows, bounds, x, value, duals) -> bool:
    """Lagrangian bound from ``duals`` meets the objective of the feasible ``x``."""
    n = len(objective)
    if len(x) != n or len(duals) != len(rows):
        return False
    y = [F(v) for v in duals]
    if not lp_point_feasible(rows, bounds, x):
        return False
    if sum(F(c) * F(v) for c, v in zip(objective, x)) != F(value):
        return False
    if not _sign_ok(y, [r[2] for r in rows]):
        return False
    g = [F(objective[j]) - sum(yi * F(r[0][j]) for yi, r in zip(y, rows)) for j in range(n)]
    bound = _box_max(g, bounds)
    return bound is not None and bound + sum(yi * F(r[1]) for yi, r in zip(y, rows)) == F(value)


def farkas_valid(rows, bounds, y) -> bool:
    """``y`` combines the rows into ``(yA) x <= yb`` (after sign flips) impossible on the box."""
    if len(y) != len(rows):
        return False
    y = [F(v) for v in y]
    if not _sign_ok(y, [r[2] for r in rows]):
        return False
    n = len(bounds)
    g = [-sum(yi * F(r[0][j]) for yi, r in zip(y, rows)) for j in range(n)]
    top = _box_max(g, bounds)  # max of -(yA)x, i.e. -min (yA)x
    if top is None:
        return False
    return sum(yi * F(r[1]) for yi, r in zip(y, rows)) < -top


def unbounded_valid(objective, rows, bounds, ray, x) -> bool:
    if len(ray) != len(objective):
        return False
    if not lp_point_feasible(rows, bounds, x):
        return False
    r = [F(v) for v in ray]
    for rj, (lo, hi) in zip(r, bounds):
        if rj < 0 or (rj > 0 and hi is not None):
            return False
    for coeffs, _, sense in rows:
        act = sum(F(a) * v for a, v in zip(coeffs, r))
        if (sense == "<=" and act > 0) or (sense == ">=" and act < 0) or (sense == "==" and act != 0):
            return False
    return sum(F(c) * v for c, v in zip(objective, r)) > 0


def lp_point_feasible(rows, bounds, x) -> bool:
    if len(x) != len(bounds):
        return False
    if any(F(v) < F(lo) or (hi is not None and F(v) > F(hi)) for v, (lo, hi) in zip(x, bounds)):
        return False
    for coeffs, rhs, sense in rows:
        act = sum(F(a) * F(v) for a, v in zip(coeffs, x))
        if (sense == "<=" and act > F(rhs)) or (sense == ">=" and act < F(rhs)) or (sense == "==" and act != F(rhs)):
            return False
    return True
