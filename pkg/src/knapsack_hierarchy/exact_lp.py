"""Exact rational linear programming with verifiable certificates.

``solve_lp`` maximizes ``c.x`` over ``{x : rows, lower <= x <= upper}`` with a
bounded-variable primal simplex (two phases, largest-reduced-cost pricing
with a smallest-index fallback against cycling).  Every
outcome carries a certificate that ``verify_lp_outcome`` checks with nothing
but exact arithmetic:

* ``Optimal``: primal point, value, and row duals.  Bound duals are implied by
  the reduced costs ``c - A^T y``.
* ``Infeasible``: row multipliers ``y`` (signed like duals) such that
  ``y.b < min over the box of (A^T y).x``.
* ``Unbounded``: a feasible point and an improving recession direction.

Dual sign convention (maximization): ``y_i >= 0`` on ``<=`` rows, ``y_i <= 0``
on ``>=`` rows, free on ``==`` rows.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .numerics import (
    ONE,
    RAT_BACKEND,
    ZERO,
    DimensionError,
    Rat,
    as_rat,
    dot,
    rat_from_string,
    rat_to_string,
    rat_vec,
)

try:
    if os.environ.get("KH_FORCE_PYTHON") == "1" or RAT_BACKEND != "gmpy2":
        raise ImportError("compiled pivot disabled")
    from ._lpcore import eliminate as _eliminate
except ImportError:
    _eliminate = None

PIVOT_BACKEND = "cython" if _eliminate is not None else "python"

# Entering variables follow the largest reduced cost; after this many
# consecutive degenerate pivots the smallest-index rule takes over until the
# objective moves again, which rules out cycling.
_DEGENERATE_STREAK = 20

LE, GE, EQ = "<=", ">=", "=="
_SENSES = (LE, GE, EQ)


class LpIterationLimit(RuntimeError):
    """The simplex exceeded its pivot budget (should not happen with Bland's rule)."""


@dataclass(frozen=True)
class Row:
    coeffs: tuple
    rhs: Rat
    sense: str = LE

    def __post_init__(self):
        object.__setattr__(self, "coeffs", rat_vec(self.coeffs))
        object.__setattr__(self, "rhs", as_rat(self.rhs))
        if self.sense not in _SENSES:
            raise ValueError(f"unknown row sense {self.sense!r}")


@dataclass(frozen=True)
class LinearProgram:
    """Maximize ``objective . x`` subject to ``rows`` and ``bounds``.

    ``bounds[j] = (lower, upper)``; lower must be finite, upper may be None (+inf).
    """

    objective: tuple
    rows: tuple = ()
    bounds: Optional[tuple] = None

    def __post_init__(self):
        obj = rat_vec(self.objective)
        n = len(obj)
        rows = tuple(r if isinstance(r, Row) else Row(*r) for r in self.rows)
        for i, r in enumerate(rows):
            if len(r.coeffs) != n:
                raise DimensionError(f"row {i} has {len(r.coeffs)} coefficients, expected {n}")
        if self.bounds is None:
            bounds = tuple((ZERO, None) for _ in range(n))
        else:
            if len(self.bounds) != n:
                raise DimensionError(f"{len(self.bounds)} bounds for {n} variables")
            bounds = []
            for j, (lo, hi) in enumerate(self.bounds):
                if lo is None:
                    raise ValueError(f"variable {j}: lower bound must be finite")
                lo = as_rat(lo)
                hi = None if hi is None else as_rat(hi)
                if hi is not None and hi < lo:
                    raise ValueError(f"variable {j}: lower {lo} > upper {hi}")
                bounds.append((lo, hi))
            bounds = tuple(bounds)
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "bounds", bounds)

    @property
    def n(self) -> int:
        return len(self.objective)

    @property
    def m(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class Optimal:
    x: tuple
    value: Rat
    duals: tuple
    status: str = field(default="optimal", init=False)


@dataclass(frozen=True)
class Infeasible:
    farkas: tuple
    status: str = field(default="infeasible", init=False)


@dataclass(frozen=True)
class Unbounded:
    ray: tuple
    x: tuple
    status: str = field(default="unbounded", init=False)


LpOutcome = Union[Optimal, Infeasible, Unbounded]


class SimplexSession:
    """Mutable full-tableau state for one LP.

    Columns are laid out as ``[structural | slack | artificial]``.  Each row is
    stored pre-multiplied by ``mult[i]`` (``±1``) so that the initial basis is
    the identity; the tableau columns of the initial basic variables therefore
    always hold ``B^-1`` of the transformed system.

    ``add_column`` appends a structural variable to a solved session; the
    current basis stays primal feasible, so ``solve`` resumes from it.
    """

    def __init__(self, lp: LinearProgram, max_pivots: int = 1_000_000):
        self.lp = lp
        self.max_pivots = max_pivots
        self.pivots = 0
        n, m = lp.n, lp.m
        self.n_struct = n
        self.m = m
        self.cost = list(lp.objective)
        self.lower = [lo for lo, _ in lp.bounds]
        self.upper = [hi for _, hi in lp.bounds]
        self.at_upper = [False] * n

        # struct columns stored row-major in tableau; slack/artificial appended
        neg = [(-1 if r.sense == GE else 1) for r in lp.rows]
        residual = []
        for r, sgn in zip(lp.rows, neg):
            act = ZERO
            for a, lo in zip(r.coeffs, self.lower):
                if a and lo:
                    act += a * lo
            residual.append(sgn * (r.rhs - act))

        self.mult = []
        self.init_basic = []
        self.basis = []
        self.beta = []
        tableau = [[sgn * a for a in r.coeffs] for r, sgn in zip(lp.rows, neg)]
        slack_cols = []
        art_rows = []
        for i, (r, sgn) in enumerate(zip(lp.rows, neg)):
            if r.sense != EQ and residual[i] >= 0:
                sigma = 1
            else:
                sigma = 1 if residual[i] >= 0 else -1
                art_rows.append(i)
            self.mult.append(sigma * sgn)
            slack_cols.append(sigma)
            if sigma == -1:
                tableau[i] = [-a for a in tableau[i]]
        self.n_slack = m
        self.n_art = len(art_rows)
        total = n + m + self.n_art
        for i in range(m):
            tableau[i].extend([ZERO] * (m + self.n_art))
            tableau[i][n + i] = Rat(slack_cols[i])
        for k, i in enumerate(art_rows):
            tableau[i][n + m + k] = ONE
        self.T = tableau
        for i in range(m):
            self.lower.append(ZERO)
            self.upper.append(ZERO if lp.rows[i].sense == EQ else None)
            self.cost.append(ZERO)
            self.at_upper.append(False)
        for _ in art_rows:
            self.lower.append(ZERO)
            self.upper.append(None)
            self.cost.append(ZERO)
            self.at_upper.append(False)
        art_of_row = {i: n + m + k for k, i in enumerate(art_rows)}
        for i in range(m):
            if i in art_of_row:
                b = art_of_row[i]
            else:
                b = n + i
            self.basis.append(b)
            self.init_basic.append(b)
            self.beta.append(abs(residual[i]))
        self.is_basic = [False] * total
        for b in self.basis:
            self.is_basic[b] = True
        self.art_start = n + m
        self.phase = 1 if self.n_art else 2
        self.d = None
        self.extra_cols: list[int] = []

    # -- helpers -----------------------------------------------------------
    @property
    def n_total(self) -> int:
        return len(self.cost)

    def _nonbasic_value(self, j):
        return self.upper[j] if self.at_upper[j] else self.lower[j]

    def _values(self) -> list:
        vals = [self._nonbasic_value(j) for j in range(self.n_total)]
        for i, b in enumerate(self.basis):
            vals[b] = self.beta[i]
        return vals

    def _reduced_costs(self, cost) -> list:
        d = list(cost)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.T[i]
                for j, a in enumerate(row):
                    if a:
                        d[j] -= cb * a
        return d

    def _phase_costs(self) -> list:
        if self.phase == 1:
            return [(-ONE if j >= self.art_start else ZERO) for j in range(self.n_total)]
        return self.cost

    def _row_duals(self, cost) -> tuple:
        """Duals of the original rows for the given cost vector."""
        m = self.m
        y = []
        for i in range(m):
            col = self.init_basic[i]
            acc = ZERO
            for k, b in enumerate(self.basis):
                cb = cost[b]
                if cb:
                    a = self.T[k][col]
                    if a:
                        acc += cb * a
            y.append(acc * self.mult[i])
        return tuple(y)

    def _pivot(self, r: int, j: int) -> None:
        if _eliminate is not None:
            _eliminate(self.T, r, j, self.d)
        else:
            self._pivot_py(r, j)
        self.is_basic[self.basis[r]] = False
        self.is_basic[j] = True
        self.basis[r] = j
        self.pivots += 1
        if self.pivots > self.max_pivots:
            raise LpIterationLimit(f"exceeded {self.max_pivots} pivots")

    def _pivot_py(self, r: int, j: int) -> None:
        T = self.T
        prow = T[r]
        piv = prow[j]
        if piv != ONE:
            inv = ONE / piv
            prow = [a * inv if a else a for a in prow]
            T[r] = prow
        nz = [(l, a) for l, a in enumerate(prow) if a]
        for k in range(self.m):
            if k == r:
                continue
            row = T[k]
            f = row[j]
            if f:
                for l, a in nz:
                    row[l] -= f * a
        f = self.d[j]
        if f:
            d = self.d
            for l, a in nz:
                d[l] -= f * a

    def _iterate(self):
        """Run the current phase to optimality.  Returns None or ('unbounded', j, dir)."""
        lower, upper, at_upper = self.lower, self.upper, self.at_upper
        degenerate = 0
        while True:
            d = self.d
            bland = degenerate >= _DEGENERATE_STREAK
            enter = None
            best = ZERO
            for j in range(self.n_total):
                if self.is_basic[j]:
                    continue
                hi = upper[j]
                if hi is not None and hi == lower[j]:
                    continue
                dj = d[j]
                if (dj > 0 and not at_upper[j]) or (dj < 0 and at_upper[j]):
                    if bland:
                        enter = j
                        break
                    if abs(dj) > best:
                        enter, best = j, abs(dj)
            if enter is None:
                return None
            j = enter
            up = not at_upper[j]
            best_t = None
            leave = None
            leave_var = None
            for i, row in enumerate(self.T):
                a = row[j]
                if not a:
                    continue
                b = self.basis[i]
                da = a if up else -a
                if da > 0:
                    t = (self.beta[i] - lower[b]) / da
                else:
                    hb = upper[b]
                    if hb is None:
                        continue
                    t = (hb - self.beta[i]) / (-da)
                if best_t is None or t < best_t or (t == best_t and b < leave_var):
                    best_t, leave, leave_var = t, i, b
            own = None if upper[j] is None else upper[j] - lower[j]
            if own is not None and (best_t is None or own <= best_t):
                # bound flip, no basis change
                t = own
                step = t if up else -t
                for i, row in enumerate(self.T):
                    a = row[j]
                    if a:
                        self.beta[i] -= a * step
                at_upper[j] = up
                continue
            if best_t is None:
                return ("unbounded", j, 1 if up else -1)
            t = best_t
            degenerate = degenerate + 1 if t == 0 else 0
            step = t if up else -t
            old_val = self._nonbasic_value(j)
            for i, row in enumerate(self.T):
                a = row[j]
                if a:
                    self.beta[i] -= a * step
            b = self.basis[leave]
            a = self.T[leave][j]
            da = a if up else -a
            at_upper[b] = not (da > 0)
            self._pivot(leave, j)
            self.beta[leave] = old_val + step
            at_upper[j] = False

    # -- public ------------------------------------------------------------
    def solve(self) -> LpOutcome:
        if self.phase == 1:
            self.d = self._reduced_costs(self._phase_costs())
            res = self._iterate()
            assert res is None, "phase 1 is bounded"
            vals = self._values()
            infeas = sum((vals[j] for j in range(self.art_start, self.n_total)), ZERO)
            if infeas > 0:
                return Infeasible(farkas=self._row_duals(self._phase_costs()))
            for j in range(self.art_start, self.n_total):
                self.upper[j] = ZERO
                self.at_upper[j] = False
            self.phase = 2
            self.d = None
        if self.d is None:
            self.d = self._reduced_costs(self.cost)
        res = self._iterate()
        vals = self._values()
        x = tuple(vals[: self.n_struct])
        if res is not None:
            _, j, direction = res
            full = [ZERO] * self.n_total
            full[j] = Rat(direction)
            for i, row in enumerate(self.T):
                a = row[j]
                if a:
                    full[self.basis[i]] = -a * direction
            return Unbounded(ray=tuple(full[: self.n_struct]), x=x)
        value = sum((c * v for c, v in zip(self.cost, vals) if c and v), ZERO)
        return Optimal(x=x, value=value, duals=self._row_duals(self.cost))

    def add_column(self, coeffs: Sequence, cost, lower=ZERO, upper=None) -> int:
        """Append a structural variable (nonbasic at its lower bound).

        Only valid after ``solve`` returned ``Optimal``; returns its index.
        """
        if self.phase != 2 or self.d is None:
            raise RuntimeError("add_column requires a solved, feasible session")
        coeffs = rat_vec(coeffs)
        if len(coeffs) != self.m:
            raise DimensionError(f"column has {len(coeffs)} entries, expected {self.m}")
        lower = as_rat(lower)
        if lower != 0:
            raise ValueError("added columns must have lower bound 0")
        cost = as_rat(cost)
        # transformed column = B^-1 (mult * coeffs)
        tcol = [c * mlt for c, mlt in zip(coeffs, self.mult)]
        newcol = []
        for k in range(self.m):
            row = self.T[k]
            acc = ZERO
            for i, ci in enumerate(tcol):
                if ci:
                    a = row[self.init_basic[i]]
                    if a:
                        acc += a * ci
            newcol.append(acc)
        idx = self.n_total
        for k in range(self.m):
            self.T[k].append(newcol[k])
        dj = cost
        for k, b in enumerate(self.basis):
            cb = self.cost[b]
            if cb and newcol[k]:
                dj -= cb * newcol[k]
        self.d.append(dj)
        self.cost.append(cost)
        self.lower.append(lower)
        self.upper.append(None if upper is None else as_rat(upper))
        self.at_upper.append(False)
        self.is_basic.append(False)
        self.extra_cols.append(idx)
        return len(self.extra_cols) - 1

    def extra_values(self) -> tuple:
        vals = self._values()
        return tuple(vals[j] for j in self.extra_cols)


def solve_lp(lp: LinearProgram, max_pivots: int = 1_000_000) -> LpOutcome:
    """Solve ``lp`` exactly.  Deterministic: identical input, identical output."""
    if not isinstance(lp, LinearProgram):
        raise TypeError("solve_lp expects a LinearProgram")
    return SimplexSession(lp, max_pivots).solve()


def open_session(lp: LinearProgram, max_pivots: int = 1_000_000) -> SimplexSession:
    """A session for column generation: ``solve()``, ``add_column()``, ``solve()``, ..."""
    return SimplexSession(lp, max_pivots)


# -- verification -------------------------------------------------------------

def _row_ok(act, row: Row) -> bool:
    if row.sense == LE:
        return act <= row.rhs
    if row.sense == GE:
        return act >= row.rhs
    return act == row.rhs


def _primal_feasible(lp: LinearProgram, x) -> bool:
    if len(x) != lp.n:
        return False
    for xj, (lo, hi) in zip(x, lp.bounds):
        if xj < lo or (hi is not None and xj > hi):
            return False
    return all(_row_ok(dot(r.coeffs, x), r) for r in lp.rows)


def _dual_sign_ok(lp: LinearProgram, y) -> bool:
    for yi, r in zip(y, lp.rows):
        if r.sense == LE and yi < 0:
            return False
        if r.sense == GE and yi > 0:
            return False
    return True


def _combine(lp: LinearProgram, y) -> list:
    g = [ZERO] * lp.n
    for yi, r in zip(y, lp.rows):
        if yi:
            for j, a in enumerate(r.coeffs):
                if a:
                    g[j] += yi * a
    return g


def verify_lp_outcome(lp: LinearProgram, outcome) -> bool:
    """True iff the certificate in ``outcome`` proves its claim about ``lp`` exactly."""
    try:
        if isinstance(outcome, Optimal):
            return _verify_optimal(lp, outcome)
        if isinstance(outcome, Infeasible):
            return _verify_infeasible(lp, outcome)
        if isinstance(outcome, Unbounded):
            return _verify_unbounded(lp, outcome)
    except (TypeError, ValueError, ZeroDivisionError):
        return False
    return False


def _verify_optimal(lp: LinearProgram, out: Optimal) -> bool:
    x, y = out.x, out.duals
    if len(x) != lp.n or len(y) != lp.m:
        return False
    if not _primal_feasible(lp, x):
        return False
    if dot(lp.objective, x) != out.value:
        return False
    if not _dual_sign_ok(lp, y):
        return False
    for yi, r in zip(y, lp.rows):
        if yi and dot(r.coeffs, x) != r.rhs:
            return False
    g = _combine(lp, y)
    dual_value = sum((yi * r.rhs for yi, r in zip(y, lp.rows) if yi), ZERO)
    for j, (cj, gj) in enumerate(zip(lp.objective, g)):
        dj = cj - gj
        lo, hi = lp.bounds[j]
        if dj > 0:
            if hi is None or x[j] != hi:
                return False
            dual_value += dj * hi
        elif dj < 0:
            if x[j] != lo:
                return False
            dual_value += dj * lo
    return dual_value == out.value


def _verify_infeasible(lp: LinearProgram, out: Infeasible) -> bool:
    y = out.farkas
    if len(y) != lp.m or not _dual_sign_ok(lp, y):
        return False
    g = _combine(lp, y)
    box_min = ZERO
    for gj, (lo, hi) in zip(g, lp.bounds):
        if gj > 0:
            box_min += gj * lo
        elif gj < 0:
            if hi is None:
                return False
            box_min += gj * hi
    yb = sum((yi * r.rhs for yi, r in zip(y, lp.rows) if yi), ZERO)
    return yb < box_min


def _verify_unbounded(lp: LinearProgram, out: Unbounded) -> bool:
    r, x = out.ray, out.x
    if len(r) != lp.n or not _primal_feasible(lp, x):
        return False
    if dot(lp.objective, r) <= 0:
        return False
    for rj, (lo, hi) in zip(r, lp.bounds):
        if rj < 0:
            return False
        if rj > 0 and hi is not None:
            return False
    for row in lp.rows:
        act = dot(row.coeffs, r)
        if row.sense == LE and act > 0:
            return False
        if row.sense == GE and act < 0:
            return False
        if row.sense == EQ and act != 0:
            return False
    return True


# -- JSON -----------------------------------------------------------------------

def _vec_out(v) -> list:
    return [rat_to_string(a) for a in v]


def _vec_in(v) -> tuple:
    return tuple(rat_from_string(a) for a in v)


def outcome_to_json(outcome: LpOutcome) -> dict:
    vec = _vec_out
    if isinstance(outcome, Optimal):
        return {"status": "optimal", "x": vec(outcome.x), "value": rat_to_string(outcome.value),
                "duals": vec(outcome.duals)}
    if isinstance(outcome, Infeasible):
        return {"status": "infeasible", "farkas": vec(outcome.farkas)}
    if isinstance(outcome, Unbounded):
        return {"status": "unbounded", "ray": vec(outcome.ray), "x": vec(outcome.x)}
    raise TypeError(f"not an LP outcome: {type(outcome).__name__}")


def outcome_from_json(data: dict) -> LpOutcome:
    vec = _vec_in
    status = data.get("status")
    if status == "optimal":
        return Optimal(vec(data["x"]), rat_from_string(data["value"]), vec(data["duals"]))
    if status == "infeasible":
        return Infeasible(vec(data["farkas"]))
    if status == "unbounded":
        return Unbounded(vec(data["ray"]), vec(data["x"]))
    raise ValueError(f"unknown LP status {status!r}")
