"""Exact 0-1 optimization over a knapsack intersection ``K(S) ∩ {0,1}^support``.

This is the pricing oracle for column generation, the IP solver, and the rank
oracle.  Rational data is scaled row by row to integers and handed to a
branch-and-bound kernel: the compiled ``_bnb`` when it is importable and the
scaled data fits in 62 bits, otherwise the pure-Python ``_bnb_py``.  Both
kernels explore the same tree, so the answer never depends on the backend.

Set ``KH_FORCE_PYTHON=1`` to disable the compiled kernel.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import _bnb_py
from .numerics import ZERO, DimensionError, Rat, scale_to_ints
from .pip_model import PipInstance, SubSystem, subsystem

try:
    if os.environ.get("KH_FORCE_PYTHON") == "1":
        raise ImportError("compiled kernel disabled by KH_FORCE_PYTHON")
    from . import _bnb as _bnb_native
except ImportError:
    _bnb_native = None

BACKEND = "cython" if _bnb_native is not None else "python"
_NATIVE_LIMIT = 1 << 62


class NodeBudgetExceeded(RuntimeError):
    """Branch and bound gave up after its node budget; no answer is returned."""


@dataclass(frozen=True)
class PricingResult:
    point: tuple  # 0-1 ints indexed by support
    value: Rat


@dataclass
class _Prepared:
    cand: list
    weights: list
    caps: list
    values: list
    order1: list
    row_orders: list


def _prepare(rows: Sequence[tuple[Sequence, object]], objective: Sequence) -> _Prepared:
    cand = [k for k, c in enumerate(objective) if c > 0]
    cand = [k for k in cand if all(coeffs[k] <= cap for coeffs, cap in rows)]
    int_rows = []
    for coeffs, cap in rows:
        sub = [coeffs[k] for k in cand]
        if sum(sub, ZERO) <= cap:
            continue  # never binding on the candidates
        scaled, _ = scale_to_ints(sub + [cap])
        int_rows.append((scaled[:-1], scaled[-1]))
    values, _ = scale_to_ints([objective[k] for k in cand])
    ncand = len(cand)
    weights = [r for r, _ in int_rows]
    caps = [c for _, c in int_rows]

    # heuristic order: value per unit of normalized weight, best first
    def density(c):
        load = sum((Rat(w[c], cap) for w, cap in zip(weights, caps) if cap), ZERO)
        return None if load == 0 else Rat(values[c]) / load

    dens = [density(c) for c in range(ncand)]
    order1 = sorted(range(ncand), key=lambda c: (dens[c] is not None, -(dens[c] or 0), c))
    row_orders = []
    for w in weights:
        row_orders.append(
            sorted(
                range(ncand),
                key=lambda c: (w[c] != 0, -Rat(values[c], w[c]) if w[c] else 0, c),
            )
        )
    return _Prepared(cand, weights, caps, values, order1, row_orders)


def _fits_native(p: _Prepared) -> bool:
    if sum(p.values) >= _NATIVE_LIMIT:
        return False
    for w, cap in zip(p.weights, p.caps):
        if cap >= _NATIVE_LIMIT or sum(w) >= _NATIVE_LIMIT:
            return False
    return True


def solve_rows(
    rows: Sequence[tuple[Sequence, object]],
    objective: Sequence,
    node_limit: Optional[int] = None,
    backend: Optional[str] = None,
) -> PricingResult:
    """Maximize ``objective . x`` over 0-1 ``x`` with ``coeffs . x <= cap`` for each row.

    ``rows`` is a list of ``(coeffs, cap)`` indexed like ``objective``.  Ties are
    broken towards the lexicographically smallest optimal vector.
    """
    p = _prepare(rows, objective)
    if backend is None:
        backend = "cython" if (_bnb_native is not None and _fits_native(p)) else "python"
    if backend == "cython":
        if _bnb_native is None:
            raise RuntimeError("compiled kernel is not available")
        if not _fits_native(p):
            raise OverflowError("scaled data does not fit the compiled kernel")
        kernel = _bnb_native.search
    elif backend == "python":
        kernel = _bnb_py.search
    else:
        raise ValueError(f"unknown backend {backend!r}")
    _, flags, nodes, status = kernel(
        p.weights, p.caps, p.values, p.order1, p.row_orders, node_limit or 0
    )
    if status:
        raise NodeBudgetExceeded(f"branch and bound exceeded {node_limit} nodes")
    point = [0] * len(objective)
    for k, f in zip(p.cand, flags):
        if f:
            point[k] = 1
    value = sum((objective[k] for k in p.cand if point[k]), ZERO)
    return PricingResult(tuple(point), value)


def max_weight_feasible(
    sub: SubSystem,
    objective: Sequence,
    node_limit: Optional[int] = None,
    backend: Optional[str] = None,
) -> PricingResult:
    """Best 0-1 point of the subsystem for ``objective`` (indexed by its support)."""
    if len(objective) != len(sub.support):
        raise DimensionError(
            f"objective has length {len(objective)}, support has {len(sub.support)}"
        )
    return solve_rows(sub.row_data(), objective, node_limit=node_limit, backend=backend)


def solve_ip(pip: PipInstance, node_limit: Optional[int] = None) -> PricingResult:
    """Optimal 0-1 solution of the whole instance, as a full-length point."""
    rows = [(pip.A[i], pip.b[i]) for i in range(pip.m)]
    return solve_rows(rows, pip.w, node_limit=node_limit)


def rank(pip: PipInstance, S: Iterable[int], node_limit: Optional[int] = None) -> int:
    """Largest subset of columns ``S`` that satisfies all rows."""
    cols = sorted(set(S))
    for j in cols:
        if not (0 <= j < pip.n):
            raise IndexError(f"column {j} out of range for n = {pip.n}")
    if not cols:
        return 0
    objective = [ZERO] * pip.n
    for j in cols:
        objective[j] = Rat(1)
    rows = [(pip.A[i], pip.b[i]) for i in range(pip.m)]
    res = solve_rows(rows, objective, node_limit=node_limit)
    return int(res.value)


def full_subsystem(pip: PipInstance) -> SubSystem:
    return subsystem(pip, range(pip.m))
