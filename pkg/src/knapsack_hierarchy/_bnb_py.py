"""Pure-Python 0-1 multi-row knapsack branch and bound on integer data.

Mirrors ``_bnb.pyx`` step for step (same orders, same bounds, same node
counting) so both backends return identical answers and node counts.

Inputs (all plain ints, already scaled by the caller):
    weights[r][c]  row r weight of candidate c (>= 0)
    caps[r]        row r capacity
    values[c]      candidate value (> 0)
    order1         phase-1 branching order (heuristic, 1-branch first)
    row_orders[r]  candidates sorted by value/weight in row r, zero weights first
    node_limit     0 for unlimited

Phase 1 finds the optimal value V.  Phase 2 walks candidates in index order,
0-branch first, pruning nodes whose bound is below V; the first leaf of value
V is the lexicographically smallest optimal vector.

Returns ``(value, flags, nodes, status)``; status 1 means the node limit hit.
"""

from __future__ import annotations


class _Budget(Exception):
    pass


def search(weights, caps, values, order1, row_orders, node_limit=0):
    n = len(values)
    nrows = len(caps)
    resid = list(caps)
    flags = [0] * n
    best_flags = [0] * n
    pos = [0] * n
    state = {"nodes": 0, "best": 0, "found": False}

    def pruned(p, value, phase, target):
        # Dantzig bound of every row over undecided candidates
        for r in range(nrows):
            rem = resid[r]
            acc = value
            wr = weights[r]
            for c in row_orders[r]:
                if pos[c] < p:
                    continue
                w = wr[c]
                if w <= rem:
                    rem -= w
                    acc += values[c]
                else:
                    lhs = acc * w + rem * values[c]
                    if phase == 1:
                        if lhs <= target * w:
                            return True
                    elif lhs < target * w:
                        return True
                    break
            else:
                if phase == 1:
                    if acc <= target:
                        return True
                elif acc < target:
                    return True
        return False

    def fits(c):
        for r in range(nrows):
            if weights[r][c] > resid[r]:
                return False
        return True

    def dfs(p, value, order, phase, target):
        state["nodes"] += 1
        if node_limit and state["nodes"] > node_limit:
            raise _Budget
        if p == n:
            if phase == 1:
                if value > state["best"]:
                    state["best"] = value
                    best_flags[:] = flags
            elif value == target:
                best_flags[:] = flags
                state["found"] = True
            return
        if phase == 1:
            if pruned(p, value, 1, state["best"]):
                return
        elif pruned(p, value, 2, target):
            return
        c = order[p]
        for choice in ((1, 0) if phase == 1 else (0, 1)):
            if choice:
                if not fits(c):
                    continue
                for r in range(nrows):
                    resid[r] -= weights[r][c]
                flags[c] = 1
                dfs(p + 1, value + values[c], order, phase, target)
                flags[c] = 0
                for r in range(nrows):
                    resid[r] += weights[r][c]
            else:
                dfs(p + 1, value, order, phase, target)
            if state["found"]:
                return

    try:
        for k, c in enumerate(order1):
            pos[c] = k
        dfs(0, 0, order1, 1, 0)
        best = state["best"]
        if best == 0:
            return 0, [0] * n, state["nodes"], 0
        ident = list(range(n))
        for c in range(n):
            pos[c] = c
        dfs(0, 0, ident, 2, best)
    except _Budget:
        return 0, [0] * n, state["nodes"], 1
    return state["best"], best_flags, state["nodes"], 0
