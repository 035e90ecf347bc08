# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_bnb_py.search`` on int64 data with 128-bit products.

The caller guarantees every weight, capacity and value, and every row/value
sum, is below 2**62, so residuals and partial sums never overflow and the
bound comparisons (products of two such numbers) fit in a signed __int128.
"""

from libc.stdlib cimport malloc, free

cdef extern from *:
    ctypedef long long int128 "__int128"

ctypedef long long i64


cdef struct Ctx:
    int n
    int nrows
    i64* w          # nrows * n, row-major
    i64* resid
    i64* values
    int* row_orders # nrows * n
    int* pos
    int* flags
    int* best_flags
    long long nodes
    long long node_limit
    i64 best
    int found
    int budget_hit


cdef bint _pruned(Ctx* s, int p, i64 value, int phase, i64 target) nogil:
    cdef int r, k, c
    cdef i64 rem, acc, w
    cdef int128 lhs, rhs
    cdef bint broke
    for r in range(s.nrows):
        rem = s.resid[r]
        acc = value
        broke = False
        for k in range(s.n):
            c = s.row_orders[r * s.n + k]
            if s.pos[c] < p:
                continue
            w = s.w[r * s.n + c]
            if w <= rem:
                rem -= w
                acc += s.values[c]
            else:
                lhs = <int128>acc * w + <int128>rem * s.values[c]
                rhs = <int128>target * w
                if phase == 1:
                    if lhs <= rhs:
                        return True
                elif lhs < rhs:
                    return True
                broke = True
                break
        if not broke:
            if phase == 1:
                if acc <= target:
                    return True
            elif acc < target:
                return True
    return False


cdef bint _fits(Ctx* s, int c) nogil:
    cdef int r
    for r in range(s.nrows):
        if s.w[r * s.n + c] > s.resid[r]:
            return False
    return True


cdef void _dfs(Ctx* s, int p, i64 value, int* order, int phase, i64 target) nogil:
    cdef int c, r, t, choice
    s.nodes += 1
    if s.node_limit and s.nodes > s.node_limit:
        s.budget_hit = 1
        return
    if p == s.n:
        if phase == 1:
            if value > s.best:
                s.best = value
                for c in range(s.n):
                    s.best_flags[c] = s.flags[c]
        elif value == target:
            for c in range(s.n):
                s.best_flags[c] = s.flags[c]
            s.found = 1
        return
    if phase == 1:
        if _pruned(s, p, value, 1, s.best):
            return
    elif _pruned(s, p, value, 2, target):
        return
    c = order[p]
    for t in range(2):
        if phase == 1:
            choice = 1 - t
        else:
            choice = t
        if choice:
            if not _fits(s, c):
                continue
            for r in range(s.nrows):
                s.resid[r] -= s.w[r * s.n + c]
            s.flags[c] = 1
            _dfs(s, p + 1, value + s.values[c], order, phase, target)
            s.flags[c] = 0
            for r in range(s.nrows):
                s.resid[r] += s.w[r * s.n + c]
        else:
            _dfs(s, p + 1, value, order, phase, target)
        if s.found or s.budget_hit:
            return


def search(weights, caps, values, order1, row_orders, long long node_limit=0):
    cdef Ctx s
    cdef int n = len(values)
    cdef int nrows = len(caps)
    cdef int r, c, k
    cdef int* ord1
    cdef int* ident
    s.n = n
    s.nrows = nrows
    s.w = <i64*>malloc(max(nrows * n, 1) * sizeof(i64))
    s.resid = <i64*>malloc(max(nrows, 1) * sizeof(i64))
    s.values = <i64*>malloc(max(n, 1) * sizeof(i64))
    s.row_orders = <int*>malloc(max(nrows * n, 1) * sizeof(int))
    s.pos = <int*>malloc(max(n, 1) * sizeof(int))
    s.flags = <int*>malloc(max(n, 1) * sizeof(int))
    s.best_flags = <int*>malloc(max(n, 1) * sizeof(int))
    ord1 = <int*>malloc(max(n, 1) * sizeof(int))
    ident = <int*>malloc(max(n, 1) * sizeof(int))
    try:
        for r in range(nrows):
            s.resid[r] = caps[r]
            row = weights[r]
            ro = row_orders[r]
            for c in range(n):
                s.w[r * n + c] = row[c]
                s.row_orders[r * n + c] = ro[c]
        for c in range(n):
            s.values[c] = values[c]
            s.flags[c] = 0
            s.best_flags[c] = 0
            ord1[c] = order1[c]
            ident[c] = c
        for k in range(n):
            s.pos[ord1[k]] = k
        s.nodes = 0
        s.node_limit = node_limit
        s.best = 0
        s.found = 0
        s.budget_hit = 0
        with nogil:
            _dfs(&s, 0, 0, ord1, 1, 0)
        if s.budget_hit:
            return 0, [0] * n, s.nodes, 1
        if s.best == 0:
            return 0, [0] * n, s.nodes, 0
        for c in range(n):
            s.pos[c] = c
        with nogil:
            _dfs(&s, 0, 0, ident, 2, s.best)
        if s.budget_hit:
            return 0, [0] * n, s.nodes, 1
        return s.best, [s.best_flags[c] for c in range(n)], s.nodes, 0
    finally:
        free(s.w)
        free(s.resid)
        free(s.values)
        free(s.row_orders)
        free(s.pos)
        free(s.flags)
        free(s.best_flags)
        free(ord1)
        free(ident)
