# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled Gauss-Jordan pivot for the exact simplex tableau.

Operates in place on a list of rows (lists of ``gmpy2.mpq``) and the reduced
cost list, calling GMP directly instead of going through Python number
protocols.  Any non-mpq entry raises ``TypeError`` before the tableau is
touched, so the caller can fall back to the Python pivot.
"""

from libc.stdlib cimport malloc, free
from gmpy2 cimport mpq, mpq_t, mpq_ptr, mpq_srcptr, GMPy_MPQ_New, import_gmpy2

cdef extern from "gmp.h":
    void mpq_init(mpq_ptr)
    void mpq_clear(mpq_ptr)
    void mpq_mul(mpq_ptr, mpq_srcptr, mpq_srcptr)
    void mpq_sub(mpq_ptr, mpq_srcptr, mpq_srcptr)
    void mpq_inv(mpq_ptr, mpq_srcptr)
    int mpq_sgn(mpq_srcptr)
    int mpq_cmp_ui(mpq_srcptr, unsigned long, unsigned long)

import_gmpy2()


cdef inline list _check_row(object row):
    cdef list lst = <list?>row
    for v in lst:
        if not isinstance(v, mpq):
            raise TypeError("tableau entries must be gmpy2.mpq")
    return lst


cdef void _axpy(list row, list prow, int* nz, int nnz, mpq f, mpq_ptr tmp):
    # row[l] -= f * prow[l] for every nonzero column l of the pivot row
    cdef int k, l
    cdef mpq a, old, res
    for k in range(nnz):
        l = nz[k]
        a = <mpq>prow[l]
        old = <mpq>row[l]
        mpq_mul(tmp, f.q, a.q)
        res = GMPy_MPQ_New(NULL)
        mpq_sub(res.q, old.q, tmp)
        row[l] = res


def eliminate(list T, int r, int j, list d):
    """Pivot the tableau on entry ``(r, j)``, updating ``d`` as an extra row."""
    cdef Py_ssize_t ncols, k
    cdef list prow, row
    cdef mpq piv, inv, v, f, res
    cdef int* nz
    cdef int nnz = 0
    cdef mpq_t tmp

    for row in T:
        _check_row(row)
    _check_row(d)
    prow = <list>T[r]
    ncols = len(prow)
    piv = <mpq>prow[j]
    if mpq_sgn(piv.q) == 0:
        raise ZeroDivisionError("zero pivot")
    if mpq_cmp_ui(piv.q, 1, 1) != 0:
        inv = GMPy_MPQ_New(NULL)
        mpq_inv(inv.q, piv.q)
        for k in range(ncols):
            v = <mpq>prow[k]
            if mpq_sgn(v.q) != 0:
                res = GMPy_MPQ_New(NULL)
                mpq_mul(res.q, v.q, inv.q)
                prow[k] = res
    nz = <int*>malloc(max(ncols, 1) * sizeof(int))
    if nz == NULL:
        raise MemoryError()
    mpq_init(tmp)
    try:
        for k in range(ncols):
            if mpq_sgn((<mpq>prow[k]).q) != 0:
                nz[nnz] = <int>k
                nnz += 1
        for k in range(len(T)):
            if k == r:
                continue
            row = <list>T[k]
            f = <mpq>row[j]
            if mpq_sgn(f.q) != 0:
                _axpy(row, prow, nz, nnz, f, tmp)
        f = <mpq>d[j]
        if mpq_sgn(f.q) != 0:
            _axpy(d, prow, nz, nnz, f, tmp)
    finally:
        mpq_clear(tmp)
        free(nz)
