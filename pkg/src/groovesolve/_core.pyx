# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: Hermite kernel lookup and the two Duhamel accumulators.

Semantics mirror ``_fallback``. Output rows are owned by one thread each and
are accumulated in a fixed order, so results do not depend on thread count.
"""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport fabs

cnp.import_array()

DEF STENCIL = 6


cdef inline void hermite_basis(double t, double* b) noexcept nogil:
    cdef double t2 = t * t
    cdef double t3 = t2 * t
    cdef double t4 = t3 * t
    cdef double t5 = t4 * t
    b[0] = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5
    b[1] = 10.0 * t3 - 15.0 * t4 + 6.0 * t5
    b[2] = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5
    b[3] = -4.0 * t3 + 7.0 * t4 - 3.0 * t5
    b[4] = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5)
    b[5] = 0.5 * (t3 - 2.0 * t4 + t5)


cdef inline double hermite_value(const double[:, ::1] table, Py_ssize_t k, Py_ssize_t cell,
                                 double dr, const double* b) noexcept nogil:
    return (table[k, cell] * b[0] + table[k, cell + 1] * b[1]
            + dr * (table[k + 1, cell] * b[2] + table[k + 1, cell + 1] * b[3])
            + dr * dr * (table[k + 2, cell] * b[4] + table[k + 2, cell + 1] * b[5]))


cdef inline bint locate(double x, double dr, Py_ssize_t n_nodes, Py_ssize_t* cell,
                        double* b, double* sign_odd) noexcept nogil:
    """Set cell and basis for |x|; return False when beyond the table."""
    cdef double r = fabs(x)
    cdef double pos = r / dr
    if pos >= n_nodes - 1:
        return False
    cell[0] = <Py_ssize_t>pos
    if cell[0] > n_nodes - 2:
        cell[0] = n_nodes - 2
    hermite_basis(pos - cell[0], b)
    sign_odd[0] = -1.0 if x < 0 else 1.0
    return True


def eval_orders(const double[:, ::1] table, double dr, orders, x):
    """g_k(x) for each order; same contract as the numpy version."""
    xa = np.asarray(x, dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(xa.ravel())
    cdef const Py_ssize_t[::1] ov = np.ascontiguousarray(np.asarray(orders, dtype=np.intp))
    cdef Py_ssize_t n_ord = ov.shape[0], n = xv.shape[0], n_nodes = table.shape[1]
    out = np.zeros((n_ord, n))
    cdef double[:, ::1] ow = out
    cdef Py_ssize_t i, j, cell = 0
    cdef double b[6]
    cdef double sgn = 1.0
    with nogil:
        for i in range(n):
            if not locate(xv[i], dr, n_nodes, &cell, b, &sgn):
                continue
            for j in range(n_ord):
                ow[j, i] = hermite_value(table, ov[j], cell, dr, b)
                if ov[j] % 2 == 1:
                    ow[j, i] *= sgn
    return out.reshape((n_ord,) + xa.shape)


cdef void uform_row(const double[:, ::1] table, double dr, double yi,
                    const double[::1] uq, const double[::1] wq, double s, double eps,
                    double length, const double[::1] coef, double[:, :, ::1] abar,
                    double[:, ::1] tail, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t n_q = uq.shape[0], n_nodes = table.shape[1]
    cdef Py_ssize_t q, k, cm = 0, cp = 0
    cdef double scale = s / eps, vm, vp, sm = 1.0, sp = 1.0, w
    cdef double bm[6]
    cdef double bp[6]
    cdef bint lm, lp
    for q in range(n_q):
        lm = locate((yi - s * uq[q]) / eps, dr, n_nodes, &cm, bm, &sm)
        lp = locate((yi + s * uq[q]) / eps, dr, n_nodes, &cp, bp, &sp)
        if not (lm or lp):
            continue
        w = scale * wq[q]
        for k in range(4):
            vm = 0.0
            vp = 0.0
            if lm:
                vm = hermite_value(table, k + 1, cm, dr, bm)
                if (k + 1) % 2 == 1:
                    vm = vm * sm
            if lp:
                vp = hermite_value(table, k + 1, cp, dr, bp)
                if (k + 1) % 2 == 1:
                    vp = vp * sp
            abar[k, i, q] += coef[k] * ((vm - vp) * w)
    lm = locate((yi - s * length) / eps, dr, n_nodes, &cm, bm, &sm)
    lp = locate((yi + s * length) / eps, dr, n_nodes, &cp, bp, &sp)
    for k in range(4):
        vm = 0.0
        vp = 0.0
        if lm:
            vm = hermite_value(table, k, cm, dr, bm)
            if k % 2 == 1:
                vm = vm * sm
        if lp:
            vp = hermite_value(table, k, cp, dr, bp)
            if k % 2 == 1:
                vp = vp * sp
        tail[k, i] += coef[k] * (vm + vp)


def uform_accumulate(const double[:, ::1] table, double dr, const double[::1] y,
                     const double[::1] uq, const double[::1] wq, double s, double eps,
                     double length, const double[::1] coef, double[:, :, ::1] abar,
                     double[:, ::1] tail, int nthreads=1):
    cdef Py_ssize_t i, n_y = y.shape[0]
    for i in prange(n_y, nogil=True, num_threads=nthreads, schedule="static"):
        uform_row(table, dr, y[i], uq, wq, s, eps, length, coef, abar, tail, i)


cdef inline void stencil(double u, double h, Py_ssize_t n, Py_ssize_t* idx,
                         double* wts) noexcept nogil:
    """Odd-extension weights at u, 7 entries; see _fallback.odd_stencil."""
    cdef double a = fabs(u), pos, t, sgn
    cdef Py_ssize_t cell, j0, m, l
    sgn = 0.0
    if u > 0:
        sgn = 1.0
    elif u < 0:
        sgn = -1.0
    pos = a / h
    if pos >= n - 1:
        for m in range(STENCIL):
            idx[m] = n - 1
            wts[m] = 0.0
        wts[0] = sgn
    else:
        cell = <Py_ssize_t>pos
        if cell > n - 2:
            cell = n - 2
        j0 = cell - 2
        if j0 < 0:
            j0 = 0
        if j0 > n - STENCIL:
            j0 = n - STENCIL
        t = pos - j0
        for m in range(STENCIL):
            wts[m] = sgn
            idx[m] = j0 + m
            for l in range(STENCIL):
                if l != m:
                    wts[m] = wts[m] * ((t - l) / (m - l))
    idx[STENCIL] = 0
    wts[STENCIL] = -sgn


cdef void rform_row(double yi, double h, Py_ssize_t n, double s, double eps,
                    const double[::1] r_nodes, const double[:, ::1] gw, const double* gsum,
                    double[:, :, ::1] matrix, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t p, k, m, n_r = r_nodes.shape[0]
    cdef Py_ssize_t idx[STENCIL + 1]
    cdef double wts[STENCIL + 1]
    for p in range(n_r):
        stencil((yi - eps * r_nodes[p]) / s, h, n, idx, wts)
        for k in range(4):
            for m in range(STENCIL + 1):
                matrix[k, i, idx[m]] += gw[k, p] * wts[m]
    stencil(yi / s, h, n, idx, wts)
    for k in range(4):
        for m in range(STENCIL + 1):
            matrix[k, i, idx[m]] += -gsum[k] * wts[m]


def rform_accumulate(const double[::1] y, double h, Py_ssize_t n, double s, double eps,
                     const double[::1] r_nodes, const double[:, ::1] gw,
                     double[:, :, ::1] matrix, int nthreads=1):
    cdef Py_ssize_t i, p, k, n_y = y.shape[0], n_r = r_nodes.shape[0]
    cdef double gsum[4]
    for k in range(4):
        gsum[k] = 0.0
        for p in range(n_r):
            gsum[k] += gw[k, p]
    for i in prange(n_y, nogil=True, num_threads=nthreads, schedule="static"):
        rform_row(y[i], h, n, s, eps, r_nodes, gw, gsum, matrix, i)
