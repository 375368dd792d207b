# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: Sturm pencil counts and tridiagonal inertia."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

from ..errors import FactorizationBreakdown

cnp.import_array()

cdef double ALPHA = 0.6180339887498949  # Bunch pivot-selection constant
cdef double DBL_TINY = 2.2250738585072014e-308
cdef double DBL_EPS = 2.220446049250313e-16


def pencil_count_below(double[::1] d, double[::1] e, double[::1] rho,
                       double[::1] shifts):
    """Counts of pencil eigenvalues T v = lam R v with lam < shift, per shift."""
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t m = shifts.shape[0]
    out = np.zeros(m, dtype=np.int64)
    cdef long long[::1] counts = out
    if n == 0:
        return out

    cdef double pivmin = DBL_TINY
    cdef double e2max = 0.0
    cdef Py_ssize_t i, j
    for i in range(n - 1):
        if e[i] * e[i] > e2max:
            e2max = e[i] * e[i]
    if e2max * DBL_TINY / DBL_EPS > pivmin:
        pivmin = e2max * DBL_TINY / DBL_EPS

    cdef double s, q
    cdef long long c
    with nogil:
        for j in range(m):
            s = shifts[j]
            c = 0
            q = d[0] - s * rho[0]
            if fabs(q) < pivmin:
                q = -pivmin
            if q < 0.0:
                c += 1
            for i in range(1, n):
                q = (d[i] - s * rho[i]) - e[i - 1] * e[i - 1] / q
                if fabs(q) < pivmin:
                    q = -pivmin
                if q < 0.0:
                    c += 1
            counts[j] = c
    return out


def tridiag_inertia(double[::1] d, double[::1] e, double zero_tol):
    """Inertia (n_minus, n_zero, n_plus) via Bunch 1x1/2x2 pivoting."""
    cdef Py_ssize_t n = d.shape[0]
    if n == 0:
        return (0, 0, 0)
    work_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] work = work_arr
    cdef Py_ssize_t i
    cdef double sigma = 0.0
    for i in range(n):
        work[i] = d[i]
        if fabs(d[i]) > sigma:
            sigma = fabs(d[i])
    for i in range(n - 1):
        if fabs(e[i]) > sigma:
            sigma = fabs(e[i])
    if sigma < DBL_TINY:
        sigma = DBL_TINY
    cdef double det_tol = zero_tol * sigma
    if det_tol < DBL_TINY:
        det_tol = DBL_TINY

    cdef long long n_minus = 0, n_zero = 0, n_plus = 0
    cdef Py_ssize_t k = 0
    cdef double ek, piv, det
    cdef bint breakdown = False
    with nogil:
        while k < n:
            ek = e[k] if k < n - 1 else 0.0
            if sigma * fabs(work[k]) >= ALPHA * ek * ek:
                piv = work[k]
                if fabs(piv) <= zero_tol:
                    n_zero += 1
                else:
                    if piv < 0.0:
                        n_minus += 1
                    else:
                        n_plus += 1
                    if k < n - 1:
                        work[k + 1] -= ek * ek / piv
                k += 1
            else:
                det = work[k] * work[k + 1] - ek * ek
                if fabs(det) <= det_tol:
                    breakdown = True
                    break
                if det < 0.0:
                    n_minus += 1
                    n_plus += 1
                elif work[k] + work[k + 1] < 0.0:
                    n_minus += 2
                else:
                    n_plus += 2
                if k + 2 < n:
                    work[k + 2] -= e[k + 1] * e[k + 1] * work[k] / det
                k += 2
    if breakdown:
        raise FactorizationBreakdown(
            "singular 2x2 pivot in tridiagonal factorization; perturb the shift")
    return (int(n_minus), int(n_zero), int(n_plus))
