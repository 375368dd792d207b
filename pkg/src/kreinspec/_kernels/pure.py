"""Pure NumPy kernels: Sturm pencil counts and tridiagonal inertia.

Array-level twins of the compiled kernels.  Inputs are pre-coerced by the
package-level wrappers (contiguous float64, shifts 1-d).
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import FactorizationBreakdown

ALPHA = (math.sqrt(5.0) - 1.0) / 2.0  # Bunch pivot-selection constant


def pencil_count_below(d, e, rho, shifts):
    """Counts of pencil eigenvalues T v = lam R v with lam < shift, per shift.

    T is symmetric tridiagonal (diag d, offdiag e), R = diag(rho) with rho > 0.
    Sturm recurrence on T - shift*R, vectorized across shifts.
    """
    n = d.shape[0]
    counts = np.zeros(shifts.shape[0], dtype=np.int64)
    if n == 0:
        return counts
    e2 = e * e
    tiny = np.finfo(float).tiny
    pivmin = tiny
    if e2.size:
        pivmin = max(pivmin, float(e2.max()) * tiny / np.finfo(float).eps)

    q = d[0] - shifts * rho[0]
    np.copyto(q, -pivmin, where=np.abs(q) < pivmin)
    counts += q < 0
    for i in range(1, n):
        q = (d[i] - shifts * rho[i]) - e2[i - 1] / q
        np.copyto(q, -pivmin, where=np.abs(q) < pivmin)
        counts += q < 0
    return counts


def tridiag_inertia(d, e, zero_tol):
    """Inertia (n_minus, n_zero, n_plus) of a symmetric tridiagonal matrix.

    LDL^T-style elimination with Bunch 1x1/2x2 pivoting; no shifts, no
    eigenvalues.  A singular 2x2 pivot aborts the factorization.
    """
    n = d.shape[0]
    if n == 0:
        return (0, 0, 0)
    d = d.copy()
    sigma = float(np.max(np.abs(d)))
    if n > 1:
        sigma = max(sigma, float(np.max(np.abs(e))))
    sigma = max(sigma, np.finfo(float).tiny)
    det_tol = max(zero_tol * sigma, np.finfo(float).tiny)

    n_minus = n_zero = n_plus = 0
    k = 0
    while k < n:
        ek = e[k] if k < n - 1 else 0.0
        if sigma * abs(d[k]) >= ALPHA * ek * ek:
            piv = d[k]
            if abs(piv) <= zero_tol:
                n_zero += 1  # selection rule forces the coupling to be negligible too
            else:
                if piv < 0.0:
                    n_minus += 1
                else:
                    n_plus += 1
                if k < n - 1:
                    d[k + 1] -= ek * ek / piv
            k += 1
        else:
            det = d[k] * d[k + 1] - ek * ek
            if abs(det) <= det_tol:
                raise FactorizationBreakdown(
                    "singular 2x2 pivot in tridiagonal factorization; perturb the shift")
            if det < 0.0:
                n_minus += 1
                n_plus += 1
            elif d[k] + d[k + 1] < 0.0:
                n_minus += 2
            else:
                n_plus += 2
            if k + 2 < n:
                d[k + 2] -= e[k + 1] * e[k + 1] * d[k] / det
            k += 2
    return (n_minus, n_zero, n_plus)
