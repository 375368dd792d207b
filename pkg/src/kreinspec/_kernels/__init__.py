"""Kernel backend selection: compiled extension when present, NumPy fallback otherwise.

Set KREINSPEC_PURE=1 to force the NumPy implementation.  The wrappers coerce
and validate inputs once, so both backends see clean contiguous arrays.
"""

from __future__ import annotations

import os

import numpy as np

from ..errors import ValidationError
from . import pure as _pure

_impl = _pure
_backend = "pure"
if os.environ.get("KREINSPEC_PURE", "").lower() not in ("1", "true", "yes"):
    try:
        from . import fast as _fast  # compiled at install time; optional
        _impl = _fast
        _backend = "compiled"
    except ImportError:
        pass


def backend_name():
    return _backend


def _coerce_tridiag(d, e, rho=None):
    d = np.ascontiguousarray(d, dtype=np.float64)
    e = np.ascontiguousarray(e, dtype=np.float64)
    if d.ndim != 1 or e.ndim != 1:
        raise ValidationError("tridiagonal data must be one-dimensional")
    if e.shape[0] != max(d.shape[0] - 1, 0):
        raise ValidationError("offdiagonal must have length n - 1")
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
        raise ValidationError("tridiagonal data must be finite")
    if rho is None:
        return d, e
    rho = np.ascontiguousarray(rho, dtype=np.float64)
    if rho.shape != d.shape:
        raise ValidationError("pencil weight must match the diagonal in length")
    if not np.all(rho > 0):
        raise ValidationError(
            "pencil weight must be entrywise positive; flip the sign of both "
            "matrices for negative-definite weights")
    return d, e, rho


def pencil_count_below(d, e, rho, shifts):
    """Eigenvalue counts of the definite pencil (T, diag(rho)) below each shift."""
    scalar = np.ndim(shifts) == 0
    s = np.atleast_1d(np.ascontiguousarray(shifts, dtype=np.float64))
    if not np.all(np.isfinite(s)):
        raise ValidationError("shifts must be finite")
    d, e, rho = _coerce_tridiag(d, e, rho)
    out = _impl.pencil_count_below(d, e, rho, s)
    return int(out[0]) if scalar else out


def tridiag_inertia(d, e, zero_tol=None):
    """Inertia (n_minus, n_zero, n_plus) of a symmetric tridiagonal matrix."""
    d, e = _coerce_tridiag(d, e)
    if zero_tol is None:
        scale = 1.0
        if d.size:
            scale = max(scale, float(np.max(np.abs(d))))
        if e.size:
            scale = max(scale, float(np.max(np.abs(e))))
        zero_tol = 1e-12 * scale
    return _impl.tridiag_inertia(d, e, float(zero_tol))
