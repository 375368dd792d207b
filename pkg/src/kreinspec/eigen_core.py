"""Eigenvalue engines for the assembled pencils.

Definite-weight pieces are handled with Sturm counts and bisection, which scale
to large truncations.  The full indefinite pencil goes through a dense
nonsymmetric solve, capped in size, with conjugate-pair snapping and banded
inverse-iteration residuals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._kernels import pencil_count_below, tridiag_inertia
from .errors import DenseSizeError, NumericsError, PairingError, ValidationError

PERTURB = 1e-10     # shift nudge when a count lands on an eigenvalue
BISECT_TOL = 1e-10  # relative eigenvalue tolerance for bisection


@dataclass(frozen=True)
class Inertia:
    n_minus: int
    n_zero: int
    n_plus: int

    @property
    def total(self):
        return self.n_minus + self.n_zero + self.n_plus


def inertia_count(d, e, rho=None, shift=0.0, zero_tol=None):
    """Inertia of T - shift * diag(rho); rho may carry either or mixed signs."""
    d = np.asarray(d, dtype=float)
    if rho is None:
        dd = d - shift if shift else d
    else:
        dd = d - shift * np.asarray(rho, dtype=float)
    return Inertia(*tridiag_inertia(dd, e, zero_tol))


def _definite_sign(rho):
    if rho.size == 0:
        return 1
    if np.all(rho > 0):
        return 1
    if np.all(rho < 0):
        return -1
    raise ValidationError(
        "indefinite weight has no counting function; use indefinite_eigs")


def count_below(op, shift):
    """#{ pencil eigenvalues < shift } for a definite-weight assembly.

    Shifts landing on an eigenvalue (zero pivot) are nudged by a relative
    PERTURB before counting.  Infinite shifts count everything or nothing.
    """
    rho = np.asarray(op.rho, dtype=float)
    sign = _definite_sign(rho)
    if op.size == 0:
        return 0
    s = float(shift)
    if np.isinf(s):
        return op.size if s > 0 else 0
    d, e = np.asarray(op.d, dtype=float), np.asarray(op.e, dtype=float)
    if sign < 0:
        # (-T, -R) has the same pencil eigenvalues and a positive weight
        d, rho = -d, -rho

    if inertia_count(d, e, rho, s).n_zero:
        s = s - PERTURB * max(1.0, abs(s))
    return int(pencil_count_below(d, e, rho, s))


def count_in_interval(op, lo, hi):
    """#{ pencil eigenvalues in (lo, hi) }; an empty-width interval counts zero."""
    if lo > hi:
        raise ValidationError("interval requires lo <= hi")
    if lo == hi:
        return 0
    return max(count_below(op, hi) - count_below(op, lo), 0)


def sym_tridiag_eigs(op, interval=None, max_iter=200):
    """Pencil eigenvalues of a definite-weight assembly by vectorized bisection.

    Returns ascending eigenvalues, all of them or those inside the open
    interval.  Relative tolerance BISECT_TOL.
    """
    rho = np.asarray(op.rho, dtype=float)
    sign = _definite_sign(rho)
    if op.size == 0:
        return np.zeros(0)
    d, e = np.asarray(op.d, dtype=float), np.asarray(op.e, dtype=float)
    if sign < 0:
        d, rho = -d, -rho  # same eigenvalues, positive weight

    pad = np.concatenate([[0.0], np.abs(e), [0.0]])
    radius = pad[:-1] + pad[1:]
    lo_b = float(np.min((d - radius) / rho))
    hi_b = float(np.max((d + radius) / rho))
    width = max(hi_b - lo_b, 1.0)
    lo_b -= 1e-6 * width
    hi_b += 1e-6 * width

    if interval is None:
        j0, j1 = 0, op.size
    else:
        t0, t1 = interval
        j0 = int(pencil_count_below(d, e, rho, max(t0, lo_b)))
        j1 = int(pencil_count_below(d, e, rho, min(t1, hi_b)))
    if j1 <= j0:
        return np.zeros(0)

    idx = np.arange(j0, j1)
    lo = np.full(idx.shape, lo_b)
    hi = np.full(idx.shape, hi_b)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        counts = pencil_count_below(d, e, rho, mid)
        above = counts <= idx
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
        if np.all(hi - lo <= BISECT_TOL * np.maximum(1.0, np.abs(mid))):
            break
    else:
        raise NumericsError("bisection failed to converge")
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ComplexSpectrum:
    """Dense-solve output: snapped real eigenvalues and conjugate pair representatives."""

    real: np.ndarray            # ascending
    pairs: np.ndarray           # upper half-plane, sorted by real part
    residual_real: np.ndarray
    residual_pairs: np.ndarray
    im_tol: float

    @property
    def n_pairs(self):
        return int(self.pairs.shape[0])


def _sigma_min_estimate(T, R, lam, iters=4):
    """Smallest singular value of T - lam R via banded inverse iteration."""
    n = T.shape[0]
    A = (T - lam * R).astype(complex)
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = np.diagonal(A, 1)
    ab[1, :] = np.diagonal(A)
    ab[2, :-1] = np.diagonal(A, -1)
    rng = np.random.default_rng(12345)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    est = np.inf
    try:
        for _ in range(iters):
            w = scipy.linalg.solve_banded((1, 1), ab, v)
            # A and A^H alternate would give sigma_min exactly; the symmetric
            # structure here makes plain power steps on A^{-1} adequate
            nw = np.linalg.norm(w)
            if not np.isfinite(nw) or nw == 0:
                return 0.0
            est = 1.0 / nw
            v = w / nw
    except (np.linalg.LinAlgError, ValueError):
        return 0.0
    return float(est)


def indefinite_eigs(op, im_tol=None, dense_cap=3000, want_residuals=True):
    """Dense eigenvalues of the indefinite pencil (T, R) with pair snapping.

    The pencil is reduced to the nonsymmetric matrix diag(rho)^{-1} T.  Sizes
    above dense_cap are refused.  Eigenvalues with |Im| below im_tol (auto:
    1e-8 * max(1, max |lam|)) are snapped to the real axis; the rest must form
    conjugate pairs, reported by their upper-half representatives.
    """
    n = op.size
    if n > dense_cap:
        raise DenseSizeError(
            f"dense solve of size {n} exceeds the cap {dense_cap}")
    rho = np.asarray(op.rho, dtype=float)
    if n and np.any(rho == 0):
        raise ValidationError("weight vanishes at a node; the pencil is degenerate")
    if n == 0:
        z = np.zeros(0)
        return ComplexSpectrum(z, np.zeros(0, complex), z.copy(), z.copy(), 0.0)
    T = op.dense_T()
    A = T / rho[:, None]
    lam = np.linalg.eigvals(A)

    scale = max(1.0, float(np.max(np.abs(lam))))
    if im_tol is None:
        im_tol = 1e-8 * scale

    real_mask = np.abs(lam.imag) <= im_tol
    real = np.sort(lam.real[real_mask])
    upper = lam[~real_mask & (lam.imag > 0)]
    lower = lam[~real_mask & (lam.imag < 0)]
    if upper.shape[0] != lower.shape[0]:
        raise PairingError("complex eigenvalues do not split into conjugate halves")
    pair_tol = 1e-9 * scale
    pairs = []
    pool = list(lower)
    for u in sorted(upper, key=lambda z: (z.real, z.imag)):
        if not pool:
            raise PairingError("unmatched complex eigenvalue")
        dist = [abs(u - np.conj(l)) for l in pool]
        j = int(np.argmin(dist))
        if dist[j] > pair_tol:
            raise PairingError(
                f"complex eigenvalue {u} has no conjugate partner within tolerance")
        l = pool.pop(j)
        pairs.append(0.5 * (u + np.conj(l)))
    pairs = np.asarray(sorted(pairs, key=lambda z: (z.real, z.imag)), dtype=complex)

    R = np.diag(rho)
    norm_scale = max(np.abs(T).sum(axis=1).max(), 1e-300)
    if want_residuals:
        residual_real = np.array(
            [_sigma_min_estimate(T, R, v) / norm_scale for v in real])
        residual_pairs = np.array(
            [_sigma_min_estimate(T, R, v) / norm_scale for v in pairs])
    else:
        residual_real = np.full(real.shape, np.nan)
        residual_pairs = np.full(pairs.shape, np.nan)
    return ComplexSpectrum(real, pairs, residual_real, residual_pairs, float(im_tol))


def numerical_rank(M, rel_tol=1e-8):
    """Rank by singular-value cutoff relative to the largest singular value."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > rel_tol * sv[0]))
