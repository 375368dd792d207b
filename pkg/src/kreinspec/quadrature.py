"""Adaptive Simpson quadrature with an expanding-domain driver for improper integrals."""

from __future__ import annotations

from dataclasses import dataclass


def adaptive_simpson(f, a, b, tol=1e-9, max_depth=48):
    """Integrate f over [a, b] by adaptive Simpson with Richardson correction."""
    fa, fm, fb = f(a), f((a + b) / 2), f(b)
    whole = (b - a) / 6 * (fa + 4 * fm + fb)
    return _simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth):
    m = (a + b) / 2
    lm, rm = (a + m) / 2, (m + b) / 2
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6 * (fa + 4 * flm + fm)
    right = (b - m) / 6 * (fm + 4 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15 * tol:
        return left + right + delta / 15
    return _simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) + _simpson_rec(
        f, m, b, fm, frm, fb, right, tol / 2, depth - 1
    )


@dataclass(frozen=True)
class ImproperResult:
    value: float
    converged: bool
    cutoff: float  # half-width reached
    last_increment: float


def integrate_real_line(f, x0=1.0, increment_tol=1e-8, cutoff=1e6, seg_tol=1e-10):
    """Integrate f over the real line by doubling [-X, X] until increments settle.

    Doubling stops when the added mass of one doubling falls below increment_tol;
    if X exceeds `cutoff` first, the result is flagged unconverged (the integral is
    treated as not integrable at this scale).
    """
    X = float(x0)
    total = adaptive_simpson(f, -X, X, tol=seg_tol)
    increment = abs(total)
    while True:
        X2 = 2 * X
        inc = adaptive_simpson(f, X, X2, tol=seg_tol) + adaptive_simpson(f, -X2, -X, tol=seg_tol)
        total += inc
        increment = abs(inc)
        X = X2
        if increment < increment_tol:
            return ImproperResult(total, True, X, increment)
        if X > cutoff:
            return ImproperResult(total, False, X, increment)
