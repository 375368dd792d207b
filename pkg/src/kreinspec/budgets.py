"""Negative-squares budgets and eigenvalue-count bounds inside an essential gap.

The budget splits kappa, the number of negative squares of the shifted form,
into half-line contributions (kappa_minus from H_plus below eta, kappa_plus
from -H_minus above eta) plus the inertia of the middle block; kappa0 =
kappa + 2 bounds the number of nonreal eigenvalue pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .assembly import assemble_operator, build_grid
from .coeff_model import estimate_endpoint_limits
from .config import DEFAULT
from .eigen_core import count_below, inertia_count
from .errors import FactorizationBreakdown, HypothesisError, ValidationError


@dataclass(frozen=True)
class NegativeSquaresBudget:
    """Stabilized counts, or a diagnosis of why they did not stabilize."""

    eta: float
    eta_minus: float          # inf sigma_ess(H_minus); the gap is (-eta_minus, eta_plus)
    eta_plus: float           # inf sigma_ess(H_plus)
    levels: tuple
    per_level: tuple          # one mapping per level: kappa_plus/kappa_eta/kappa_minus
    available: bool
    kappa_plus: int | None
    kappa_eta: int | None
    kappa_minus: int | None
    reason: str | None = None

    @property
    def gap(self):
        return (-self.eta_minus, self.eta_plus)

    @property
    def kappa(self):
        if not self.available:
            return None
        return self.kappa_plus + self.kappa_eta + self.kappa_minus

    @property
    def kappa0(self):
        k = self.kappa
        return None if k is None else k + 2


def _middle_kappa_eta(field, alpha, beta, eta, density):
    if not beta > alpha:
        return 0
    grid = build_grid(alpha, beta, max(density, 8.0 / (beta - alpha)))
    op = assemble_operator(field, grid, "K_alphabeta", alpha=alpha, beta=beta)
    if op.size == 0:
        return 0
    s = float(eta)
    for _ in range(3):
        try:
            return int(inertia_count(op.d, op.e, op.rho, s).n_minus)
        except FactorizationBreakdown:
            s += 1e-10 * max(1.0, abs(s))
    return int(inertia_count(op.d, op.e, op.rho, s).n_minus)


def kappa_budget(field, eta=None, config=DEFAULT, gap=None, limits=None):
    """Negative-squares budget at eta, stabilized across truncation levels.

    The gap edges may be passed in (from a band computation); otherwise they
    are taken from certified endpoint limits.  A degenerate window with equal
    edges is allowed: both half-line counts stay finite at the common edge.
    eta defaults to the midpoint.  The budget is available only when all three
    counts agree exactly on the two largest truncations.
    """
    if field.sign_window is None:
        raise ValidationError("budgets need the sign window")
    alpha, beta = field.sign_window

    if gap is None:
        if limits is None:
            est = estimate_endpoint_limits(field)
            if not est.ok:
                raise HypothesisError(
                    "endpoint limits did not certify; pass an explicit gap")
            limits = est.limits
        # edges directly, so a degenerate gap (equal edges) stays admissible
        gap = (limits.q_minus / limits.r_minus, limits.q_plus / limits.r_plus)
    gap_lo, gap_hi = float(gap[0]), float(gap[1])
    if gap_lo > gap_hi:
        raise HypothesisError(
            f"essential spectra overlap ({gap_lo} > {gap_hi}); no gap")
    if not (math.isfinite(gap_lo) and math.isfinite(gap_hi)):
        raise HypothesisError("budgets need bounded gap edges")
    if eta is None:
        eta = 0.5 * (gap_lo + gap_hi)
    eta = float(eta)
    if not (gap_lo <= eta <= gap_hi):
        raise HypothesisError(
            f"eta {eta} lies outside the essential gap [{gap_lo}, {gap_hi}]")

    # the middle block does not grow with X; compute once
    k_eta = _middle_kappa_eta(field, alpha, beta, eta, config.density)

    levels = tuple(float(X) for X in config.trunc_levels)
    per_level = []
    for X in levels:
        if not (-X < alpha - 1.0 and beta + 1.0 < X):
            raise ValidationError("truncation too small for the half-line pieces")
        grid_p = build_grid(beta, X, config.density)
        op_p = assemble_operator(field, grid_p, "H_plus", alpha=alpha, beta=beta)
        k_minus = count_below(op_p, eta)

        grid_m = build_grid(-X, alpha, config.density)
        op_m = assemble_operator(field, grid_m, "H_minus", alpha=alpha, beta=beta)
        # sigma(-H_minus) above eta = sigma(H_minus) below -eta
        k_plus = count_below(op_m, -eta)

        per_level.append({"kappa_plus": int(k_plus), "kappa_eta": int(k_eta),
                          "kappa_minus": int(k_minus)})

    eta_m, eta_p = -gap_lo, gap_hi
    if len(per_level) < 2:
        return NegativeSquaresBudget(
            eta, eta_m, eta_p, levels, tuple(per_level), False,
            None, None, None,
            reason="stabilization needs at least two truncation levels")
    a, b = per_level[-2], per_level[-1]
    if a != b:
        moved = sorted(k for k in a if a[k] != b[k])
        return NegativeSquaresBudget(
            eta, eta_m, eta_p, levels, tuple(per_level), False,
            None, None, None,
            reason="counts did not stabilize across the two largest "
                   f"truncations: {', '.join(moved)}")
    return NegativeSquaresBudget(
        eta, eta_m, eta_p, levels, tuple(per_level), True,
        b["kappa_plus"], b["kappa_eta"], b["kappa_minus"])


@dataclass(frozen=True)
class PairBoundCheck:
    passed: bool
    kappa0: int
    pair_counts: tuple        # (level, n_pairs) for dense levels
    offending_level: float | None
    skipped_levels: tuple = ()


def pair_bound_check(budget, scan):
    """Nonreal pair count <= kappa0 at every dense truncation level."""
    if not budget.available:
        raise ValidationError("budget unavailable; pair bound not checkable")
    kappa0 = budget.kappa0
    counts = []
    skipped = []
    offending = None
    for lv in scan.levels:
        if not lv.dense:
            skipped.append(lv.X)
            continue
        counts.append((lv.X, lv.n_pairs))
        if lv.n_pairs > kappa0 and offending is None:
            offending = lv.X
    return PairBoundCheck(offending is None, kappa0, tuple(counts),
                          offending, tuple(skipped))


VARIANTS = {
    "general_4n6k11": lambda n, k: 4 * n + 6 * k + 11,
    "gap_6k11": lambda n, k: 6 * k + 11,
    "alpha_eq_beta": lambda n, k: 2 * n + 2 * k + 3,
    "alpha_eq_beta_gap": lambda n, k: 2 * k + 3,
}


def select_variant(alpha_eq_beta, inside_gap):
    if alpha_eq_beta:
        return "alpha_eq_beta_gap" if inside_gap else "alpha_eq_beta"
    return "gap_6k11" if inside_gap else "general_4n6k11"


def gap_count_bound(n_h0, kappa, variant):
    """Upper bound on the eigenvalue count of the full operator in an interval."""
    if n_h0 < 0 or kappa < 0:
        raise ValidationError("counts must be nonnegative")
    try:
        formula = VARIANTS[variant]
    except KeyError:
        raise ValidationError(f"unknown bound variant {variant!r}") from None
    return int(formula(int(n_h0), int(kappa)))


@dataclass(frozen=True)
class CountEstimate:
    interval: tuple
    n_h0: int
    kappa: int
    variant: str
    bound: int

    def __post_init__(self):
        expected = gap_count_bound(self.n_h0, self.kappa, self.variant)
        if self.bound != expected:
            raise ValidationError(
                f"bound {self.bound} does not match {self.variant} "
                f"(expected {expected})")


def count_estimate(interval, n_h0, kappa, variant):
    return CountEstimate((float(interval[0]), float(interval[1])),
                         int(n_h0), int(kappa), variant,
                         gap_count_bound(n_h0, kappa, variant))
