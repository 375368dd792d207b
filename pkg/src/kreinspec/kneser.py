"""Iterated-logarithm machinery and accumulation verdicts at the gap edges.

The trichotomy compares a weighted tail functional Delta against -1/4: below
(with margin) the gap eigenvalues accumulate at the edge, above they do not,
and a band around -1/4 or an unsettled tail stays inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EvalDomainError, HypothesisError, ValidationError

THRESHOLD = -0.25
MAX_ORDER = 4  # e_5 overflows double precision


def log_threshold(n):
    """e_n with e_{-1} = -inf, e_n = exp(e_{n-1}); so e_0 = 0, e_1 = 1."""
    if n < -1:
        raise ValidationError("order must be >= -1")
    if n > MAX_ORDER:
        raise ValidationError(f"iterated-log order {n} exceeds {MAX_ORDER}; thresholds overflow")
    e = -math.inf
    for _ in range(n + 1):
        e = math.exp(e)
    return e


@dataclass(frozen=True)
class IterLogContext:
    n: int

    def __post_init__(self):
        if not 0 <= self.n <= MAX_ORDER:
            raise ValidationError(f"order must be in [0, {MAX_ORDER}]")

    @property
    def e_n(self):
        return log_threshold(self.n)


def iterated_log_family(n, x):
    """(L_n, P_n, Q_n) at x > e_n.

    L_n = prod_{j<=n} log_j(x), P_n = sum_{j<n} 1/L_j, Q_n = -(1/4) sum_{j<n} 1/L_j^2,
    with log_0(x) = x and the empty sums for n = 0.
    """
    ctx = IterLogContext(n)
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= ctx.e_n):
        raise EvalDomainError(f"iterated logs of order {n} need x > {ctx.e_n}")
    cur = arr
    L_cur = np.ones_like(arr)
    P = np.zeros_like(arr)
    Q = np.zeros_like(arr)
    for j in range(n + 1):
        if j > 0:
            cur = np.log(cur)
        L_cur = L_cur * cur
        if j < n:
            P = P + 1.0 / L_cur
            Q = Q - 0.25 / L_cur**2
    if np.ndim(x) == 0:
        return float(L_cur), float(P), float(Q)
    return L_cur, P, Q


def _side_limits(lim, side):
    if side == "plus":
        return lim.q_plus, lim.p_plus, lim.r_plus
    if side == "minus":
        return lim.q_minus, lim.p_minus, lim.r_minus
    raise ValidationError(f"side must be 'plus' or 'minus', got {side!r}")


def delta_eval(field, lim, n, side, x):
    """Tail functional Delta_{0,side}(x).

    Delta = L_n^2 ( q0/p_s - Q_n - (q_s/(p_s r_s)) r0 + (P_n^2/4)(1 - p_s/p0) )
    evaluated at signed x; the iterated logs act on |x| (the paper-side
    convention log x := log |x|; only even powers of L_n and P_n enter).
    """
    q_s, p_s, r_s = _side_limits(lim, side)
    arr = np.asarray(x, dtype=float)
    if side == "plus" and np.any(arr <= 0):
        raise EvalDomainError("plus-side evaluation needs x > 0")
    if side == "minus" and np.any(arr >= 0):
        raise EvalDomainError("minus-side evaluation needs x < 0")
    L, P, Q = iterated_log_family(n, np.abs(arr))
    q0 = field.q(arr)
    p0 = field.p(arr)
    r0 = field.r(arr)
    delta = L**2 * (q0 / p_s - Q - (q_s / (p_s * r_s)) * r0
                    + (P**2 / 4.0) * (1.0 - p_s / p0))
    if np.ndim(x) == 0:
        return float(delta)
    return delta


@dataclass(frozen=True)
class KneserSampling:
    count: int = 80
    ratio: float = 1.25
    window: int = 20
    drift_tol: float = 1e-3  # per octave

    def grid(self, n):
        start = max(log_threshold(n) * 1.1, 10.0)
        return start * self.ratio ** np.arange(self.count)


@dataclass(frozen=True)
class KneserVerdict:
    side: str
    n: int
    statistic: float
    verdict: str  # accumulate | no_accumulate | inconclusive
    margin: float
    limsup_est: float
    liminf_est: float
    drift: float
    settled: bool


def require_gap(lim):
    """The trichotomy needs non-overlapping essential spectra of the pieces.

    A degenerate gap (equal edges, e.g. q -> 0 on both sides) is admissible:
    each verdict concerns one half-line piece at its own edge.
    """
    lo = lim.q_minus / lim.r_minus
    hi = lim.q_plus / lim.r_plus
    if lo > hi:
        raise HypothesisError(
            f"essential spectra overlap: piece edges {lo} > {hi}; the trichotomy does not apply")
    return lo, hi


def kneser_verdict(field, lim, n, side, sampling=None, margin=0.02):
    """Accumulation verdict at one gap edge via tail statistics of Delta.

    limsup/liminf are estimated by max/min over the final sampling window.  A
    verdict is issued when the statistic clears -1/4 by the margin and the
    window is not drifting against it; drift toward the decided side is
    allowed (a divergent Delta settles the limsup comparison).
    """
    require_gap(lim)
    sampling = sampling or KneserSampling()
    xs = sampling.grid(n)
    signed = xs if side == "plus" else -xs
    vals = delta_eval(field, lim, n, side, signed)

    w = vals[-sampling.window:]
    half = sampling.window // 2
    old, new = w[:half], w[half:]
    octaves = max(half * math.log2(sampling.ratio), 1e-9)
    drift_max = (float(np.max(new)) - float(np.max(old))) / octaves
    drift_min = (float(np.min(new)) - float(np.min(old))) / octaves
    drift = max(abs(drift_max), abs(drift_min))
    settled = drift <= sampling.drift_tol

    limsup_est = float(np.max(w))
    liminf_est = float(np.min(w))
    if limsup_est < THRESHOLD - margin and (settled or drift_max < 0):
        verdict, stat = "accumulate", limsup_est
    elif liminf_est > THRESHOLD + margin and (settled or drift_min > 0):
        verdict, stat = "no_accumulate", liminf_est
    else:
        verdict = "inconclusive"
        stat = limsup_est if abs(limsup_est - THRESHOLD) < abs(liminf_est - THRESHOLD) \
            else liminf_est
    return KneserVerdict(side, n, stat, verdict, margin, limsup_est, liminf_est,
                         drift, settled)


@dataclass(frozen=True)
class TransferReport:
    passed: bool
    n: int
    tail_plus: float
    tail_minus: float
    p_tail: float | None = None  # n = 0 only
    reason: str | None = None

    @property
    def transfers_verdicts(self):
        return self.passed


TRANSFER_TOL = 1e-6


def perturbation_transfer_check(c0, c1, n, sampling=None):
    """Tail test of L_n^2 (|r1-r0| + P_n^2 |1/p1-1/p0| + |q1-q0|) -> 0 at both ends.

    On a pass the Delta statistics of the base field transfer verbatim to the
    perturbed one.  The n = 0 variant additionally requires |p1 - p0| -> 0.
    """
    if n < 0:
        raise ValidationError("order must be >= 0")
    sampling = sampling or KneserSampling(count=60)
    xs = sampling.grid(n)
    tails = {}
    p_tail = None
    for label, pts in (("plus", xs), ("minus", -xs)):
        L, P, _ = iterated_log_family(n, np.abs(pts))
        G = L**2 * (np.abs(c1.r(pts) - c0.r(pts))
                    + P**2 * np.abs(1.0 / c1.p(pts) - 1.0 / c0.p(pts))
                    + np.abs(c1.q(pts) - c0.q(pts)))
        tails[label] = float(np.max(G[-8:]))
    passed = tails["plus"] <= TRANSFER_TOL and tails["minus"] <= TRANSFER_TOL
    if n == 0:
        dp = [float(np.max(np.abs(c1.p(pts) - c0.p(pts))[-8:]))
              for pts in (xs, -xs)]
        p_tail = max(dp)
        passed = passed and p_tail <= TRANSFER_TOL
    reason = None if passed else "transfer quantity does not vanish along the tails"
    return TransferReport(passed, n, tails["plus"], tails["minus"], p_tail, reason)
