"""Coefficient triples (r, p, q) with endpoint metadata and hypothesis checks.

A field carries the weight r (sign-changing), the diffusion p > 0 and the
potential q on an interval (a, b), together with per-endpoint regime
declarations: limits (the coefficients settle to constants), a period, or
unknown.  The checks here are sampling-based surrogates for the structural
hypotheses: the sign window of r, a limit-point proxy, and boundedness of q/r
near the endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import EvalDomainError, HypothesisError, ValidationError
from .expr import CoeffExpr, parse_expression
from .quadrature import integrate_real_line

R_MIN_REL = 1e-12  # reject weights smaller than this relative to max sampled |r|
CAUCHY_TOL = 1e-6
CAUCHY_WINDOW = 8
LIMIT_ZERO_SNAP = 1e-9  # q limits below this are zero at the certification resolution


@dataclass(frozen=True)
class ScanPlan:
    """Sampling plan for sign-window detection."""

    core_halfwidth: float = 20.0
    core_points: int = 4001
    tail_ratio: float = 1.25
    tail_count: int = 62
    bisection_steps: int = 80
    zero_snap: float = 1e-9


@dataclass(frozen=True)
class TailPlan:
    """Geometric tail grid x_k = x0 * ratio^k used for endpoint limits."""

    x0: float = 10.0
    ratio: float = 1.25
    count: int = 60

    def samples(self):
        return self.x0 * self.ratio ** np.arange(self.count)


@dataclass(frozen=True)
class LimitsDecl:
    """Endpoint regime: coefficients admit finite limits."""


@dataclass(frozen=True)
class PeriodDecl:
    """Endpoint regime: coefficients are (eventually) periodic with the given period.

    anchor, when set, places the sampling window for one-period integrations
    far enough out that transient perturbations have decayed.
    """

    period: float
    anchor: float | None = None

    def __post_init__(self):
        if not self.period > 0:
            raise ValidationError("period must be positive")


@dataclass(frozen=True)
class UnknownDecl:
    """Endpoint regime undeclared; essential spectrum cannot be certified."""


@dataclass(frozen=True)
class EndpointLimits:
    """Coefficient limits at the two endpoints."""

    r_minus: float
    r_plus: float
    p_minus: float
    p_plus: float
    q_minus: float
    q_plus: float

    def __post_init__(self):
        if not (self.r_plus > 0 and self.r_minus < 0):
            raise ValidationError("weight limits must satisfy r_minus < 0 < r_plus")
        if not (self.p_plus > 0 and self.p_minus > 0):
            raise ValidationError("diffusion limits must be positive")


@dataclass(frozen=True)
class PeriodDescriptor:
    omega: float  # period on the plus side
    theta: float  # period on the minus side

    def __post_init__(self):
        if not (self.omega > 0 and self.theta > 0):
            raise ValidationError("periods must be positive")


@dataclass(frozen=True)
class CoefficientField:
    r: CoeffExpr
    p: CoeffExpr
    q: CoeffExpr
    a: float = -math.inf
    b: float = math.inf
    sign_window: tuple | None = None
    minus_meta: object = dc_field(default_factory=LimitsDecl)
    plus_meta: object = dc_field(default_factory=UnknownDecl)

    def __post_init__(self):
        if not self.a < self.b:
            raise ValidationError("domain requires a < b")
        if self.sign_window is not None:
            alpha, beta = self.sign_window
            if not (self.a < alpha <= beta < self.b):
                raise ValidationError("sign window must satisfy a < alpha <= beta < b")

    def validate_samples(self, xs):
        """Check p > 0 and |r| above the relative floor on the given samples."""
        xs = np.asarray(xs, dtype=float)
        pv = self.p(xs)
        if np.any(pv <= 0):
            bad = xs[pv <= 0][0]
            raise HypothesisError(f"p must be positive; p({bad}) = {self.p(bad)}")
        rv = self.r(xs)
        floor = R_MIN_REL * np.max(np.abs(rv))
        if floor == 0 or np.any(np.abs(rv) < floor):
            bad = xs[np.abs(rv) < max(floor, 1.0)][0]
            raise HypothesisError(f"|r| below relative floor at x = {bad}")
        if self.sign_window is not None:
            alpha, beta = self.sign_window
            left = xs[xs < alpha]
            right = xs[xs > beta]
            if left.size and np.any(self.r(left) >= 0):
                bad = left[self.r(left) >= 0][0]
                raise HypothesisError(f"r must be negative left of the sign window; fails at {bad}")
            if right.size and np.any(self.r(right) <= 0):
                bad = right[self.r(right) <= 0][0]
                raise HypothesisError(f"r must be positive right of the sign window; fails at {bad}")


def field_from_texts(r, p, q, a=-math.inf, b=math.inf, sign_window="auto",
                     minus_meta=None, plus_meta=None, scan=None):
    """Convenience constructor from expression texts; sign_window='auto' detects it."""
    r_e, p_e, q_e = parse_expression(r), parse_expression(p), parse_expression(q)
    if sign_window == "auto":
        sign_window = detect_sign_window(r_e, scan or ScanPlan())
    return CoefficientField(
        r_e, p_e, q_e, a, b, sign_window,
        minus_meta if minus_meta is not None else LimitsDecl(),
        plus_meta if plus_meta is not None else LimitsDecl(),
    )


def detect_sign_window(r, scan=None):
    """Locate the smallest interval [alpha, beta] containing all sign changes of r.

    Sign changes found in the geometric tails (arbitrarily far out) are rejected,
    as are weights with the wrong eventual signs.  Crossings are refined by
    bisection; a crossing within `zero_snap` of the origin is snapped to 0.
    """
    scan = scan or ScanPlan()
    core = np.linspace(-scan.core_halfwidth, scan.core_halfwidth, scan.core_points)
    tail = scan.core_halfwidth * scan.tail_ratio ** np.arange(1, scan.tail_count + 1)

    r_right = r(tail)
    r_left = r(-tail)
    if np.any(r_right <= 0):
        if np.any(np.sign(r_right[:-1]) != np.sign(r_right[1:])):
            raise HypothesisError("sign changes of r persist arbitrarily far out; no admissible window")
        raise HypothesisError("r must be eventually positive toward the right endpoint")
    if np.any(r_left >= 0):
        if np.any(np.sign(r_left[:-1]) != np.sign(r_left[1:])):
            raise HypothesisError("sign changes of r persist arbitrarily far out; no admissible window")
        raise HypothesisError("r must be eventually negative toward the left endpoint")

    vals = r(core)
    signs = np.where(vals >= 0, 1, -1)
    flips = np.nonzero(signs[:-1] != signs[1:])[0]
    if flips.size == 0:
        raise HypothesisError("r has no sign change; indefinite weight required")

    crossings = []
    for i in flips:
        lo, hi = core[i], core[i + 1]
        flo = vals[i]
        for _ in range(scan.bisection_steps):
            mid = 0.5 * (lo + hi)
            fm = r(mid)
            if (fm >= 0) == (flo >= 0):
                lo, flo = mid, fm
            else:
                hi = mid
        c = 0.5 * (lo + hi)
        if abs(c) <= scan.zero_snap:
            c = 0.0
        crossings.append(c)

    return (min(crossings), max(crossings))


@dataclass(frozen=True)
class LimitEstimate:
    """Per-coefficient tail-limit certification; .limits is None when any fails."""

    values: dict
    failed: tuple

    @property
    def ok(self):
        return not self.failed

    @property
    def limits(self):
        if self.failed:
            return None
        v = self.values
        return EndpointLimits(v["r_minus"], v["r_plus"], v["p_minus"], v["p_plus"],
                              v["q_minus"], v["q_plus"])


def _cauchy_certified(samples):
    """True when the final consecutive increments have settled below tolerance."""
    tail = samples[-(CAUCHY_WINDOW + 1):]
    scale = max(1.0, abs(tail[-1]))
    return bool(np.all(np.abs(np.diff(tail)) <= CAUCHY_TOL * scale))


def estimate_endpoint_limits(field, plan=None):
    """Cauchy-test each coefficient along geometric tails; limit value = last sample.

    A q limit within LIMIT_ZERO_SNAP of zero is snapped to 0.0: the residue of a
    decaying tail is far below the certification tolerance, and carrying it into
    x^2-weighted edge functionals would amplify sampling error without bound.
    p and r limits are never snapped (zero values are inadmissible for them).
    """
    plan = plan or TailPlan()
    xs = plan.samples()
    values, failed = {}, []
    for side, sgn in (("minus", -1.0), ("plus", 1.0)):
        pts = sgn * xs
        for name, fn in (("r", field.r), ("p", field.p), ("q", field.q)):
            key = f"{name}_{side}"
            try:
                v = fn(pts)
            except EvalDomainError:
                failed.append(key)
                continue
            values[key] = float(v[-1])
            if name == "q" and abs(values[key]) <= LIMIT_ZERO_SNAP:
                values[key] = 0.0
            if not _cauchy_certified(v):
                failed.append(key)
    est = LimitEstimate(values, tuple(failed))
    if est.ok:
        # signs must be admissible for an indefinite weight
        if not (est.values["r_plus"] > 0 and est.values["r_minus"] < 0):
            raise HypothesisError("tail limits of r have inadmissible signs")
    return est


@dataclass(frozen=True)
class HypothesisReport:
    h1_pass: bool
    h1_witnesses: tuple
    h2_status_minus: str  # certified-limits | certified-periodic | assumed
    h2_status_plus: str
    h3_pass: bool
    h3_witnesses: tuple

    @property
    def all_pass(self):
        return self.h1_pass and self.h3_pass


def _tail_bounded(values, xs):
    """Desk-scale unboundedness test: sustained geometric growth to a large value."""
    w = values[-20:]
    growing = bool(np.all(np.diff(w) > 0))
    if growing and w[-1] > 10 * w[0] and w[-1] > 100.0:
        return False, float(xs[-1])
    return True, None


def check_hypotheses(field, plan=None, scan=None):
    plan = plan or TailPlan()
    # h1: sign window exists with the right sign pattern
    h1_pass, h1_witnesses = True, ()
    try:
        if field.sign_window is None:
            detect_sign_window(field.r, scan)
        else:
            xs = plan.samples()
            field.validate_samples(np.concatenate([-xs, xs]))
    except (HypothesisError, ValidationError) as exc:
        h1_pass, h1_witnesses = False, (str(exc),)

    # h3: q/r bounded near both endpoints
    h3_pass, h3_witnesses = True, []
    xs = plan.samples()
    for sgn in (-1.0, 1.0):
        pts = sgn * xs
        ratio = np.abs(field.q(pts) / field.r(pts))
        ok, witness = _tail_bounded(ratio, pts)
        if not ok:
            h3_pass = False
            h3_witnesses.append(witness)

    # h2: limit point certified only in the regimes the theory covers
    est = None
    statuses = {}
    for side, meta in (("minus", field.minus_meta), ("plus", field.plus_meta)):
        if isinstance(meta, PeriodDecl):
            statuses[side] = "certified-periodic"
        elif isinstance(meta, LimitsDecl) and h3_pass:
            if est is None:
                try:
                    est = estimate_endpoint_limits(field, plan)
                except HypothesisError:
                    # inadmissible tail signs; already reported through h1
                    est = LimitEstimate({}, ("r_minus", "r_plus"))
            side_ok = not any(k.endswith(side) for k in est.failed)
            statuses[side] = "certified-limits" if side_ok else "assumed"
        else:
            statuses[side] = "assumed"

    return HypothesisReport(h1_pass, h1_witnesses, statuses["minus"], statuses["plus"],
                            h3_pass, tuple(h3_witnesses))


@dataclass(frozen=True)
class ComparisonReport:
    mode: str
    passed: bool
    value: float  # quadrature value, or max tail deviation for limits mode
    reason: str | None = None
    detail: dict | None = None


def check_comparison_conditions(c0, c1, mode, plan=None):
    """Compare two coefficient triples under one of the perturbation regimes.

    limits:       r1/r0 -> 1, p1/p0 -> 1, (q1-q0)/r0 -> 0 on both tails
    L1:           integral of |r1-r0| + |1/p1-1/p0| + |q1-q0| over the line converges
    first_moment: same integrand weighted by |t|
    """
    if (c0.a, c0.b) != (c1.a, c1.b):
        raise ValidationError("compared fields must share the interval (a, b)")
    if mode == "limits":
        plan = plan or TailPlan()
        xs = plan.samples()
        worst = 0.0
        detail = {}
        passed = True
        for side, sgn in (("minus", -1.0), ("plus", 1.0)):
            pts = sgn * xs
            quantities = {
                "r_ratio": (c1.r(pts) / c0.r(pts), 1.0),
                "p_ratio": (c1.p(pts) / c0.p(pts), 1.0),
                "q_diff_over_r": ((c1.q(pts) - c0.q(pts)) / c0.r(pts), 0.0),
            }
            for name, (v, target) in quantities.items():
                dev = abs(float(v[-1]) - target)
                settled = _cauchy_certified(v)
                detail[f"{name}_{side}"] = dev
                worst = max(worst, dev)
                if dev > CAUCHY_TOL or not settled:
                    passed = False
        reason = None if passed else "tail quantities did not settle to their targets"
        return ComparisonReport(mode, passed, worst, reason, detail)

    if mode not in ("L1", "first_moment"):
        raise ValidationError(f"unknown comparison mode {mode!r}")

    def integrand(t):
        base = (abs(c1.r(t) - c0.r(t))
                + abs(1.0 / c1.p(t) - 1.0 / c0.p(t))
                + abs(c1.q(t) - c0.q(t)))
        return base * abs(t) if mode == "first_moment" else base

    res = integrate_real_line(integrand)
    reason = None
    if not res.converged:
        reason = (f"not integrable at this scale (X = {res.cutoff:g}, "
                  f"last increment = {res.last_increment:.3e})")
    return ComparisonReport(mode, res.converged, res.value, reason,
                            {"cutoff": res.cutoff, "last_increment": res.last_increment})
