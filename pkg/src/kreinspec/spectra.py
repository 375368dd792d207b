"""Essential spectra, Hill band structure, edge classification, and sweeps.

Conventions.  Both half-line pieces are positive-weight operators: H_plus on
(beta, b) and H_minus on (a, alpha), the latter taken with |r|.  The signed
restriction appearing in the block decomposition is -H_minus, so

    sigma_ess(K) = sigma_ess(-H_minus) u sigma_ess(H_plus),

nonreal eigenvalues accumulate only inside sigma_ess(H_plus) n sigma_ess(-H_minus),
and the classified points are the boundary of that intersection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.integrate import solve_ivp

from .assembly import assemble_operator, build_grid
from .coeff_model import LimitsDecl, PeriodDecl, estimate_endpoint_limits
from .eigen_core import count_in_interval, indefinite_eigs
from .errors import NumericsError, ValidationError


@dataclass(frozen=True)
class BandSet:
    """Disjoint ascending closed intervals; endpoints may be infinite."""

    intervals: tuple = ()

    @classmethod
    def from_pairs(cls, pairs):
        cleaned = []
        for lo, hi in pairs:
            lo, hi = float(lo), float(hi)
            if math.isnan(lo) or math.isnan(hi) or lo > hi:
                raise ValidationError(f"bad band ({lo}, {hi})")
            cleaned.append((lo, hi))
        cleaned.sort()
        merged = []
        for lo, hi in cleaned:
            if merged and lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        return cls(tuple(merged))

    @property
    def is_empty(self):
        return not self.intervals

    def union(self, other):
        return BandSet.from_pairs(self.intervals + other.intervals)

    def intersect(self, other):
        out = []
        for a_lo, a_hi in self.intervals:
            for b_lo, b_hi in other.intervals:
                lo, hi = max(a_lo, b_lo), min(a_hi, b_hi)
                if lo <= hi:
                    out.append((lo, hi))
        return BandSet.from_pairs(out)

    def negate(self):
        return BandSet.from_pairs(tuple((-hi, -lo) for lo, hi in self.intervals))

    def contains(self, x):
        return any(lo <= x <= hi for lo, hi in self.intervals)

    def overlap_length(self, lo, hi):
        total = 0.0
        for b_lo, b_hi in self.intervals:
            total += max(0.0, min(hi, b_hi) - max(lo, b_lo))
        return total

    def boundary_points(self):
        pts = set()
        for lo, hi in self.intervals:
            if math.isfinite(lo):
                pts.add(lo)
            if math.isfinite(hi):
                pts.add(hi)
        return tuple(sorted(pts))

    def finite_gaps(self):
        """Holes between consecutive intervals."""
        gaps = []
        for (lo1, hi1), (lo2, hi2) in zip(self.intervals, self.intervals[1:]):
            if hi1 < lo2:
                gaps.append((hi1, lo2))
        return tuple(gaps)

    @property
    def infimum(self):
        return self.intervals[0][0] if self.intervals else math.inf


@dataclass(frozen=True)
class EssentialSpectra:
    """Per-operator essential spectra in the explicit-limits regime."""

    h_plus: BandSet
    h_minus: BandSet          # positive-weight piece, weight |r|
    minus_h_minus: BandSet
    k: BandSet
    fundamental_gap: tuple | None


def essential_from_limits(lim):
    """Half-line essential spectra from coefficient limits.

    sigma_ess(H_plus) = [q_+/r_+, oo), sigma_ess(H_minus) = [-q_-/r_-, oo),
    sigma_ess(-H_minus) = (-oo, q_-/r_-]; the gap is (q_-/r_-, q_+/r_+)
    when nonempty.
    """
    edge_plus = lim.q_plus / lim.r_plus
    edge_minus = lim.q_minus / lim.r_minus
    h_plus = BandSet.from_pairs([(edge_plus, math.inf)])
    h_minus = BandSet.from_pairs([(-edge_minus, math.inf)])
    minus_h = BandSet.from_pairs([(-math.inf, edge_minus)])
    k = minus_h.union(h_plus)
    gap = (edge_minus, edge_plus) if edge_minus < edge_plus else None
    return EssentialSpectra(h_plus, h_minus, minus_h, k, gap)


def _one_period_window(field, side, period, anchor):
    if anchor is None:
        if side == "plus":
            base = field.sign_window[1] if field.sign_window else 0.0
            anchor = period * math.ceil(base / period)
        else:
            base = field.sign_window[0] if field.sign_window else 0.0
            anchor = period * math.floor(base / period)
    if side == "plus":
        return float(anchor), float(anchor) + period
    return float(anchor) - period, float(anchor)


def hill_discriminant(field, lam, side, period, anchor=None):
    """Trace of the one-period transfer matrix in (u, p u') coordinates.

    The system u' = v/p, v' = (q - lam |r|) u is integrated over one period
    window in the given tail; D = u1(end) + v2(end).  Bands are {|D| <= 2}.
    """
    x0, x1 = _one_period_window(field, side, period, anchor)

    def rhs(x, y):
        p = field.p(x)
        w = field.q(x) - lam * abs(field.r(x))
        return [y[1] / p, w * y[0], y[3] / p, w * y[2]]

    sol = solve_ivp(rhs, (x0, x1), [1.0, 0.0, 0.0, 1.0], method="DOP853",
                    rtol=1e-12, atol=1e-14, max_step=period / 32.0)
    if not sol.success:
        raise NumericsError(f"transfer-matrix integration failed: {sol.message}")
    y = sol.y[:, -1]
    return float(y[0] + y[3])


@dataclass(frozen=True)
class BandResult:
    side: str
    period: float
    bands: BandSet
    edges: tuple          # refined finite edges, ascending
    lam_range: tuple
    k_found: int
    truncated: bool       # last band ran into the search cap
    n_evals: int


def periodic_bands(field, side, period, k_max=8, anchor=None, scan_points=1600):
    """Band structure {|D| <= 2} of the one-sided periodic tail.

    Scans the discriminant over [lam_lo, lam_hi] and bisects each crossing of
    |D| = 2; gaps narrower than the scan step may be missed (bands merge).
    """
    x0, x1 = _one_period_window(field, side, period, anchor)
    xs = np.linspace(x0, x1, 801)
    ratio = field.q(xs) / np.abs(field.r(xs))
    p_vals = field.p(xs)
    r_vals = np.abs(field.r(xs))
    lam_lo = float(np.min(ratio)) - 1.0
    lam_hi = (float(np.max(ratio))
              + (k_max * math.pi / period) ** 2 * float(np.max(p_vals)) / float(np.min(r_vals))
              + 10.0)

    evals = 0

    def f(lam):
        nonlocal evals
        evals += 1
        return abs(hill_discriminant(field, lam, side, period, anchor)) - 2.0

    grid = np.linspace(lam_lo, lam_hi, scan_points)
    vals = np.array([f(g) for g in grid])
    inside = vals <= 0.0

    def bisect(lo, hi, f_lo):
        # keep the sign of f at lo; converge onto the |D| = 2 crossing
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            fm = f(mid)
            if (fm <= 0.0) == (f_lo <= 0.0):
                lo, f_lo = mid, fm
            else:
                hi = mid
            if hi - lo <= 1e-10 * max(1.0, abs(mid)):
                break
        return 0.5 * (lo + hi)

    bands, edges = [], []
    i = 0
    truncated = False
    n = grid.shape[0]
    while i < n:
        if not inside[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and inside[j + 1]:
            j += 1
        if i == 0:
            left = grid[0]
        else:
            left = bisect(grid[i - 1], grid[i], vals[i - 1])
            edges.append(left)
        if j == n - 1:
            right = grid[-1]
            truncated = True
        else:
            right = bisect(grid[j], grid[j + 1], vals[j])
            edges.append(right)
        bands.append((left, right))
        i = j + 1

    return BandResult(side, period, BandSet.from_pairs(bands), tuple(edges),
                      (lam_lo, lam_hi), len(bands), truncated, evals)


@dataclass(frozen=True)
class EssentialReport:
    regime_minus: str          # limits | periodic | unknown
    regime_plus: str
    sigma_h_plus: BandSet | None
    sigma_h_minus: BandSet | None
    sigma_minus_h_minus: BandSet | None
    sigma_k: BandSet | None
    gaps: tuple
    fundamental_gap: tuple | None
    samoa_points: tuple
    limits: object = None
    band_results: dict = dc_field(default_factory=dict)
    notes: tuple = ()

    @property
    def available(self):
        return self.sigma_k is not None


def essential_union(field, k_max=8, limits=None):
    """Essential spectra of the pieces and of K, per-endpoint regime aware."""
    notes = []
    regimes = {}
    piece_bands = {}
    band_results = {}

    est = None
    for side, meta in (("minus", field.minus_meta), ("plus", field.plus_meta)):
        if isinstance(meta, PeriodDecl):
            regimes[side] = "periodic"
            res = periodic_bands(field, side, meta.period, k_max=k_max,
                                 anchor=meta.anchor)
            band_results[side] = res
            piece_bands[side] = res.bands
            if res.truncated:
                notes.append(f"{side} band search truncated at {res.lam_range[1]:.6g}")
        elif isinstance(meta, LimitsDecl):
            if limits is None and est is None:
                est = estimate_endpoint_limits(field)
            lim = limits if limits is not None else est.limits
            if lim is None:
                regimes[side] = "unknown"
                notes.append(f"{side} endpoint limits did not certify")
                continue
            regimes[side] = "limits"
            if side == "plus":
                piece_bands[side] = BandSet.from_pairs(
                    [(lim.q_plus / lim.r_plus, math.inf)])
            else:
                piece_bands[side] = BandSet.from_pairs(
                    [(-lim.q_minus / lim.r_minus, math.inf)])
        else:
            regimes[side] = "unknown"
            notes.append(f"{side} endpoint regime undeclared")

    lim_used = limits if limits is not None else (est.limits if est else None)
    if "minus" not in piece_bands or "plus" not in piece_bands:
        return EssentialReport(
            regimes.get("minus", "unknown"), regimes.get("plus", "unknown"),
            piece_bands.get("plus"), piece_bands.get("minus"), None, None,
            (), None, (), lim_used, band_results, tuple(notes))

    sigma_h_plus = piece_bands["plus"]
    sigma_h_minus = piece_bands["minus"]
    sigma_minus_h = sigma_h_minus.negate()
    sigma_k = sigma_minus_h.union(sigma_h_plus)
    gaps = sigma_k.finite_gaps()

    lo_edge = -sigma_h_minus.infimum   # sup of sigma_ess(-H_minus)
    hi_edge = sigma_h_plus.infimum     # inf of sigma_ess(H_plus)
    fundamental_gap = (lo_edge, hi_edge) if lo_edge < hi_edge else None

    samoa = sigma_h_plus.intersect(sigma_minus_h).boundary_points()
    return EssentialReport(regimes["minus"], regimes["plus"], sigma_h_plus,
                           sigma_h_minus, sigma_minus_h, sigma_k, gaps,
                           fundamental_gap, samoa, lim_used, band_results,
                           tuple(notes))


OPERATORS = ("H_plus", "minus_H_minus")


@dataclass(frozen=True)
class AccumulationEvidence:
    edge: float
    side: str                 # below | above
    operator: str             # H_plus | minus_H_minus
    delta0: float
    levels: tuple
    counts: tuple
    verdict: str              # finite | accumulating | inconclusive


def accumulation_sweep(field, edge, side, levels=(40.0, 80.0, 160.0),
                       density=10.0, operator=None, delta0=None):
    """Eigenvalue counts of one piece in a shrinking-edge window across truncations.

    side below counts in (edge - delta0, edge), above in (edge, edge + delta0).
    The default operator pairing follows the edge-accumulation theorem:
    H_plus approaches its essential spectrum from below, -H_minus from above.
    Strict growth across all levels reads accumulating; agreement of the final
    two levels reads finite.
    """
    if side not in ("below", "above"):
        raise ValidationError("side must be 'below' or 'above'")
    levels = tuple(float(X) for X in levels)
    if len(levels) < 3:
        raise ValidationError("sweeps need at least 3 truncation levels")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValidationError("truncation levels must be strictly increasing")
    if operator is None:
        operator = "H_plus" if side == "below" else "minus_H_minus"
    if operator not in OPERATORS:
        raise ValidationError(f"unknown sweep operator {operator!r}")
    if field.sign_window is None:
        raise ValidationError("sweeps need the sign window")
    alpha, beta = field.sign_window
    edge = float(edge)
    if delta0 is None:
        delta0 = 0.1 * max(1.0, abs(edge))
    lo, hi = (edge - delta0, edge) if side == "below" else (edge, edge + delta0)

    counts = []
    for X in levels:
        if operator == "H_plus":
            if X <= beta + 1.0:
                raise ValidationError("truncation too small for the plus piece")
            grid = build_grid(beta, X, density)
            op = assemble_operator(field, grid, "H_plus", alpha=alpha, beta=beta)
            counts.append(count_in_interval(op, lo, hi))
        else:
            if -X >= alpha - 1.0:
                raise ValidationError("truncation too small for the minus piece")
            grid = build_grid(-X, alpha, density)
            op = assemble_operator(field, grid, "H_minus", alpha=alpha, beta=beta)
            # sigma(-H_minus) in (lo, hi) = sigma(H_minus) in (-hi, -lo)
            counts.append(count_in_interval(op, -hi, -lo))

    counts = tuple(int(c) for c in counts)
    if all(c2 > c1 for c1, c2 in zip(counts, counts[1:])):
        verdict = "accumulating"
    elif counts[-1] == counts[-2]:
        verdict = "finite"
    else:
        verdict = "inconclusive"
    return AccumulationEvidence(edge, side, operator, delta0, levels,
                                counts, verdict)


@dataclass(frozen=True)
class CaseStatus:
    status: str  # certified | failed | uncertain
    left_window: str
    right_window: str
    flag_left: str
    flag_right: str


@dataclass(frozen=True)
class EdgeVerdict:
    point: float
    verdict: str  # holds | fails | unknown
    case_a: CaseStatus
    case_b: CaseStatus


@dataclass(frozen=True)
class EdgeClassification:
    points: tuple
    verdicts: tuple  # EdgeVerdict per point, same order

    def verdict_at(self, x, tol=1e-9):
        for v in self.verdicts:
            if abs(v.point - x) <= tol:
                return v
        raise KeyError(f"no classified point near {x}")


def _window_status(bands, lo, hi, floor):
    ov = bands.overlap_length(lo, hi)
    if ov == 0.0:
        return "free"
    if ov <= floor:
        return "uncertain"
    return "band"


def _case(left_status, flag_left, right_status, flag_right):
    conds = (left_status, right_status)
    flags = (flag_left, flag_right)
    if any(c == "band" for c in conds) or any(f == "accumulating" for f in flags):
        status = "failed"
    elif all(c == "free" for c in conds) and all(f == "finite" for f in flags):
        status = "certified"
    else:
        status = "uncertain"
    return CaseStatus(status, left_status, right_status, flag_left, flag_right)


def classify_edges(plus, minus, acc_plus, acc_minus, window=None, floor_rel=1e-5):
    """Property (P) verdicts on the boundary of sigma_ess(H_plus) n sigma_ess(-H_minus).

    plus and minus are those two band sets; acc_plus/acc_minus map
    (point, side) to sweep verdicts for H_plus and -H_minus.  Case A demands a
    left window in the resolvent set of H_plus and a right window in that of
    -H_minus; case B mirrors it.  The point holds property (P) when either
    case is certified, fails when both definitely fail, and is unknown
    otherwise.  Band overlaps below floor_rel (relative) stay uncertain rather
    than failing, since computed band ends carry estimation error.
    """
    samoa = plus.intersect(minus).boundary_points()
    verdicts = []
    for x0 in samoa:
        delta = window if window is not None else 0.05 * max(1.0, abs(x0))
        floor = floor_rel * max(1.0, abs(x0))
        lw = (x0 - delta, x0)
        rw = (x0, x0 + delta)
        l_plus = _window_status(plus, *lw, floor)
        l_minus = _window_status(minus, *lw, floor)
        r_plus = _window_status(plus, *rw, floor)
        r_minus = _window_status(minus, *rw, floor)

        def flag(table, side):
            return table.get((x0, side), "inconclusive")

        case_a = _case(l_plus, flag(acc_plus, "below"), r_minus, flag(acc_minus, "above"))
        case_b = _case(l_minus, flag(acc_minus, "below"), r_plus, flag(acc_plus, "above"))
        if "certified" in (case_a.status, case_b.status):
            verdict = "holds"
        elif case_a.status == "failed" and case_b.status == "failed":
            verdict = "fails"
        else:
            verdict = "unknown"
        verdicts.append(EdgeVerdict(x0, verdict, case_a, case_b))
    return EdgeClassification(tuple(samoa), tuple(verdicts))


@dataclass(frozen=True)
class LevelSpectrum:
    X: float
    size: int
    dense: bool
    real: np.ndarray
    pairs: np.ndarray
    residual_real: np.ndarray
    residual_pairs: np.ndarray
    im_tol: float
    real_in_gap: np.ndarray
    piece_gap_counts: dict
    note: str | None = None

    @property
    def n_pairs(self):
        return int(self.pairs.shape[0])


@dataclass(frozen=True)
class SpectrumScan:
    levels: tuple
    gap: tuple | None


def decomposed_gap_count(field, interval, X, density, dense_cap=3000):
    """n_{H0}(I): eigenvalues of the decoupled block operator in the interval.

    Half-line pieces are counted by Sturm sequences (cap-free); the middle
    piece, when present, by a small dense solve counting its real eigenvalues.
    """
    lo, hi = interval
    if not lo < hi:
        raise ValidationError("interval requires lo < hi")
    if field.sign_window is None:
        raise ValidationError("decomposed counts need the sign window")
    alpha, beta = field.sign_window

    grid_p = build_grid(beta, X, density)
    op_p = assemble_operator(field, grid_p, "H_plus", alpha=alpha, beta=beta)
    n_plus = count_in_interval(op_p, lo, hi)

    grid_m = build_grid(-X, alpha, density)
    op_m = assemble_operator(field, grid_m, "H_minus", alpha=alpha, beta=beta)
    n_minus = count_in_interval(op_m, -hi, -lo)

    n_mid = 0
    if beta > alpha:
        grid_mid = build_grid(alpha, beta, max(density, 8.0 / (beta - alpha)))
        op_mid = assemble_operator(field, grid_mid, "K_alphabeta",
                                   alpha=alpha, beta=beta)
        if op_mid.size:
            spec = indefinite_eigs(op_mid, dense_cap=dense_cap,
                                   want_residuals=False)
            n_mid = int(np.sum((spec.real > lo) & (spec.real < hi)))
    return {"H_plus": int(n_plus), "minus_H_minus": int(n_minus),
            "K_alphabeta": int(n_mid),
            "total": int(n_plus) + int(n_minus) + int(n_mid)}


def build_spectrum_report(field, config, essential=None):
    """Dense K-spectra per truncation level plus decomposed gap counts."""
    if field.sign_window is None:
        raise ValidationError("spectrum reports need the sign window")
    alpha, beta = field.sign_window
    gap = None
    if essential is not None and essential.available:
        gap = essential.fundamental_gap

    levels = []
    for X in config.trunc_levels:
        if not (-X < alpha and beta < X):
            raise ValidationError("truncation must contain the sign window")
        grid = build_grid(-X, X, config.density, insert=(alpha, beta))
        op = assemble_operator(field, grid, "K")
        piece_counts = decomposed_gap_count(field, gap, X, config.density,
                                            config.dense_cap) if gap else {}
        if op.size <= config.dense_cap:
            spec = indefinite_eigs(op, im_tol=config.im_tol,
                                   dense_cap=config.dense_cap)
            in_gap = spec.real[(spec.real > gap[0]) & (spec.real < gap[1])] \
                if gap else np.zeros(0)
            levels.append(LevelSpectrum(float(X), op.size, True, spec.real,
                                        spec.pairs, spec.residual_real,
                                        spec.residual_pairs, spec.im_tol,
                                        in_gap, piece_counts))
        else:
            z = np.zeros(0)
            levels.append(LevelSpectrum(
                float(X), op.size, False, z, np.zeros(0, complex), z.copy(),
                z.copy(), 0.0, z.copy(), piece_counts,
                note=f"size {op.size} above the dense cap; piece counts only"))
    return SpectrumScan(tuple(levels), gap)
