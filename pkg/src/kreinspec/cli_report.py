"""Problem-file ingestion, pipeline orchestration, and stable report output.

Problem files and reports are JSON with explicit schema tags
(kreinspec-problem/1, kreinspec-report/1).  Reports are byte-identical across
runs with equal configuration: sections are computed deterministically and
serialized with sorted keys and shortest round-trip decimals.  Infinite band
endpoints serialize as the Infinity literal, which json.loads reads back.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from ._version import __version__
from .assembly import assemble_operator, blockdiag_difference, build_grid
from .budgets import (count_estimate, kappa_budget, pair_bound_check,
                      select_variant)
from .coeff_model import (CoefficientField, LimitsDecl, PeriodDecl,
                          UnknownDecl, check_comparison_conditions,
                          check_hypotheses, detect_sign_window)
from .config import NumericsConfig
from .eigen_core import inertia_count, numerical_rank
from .errors import (EvalDomainError, FactorizationBreakdown, HypothesisError,
                     KreinspecError, NumericsError, ValidationError)
from .expr import parse_expression
from .kneser import kneser_verdict, perturbation_transfer_check
from .spectra import (accumulation_sweep, build_spectrum_report,
                      classify_edges, essential_union)

PROBLEM_SCHEMA = "kreinspec-problem/1"
REPORT_SCHEMA = "kreinspec-report/1"

_NUMERIC_KEYS = ("trunc_levels", "density", "eta", "im_tol", "kneser_n",
                 "margin", "dense_cap", "k_max")


def _fail(path, msg):
    raise ValidationError(f"{path}: {msg}")


def _san(obj):
    """JSON-ready copy: tuples to lists, numpy scalars and arrays unwrapped."""
    if isinstance(obj, dict):
        return {str(k): _san(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_san(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_san(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) or isinstance(obj, int) or obj is None:
        return obj
    if isinstance(obj, (str, bool)):
        return obj
    raise ValidationError(f"cannot serialize {type(obj).__name__}")


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    coefficients: dict
    perturbed: dict | None
    interval: tuple
    sign_window: object       # "auto" or (alpha, beta)
    endpoints: dict           # side -> LimitsDecl | PeriodDecl | UnknownDecl
    numerics: NumericsConfig
    doc: dict                 # normalized echo

    def with_numerics(self, **overrides):
        kw = {k: v for k, v in overrides.items() if v is not None}
        if not kw:
            return self
        cfg = self.numerics.with_(**kw)
        doc = dict(self.doc)
        doc["numerics"] = {k: _san(getattr(cfg, k)) for k in _NUMERIC_KEYS}
        return ProblemSpec(self.name, self.coefficients, self.perturbed,
                           self.interval, self.sign_window, self.endpoints,
                           cfg, doc)


def _parse_endpoint(side, decl):
    path = f"endpoints.{side}"
    if not isinstance(decl, dict):
        _fail(path, "expected an object")
    regime = decl.get("regime")
    if regime == "limits":
        extra = set(decl) - {"regime"}
        if extra:
            _fail(path, f"unexpected keys {sorted(extra)}")
        return LimitsDecl()
    if regime == "periodic":
        extra = set(decl) - {"regime", "period", "anchor"}
        if extra:
            _fail(path, f"unexpected keys {sorted(extra)}")
        period = decl.get("period")
        if not isinstance(period, (int, float)) or not period > 0:
            _fail(f"{path}.period", "expected a positive number")
        anchor = decl.get("anchor")
        if anchor is not None and not isinstance(anchor, (int, float)):
            _fail(f"{path}.anchor", "expected a number")
        return PeriodDecl(float(period),
                          None if anchor is None else float(anchor))
    if regime == "unknown":
        return UnknownDecl()
    _fail(f"{path}.regime", "expected one of limits, periodic, unknown")


def _decl_doc(decl):
    if isinstance(decl, PeriodDecl):
        out = {"regime": "periodic", "period": decl.period}
        if decl.anchor is not None:
            out["anchor"] = decl.anchor
        return out
    if isinstance(decl, LimitsDecl):
        return {"regime": "limits"}
    return {"regime": "unknown"}


def _parse_triple(path, obj):
    if not isinstance(obj, dict):
        _fail(path, "expected an object with r, p, q")
    extra = set(obj) - {"r", "p", "q"}
    if extra:
        _fail(path, f"unexpected keys {sorted(extra)}")
    out = {}
    for key in ("r", "p", "q"):
        text = obj.get(key)
        if not isinstance(text, str) or not text.strip():
            _fail(f"{path}.{key}", "expected a nonempty expression string")
        try:
            parse_expression(text)
        except KreinspecError as exc:
            _fail(f"{path}.{key}", str(exc))
        out[key] = text
    return out


def load_problem(source):
    """Parse and validate a problem document (path or mapping)."""
    if isinstance(source, dict):
        doc = source
    else:
        try:
            with open(source, "rb") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ValidationError(f"cannot read problem file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"problem file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        _fail("$", "expected a JSON object")
    if doc.get("schema") != PROBLEM_SCHEMA:
        _fail("schema", f"expected {PROBLEM_SCHEMA!r}")
    known = {"schema", "name", "coefficients", "perturbed", "interval",
             "sign_window", "endpoints", "numerics"}
    extra = set(doc) - known
    if extra:
        _fail("$", f"unexpected keys {sorted(extra)}")

    name = doc.get("name", "problem")
    if not isinstance(name, str):
        _fail("name", "expected a string")
    coeffs = _parse_triple("coefficients", doc.get("coefficients"))
    perturbed = None
    if doc.get("perturbed") is not None:
        perturbed = _parse_triple("perturbed", doc["perturbed"])

    interval = doc.get("interval", [None, None])
    if (not isinstance(interval, list) or len(interval) != 2
            or any(v is not None and not isinstance(v, (int, float))
                   for v in interval)):
        _fail("interval", "expected [a, b] with null for an infinite endpoint")
    a = -math.inf if interval[0] is None else float(interval[0])
    b = math.inf if interval[1] is None else float(interval[1])
    if not a < b:
        _fail("interval", "requires a < b")

    window = doc.get("sign_window", "auto")
    if window != "auto":
        if (not isinstance(window, list) or len(window) != 2
                or not all(isinstance(v, (int, float)) for v in window)
                or not window[0] <= window[1]):
            _fail("sign_window", "expected \"auto\" or [alpha, beta] with alpha <= beta")
        window = (float(window[0]), float(window[1]))

    eps = doc.get("endpoints", {})
    if not isinstance(eps, dict) or set(eps) - {"minus", "plus"}:
        _fail("endpoints", "expected an object with minus and plus")
    endpoints = {
        "minus": _parse_endpoint("minus", eps.get("minus", {"regime": "limits"})),
        "plus": _parse_endpoint("plus", eps.get("plus", {"regime": "limits"})),
    }

    num = doc.get("numerics", {})
    if not isinstance(num, dict):
        _fail("numerics", "expected an object")
    extra = set(num) - set(_NUMERIC_KEYS)
    if extra:
        _fail("numerics", f"unexpected keys {sorted(extra)}")
    kw = {}
    if "trunc_levels" in num:
        levels = num["trunc_levels"]
        if (not isinstance(levels, list) or not levels
                or not all(isinstance(v, (int, float)) for v in levels)):
            _fail("numerics.trunc_levels", "expected a list of numbers")
        kw["trunc_levels"] = tuple(float(v) for v in levels)
    for key in _NUMERIC_KEYS[1:]:
        if key in num:
            kw[key] = num[key]
    try:
        cfg = NumericsConfig(**kw)
    except (ValidationError, TypeError) as exc:
        _fail("numerics", str(exc))
    if list(cfg.trunc_levels) != sorted(set(cfg.trunc_levels)):
        _fail("numerics.trunc_levels", "must be strictly increasing")

    normalized = {
        "schema": PROBLEM_SCHEMA,
        "name": name,
        "coefficients": coeffs,
        "perturbed": perturbed,
        "interval": [None if math.isinf(a) else a, None if math.isinf(b) else b],
        "sign_window": "auto" if window == "auto" else list(window),
        "endpoints": {s: _decl_doc(d) for s, d in endpoints.items()},
        "numerics": {k: _san(getattr(cfg, k)) for k in _NUMERIC_KEYS},
    }
    return ProblemSpec(name, coeffs, perturbed, (a, b), window, endpoints,
                       cfg, normalized)


def build_fields(spec):
    """Coefficient fields for the base and (optionally) perturbed triples.

    A failed sign-window detection yields a field without a window so the
    hypothesis section can report it; dependent sections are then skipped.
    """
    window = spec.sign_window
    note = None
    if window == "auto":
        try:
            window = detect_sign_window(parse_expression(spec.coefficients["r"]))
        except (HypothesisError, ValidationError) as exc:
            window, note = None, str(exc)
    base = CoefficientField(
        parse_expression(spec.coefficients["r"]),
        parse_expression(spec.coefficients["p"]),
        parse_expression(spec.coefficients["q"]),
        spec.interval[0], spec.interval[1], window,
        spec.endpoints["minus"], spec.endpoints["plus"])
    pert = None
    if spec.perturbed is not None:
        pert = CoefficientField(
            parse_expression(spec.perturbed["r"]),
            parse_expression(spec.perturbed["p"]),
            parse_expression(spec.perturbed["q"]),
            spec.interval[0], spec.interval[1], window,
            spec.endpoints["minus"], spec.endpoints["plus"])
    return base, pert, note


def _bands_doc(bs):
    return None if bs is None else [list(iv) for iv in bs.intervals]


def _limits_doc(lim):
    if lim is None:
        return None
    return {"r_minus": lim.r_minus, "r_plus": lim.r_plus,
            "p_minus": lim.p_minus, "p_plus": lim.p_plus,
            "q_minus": lim.q_minus, "q_plus": lim.q_plus}


def _band_result_doc(res):
    return {"side": res.side, "period": res.period,
            "bands": _bands_doc(res.bands), "edges": list(res.edges),
            "lam_range": list(res.lam_range), "k_found": res.k_found,
            "truncated": res.truncated, "n_evals": res.n_evals}


def _essential_doc(es):
    return {"status": "ok",
            "regime_minus": es.regime_minus, "regime_plus": es.regime_plus,
            "sigma_h_plus": _bands_doc(es.sigma_h_plus),
            "sigma_h_minus": _bands_doc(es.sigma_h_minus),
            "sigma_minus_h_minus": _bands_doc(es.sigma_minus_h_minus),
            "sigma_k": _bands_doc(es.sigma_k),
            "gaps": [list(g) for g in es.gaps],
            "fundamental_gap": None if es.fundamental_gap is None
            else list(es.fundamental_gap),
            "samoa_points": list(es.samoa_points),
            "limits": _limits_doc(es.limits),
            "bands": {s: _band_result_doc(r) for s, r in es.band_results.items()},
            "notes": list(es.notes)}


def _sweep_doc(ev):
    return {"edge": ev.edge, "side": ev.side, "operator": ev.operator,
            "delta0": ev.delta0, "levels": list(ev.levels),
            "counts": list(ev.counts), "verdict": ev.verdict}


def _case_doc(cs):
    return {"status": cs.status, "left_window": cs.left_window,
            "right_window": cs.right_window, "flag_left": cs.flag_left,
            "flag_right": cs.flag_right}


def _level_doc(lv):
    return {"X": lv.X, "size": lv.size, "dense": lv.dense,
            "real": lv.real, "pairs": [[z.real, z.imag] for z in lv.pairs],
            "residual_real": lv.residual_real,
            "residual_pairs": lv.residual_pairs,
            "im_tol": lv.im_tol, "real_in_gap": lv.real_in_gap,
            "piece_gap_counts": lv.piece_gap_counts, "note": lv.note}


def _kneser_doc(kv):
    return {"side": kv.side, "n": kv.n, "statistic": kv.statistic,
            "verdict": kv.verdict, "margin": kv.margin,
            "limsup_est": kv.limsup_est, "liminf_est": kv.liminf_est,
            "drift": kv.drift, "settled": kv.settled}


def _comparison_doc(rep):
    return {"mode": rep.mode, "passed": rep.passed, "value": rep.value,
            "reason": rep.reason, "detail": rep.detail}


def _transfer_doc(rep):
    return {"passed": rep.passed, "n": rep.n, "tail_plus": rep.tail_plus,
            "tail_minus": rep.tail_minus, "p_tail": rep.p_tail,
            "reason": rep.reason}


def _budget_doc(b):
    return {"status": "ok", "eta": b.eta, "eta_minus": b.eta_minus,
            "eta_plus": b.eta_plus, "levels": list(b.levels),
            "per_level": list(b.per_level), "available": b.available,
            "kappa_plus": b.kappa_plus, "kappa_eta": b.kappa_eta,
            "kappa_minus": b.kappa_minus, "kappa": b.kappa,
            "kappa0": b.kappa0, "reason": b.reason}


_SWEEP_TO_KNESER = {"accumulating": "accumulate", "finite": "no_accumulate"}


@dataclass(frozen=True)
class AnalysisReport:
    schema: str
    tool: dict
    problem: dict
    config: dict
    sections: dict

    def to_doc(self):
        return {"schema": self.schema, "tool": self.tool,
                "problem": self.problem, "config": self.config,
                "sections": self.sections}

    @classmethod
    def from_doc(cls, doc):
        if doc.get("schema") != REPORT_SCHEMA:
            raise ValidationError(f"report schema must be {REPORT_SCHEMA!r}")
        return cls(doc["schema"], doc["tool"], doc["problem"], doc["config"],
                   doc["sections"])


_SECTIONS = ("hypotheses", "comparison", "essential", "classification",
             "spectra", "kneser", "budget", "pair_bound", "counts",
             "structural")


def _skipped(reason):
    return {"status": "skipped", "reason": reason}


def run_pipeline(spec, sections=_SECTIONS, override_hypotheses=False):
    """Deterministic analysis report; per-section failures never cascade."""
    cfg = spec.numerics
    field, pert, window_note = build_fields(spec)
    out = {}

    def record(name, fn):
        if name not in sections:
            return None
        try:
            doc, obj = fn()
        except KreinspecError as exc:
            out[name] = {"status": "error",
                         "error": f"{type(exc).__name__}: {exc}"}
            return None
        out[name] = doc
        return obj

    hyp = None

    def sec_hypotheses():
        nonlocal hyp
        hyp = check_hypotheses(field)
        doc = {"status": "ok", "h1_pass": hyp.h1_pass,
               "h1_witnesses": list(hyp.h1_witnesses),
               "h2_status_minus": hyp.h2_status_minus,
               "h2_status_plus": hyp.h2_status_plus,
               "h3_pass": hyp.h3_pass,
               "h3_witnesses": list(hyp.h3_witnesses),
               "overridden": bool(override_hypotheses)}
        if window_note:
            doc["h1_witnesses"] = doc["h1_witnesses"] + [window_note]
        return doc, hyp

    record("hypotheses", sec_hypotheses)
    hyp_ok = hyp is not None and hyp.all_pass
    proceed = hyp_ok or override_hypotheses
    blocked = ("hypothesis checks did not pass; "
               "use --override-hypotheses to force the computation")

    def gate(name, fn):
        if name not in sections:
            return None
        if not proceed:
            out[name] = _skipped(blocked)
            return None
        if field.sign_window is None:
            out[name] = _skipped("no sign window")
            return None
        return record(name, fn)

    def sec_comparison():
        if pert is None:
            return _skipped("no perturbed triple in the problem file"), None
        modes = {}
        for mode in ("limits", "L1", "first_moment"):
            try:
                modes[mode] = _comparison_doc(
                    check_comparison_conditions(field, pert, mode))
            except KreinspecError as exc:
                modes[mode] = {"mode": mode, "error":
                               f"{type(exc).__name__}: {exc}"}
        transfer = perturbation_transfer_check(field, pert, cfg.kneser_n)
        return ({"status": "ok", "modes": modes,
                 "transfer": _transfer_doc(transfer)}, transfer)

    record("comparison", sec_comparison)

    def sec_essential():
        es = essential_union(field, k_max=cfg.k_max)
        return _essential_doc(es), es

    essential = gate("essential", sec_essential)

    def sec_classification():
        if essential is None or not essential.available:
            return _skipped("essential spectra unavailable"), None
        sweeps = []
        acc_plus, acc_minus = {}, {}
        for x0 in essential.samoa_points:
            for operator, table in (("H_plus", acc_plus),
                                    ("minus_H_minus", acc_minus)):
                for side in ("below", "above"):
                    ev = accumulation_sweep(field, x0, side,
                                            levels=cfg.trunc_levels,
                                            density=cfg.density,
                                            operator=operator)
                    table[(x0, side)] = ev.verdict
                    sweeps.append(_sweep_doc(ev))
        cls = classify_edges(essential.sigma_h_plus,
                             essential.sigma_minus_h_minus,
                             acc_plus, acc_minus)
        verdicts = [{"point": v.point, "verdict": v.verdict,
                     "case_a": _case_doc(v.case_a),
                     "case_b": _case_doc(v.case_b)} for v in cls.verdicts]
        return ({"status": "ok", "points": list(cls.points),
                 "verdicts": verdicts, "sweeps": sweeps}, cls)

    gate("classification", sec_classification)

    scan = None

    def sec_spectra():
        nonlocal scan
        scan = build_spectrum_report(field, cfg, essential)
        doc = {"status": "ok",
               "gap": None if scan.gap is None else list(scan.gap),
               "levels": [_level_doc(lv) for lv in scan.levels]}
        return doc, scan

    gate("spectra", sec_spectra)

    def sec_kneser():
        if essential is None:
            raise HypothesisError("essential spectra unavailable")
        if (essential.regime_minus, essential.regime_plus) != ("limits", "limits"):
            raise HypothesisError("the tail test needs limit-type endpoints")
        lim = essential.limits
        if lim is None:
            raise HypothesisError("endpoint limits did not certify")
        verdicts = {}
        agreement = {}
        corroboration = {}
        gap = essential.fundamental_gap
        for side in ("minus", "plus"):
            kv = kneser_verdict(field, lim, cfg.kneser_n, side,
                                margin=cfg.margin)
            verdicts[side] = _kneser_doc(kv)
            if gap is None:
                agreement[side] = None
                continue
            edge, sweep_side = ((gap[1], "below") if side == "plus"
                                else (gap[0], "above"))
            ev = accumulation_sweep(field, edge, sweep_side,
                                    levels=cfg.trunc_levels,
                                    density=cfg.density)
            corroboration[side] = _sweep_doc(ev)
            mapped = _SWEEP_TO_KNESER.get(ev.verdict)
            if kv.verdict == "inconclusive" or mapped is None:
                agreement[side] = None
            else:
                agreement[side] = (mapped == kv.verdict)
        return ({"status": "ok", "n": cfg.kneser_n, "verdicts": verdicts,
                 "sweeps": corroboration, "sweep_agreement": agreement}, verdicts)

    gate("kneser", sec_kneser)

    budget = None

    def sec_budget():
        nonlocal budget
        gap = None
        if essential is not None and essential.available:
            # edges directly from the piece bands; equal edges are admissible
            gap_lo = -essential.sigma_h_minus.infimum
            gap_hi = essential.sigma_h_plus.infimum
            if gap_lo > gap_hi:
                raise HypothesisError(
                    "essential spectra overlap; no budget window")
            gap = (gap_lo, gap_hi)
        budget = kappa_budget(field, eta=cfg.eta, config=cfg, gap=gap)
        return _budget_doc(budget), budget

    gate("budget", sec_budget)

    def sec_pair_bound():
        if budget is None:
            return _skipped("budget unavailable"), None
        if not budget.available:
            return _skipped(f"budget did not stabilize: {budget.reason}"), None
        if scan is None:
            return _skipped("no spectrum scan"), None
        pb = pair_bound_check(budget, scan)
        return ({"status": "ok", "passed": pb.passed, "kappa0": pb.kappa0,
                 "pair_counts": [list(c) for c in pb.pair_counts],
                 "offending_level": pb.offending_level,
                 "skipped_levels": list(pb.skipped_levels)}, pb)

    gate("pair_bound", sec_pair_bound)

    def sec_counts():
        if scan is None or scan.gap is None:
            return _skipped("no essential gap"), None
        if budget is None or not budget.available:
            return _skipped("budget unavailable"), None
        alpha, beta = field.sign_window
        top = scan.levels[-1]
        n_h0 = top.piece_gap_counts.get("total")
        if n_h0 is None:
            return _skipped("no decomposed counts at the top level"), None
        variant = select_variant(alpha == beta, inside_gap=True)
        est = count_estimate(scan.gap, n_h0, budget.kappa, variant)
        dense = [lv for lv in scan.levels if lv.dense]
        if not dense:
            return _skipped("no dense level to measure the count"), None
        measured = int(dense[-1].real_in_gap.shape[0])
        return ({"status": "ok", "interval": list(est.interval),
                 "n_h0": est.n_h0, "kappa": est.kappa, "variant": est.variant,
                 "bound": est.bound, "measured": measured,
                 "level": dense[-1].X, "satisfied": measured <= est.bound}, est)

    gate("counts", sec_counts)

    def sec_structural():
        alpha, beta = field.sign_window
        X = max(20.0, abs(alpha) + 5.0, abs(beta) + 5.0)
        grid = build_grid(-X, X, cfg.density, insert=(alpha, beta))
        full = assemble_operator(field, grid, "K")
        block = assemble_operator(field, grid, "H0", alpha=alpha, beta=beta)
        diff = blockdiag_difference(full, block)
        t_rank = numerical_rank(diff)
        bound = 2 if alpha == beta else 4

        rho = np.asarray(full.rho)
        R = np.diag(rho)
        lam = 1j
        D = (np.linalg.solve(full.dense_T() - lam * R, R)
             - np.linalg.solve(block.dense_T() - lam * R, R))
        sv = np.linalg.svd(D, compute_uv=False)
        res_rank = numerical_rank(D)
        ratio = float(sv[bound] / sv[0]) if sv.shape[0] > bound and sv[0] > 0 \
            else 0.0

        eta = 0.0
        gap = essential.fundamental_gap if essential is not None else None
        if gap is not None:
            eta = 0.5 * (gap[0] + gap[1])

        def n_minus(op):
            s = eta
            for _ in range(3):
                try:
                    return inertia_count(op.d, op.e, op.rho, s).n_minus
                except FactorizationBreakdown:
                    s += 1e-10 * max(1.0, abs(s))
            return inertia_count(op.d, op.e, op.rho, s).n_minus

        shift = abs(n_minus(full) - n_minus(block))
        return ({"status": "ok", "level": X, "eta": eta,
                 "t_rank": int(t_rank), "resolvent_rank": int(res_rank),
                 "rank_bound": bound, "sigma_ratio": ratio,
                 "inertia_shift": int(shift),
                 "rank_ok": bool(res_rank <= bound),
                 "inertia_ok": bool(shift <= t_rank)}, None)

    gate("structural", sec_structural)

    ordered = {name: out[name] for name in _SECTIONS if name in out}
    cfg_doc = {k: _san(getattr(cfg, k)) for k in _NUMERIC_KEYS}
    problem = dict(spec.doc)
    problem["resolved_sign_window"] = (None if field.sign_window is None
                                       else list(field.sign_window))
    return AnalysisReport(REPORT_SCHEMA, {"name": "kreinspec",
                                          "version": __version__},
                          problem, cfg_doc, _san(ordered))


def serialize_report(report, fmt="json"):
    """Stable bytes: schema-tagged JSON, or one eigenvalue per CSV row."""
    if fmt in ("json", "structured-text"):
        text = json.dumps(report.to_doc(), sort_keys=True, indent=2)
        return (text + "\n").encode("utf-8")
    if fmt in ("csv", "csv-eigenvalues"):
        lines = ["level,re,im,residual"]
        spectra = report.sections.get("spectra", {})
        for lv in spectra.get("levels", []):
            X = lv["X"]
            for re, res in zip(lv["real"], lv["residual_real"]):
                lines.append(f"{X!r},{re!r},{0.0!r},{res!r}")
            for (re, im), res in zip(lv["pairs"], lv["residual_pairs"]):
                lines.append(f"{X!r},{re!r},{im!r},{res!r}")
                lines.append(f"{X!r},{re!r},{-im!r},{res!r}")
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValidationError(f"unknown format {fmt!r}")


def deserialize_report(data):
    return AnalysisReport.from_doc(json.loads(data.decode("utf-8")))


_COMMAND_SECTIONS = {
    "analyze": _SECTIONS,
    "essential": ("hypotheses", "essential"),
    "bands": ("hypotheses", "essential"),
    "kneser": ("hypotheses", "essential", "kneser"),
    "budget": ("hypotheses", "essential", "budget"),
    "eig": ("hypotheses", "essential", "spectra"),
    "compare": ("hypotheses", "comparison"),
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="kreinspec",
        description="Spectral analysis of singular indefinite "
                    "Sturm-Liouville problems")
    parser.add_argument("--version", action="version",
                        version=f"kreinspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("analyze", "full pipeline"),
            ("essential", "essential spectra and gaps"),
            ("bands", "periodic band structure"),
            ("kneser", "gap-edge accumulation verdicts"),
            ("budget", "negative-squares budget"),
            ("eig", "discrete spectra per truncation level"),
            ("compare", "base vs perturbed coefficient triples")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("problem", help="problem file (JSON)")
        p.add_argument("--out", help="write the report to this path")
        p.add_argument("--format", default="json",
                       choices=["json", "structured-text", "csv",
                                "csv-eigenvalues"])
        p.add_argument("--trunc", help="comma-separated truncation levels")
        p.add_argument("--density", type=float)
        p.add_argument("--eta", type=float)
        p.add_argument("--n", type=int, dest="kneser_n",
                       help="iterated-log order")
        p.add_argument("--margin", type=float)
        p.add_argument("--override-hypotheses", action="store_true")
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        spec = load_problem(args.problem)
        trunc = None
        if args.trunc:
            try:
                trunc = tuple(float(v) for v in args.trunc.split(","))
            except ValueError:
                raise ValidationError(
                    f"--trunc: cannot parse {args.trunc!r}") from None
        spec = spec.with_numerics(trunc_levels=trunc, density=args.density,
                                  eta=args.eta, kneser_n=args.kneser_n,
                                  margin=args.margin)
        if args.command == "bands":
            if not any(isinstance(d, PeriodDecl)
                       for d in spec.endpoints.values()):
                raise ValidationError(
                    "bands needs at least one periodic endpoint declaration")
        if args.command == "compare" and spec.perturbed is None:
            raise ValidationError("compare needs a perturbed triple")
        report = run_pipeline(spec, sections=_COMMAND_SECTIONS[args.command],
                              override_hypotheses=args.override_hypotheses)
        payload = serialize_report(report, args.format)
    except (ValidationError, EvalDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KreinspecError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
    return 0


if __name__ == "__main__":
    sys.exit(main())
