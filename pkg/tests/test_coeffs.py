"""Sign-window detection, tail-limit certification, hypotheses, comparisons."""

import math

import numpy as np
import pytest

from kreinspec.coeff_model import (
    CoefficientField,
    LimitsDecl,
    PeriodDecl,
    UnknownDecl,
    check_comparison_conditions,
    check_hypotheses,
    detect_sign_window,
    estimate_endpoint_limits,
    field_from_texts,
)
from kreinspec.errors import HypothesisError, ValidationError
from kreinspec.expr import parse_expression


def make_field(r, p="1", q="0", window="auto", **kw):
    return field_from_texts(r, p, q, sign_window=window, **kw)


class TestSignWindow:
    def test_sign_weight_gives_degenerate_window(self):
        assert detect_sign_window(parse_expression("sgn(x)")) == (0.0, 0.0)

    def test_smooth_crossing_is_bisected_and_snapped(self):
        alpha, beta = detect_sign_window(parse_expression("x/(1+abs(x))"))
        assert alpha == 0.0 and beta == 0.0

    def test_shifted_crossing(self):
        alpha, beta = detect_sign_window(parse_expression("x - 2"))
        assert alpha == pytest.approx(2.0, abs=1e-12)
        assert alpha == beta

    def test_multiple_changes_span_the_window(self):
        r = parse_expression("pw{[-inf,-1): -1; [-1,-0.5): 1; [-0.5,0): -1; [0,inf): 1;}")
        alpha, beta = detect_sign_window(r)
        assert alpha == pytest.approx(-1.0, abs=1e-12)
        assert beta == 0.0

    def test_oscillating_weight_rejected(self):
        with pytest.raises(HypothesisError, match="persist"):
            detect_sign_window(parse_expression("sin(x)"))

    def test_definite_weight_rejected(self):
        with pytest.raises(HypothesisError, match="eventually negative"):
            detect_sign_window(parse_expression("1"))

    def test_reversed_signs_rejected(self):
        with pytest.raises(HypothesisError, match="eventually positive"):
            detect_sign_window(parse_expression("-sgn(x)"))


class TestFieldValidation:
    def test_window_must_sit_inside_the_interval(self):
        with pytest.raises(ValidationError):
            CoefficientField(parse_expression("sgn(x)"), parse_expression("1"),
                             parse_expression("0"), a=0.0, b=10.0,
                             sign_window=(-1.0, -1.0))

    def test_degenerate_interval_rejected(self):
        with pytest.raises(ValidationError):
            CoefficientField(parse_expression("sgn(x)"), parse_expression("1"),
                             parse_expression("0"), a=2.0, b=2.0)

    def test_nonpositive_p_rejected_on_samples(self):
        f = make_field("sgn(x)", p="x^2 - 4", window=(0.0, 0.0))
        with pytest.raises(HypothesisError, match="p must be positive"):
            f.validate_samples(np.array([0.5, 1.0]))

    def test_wrong_sign_outside_window_rejected(self):
        f = CoefficientField(parse_expression("-sgn(x)"), parse_expression("1"),
                             parse_expression("0"), sign_window=(0.0, 0.0))
        with pytest.raises(HypothesisError, match="positive right of"):
            f.validate_samples(np.array([1.0, 2.0]))
        with pytest.raises(HypothesisError, match="negative left of"):
            f.validate_samples(np.array([-2.0, -1.0]))


class TestEndpointLimits:
    def test_slow_coulomb_tail_certifies_without_snapping(self, coulomb_field):
        est = estimate_endpoint_limits(coulomb_field)
        assert est.ok
        lim = est.limits
        assert (lim.r_minus, lim.r_plus) == (-1.0, 1.0)
        assert (lim.p_minus, lim.p_plus) == (1.0, 1.0)
        # the 1/x tail still carries its last-sample residue: small, nonzero
        assert lim.q_plus == lim.q_minus
        assert 0 < abs(lim.q_plus) < 1e-6

    def test_quadratic_decay_snaps_to_exact_zero(self, kneser_c1_field):
        est = estimate_endpoint_limits(kneser_c1_field)
        assert est.ok
        assert est.limits.q_plus == 0.0
        assert est.limits.q_minus == 0.0

    def test_snap_applies_at_certification_resolution(self):
        # a constant below the snap threshold is indistinguishable from 0 here
        f = make_field("sgn(x)", q="1e-10", window=(0.0, 0.0))
        assert estimate_endpoint_limits(f).values["q_plus"] == 0.0

    def test_p_is_never_snapped(self):
        f = make_field("sgn(x)", p="1e-10", q="0", window=(0.0, 0.0))
        assert estimate_endpoint_limits(f).values["p_plus"] == 1e-10

    def test_oscillating_q_fails_the_cauchy_test(self):
        f = make_field("sgn(x)", q="cos(x)", window=(0.0, 0.0))
        est = estimate_endpoint_limits(f)
        assert not est.ok
        assert "q_plus" in est.failed and "q_minus" in est.failed
        assert est.limits is None

    def test_piecewise_constant_is_exact(self):
        f = make_field("pw{[-inf,0): -2; [0,inf): 3;}", q="5", window=(0.0, 0.0))
        est = estimate_endpoint_limits(f)
        assert est.ok
        assert est.values["r_minus"] == -2.0
        assert est.values["r_plus"] == 3.0
        assert est.values["q_plus"] == 5.0

    def test_domain_error_marks_the_side_failed(self):
        f = make_field("sgn(x)", q="log(x)", window=(0.0, 0.0))
        est = estimate_endpoint_limits(f)
        assert "q_minus" in est.failed

    def test_inadmissible_certified_signs_raise(self):
        f = CoefficientField(parse_expression("-sgn(x)"), parse_expression("1"),
                             parse_expression("0"))
        with pytest.raises(HypothesisError, match="inadmissible signs"):
            estimate_endpoint_limits(f)


class TestHypotheses:
    def test_every_clause_passes_for_a_decaying_potential(self, coulomb_field):
        rep = check_hypotheses(coulomb_field)
        assert rep.h1_pass and rep.h3_pass and rep.all_pass
        assert rep.h2_status_minus == "certified-limits"
        assert rep.h2_status_plus == "certified-limits"

    def test_growing_ratio_fails_boundedness_with_witnesses(self):
        f = make_field("sgn(x)", q="x", window=(0.0, 0.0))
        rep = check_hypotheses(f)
        assert not rep.h3_pass
        assert len(rep.h3_witnesses) == 2
        assert not rep.all_pass
        # limits cannot be certified when the ratio diverges
        assert rep.h2_status_plus == "assumed"

    def test_definite_weight_fails_the_sign_clause(self):
        f = CoefficientField(parse_expression("1"), parse_expression("1"),
                             parse_expression("0"))
        rep = check_hypotheses(f)
        assert not rep.h1_pass
        assert rep.h1_witnesses
        # limit certification is impossible with inadmissible signs
        assert rep.h2_status_minus == "assumed"

    def test_pinned_window_is_checked_against_samples(self):
        f = CoefficientField(parse_expression("-sgn(x)"), parse_expression("1"),
                             parse_expression("0"), sign_window=(0.0, 0.0))
        rep = check_hypotheses(f)
        assert not rep.h1_pass

    def test_periodic_declaration_reports_its_own_regime(self, periodic_cosine_field):
        rep = check_hypotheses(periodic_cosine_field)
        assert rep.h2_status_minus == "certified-periodic"
        assert rep.h2_status_plus == "certified-periodic"

    def test_unknown_declaration_stays_assumed(self):
        f = make_field("sgn(x)", window=(0.0, 0.0),
                       minus_meta=UnknownDecl(), plus_meta=LimitsDecl())
        rep = check_hypotheses(f)
        assert rep.h2_status_minus == "assumed"
        assert rep.h2_status_plus == "certified-limits"


class TestComparisons:
    def base(self):
        return make_field("sgn(x)", q="-1/(1+abs(x))", window=(0.0, 0.0))

    def test_gaussian_bump_passes_every_mode(self):
        c0 = self.base()
        c1 = make_field("sgn(x)", q="-1/(1+abs(x)) + exp(-(x^2))", window=(0.0, 0.0))
        rep = check_comparison_conditions(c0, c1, "limits")
        assert rep.passed and rep.value < 1e-6

        rep = check_comparison_conditions(c0, c1, "L1")
        assert rep.passed
        # integral of exp(-x^2) over the line; oracle: sqrt(pi)
        assert rep.value == pytest.approx(1.7724538509055159, abs=1e-6)

        rep = check_comparison_conditions(c0, c1, "first_moment")
        assert rep.passed
        # integral of |x| exp(-x^2): exactly 1
        assert rep.value == pytest.approx(1.0, abs=1e-6)

    def test_slow_tail_passes_limits_but_not_integrability(self):
        c0 = self.base()
        c1 = make_field("sgn(x)", q="-1/(1+abs(x)) + 1/(1+abs(x))",
                        window=(0.0, 0.0))
        assert check_comparison_conditions(c0, c1, "limits").passed
        rep = check_comparison_conditions(c0, c1, "L1")
        assert not rep.passed
        assert "not integrable" in rep.reason

    def test_rescaled_weight_fails_limits_mode(self):
        c0 = self.base()
        c1 = make_field("2*sgn(x)", q="-1/(1+abs(x))", window=(0.0, 0.0))
        rep = check_comparison_conditions(c0, c1, "limits")
        assert not rep.passed
        assert rep.detail["r_ratio_plus"] == pytest.approx(1.0)

    def test_interval_mismatch_rejected(self):
        c0 = self.base()
        c1 = make_field("sgn(x)", q="0", window=None, a=0.0, b=10.0)
        with pytest.raises(ValidationError, match="share the interval"):
            check_comparison_conditions(c0, c1, "limits")

    def test_unknown_mode_rejected(self):
        c0 = self.base()
        with pytest.raises(ValidationError, match="unknown comparison mode"):
            check_comparison_conditions(c0, c0, "L2")
