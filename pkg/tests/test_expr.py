"""Expression grammar, evaluation semantics, and domain-error discipline."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kreinspec.errors import EvalDomainError, ExprSyntaxError
from kreinspec.expr import parse_expression


def ev(text, x):
    return parse_expression(text)(x)


class TestGrammar:
    def test_number_literal_forms(self):
        assert ev("2", 0.0) == 2.0
        assert ev("2.5e-3", 0.0) == 2.5e-3
        assert ev(".5", 0.0) == 0.5

    def test_precedence_mul_over_add(self):
        assert ev("1 + 2*3", 0.0) == 7.0

    def test_power_binds_tighter_than_mul(self):
        assert ev("2*x^2", 3.0) == 18.0

    def test_unary_minus_is_part_of_the_base(self):
        # factor := base ^ number and base := "-" base, so -x^2 = (-x)^2
        assert ev("-x^2", 3.0) == 9.0
        assert ev("-(x^2)", 3.0) == -9.0

    def test_right_to_left_sign_chain(self):
        assert ev("--x", 4.0) == 4.0

    def test_parenthesized_subtraction(self):
        assert ev("1 - 4*exp(-((x-3)^2))", 3.0) == pytest.approx(-3.0)

    def test_division_chain_left_assoc(self):
        assert ev("8/4/2", 0.0) == 1.0

    def test_syntax_error_position_is_one_based(self):
        with pytest.raises(ExprSyntaxError) as exc:
            parse_expression("1+*x")
        assert exc.value.position == 3

    def test_unknown_function_rejected(self):
        with pytest.raises(ExprSyntaxError):
            parse_expression("tan(x)")

    def test_trailing_garbage_rejected(self):
        with pytest.raises(ExprSyntaxError):
            parse_expression("x + 1 )")

    def test_empty_input_rejected(self):
        with pytest.raises(ExprSyntaxError):
            parse_expression("   ")

    def test_round_trip_through_to_text(self):
        e = parse_expression("1 - 4*exp(-((x-3)^2))")
        again = parse_expression(e.to_text())
        xs = np.linspace(-5, 5, 101)
        np.testing.assert_allclose(again(xs), e(xs), rtol=0, atol=0)


class TestFunctions:
    def test_coulomb_value_at_origin(self):
        assert ev("-1/(1+abs(x))", 0.0) == -1.0

    def test_sgn_convention_at_zero(self):
        assert ev("sgn(x)", 0.0) == 1.0
        assert ev("sgn(x)", -3.0) == -1.0
        assert ev("sgn(x)", 2.0) == 1.0

    def test_sech_matches_reciprocal_cosh(self):
        xs = np.linspace(-20, 20, 41)
        np.testing.assert_allclose(ev("sech(x)", xs), 1.0 / np.cosh(xs),
                                   rtol=1e-15)

    def test_sech_is_overflow_safe_for_huge_arguments(self):
        # cosh(1000) overflows float64; sech must underflow to 0 instead
        out = ev("sech(x)", np.array([1000.0, -1000.0]))
        np.testing.assert_allclose(out, [0.0, 0.0], atol=0)

    def test_vectorized_matches_scalar(self):
        e = parse_expression("exp(-abs(x))*cos(x) + x^3")
        xs = np.linspace(-3, 3, 37)
        np.testing.assert_allclose(e(xs), [e(float(x)) for x in xs], rtol=1e-15)

    def test_scalar_in_scalar_out(self):
        assert isinstance(ev("x^2", 2.0), float)


class TestDomainErrors:
    def test_division_by_zero(self):
        with pytest.raises(EvalDomainError):
            ev("1/x", 0.0)

    def test_division_by_zero_inside_array(self):
        with pytest.raises(EvalDomainError):
            ev("1/x", np.array([1.0, 0.0, 2.0]))

    def test_log_of_nonpositive(self):
        with pytest.raises(EvalDomainError):
            ev("log(x)", -1.0)
        with pytest.raises(EvalDomainError):
            ev("log(x)", 0.0)

    def test_fractional_power_of_negative(self):
        with pytest.raises(EvalDomainError):
            ev("x^0.5", -4.0)

    def test_negative_power_of_zero(self):
        with pytest.raises(EvalDomainError):
            ev("x^-2", 0.0)

    def test_overflow_never_leaks_inf(self):
        with pytest.raises(EvalDomainError):
            ev("exp(x)", 1000.0)

    def test_integer_power_of_negative_is_fine(self):
        assert ev("x^3", -2.0) == -8.0


class TestPiecewise:
    def test_half_open_pieces(self):
        e = parse_expression("pw{[-inf,0): -1; [0,inf): 1;}")
        assert e(-1e-12) == -1.0
        assert e(0.0) == 1.0

    def test_multiwindow_weight_profile(self):
        e = parse_expression("pw{[-inf,-1): -1; [-1,-0.5): 1; [-0.5,0): -1; [0,inf): 1;}")
        xs = np.array([-2.0, -1.0, -0.75, -0.5, -0.25, 0.0, 3.0])
        np.testing.assert_allclose(e(xs), [-1, 1, 1, -1, -1, 1, 1])

    def test_gap_in_coverage_raises_on_eval(self):
        e = parse_expression("pw{[-inf,0): -1; [1,inf): 1;}")
        with pytest.raises(EvalDomainError):
            e(0.5)

    def test_overlap_rejected_at_parse_time(self):
        with pytest.raises(ExprSyntaxError):
            parse_expression("pw{[-inf,1): -1; [0,inf): 1;}")

    def test_empty_interval_rejected(self):
        with pytest.raises(ExprSyntaxError):
            parse_expression("pw{[2,2): 1;}")

    def test_unterminated_block_rejected(self):
        with pytest.raises(ExprSyntaxError):
            parse_expression("pw{[-inf,0): -1;")

    def test_pieces_may_be_given_out_of_order(self):
        e = parse_expression("pw{[0,inf): 1; [-inf,0): -1;}")
        assert e(-1.0) == -1.0
        assert e(1.0) == 1.0


@given(st.floats(min_value=-50.0, max_value=50.0, allow_nan=False))
def test_property_polynomial_matches_numpy(x):
    e = parse_expression("3*x^2 - 2*x + 1")
    assert e(x) == pytest.approx(3 * x * x - 2 * x + 1, rel=1e-12, abs=1e-9)


@given(st.floats(min_value=-700.0, max_value=700.0, allow_nan=False))
def test_property_sech_bounded_by_one(x):
    v = parse_expression("sech(x)")(x)
    assert 0.0 <= v <= 1.0
