"""Parser tests for the little potential-expression language."""

import math

import pytest

from galimech.harness.expressions import ExpressionError, compile_expression


def ev(text, t=0.0, q1=0.0, q2=0.0, q3=0.0):
    return compile_expression(text)(t, q1, q2, q3)


class TestAtoms:
    def test_integer_literal(self):
        assert ev("3") == 3.0

    def test_float_literal(self):
        assert ev("2.5e-1") == 0.25

    def test_pi(self):
        assert ev("pi") == math.pi

    def test_variables(self):
        assert ev("t + 2*q1 - q3", t=1.0, q1=2.0, q3=5.0) == 0.0

    def test_whitespace_is_free(self):
        assert ev("  1+ 2 \t* 3 ") == 7.0


class TestPrecedence:
    def test_product_binds_tighter(self):
        assert ev("2+3*4") == 14.0
        assert ev("2*3+4") == 10.0

    def test_parens_override(self):
        assert ev("(2+3)*4") == 20.0

    def test_subtraction_left_associates(self):
        assert ev("2-3-4") == -5.0

    def test_division_left_associates(self):
        assert ev("12/4/3") == 1.0

    def test_power_right_associates(self):
        assert ev("2^3^2") == 512.0

    def test_power_binds_above_unary_minus(self):
        # Conventional reading: -x^2 is -(x^2).
        assert ev("-2^2") == -4.0

    def test_unary_minus_after_operator(self):
        assert ev("2*-3") == -6.0

    def test_double_negation(self):
        assert ev("--4") == 4.0


class TestFunctions:
    def test_known_functions(self):
        assert ev("sin(0)") == 0.0
        assert ev("cos(0)") == 1.0
        assert ev("exp(1)") == pytest.approx(math.e, rel=1e-15)

    def test_nesting(self):
        assert ev("sin(cos(q1))", q1=0.3) == pytest.approx(
            math.sin(math.cos(0.3)), rel=1e-15)

    def test_harmonic_like_expression(self):
        got = ev("0.5*3*((q1-1)^2 + q2^2)", q1=2.0, q2=0.5)
        assert got == pytest.approx(0.5 * 3 * (1.0 + 0.25), rel=1e-15)

    def test_function_needs_parens(self):
        with pytest.raises(ExpressionError):
            compile_expression("sin 3")

    def test_bare_function_name(self):
        with pytest.raises(ExpressionError):
            compile_expression("sin")


class TestRejection:
    @pytest.mark.parametrize("bad", [
        "", "   ", "2+", "(2", "2)", "1 2", "foo(1)", "q4", "2**3",
    ])
    def test_malformed(self, bad):
        with pytest.raises(ExpressionError):
            compile_expression(bad)

    def test_bad_character_names_position(self):
        with pytest.raises(ExpressionError) as info:
            compile_expression("2$3")
        assert "1" in str(info.value)

    def test_is_a_value_error(self):
        # So callers can catch it generically.
        assert issubclass(ExpressionError, ValueError)

    def test_no_python_semantics_leak(self):
        with pytest.raises(ExpressionError):
            compile_expression("__import__('os')")
