from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meroreduce.exprparse import (ExprDivisionByZero, ExprDomainError, ExprEvalError, ExprSyntaxError,
                                  UnknownIdentifierError, eval_constant, eval_expr, parse_expression,
                                  to_poly, to_source)
from meroreduce.polyalg import EXACT, FLOAT, Poly


def ev(src, x=0.0):
    return eval_expr(parse_expression(src), x)


class TestExamples:
    def test_gaussian(self):
        assert ev("exp(-x^2)", 0.0) == 1.0

    def test_x_csch(self):
        assert ev("x*csch(x)", 1.0) == pytest.approx(0.8509181282, abs=1e-10)

    def test_truncated(self):
        with pytest.raises(ExprSyntaxError) as exc:
            parse_expression("2*")
        assert exc.value.offset == 2

    def test_pi(self):
        assert ev("pi") == math.pi

    def test_map(self):
        assert ev("x - 1/x", 2.0) == 1.5

    def test_division_by_zero(self):
        with pytest.raises(ExprDivisionByZero):
            ev("1/x", 0.0)

    def test_domain(self):
        with pytest.raises(ExprDomainError):
            ev("sqrt(x)", -1.0)

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError) as exc:
            parse_expression("x + foo(x)")
        assert exc.value.offset == 4

    def test_bad_character(self):
        with pytest.raises(ExprSyntaxError) as exc:
            parse_expression("x $ 2")
        assert exc.value.offset == 2

    def test_unbalanced(self):
        with pytest.raises(ExprSyntaxError):
            parse_expression("(x + 1")

    def test_vectorized(self):
        np.testing.assert_allclose(ev("x^2 + 1", np.array([0.0, 2.0])), [1.0, 5.0])
        assert ev("3", np.array([1.0, 2.0])).shape == (2,)


class TestPrecedence:
    def test_mul_before_add(self):
        assert ev("2+3*4") == 14

    def test_unary_minus_below_power(self):
        assert ev("-x^2", 3.0) == -9.0

    def test_power_right_associative(self):
        assert ev("2^3^2") == 512

    def test_left_associative_division(self):
        assert ev("8/4/2") == 1.0

    def test_negative_exponent(self):
        assert ev("2^-1") == 0.5


class TestConversions:
    def test_to_poly_exact(self):
        assert to_poly(parse_expression("(x+1)^2/2"), EXACT) == Poly.new(
            [Fraction(1, 2), 1, Fraction(1, 2)])

    def test_to_poly_float_pi(self):
        p = to_poly(parse_expression("x^2 + 2*pi"), FLOAT)
        assert p.coeffs == pytest.approx((2 * math.pi, 0.0, 1.0))

    def test_to_poly_rejects_non_polynomial(self):
        for src in ["1/x", "exp(x)", "x^0.5", "x^x"]:
            with pytest.raises(ExprEvalError):
                to_poly(parse_expression(src), FLOAT)

    def test_to_poly_exact_rejects_pi(self):
        with pytest.raises(ExprEvalError):
            to_poly(parse_expression("pi*x"), EXACT)

    def test_constants(self):
        assert eval_constant(parse_expression("1/3")) == Fraction(1, 3)
        assert eval_constant(parse_expression("2*pi")) == 2 * math.pi
        assert eval_constant(parse_expression("0.1")) == Fraction(1, 10)
        with pytest.raises(ExprEvalError):
            eval_constant(parse_expression("2*x"))


_leaves = st.one_of(st.just("x"), st.just("pi"),
                    st.floats(0.01, 9.0).map(lambda v: f"{v:.3g}"))
_exprs = st.recursive(
    _leaves,
    lambda kids: st.one_of(
        st.tuples(kids, st.sampled_from(["+", "-", "*"]), kids).map(lambda t: f"{t[0]} {t[1]} {t[2]}"),
        kids.map(lambda e: f"-{e}"),
        kids.map(lambda e: f"({e})"),
        kids.map(lambda e: f"sin({e})"),
        kids.map(lambda e: f"exp(-({e})^2)"),
        kids.map(lambda e: f"({e})^2"),
    ),
    max_leaves=8,
)


class TestRoundTrip:
    @settings(max_examples=100)
    @given(_exprs)
    def test_print_reparse(self, src):
        e = parse_expression(src)
        e2 = parse_expression(to_source(e))
        xs = np.array(random.Random(len(src)).sample(range(-500, 500), 100)) / 100.0
        a, b = eval_expr(e, xs), eval_expr(e2, xs)
        np.testing.assert_array_equal(a, b)
