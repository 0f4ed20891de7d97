from fractions import Fraction

import pytest
import sympy

from hermden.laurent import LaurentQ, QXPoly, RationalFunctionQ


def test_minus_q_powers():
    assert LaurentQ.minus_q_pow(3) == LaurentQ.q_pow(3, -1)
    assert LaurentQ.minus_q_pow(-2) == LaurentQ.q_pow(-2)


def test_arithmetic_and_evaluation():
    a = LaurentQ({1: 1, -1: 2})
    b = LaurentQ.const(3) - LaurentQ.q_pow(1)
    assert (a * b).evaluate(3) == a.evaluate(3) * b.evaluate(3)
    assert (a + b - a) == b
    assert LaurentQ.q_pow(2, 5) ** -1 == LaurentQ.q_pow(-2, Fraction(1, 5))
    with pytest.raises(ValueError):
        (a + 1) ** -1


def test_rational_function_is_reduced():
    one = LaurentQ.const(1)
    r = RationalFunctionQ(one - LaurentQ.q_pow(-2), one - LaurentQ.q_pow(-1))
    assert r == RationalFunctionQ(LaurentQ.q_pow(1) + 1, LaurentQ.q_pow(1))
    q = sympy.Symbol("q")
    assert r.denominator.as_expr() == q
    assert r.evaluate(3) == Fraction(4, 3)


def test_rational_function_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        RationalFunctionQ(1) / 0


def test_qxpoly_scale_and_derivative():
    F = QXPoly({0: 1, 1: -1})
    assert F.derivative_at_one() == LaurentQ.const(1)
    G = F.scale_x(1)   # 1 + q X
    assert G.coeffs[1] == LaurentQ.q_pow(1)
    assert (F * G).value_at_one() == F.value_at_one() * G.value_at_one()
