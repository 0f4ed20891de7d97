"""Exact Laurent polynomials in a formal ``q`` and polynomials over them."""

from __future__ import annotations

from fractions import Fraction
from functools import reduce

import sympy

_QSYM = sympy.Symbol("q")


class LaurentQ:
    """A finitely supported Laurent polynomial ``sum c_e q^e`` with rational ``c_e``."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        t = {}
        for e, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                t[int(e)] = c
        self.terms = t

    @classmethod
    def const(cls, c) -> "LaurentQ":
        return cls({0: c})

    @classmethod
    def q_pow(cls, e: int, c=1) -> "LaurentQ":
        return cls({e: c})

    @classmethod
    def minus_q_pow(cls, e: int) -> "LaurentQ":
        """``(-q)^e``."""
        return cls({e: -1 if e % 2 else 1})

    @classmethod
    def coerce(cls, x) -> "LaurentQ":
        return x if isinstance(x, LaurentQ) else cls.const(x)

    def __add__(self, other):
        o = LaurentQ.coerce(other)
        t = dict(self.terms)
        for e, c in o.terms.items():
            t[e] = t.get(e, 0) + c
        return LaurentQ(t)

    __radd__ = __add__

    def __neg__(self):
        return LaurentQ({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-LaurentQ.coerce(other))

    def __rsub__(self, other):
        return LaurentQ.coerce(other) - self

    def __mul__(self, other):
        o = LaurentQ.coerce(other)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                t[e1 + e2] = t.get(e1 + e2, 0) + c1 * c2
        return LaurentQ(t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (e, c), = self.terms.items()
            return LaurentQ({-e * (-k): Fraction(1) / c ** (-k)})
        return reduce(lambda a, b: a * b, [self] * k, LaurentQ.const(1))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentQ.const(other)
        return isinstance(other, LaurentQ) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def evaluate(self, q) -> Fraction:
        q = Fraction(q)
        return sum((c * q ** e for e, c in self.terms.items()), Fraction(0))

    def to_sympy(self):
        return sum((sympy.Rational(c.numerator, c.denominator) * _QSYM ** e
                    for e, c in self.terms.items()), sympy.Integer(0))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            if e == 0:
                parts.append(str(c))
            else:
                parts.append(f"{c}*q^{e}" if c != 1 else f"q^{e}")
        return " + ".join(parts)


class RationalFunctionQ:
    """A reduced quotient of polynomials in ``q`` with monic denominator."""

    __slots__ = ("expr",)

    def __init__(self, num, den=1):
        if isinstance(num, LaurentQ):
            num = num.to_sympy()
        if isinstance(den, LaurentQ):
            den = den.to_sympy()
        expr = sympy.cancel(sympy.together(sympy.sympify(num) / sympy.sympify(den)))
        self.expr = expr

    @property
    def numerator(self):
        n, d = sympy.fraction(self.expr)
        lc = sympy.Poly(d, _QSYM).LC()
        return sympy.Poly(sympy.expand(n / lc), _QSYM)

    @property
    def denominator(self):
        n, d = sympy.fraction(self.expr)
        return sympy.Poly(d, _QSYM).monic()

    @staticmethod
    def _c(x):
        if isinstance(x, RationalFunctionQ):
            return x.expr
        if isinstance(x, LaurentQ):
            return x.to_sympy()
        if isinstance(x, Fraction):
            return sympy.Rational(x.numerator, x.denominator)
        return sympy.sympify(x)

    def __add__(self, o):
        return RationalFunctionQ(self.expr + self._c(o))

    __radd__ = __add__

    def __sub__(self, o):
        return RationalFunctionQ(self.expr - self._c(o))

    def __rsub__(self, o):
        return RationalFunctionQ(self._c(o) - self.expr)

    def __mul__(self, o):
        return RationalFunctionQ(self.expr * self._c(o))

    __rmul__ = __mul__

    def __truediv__(self, o):
        d = self._c(o)
        if d == 0:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunctionQ(self.expr / d)

    def __rtruediv__(self, o):
        return RationalFunctionQ(self._c(o) / self.expr)

    def __neg__(self):
        return RationalFunctionQ(-self.expr)

    def __eq__(self, other):
        try:
            return sympy.simplify(self.expr - self._c(other)) == 0
        except (TypeError, sympy.SympifyError):
            return NotImplemented

    def __hash__(self):
        return hash(sympy.srepr(self.expr))

    def is_zero(self) -> bool:
        return self.expr == 0

    def evaluate(self, q) -> Fraction:
        v = sympy.Rational(self.expr.subs(_QSYM, sympy.Rational(Fraction(q).numerator,
                                                                 Fraction(q).denominator)))
        return Fraction(int(v.p), int(v.q))

    def __repr__(self):
        return str(self.expr)


class QXPoly:
    """A polynomial in ``X`` whose coefficients are :class:`LaurentQ`."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        c = {}
        for j, v in (coeffs or {}).items():
            v = LaurentQ.coerce(v)
            if v:
                c[int(j)] = v
        self.coeffs = c

    @classmethod
    def const(cls, v) -> "QXPoly":
        return cls({0: v})

    def __mul__(self, other):
        if not isinstance(other, QXPoly):
            other = QXPoly.const(other)
        out = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                out[i + j] = out.get(i + j, LaurentQ()) + a * b
        return QXPoly(out)

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, QXPoly):
            other = QXPoly.const(other)
        out = dict(self.coeffs)
        for j, b in other.coeffs.items():
            out[j] = out.get(j, LaurentQ()) + b
        return QXPoly(out)

    def __eq__(self, other):
        return isinstance(other, QXPoly) and self.coeffs == other.coeffs

    def scale_x(self, s: int) -> "QXPoly":
        """Substitute ``X -> (-q)^s X``."""
        return QXPoly({j: c * LaurentQ.minus_q_pow(s * j) for j, c in self.coeffs.items()})

    @property
    def degree(self) -> int:
        return max(self.coeffs, default=0)

    def value_at_one(self) -> LaurentQ:
        return sum(self.coeffs.values(), LaurentQ())

    def derivative_at_one(self) -> LaurentQ:
        """``-d/dX`` at ``X = 1``."""
        return -sum((c * j for j, c in self.coeffs.items()), LaurentQ())

    def evaluate_q(self, q) -> dict[int, Fraction]:
        return {j: c.evaluate(q) for j, c in self.coeffs.items()}

    def __repr__(self):
        return " + ".join(f"({c})X^{j}" for j, c in sorted(self.coeffs.items())) or "0"
