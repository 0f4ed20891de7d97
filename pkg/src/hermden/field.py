"""Exact arithmetic in the unramified quadratic extension F = Q_p(sqrt(u)).

Elements are pairs ``x + y*sqrt(u)`` of rationals, i.e. elements of
Q(sqrt(u)) viewed inside F.  The uniformizer is ``p`` itself, so valuations
on F and on Q_p agree on Q_p.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy

INF = math.inf

#: default cap on the number of residues a single enumeration may produce
ENUMERATION_CAP = 10**7


class FieldError(ValueError):
    """Raised for invalid field data (bad prime, bad denominator, 0 division)."""


def vp(x: Fraction | int, p: int) -> float | int:
    """p-adic valuation of a rational; ``inf`` for zero."""
    x = Fraction(x)
    if x == 0:
        return INF
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@lru_cache(maxsize=None)
def least_nonresidue(p: int) -> int:
    for u in range(2, p):
        if pow(u, (p - 1) // 2, p) == p - 1:
            return u
    raise FieldError(f"no quadratic non-residue modulo {p}")


@dataclass(frozen=True)
class PrimeContext:
    """The data ``(p, u, q)`` fixing F/F0 with F0 = Q_p."""

    p: int
    u: int = 0

    def __post_init__(self):
        if self.p < 3 or not sympy.isprime(self.p):
            raise FieldError(f"p must be an odd prime, got {self.p}")
        if self.u == 0:
            object.__setattr__(self, "u", least_nonresidue(self.p))
        if pow(self.u % self.p, (self.p - 1) // 2, self.p) != self.p - 1:
            raise FieldError(f"u={self.u} is not a non-residue modulo {self.p}")

    @property
    def q(self) -> int:
        return self.p

    def elt(self, x=0, y=0) -> "FElement":
        return FElement(Fraction(x), Fraction(y), self)

    def pi_power(self, k: int) -> "FElement":
        return self.elt(Fraction(self.p) ** k)

    @property
    def sqrt_u(self) -> "FElement":
        return self.elt(0, 1)


@dataclass(frozen=True)
class FElement:
    """The element ``x + y*sqrt(u)`` of F."""

    x: Fraction
    y: Fraction
    ctx: PrimeContext

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))

    def _coerce(self, other) -> "FElement":
        if isinstance(other, FElement):
            if other.ctx != self.ctx:
                raise FieldError("elements from different prime contexts")
            return other
        return FElement(Fraction(other), Fraction(0), self.ctx)

    def __add__(self, other):
        o = self._coerce(other)
        return FElement(self.x + o.x, self.y + o.y, self.ctx)

    __radd__ = __add__

    def __neg__(self):
        return FElement(-self.x, -self.y, self.ctx)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        u = self.ctx.u
        return FElement(self.x * o.x + u * self.y * o.y,
                        self.x * o.y + self.y * o.x, self.ctx)

    __rmul__ = __mul__

    def inverse(self) -> "FElement":
        n = self.norm_rational()
        if n == 0:
            raise ZeroDivisionError("division by zero in F")
        c = self.conj()
        return FElement(c.x / n, c.y / n, self.ctx)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.ctx.elt(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, FElement):
            return (self.x, self.y, self.ctx) == (other.x, other.y, other.ctx)
        if isinstance(other, (int, Fraction)):
            return self.y == 0 and self.x == other
        return NotImplemented

    def __hash__(self):
        return hash((self.x, self.y, self.ctx.p))

    def __bool__(self):
        return bool(self.x) or bool(self.y)

    def conj(self) -> "FElement":
        return FElement(self.x, -self.y, self.ctx)

    def norm_rational(self) -> Fraction:
        return self.x * self.x - self.ctx.u * self.y * self.y

    def norm(self) -> "FElement":
        return FElement(self.norm_rational(), 0, self.ctx)

    def trace(self) -> "FElement":
        return FElement(2 * self.x, 0, self.ctx)

    def valuation(self):
        return min(vp(self.x, self.ctx.p), vp(self.y, self.ctx.p))

    @property
    def in_base_field(self) -> bool:
        return self.y == 0

    def residue(self, k: int) -> tuple[int, int]:
        """Image in O_F / p^k as a pair ``(a, b)``; requires integrality."""
        if self.valuation() < 0:
            raise FieldError(f"{self} is not integral")
        m = self.ctx.p ** k
        return _mod(self.x, m), _mod(self.y, m)

    def __repr__(self):
        if self.y == 0:
            return f"{self.x}"
        return f"{self.x}+{self.y}*sqrt({self.ctx.u})"


def _mod(x: Fraction, m: int) -> int:
    return (x.numerator * pow(x.denominator, -1, m)) % m


def f_arith(a: FElement, b: FElement, op: str) -> FElement:
    """Apply ``op`` in {'add', 'sub', 'mul', 'div'} exactly."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def valuation(a: FElement):
    return a.valuation()


def conj_norm_trace(a: FElement) -> tuple[FElement, FElement, FElement]:
    return a.conj(), a.norm(), a.trace()


class ResidueRing:
    """The finite ring O_F / p^k O_F with elements ``(a, b) = a + b*sqrt(u)``."""

    def __init__(self, ctx: PrimeContext, k: int):
        if k < 1:
            raise FieldError("precision must be at least 1")
        self.ctx = ctx
        self.k = k
        self.modulus = ctx.p ** k

    def __len__(self):
        return self.modulus ** 2

    def add(self, s, t):
        m = self.modulus
        return ((s[0] + t[0]) % m, (s[1] + t[1]) % m)

    def mul(self, s, t):
        m, u = self.modulus, self.ctx.u
        return ((s[0] * t[0] + u * s[1] * t[1]) % m, (s[0] * t[1] + s[1] * t[0]) % m)

    def conj(self, s):
        return (s[0], (-s[1]) % self.modulus)

    def norm(self, s) -> int:
        return (s[0] * s[0] - self.ctx.u * s[1] * s[1]) % self.modulus

    def reduce(self, e: FElement):
        return e.residue(self.k)


def enumerate_residue(ctx: PrimeContext, k: int, cap: int = ENUMERATION_CAP):
    """Yield every element of O_F / p^k in lexicographic ``(a, b)`` order."""
    if k < 1:
        raise FieldError("precision must be at least 1")
    m = ctx.p ** k
    if m * m > cap:
        raise FieldError(f"enumeration of {m * m} residues exceeds cap {cap}")
    return itertools.product(range(m), range(m))
