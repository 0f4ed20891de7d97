from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hermden.field import (INF, FieldError, PrimeContext, ResidueRing, conj_norm_trace,
                           enumerate_residue, f_arith, least_nonresidue, valuation, vp)


def test_least_nonresidue():
    assert least_nonresidue(3) == 2
    assert least_nonresidue(5) == 2
    assert least_nonresidue(7) == 3


def test_context_rejects_bad_primes():
    for bad in (2, 9, 1):
        with pytest.raises(FieldError):
            PrimeContext(bad)
    with pytest.raises(FieldError):
        PrimeContext(5, u=4)


def test_sqrt_u_squares_to_u(ctx3):
    s = ctx3.sqrt_u
    assert f_arith(s, s, "mul") == ctx3.u


def test_norm_expansion(ctx3):
    a, b = ctx3.elt(1, 1), ctx3.elt(1, -1)
    assert a * b == 1 - ctx3.u


def test_scalar_cancellation(ctx3):
    assert f_arith(ctx3.elt(3, 6), ctx3.elt(3), "div") == ctx3.elt(1, 2)


def test_division_by_zero(ctx3):
    with pytest.raises(ZeroDivisionError):
        f_arith(ctx3.elt(1), ctx3.elt(0), "div")
    with pytest.raises(ValueError):
        f_arith(ctx3.elt(1), ctx3.elt(1), "pow")


def test_valuations(ctx3):
    assert valuation(ctx3.elt(1)) == 0
    assert valuation(ctx3.elt(3, 6)) == 1
    assert valuation(ctx3.elt(Fraction(1, 3))) == -1
    assert valuation(ctx3.elt(0)) == INF
    assert vp(Fraction(18, 5), 3) == 2


def test_conj_norm_trace(ctx3):
    c, n, t = conj_norm_trace(ctx3.sqrt_u)
    assert (c, n, t) == (-ctx3.sqrt_u, ctx3.elt(-ctx3.u), ctx3.elt(0))
    assert conj_norm_trace(ctx3.elt(1)) == (ctx3.elt(1), ctx3.elt(1), ctx3.elt(2))
    assert conj_norm_trace(ctx3.elt(1, 1)) == (ctx3.elt(1, -1), ctx3.elt(-1), ctx3.elt(2))


@pytest.mark.parametrize("p,k,size", [(3, 1, 9), (3, 2, 81), (5, 1, 25)])
def test_enumerate_residue_cardinality(p, k, size):
    assert sum(1 for _ in enumerate_residue(PrimeContext(p), k)) == size


def test_enumerate_residue_cap(ctx3):
    with pytest.raises(FieldError):
        enumerate_residue(ctx3, 8, cap=1000)


_coord = st.fractions(min_value=-50, max_value=50, max_denominator=7).filter(
    lambda x: x.denominator % 3 != 0)


@given(_coord, _coord, _coord, _coord)
def test_reduction_is_a_ring_map_commuting_with_conj(a, b, c, d):
    ctx = PrimeContext(3)
    x, y = ctx.elt(a, b), ctx.elt(c, d)
    R = ResidueRing(ctx, 2)
    assert R.reduce(x + y) == R.add(R.reduce(x), R.reduce(y))
    assert R.reduce(x * y) == R.mul(R.reduce(x), R.reduce(y))
    assert R.reduce(x.conj()) == R.conj(R.reduce(x))
    assert R.norm(R.reduce(x)) == R.reduce(x.norm())[0]


@given(_coord, _coord)
def test_norm_is_multiplicative_and_valuation_halves(a, b):
    ctx = PrimeContext(3)
    x = ctx.elt(a, b)
    if not x:
        return
    assert (x * x.conj()) == x.norm()
    assert x.norm().valuation() == 2 * x.valuation()
