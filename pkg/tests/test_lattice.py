import pytest
from hypothesis import given, settings, strategies as st

from hermden.field import PrimeContext
from hermden.lattice import (AdmissibleFunction, HermMatrix, LatticeError, WeightVector,
                             diagonalize, dual_gram, gram_schmidt_split, jordan_exponents,
                             moment_matrix, parse_matrix, represents, sort_weight, vertex_type)


def test_hermitian_symmetry_is_checked(ctx3):
    with pytest.raises(LatticeError):
        HermMatrix(ctx3, [[1, 2], [3, 1]])
    HermMatrix(ctx3, [[1, ctx3.elt(1, 1)], [ctx3.elt(1, -1), 1]])


def test_dual_gram(ctx3, diag):
    assert dual_gram(diag(1)) == diag(-1)
    assert dual_gram(HermMatrix.identity(ctx3, 3)) == HermMatrix.identity(ctx3, 3)
    assert dual_gram(diag(0, 1)) == diag(0, -1)
    with pytest.raises(LatticeError):
        dual_gram(HermMatrix(ctx3, [[1, 1], [1, 1]]))


def test_vertex_type(ctx3, diag):
    assert vertex_type(diag(0, 1)) == 1
    assert vertex_type(diag(2)) is None
    assert vertex_type(HermMatrix.identity(ctx3, 3)) == 0


def test_diagonalize_examples(ctx3, diag):
    assert jordan_exponents(HermMatrix(ctx3, [[0, 1], [1, 0]])) == (0, 0)
    assert jordan_exponents(diag(1, 0)) == (0, 1)
    assert jordan_exponents(HermMatrix(ctx3, [[1, 1], [1, 4]])) == (0, 1)


def test_diagonalize_transform(ctx3):
    S = HermMatrix(ctx3, [[3, ctx3.elt(1, 1)], [ctx3.elt(1, -1), 9]])
    exps, U, units = diagonalize(S)
    D = S.congruent(U)
    for i in range(2):
        assert D[i, i].valuation() == exps[i]
        for j in range(2):
            if i != j:
                assert not D[i, j]
    assert all(u.denominator % 3 and u.numerator % 3 for u in units)


def test_gram_schmidt_split(ctx3, diag):
    t, rest = gram_schmidt_split(diag(0, 3), 0, "unit")
    assert t == 1 and rest == diag(3)
    t, rest = gram_schmidt_split(HermMatrix(ctx3, [[1, 1], [1, 4]]), 0, "unit")
    assert rest == diag(1)
    t, rest = gram_schmidt_split(diag(-1, 0), 0, "codual")
    assert t.valuation() == -1 and rest == diag(0)
    with pytest.raises(LatticeError):
        gram_schmidt_split(diag(1, 0), 0, "unit")


def test_moment_matrix(ctx3, diag):
    assert moment_matrix(ctx3, 3, 1, 3, 0) == diag(0, 0, 1)
    assert moment_matrix(ctx3, 1, 1, 0, 1) == diag(-1)
    assert moment_matrix(ctx3, 2, 1, 0, 2) == diag(0, -1)
    with pytest.raises(LatticeError):
        moment_matrix(ctx3, 2, 3, 1, 1)


def test_represents(ctx3, diag):
    assert represents("even", HermMatrix.identity(ctx3, 2))
    assert not represents("odd", diag(0))
    assert represents("even", diag(1, 1))
    with pytest.raises(LatticeError):
        represents("even", diag(0), rank=2)


def test_weights_and_sorting(ctx3, diag):
    w = WeightVector.parse("yzy")
    assert (w.a, w.b, str(w)) == (1, 2, "YZY")
    T, phi = sort_weight(diag(-1, 0, 2), AdmissibleFunction(w, 1))
    assert str(phi.weight) == "ZYY" and T == diag(0, -1, 2)
    assert AdmissibleFunction("YY", 0).effective_weight() == ("Z", "Z")
    with pytest.raises(LatticeError):
        WeightVector.parse("ZX")
    with pytest.raises(LatticeError):
        AdmissibleFunction("Z", 2)


def test_parse_matrix_sugar(ctx3):
    T = parse_matrix("[[ϖ^2, [1, 1]], [[1, -1], w^-1]]", ctx3)
    assert T[0, 0] == 9 and T[1, 1].valuation() == -1 and T[0, 1] == ctx3.elt(1, 1)
    assert parse_matrix("[[2*pi]]", ctx3)[0, 0] == 6
    for bad in ("[[1, 2]", "[[1.5]]", "[1]"):
        with pytest.raises(LatticeError):
            parse_matrix(bad, ctx3)


_entry = st.integers(min_value=-3, max_value=3)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=2, max_size=3), _entry, _entry)
def test_jordan_exponents_are_unimodular_invariants(exps, a, b):
    ctx = PrimeContext(3)
    S = HermMatrix.from_exponents(ctx, exps)
    n = len(exps)
    U = [[ctx.elt(1 if i == j else 0) for j in range(n)] for i in range(n)]
    U[0][1] = ctx.elt(a, b)
    assert jordan_exponents(S.congruent(U)) == tuple(sorted(exps))
