from fractions import Fraction

import pytest

from hermden.closed import DensityPoly, rank1_poly
from hermden.lattice import AdmissibleFunction, HermMatrix
from hermden.oracle import (BudgetExceeded, SingularTarget, count_representations,
                            naive_count, naive_weighted_alpha, normalization_factor,
                            weighted_alpha_detail, weighted_alpha_oracle)


@pytest.mark.parametrize("s,lam,want", [(0, 0, Fraction(4, 3)), (0, 1, 0), (1, 1, 4),
                                        (-1, -1, Fraction(4, 3))])
def test_rank_one_counts(diag, s, lam, want):
    res = count_representations(diag(s), diag(lam))
    assert res.normalized == want
    assert res.stabilized


def test_rank_two_counts(ctx3, diag):
    assert count_representations(HermMatrix.identity(ctx3, 2), diag(0, 0)).normalized == Fraction(32, 27)
    assert count_representations(diag(0, 1), diag(0, 1)).normalized == Fraction(16, 3)


def test_group_count_matches_naive_enumeration(ctx3, diag):
    # independent path: direct enumeration of solution vectors
    for S, T, k in [(diag(0), diag(0), 2), (diag(1), diag(1), 2), (diag(0, 0), diag(2), 3),
                    (diag(0, 1, 0), diag(1), 2)]:
        got = count_representations(S, T, k=k, check_next=False).raw_count
        assert got == naive_count(S, T, k)


def test_weighted_matches_naive(ctx3, diag):
    cases = [(AdmissibleFunction("Y", 1), diag(-1), 0), (AdmissibleFunction("Y", 1), diag(0), 1),
             (AdmissibleFunction("Z", 1), diag(1), 1), (AdmissibleFunction("Y", 1), diag(1), 0)]
    for phi, T, cols in cases:
        fast = weighted_alpha_detail(phi, T, columns=cols).value
        assert fast == naive_weighted_alpha(phi, T, 2, columns=cols)


def test_weighted_examples(diag):
    assert weighted_alpha_oracle(AdmissibleFunction("Z", 0), 0, diag(0)) == Fraction(4, 3)
    assert weighted_alpha_oracle(AdmissibleFunction("Z", 1), 0, diag(0)) == 0
    # regression constant for the dual lattice with one hyperbolic plane; the
    # closed rank-one polynomial is the constant 4/3, an independent check
    phi = AdmissibleFunction("Y", 1)
    value = weighted_alpha_oracle(phi, 1, diag(-1))
    assert value == Fraction(4, 3)
    assert value == DensityPoly.from_qx(rank1_poly("Y", -1, 1, 1), 3).at_columns(2)


def test_unimodular_invariance(ctx3):
    T = HermMatrix(ctx3, [[3, ctx3.elt(1, 1)], [ctx3.elt(1, -1), 9]])
    U = [[ctx3.elt(1), ctx3.elt(2, 1)], [ctx3.elt(0), ctx3.elt(1)]]
    S = HermMatrix.identity(ctx3, 3)
    a = count_representations(S, T).normalized
    assert a == count_representations(S, T.congruent(U)).normalized


def test_normalizations(diag):
    phi = AdmissibleFunction("Y", 1)
    assert normalization_factor(phi, "volume", 3) == 1
    assert normalization_factor(phi, "lift", 3) == 3
    assert normalization_factor(phi, "rep", 3) == 1
    with pytest.raises(ValueError):
        normalization_factor(phi, "other", 3)


def test_errors(ctx3, diag):
    with pytest.raises(SingularTarget):
        count_representations(diag(0), HermMatrix(ctx3, [[0]]))
    with pytest.raises(BudgetExceeded):
        count_representations(HermMatrix.identity(ctx3, 4), diag(0, 0, 0), k=3, budget=10**6)
