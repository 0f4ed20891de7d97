from fractions import Fraction

import pytest

from hermden.engine import (Engine, ParityError, RepresentabilityError, cancellation_step,
                            int_n1, int_reduced, verify_cancellation, verify_duality,
                            verify_kr, weighted_moment_matrix)
from hermden.field import PrimeContext
from hermden.lattice import AdmissibleFunction, HermMatrix, WeightVector
from hermden.laurent import LaurentQ, RationalFunctionQ


@pytest.fixture(scope="module")
def eng3():
    return Engine(PrimeContext(3))


def test_int_n1_examples():
    assert int_n1(3, "Z_type0") == 2
    assert int_n1(4, "Z_type1") == 2
    assert int_n1(-3, "Y_type1") == 0
    with pytest.raises(ParityError):
        int_n1(2, "Z_type0")
    with pytest.raises(ValueError):
        int_n1(2, "W")


def test_int_reduced_examples(diag):
    g = int_reduced(diag(0, 2), AdmissibleFunction("ZZ", 1))
    assert g.value == 1 and g.trace[0]["step"] == "1i"
    assert not int_reduced(diag(2, 4), AdmissibleFunction("ZZ", 1)).computable
    assert int_reduced(diag(3), AdmissibleFunction("Z", 0)).value == 2


def test_vol_examples(eng3):
    assert eng3.vol_K(1, 0, 1, 0) == Fraction(4, 3)
    assert eng3.vol_K(1, 1, 1, 0, "rep") == 4
    ref = eng3.vol_K(2, 1, 2, 0)
    assert ref == eng3.vol_K(2, 1, 1, 1) == eng3.vol_K(2, 1, 0, 2) == Fraction(16, 27)


def test_weighted_moment_matrix_follows_weight(ctx3, diag):
    assert weighted_moment_matrix(ctx3, 1, WeightVector.parse("YZ")) == diag(-1, 0)


def test_beta_symbolic_examples(eng3):
    q = LaurentQ.q_pow(1)
    for n in (1, 2, 3):
        tab = eng3.beta_solve(n, 1, symbolic=True)
        want = RationalFunctionQ(1, LaurentQ.const(1) - LaurentQ.minus_q_pow(-n))
        assert tab.get(0, "rep") == want
        assert tab.back_substitution_ok()
    assert eng3.beta_solve(2, 0).values == {}


def test_beta_numeric_back_substitution(eng3):
    for w in ("ZZ", "ZY", "YY"):
        for h in (1, 2):
            assert eng3.beta_solve(2, h, w).back_substitution_ok()


def test_dden_n1(eng3, diag):
    assert eng3.dden(diag(2), AdmissibleFunction("Z", 1)).value == 1
    assert eng3.dden(diag(3), AdmissibleFunction("Z", 0)).value == 2
    with pytest.raises(RepresentabilityError):
        eng3.dden(diag(0), AdmissibleFunction("Z", 0))


def test_dden_terms_recompute(eng3, diag):
    res = eng3.dden(diag(0, 1), AdmissibleFunction("ZY", 2))
    assert res.recompute() == res.value
    assert set(res.provenance.values()) <= {"closed", "oracle", "mixed"}


def test_dden_symbolic_matches_numeric(eng3, diag):
    phi = AdmissibleFunction("ZZ", 1)
    sym = eng3.dden(diag(0, 2), phi, symbolic=True).value
    assert sym.evaluate(3) == eng3.dden(diag(0, 2), phi).value


def test_dden_permutation_invariance(eng3, ctx3):
    T = HermMatrix(ctx3, [[1, ctx3.elt(1, 1)], [ctx3.elt(1, -1), 3]])
    a = eng3.dden(T, AdmissibleFunction("ZY", 1)).value
    b = eng3.dden(T.permuted([1, 0]), AdmissibleFunction("YZ", 1)).value
    assert a == b


def test_cancellation_cases(eng3, diag):
    assert cancellation_step(diag(2, 4), AdmissibleFunction("ZZ", 1)) is None
    rep = verify_cancellation(eng3, diag(0, 2), AdmissibleFunction("ZZ", 1))
    assert rep["case"] == "1i" and rep["equal"]
    rep = verify_cancellation(eng3, diag(0, 1), AdmissibleFunction("YZ", 0))
    assert rep["case"] == "2ii" and rep["equal"]
    rep = verify_cancellation(eng3, diag(1, 2), AdmissibleFunction("ZZ", 2))
    assert rep["case"] == "1ii" and rep["equal"]


def test_duality_n1(diag):
    for lam in (0, 2, 4):
        assert verify_duality(Engine(PrimeContext(3)), diag(lam), 0)["equal"]


def test_kr_skipped_when_chain_stuck(eng3, diag):
    assert verify_kr(eng3, diag(2, 4), AdmissibleFunction("ZZ", 1))["status"] == "skipped"


def test_pinned_and_transported_agree_on_z_weights(diag):
    ctx = PrimeContext(3)
    a = Engine(ctx).dden(diag(0, 2), AdmissibleFunction("ZZ", 1)).value
    b = Engine(ctx, beta_mode="transported").dden(diag(0, 2), AdmissibleFunction("ZZ", 1)).value
    assert a == b


def test_y_weight_values_pinned_as_regression(diag):
    # oracle-resolved values of the n = 1 dual-lattice case, see the decisions ledger
    ctx = PrimeContext(3)
    phi = AdmissibleFunction("Y", 1)
    for lam in (0, 2, 4):
        pinned = Engine(ctx, source="oracle").dden(diag(lam), phi).value
        moved = Engine(ctx, source="oracle", beta_mode="transported").dden(diag(lam), phi).value
        assert pinned == Fraction(lam, 2)
        assert moved == Fraction(lam, 2) + 1
