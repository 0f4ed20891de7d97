"""The rank-one identity between intersection numbers and corrected derivatives.

For Z weights both coefficient modes agree.  For the dual lattice (weight Y)
they differ by one, and the oracle decides which matches the geometric side.
"""

from fractions import Fraction

from hermden.engine import Engine, int_n1, y_case_report
from hermden.field import PrimeContext
from hermden.lattice import AdmissibleFunction, HermMatrix

ctx = PrimeContext(3)
eng = Engine(ctx)

print("Z weights")
for lam in range(0, 9):
    t = 1 if lam % 2 == 0 else 0
    res = eng.dden(HermMatrix.from_exponents(ctx, [lam]), AdmissibleFunction("Z", t))
    geo = int_n1(lam, "Z_type1" if t else "Z_type0")
    print(f"  lam={lam} type={t}: derivative {res.value}, intersection {geo}")

print("\nY weight, type 1")
for lam in (0, 2, 4, 6):
    rep = y_case_report(ctx, lam)
    pinned = rep["conventions"]["pinned"]["column"]["value"]
    moved = rep["conventions"]["transported"]["column"]["value"]
    print(f"  lam={lam}: pinned {pinned}  transported {moved}  geometric {rep['geometric']}"
          f"  oracle/closed disagree on {rep['deviating'] or 'nothing'}")
    assert pinned == Fraction(lam, 2) and moved == rep["geometric"]
