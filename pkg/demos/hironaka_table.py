"""Rank-one densities two ways: brute counting over O/p^K and the closed polynomials.

Run with ``python3 demos/hironaka_table.py [p]``.
"""

import sys

from hermden.closed import hironaka_value, representation_poly
from hermden.field import PrimeContext
from hermden.lattice import HermMatrix
from hermden.oracle import count_representations

p = int(sys.argv[1]) if len(sys.argv) > 1 else 3
ctx = PrimeContext(p)
print(f"p = {p}, representing (p^s) by (p^lam)\n")
print(f"{'s':>3} {'lam':>4} {'counted':>10} {'closed form':>24} {'derivative':>12}")
for s in (0, 1, -1):
    for lam in range(0, 5):
        counted = count_representations(HermMatrix.from_exponents(ctx, [s]),
                                        HermMatrix.from_exponents(ctx, [lam])).normalized
        closed = hironaka_value(s, lam)
        F = representation_poly(s, lam)
        deriv = ""
        if (lam % 2 == 1) == (s == 0):
            deriv = str(F.derivative_at_one().evaluate(p))
        print(f"{s:>3} {lam:>4} {str(counted):>10} {str(closed):>24} {deriv:>12}")
        assert counted == closed.evaluate(p)

# The central value vanishes exactly when the determinant parity puts the
# target outside the space; the derivative is then the interesting number.
