"""Correction coefficients for a few ranks and weights, in both coefficient modes."""

from hermden.engine import Engine
from hermden.field import PrimeContext

ctx = PrimeContext(3)
pinned = Engine(ctx)
moved = Engine(ctx, beta_mode="transported")

for n in (1, 2, 3):
    print(f"n={n}, h=1, all Z: {pinned.beta_solve(n, 1, symbolic=True).get(0, 'rep')}")

print("\nvolume normalization, p = 3")
for n, h in ((2, 1), (2, 2), (3, 2)):
    for b in range(0, n):
        w = "Z" * (n - b) + "Y" * b
        a = pinned.beta_table(n, h, w).by_normalization["volume"]
        m = moved.beta_table(n, h, w).by_normalization["volume"]
        print(f"  n={n} h={h} {w:<4} pinned {dict((t, str(v)) for t, v in a.items())}"
              f"  transported {dict((t, str(v)) for t, v in m.items())}")
