"""Verification suites shared by the command line and the test suite.

Each suite yields check records, plain dicts with at least ``check``,
``status`` (``pass``, ``fail``, ``report`` or ``skipped``) and the values
compared.  Instance lists are deterministic.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .closed import (derivative_at_one, hironaka_value, interpolate_from_values,
                     sankaran_alpha)
from .engine import (Engine, cancellation_step, int_n1, matched_types, verify_beta_fourier,
                     verify_cancellation, verify_duality, verify_kr, verify_recursion,
                     y_case_report)
from .field import PrimeContext
from .lattice import AdmissibleFunction, HermMatrix, LatticeError, WeightVector
from .oracle import (NORMALIZATIONS, BudgetExceeded, count_representations,
                     weighted_alpha_detail)

SUITES = ("hironaka", "recursion", "cancellation", "duality", "volume", "beta-fourier",
          "kr-n1", "kr-reducible", "y-case")

WEIGHTS_N2 = ("ZZ", "ZY", "YZ", "YY")


def _diag(ctx, *exps):
    return HermMatrix.from_exponents(ctx, list(exps))


def _record(check, ok, **vals):
    return dict(check=check, status="pass" if ok else "fail", **vals)


# ---------------------------------------------------------------------------
# rank-one tables

def hironaka(ctx: PrimeContext, lam_max: int = 4):
    """Oracle values and central derivatives of ``(p^lam)`` by ``(p^s)``, ``s`` in {0, 1, -1}."""
    q = ctx.q
    for s in (0, 1, -1):
        for lam in range(0, lam_max + 1):
            S = _diag(ctx, s)
            T = _diag(ctx, lam)
            got = count_representations(S, T).normalized
            want = hironaka_value(s, lam).evaluate(q)
            yield _record("value", got == want, s=s, lam=lam, expected=want, actual=got)
            derivable = (lam % 2 == 1) if s == 0 else (lam % 2 == 0)
            if not derivable:
                continue
            F = interpolate_from_values(
                q, lambda k: count_representations(S.block_sum(HermMatrix.identity(ctx, k))
                                                   if k else S, T).normalized)
            got = derivative_at_one(F, "column")
            want = hironaka_value(s, lam, want_derivative=True).evaluate(q)
            yield _record("derivative", got == want, s=s, lam=lam, expected=want, actual=got)


def closed_vs_oracle_n1(ctx: PrimeContext, lam_abs: int = 4, columns: int = 3):
    """Closed rank-one densities against the oracle for every weight and type."""
    q = ctx.q
    for lam in range(-lam_abs, lam_abs + 1):
        for s in (0, 1):
            if lam >= 0:
                for k in range(columns + 1):
                    got = count_representations(
                        _diag(ctx, s, *([0] * k)), _diag(ctx, lam)).normalized
                    want = sankaran_alpha([s] + [0] * k, lam).evaluate(q)
                    yield _record("sankaran", got == want, s=s, lam=lam, k=k,
                                  expected=want, actual=got)
        for w, t in (("Z", 0), ("Z", 1), ("Y", 1)):
            phi = AdmissibleFunction(w, t)
            T = _diag(ctx, lam)
            closed = Engine(ctx, source="closed").density_poly(T, phi)
            for k in range(columns + 1):
                got = weighted_alpha_detail(phi, T, columns=k).value
                want = closed.at_columns(k)
                yield _record("weighted", got == want, weight=w, type=t, lam=lam, k=k,
                              expected=want, actual=got)


# ---------------------------------------------------------------------------
# recursion

def recursion_instances(ctx: PrimeContext):
    """n = 2 targets with a unit or co-unit pivot that keeps the column count."""
    out = []
    for w in WEIGHTS_N2:
        for t in (0, 1, 2):
            phi = AdmissibleFunction(w, t)
            for e1, e2 in itertools.product((-1, 0, 1, 2), repeat=2):
                T = _diag(ctx, e1, e2)
                out.append((T, phi))
    off = HermMatrix(ctx, [[1, ctx.elt(1, 1)], [ctx.elt(1, -1), ctx.pi_power(1)]])
    for w in ("ZZ", "ZY"):
        out.append((off, AdmissibleFunction(w, 1)))
    return out


def recursion(ctx: PrimeContext, r_values=(0, 1), engine: Engine | None = None):
    engine = engine or Engine(ctx)
    for T, phi in recursion_instances(ctx):
        for r in r_values:
            try:
                rep = verify_recursion(engine, T, phi, r)
            except LatticeError:
                continue
            except BudgetExceeded:
                yield dict(check="recursion", status="skipped", phi=phi.descriptor(),
                           T=T.to_json(), r=r)
                continue
            yield _record("recursion", rep["equal"], phi=phi.descriptor(), T=T.to_json(), r=r,
                          kind=rep["kind"], expected=rep["full"], actual=rep["product"],
                          bare_product=rep["bare_product"])


# ---------------------------------------------------------------------------
# cancellation, duality, KR

def cancellation_instances(ctx: PrimeContext):
    """Diagonal n = 2 targets outside the space of ``phi`` with an eligible pivot."""
    out = []
    for w in WEIGHTS_N2:
        for h in (0, 1, 2):
            phi = AdmissibleFunction(w, h)
            for es in itertools.product(range(-1, 4), repeat=2):
                T = _diag(ctx, *es)
                if sum(es) % 2 != h % 2 and cancellation_step(T, phi) is not None:
                    out.append((T, phi))
    return out


def cancellation(ctx: PrimeContext, engine: Engine | None = None):
    engine = engine or Engine(ctx)
    for T, phi in cancellation_instances(ctx):
        try:
            rep = verify_cancellation(engine, T, phi)
        except BudgetExceeded:
            yield dict(check="cancellation", status="skipped", phi=phi.descriptor(),
                       T=T.to_json())
            continue
        yield _record("cancellation", rep["equal"], case=rep["case"], phi=phi.descriptor(),
                      T=T.to_json(), expected=rep["lhs"], actual=rep["rhs"])


def duality_instances(ctx: PrimeContext):
    out = [(_diag(ctx, lam), b) for b in (0, 1) for lam in (0, 2, 4)]
    for b in (0, 1, 2):
        for es in ((1, 0), (0, 1), (2, 1), (1, 2), (0, 3), (-1, 0), (2, -1)):
            out.append((_diag(ctx, *es), b))
    return out


def duality(ctx: PrimeContext, engine: Engine | None = None):
    engine = engine or Engine(ctx)
    for T, b in duality_instances(ctx):
        try:
            rep = verify_duality(engine, T, b)
        except BudgetExceeded:
            yield dict(check="duality", status="skipped", T=T.to_json(), b=b)
            continue
        yield _record("duality", rep["equal"], T=T.to_json(), b=b, expected=rep["lhs"],
                      actual=rep["by_normalization"]["volume"]["rhs"])


def kr_n1(ctx: PrimeContext, lam_max: int = 8, engine: Engine | None = None):
    engine = engine or Engine(ctx)
    for lam in range(0, lam_max + 1):
        t = 1 if lam % 2 == 0 else 0
        case = "Z_type1" if t else "Z_type0"
        T = _diag(ctx, lam)
        got = engine.dden(T, AdmissibleFunction("Z", t)).value
        want = int_n1(lam, case)
        yield _record("kr-n1", got == want, lam=lam, case=case, expected=want, actual=got)


def kr_reducible_instances(ctx: PrimeContext):
    out = []
    for w in WEIGHTS_N2:
        for h in (0, 1, 2):
            for es in itertools.product(range(-1, 4), repeat=2):
                if sum(es) % 2 != h % 2:
                    out.append((_diag(ctx, *es), AdmissibleFunction(w, h)))
    return out


def kr_reducible(ctx: PrimeContext, engine: Engine | None = None):
    engine = engine or Engine(ctx)
    for T, phi in kr_reducible_instances(ctx):
        try:
            rep = verify_kr(engine, T, phi)
        except BudgetExceeded:
            yield dict(check="kr", status="skipped", phi=phi.descriptor(), T=T.to_json())
            continue
        if rep["status"] == "skipped":
            continue
        yield dict(check="kr", status=rep["status"], phi=phi.descriptor(), T=T.to_json(),
                   expected=rep["geometric"], actual=rep["analytic"])


# ---------------------------------------------------------------------------
# volume and beta

def volume(ctx: PrimeContext, n_max: int = 2, engine: Engine | None = None):
    engine = engine or Engine(ctx)
    for n in range(1, n_max + 1):
        for h in range(n + 1):
            vals = {b: engine.vol_K(n, h, n - b, b) for b in range(n + 1)}
            ref = vals[0]
            yield _record("volume", all(v == ref for v in vals.values()), n=n, h=h,
                          expected=ref, actual=[vals[b] for b in sorted(vals)])


def beta_fourier(ctx: PrimeContext, n_max: int = 2, normalization: str = "volume",
                 engine: Engine | None = None):
    """Ratio ``beta_{a+1,b-1}(t) / beta_{a,b}(t) = q^(t-h)``, judged in ``normalization``."""
    engine = engine or Engine(ctx)
    for n in range(1, n_max + 1):
        for h in range(1, n + 1):
            for t in matched_types(h):
                try:
                    rep = verify_beta_fourier(engine, n, h, t)
                except BudgetExceeded:
                    yield dict(check="beta-fourier", status="skipped", n=n, h=h, t=t)
                    continue
                for c in rep["skipped"]:
                    yield dict(check="beta-fourier", status="skipped", n=n, h=h, t=t,
                               a=c["a"], b=c["b"])
                for c in rep["checks"]:
                    yield _record("beta-fourier", c[normalization]["equal"], n=n, h=h, t=t,
                                  a=c["a"], b=c["b"], normalization=normalization,
                                  expected=c[normalization]["rhs"],
                                  actual=c[normalization]["lhs"],
                                  others={nm: c[nm]["equal"] for nm in NORMALIZATIONS})


def y_case(ctx: PrimeContext, lam_max: int = 4):
    for lam in range(0, lam_max + 1, 2):
        rep = y_case_report(ctx, lam)
        yield dict(check="y-case", status="report", **rep)


def run_suite(name: str, ctx: PrimeContext, *, lam_max: int | None = None,
              engine: Engine | None = None):
    """Records of one suite; ``lam_max`` applies to the rank-one suites."""
    if name == "hironaka":
        return list(hironaka(ctx, 4 if lam_max is None else lam_max))
    if name == "recursion":
        return list(recursion(ctx, engine=engine))
    if name == "cancellation":
        return list(cancellation(ctx, engine))
    if name == "duality":
        return list(duality(ctx, engine))
    if name == "volume":
        return list(volume(ctx, engine=engine))
    if name == "beta-fourier":
        return list(beta_fourier(ctx, engine=engine))
    if name == "kr-n1":
        return list(kr_n1(ctx, 8 if lam_max is None else lam_max, engine))
    if name == "kr-reducible":
        return list(kr_reducible(ctx, engine))
    if name == "y-case":
        return list(y_case(ctx, 4 if lam_max is None else lam_max))
    raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")


def suite_passed(records) -> bool:
    return all(r["status"] in ("pass", "report") for r in records)


def jsonable(x):
    """Recursively turn Fractions and tuples into JSON-friendly values."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x
