"""Closed forms and density polynomials.

Densities with ``k`` added unimodular columns are polynomials in
``X = (-q)^(-k)``.  This module evaluates them in closed form for rank-one
targets, factors higher-rank targets by splitting off unit and co-unit
pivots, and interpolates the remaining cases from oracle values.

All densities here use self-dual volume normalization unless a function
says otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .lattice import (AdmissibleFunction, HermMatrix, LatticeError, WeightVector, Y, Z,
                      gram_schmidt_split)
from .laurent import LaurentQ, QXPoly
from .oracle import DEFAULT_BUDGET, weighted_alpha_detail

CONVENTIONS = ("column", "plane")


class InterpolationError(RuntimeError):
    """Interpolation did not stabilize within the node cap."""


# ---------------------------------------------------------------------------
# rank-one targets

def _mq(e):
    return LaurentQ.minus_q_pow(e)


def sankaran_alpha(xi, lam: int) -> LaurentQ:
    """Density of ``(p^lam)`` by ``diag(p^xi_1, ..., p^xi_(1+k))``, as a Laurent polynomial.

    Parameters
    ----------
    xi : sequence of int
        Non-negative exponents, ``1 + k`` of them.
    lam : int
        Non-negative valuation of the target.
    """
    xi = sorted((int(x) for x in xi), reverse=True)
    if any(x < 0 for x in xi) or lam < 0:
        raise ValueError("exponents and target valuation must be non-negative")
    k = len(xi) - 1

    def pair(a):
        return sum(min(x, a) for x in xi)

    out = LaurentQ.const(1)
    lead = LaurentQ.const(1) + _mq(-1)
    for a in range(1, lam + 1):
        out = out + lead * _mq(-k * a + pair(a)) * (-1) ** a
    out = out + _mq(-1) * _mq(-k * (lam + 1) + pair(lam + 1)) * (-1) ** (lam + 1)
    return out


def sankaran_poly(ones: int, zeros: int, extra_one: bool, lam: int) -> QXPoly:
    """The same density as a polynomial in ``X = (-q)^(-k)``.

    The form is ``diag(p^(1^ones), 1^zeros)`` plus ``k`` further entries,
    each ``p`` if ``extra_one`` else ``1``.
    """
    if lam < 0:
        return QXPoly()
    c = ones + zeros - 1
    e = 1 if extra_one else 0
    lead = LaurentQ.const(1) + _mq(-1)
    coeffs = {0: LaurentQ.const(1)}

    def add(j, v):
        coeffs[j] = coeffs.get(j, LaurentQ()) + v

    for a in range(1, lam + 1):
        add(a - e, lead * _mq(-c * a + ones) * (-1) ** a)
    add(lam + 1 - e, _mq(-1) * _mq(-c * (lam + 1) + ones) * (-1) ** (lam + 1))
    return QXPoly(coeffs)


def rank1_poly(weight: str, lam: int, ell: int, t: int) -> QXPoly:
    """Volume-normalized density of a rank-one target ``p^lam * unit``.

    The column runs over ``L`` (weight Z) or ``L^#`` (weight Y) where ``L``
    has rank ``ell`` and type ``t``, plus the added unimodular columns.
    """
    if weight == Y and t > 0:
        # scaled by p: L-rows of norm p become units, the rest carry p
        return sankaran_poly(ell - t, t, True, lam + 1) * LaurentQ.q_pow(t - 1)
    if lam < 0:
        return QXPoly()
    return sankaran_poly(t, ell - t, False, lam) * LaurentQ.q_pow(-t)


def representation_poly(s_exp: int, lam: int) -> QXPoly:
    """Representation density of ``(p^lam)`` by ``diag(p^s_exp, 1_k)``.

    ``s_exp = -1`` uses the scaled reading ``diag(1, p 1_k)`` at ``p^(lam+1)``.
    """
    if s_exp == 0:
        return sankaran_poly(0, 1, False, lam)
    if s_exp == 1:
        return sankaran_poly(1, 0, False, lam)
    if s_exp == -1:
        return sankaran_poly(0, 1, True, lam + 1)
    raise ValueError("s_exp must be one of 0, 1, -1")


def hironaka_value(s_exp: int, lam: int, want_derivative: bool = False) -> LaurentQ:
    """Tabulated value or derivative of the density of ``(p^lam)`` by ``(p^s_exp)``."""
    one = LaurentQ.const(1)
    q = LaurentQ.q_pow(1)
    qi = LaurentQ.q_pow(-1)
    half = Fraction(1, 2)
    if s_exp == -1 and lam < -1 or s_exp != -1 and lam < 0:
        raise ValueError(f"lam={lam} below the tabulated range")
    if s_exp == 0:
        base = one - _mq(-1)
        if not want_derivative:
            return base if lam % 2 == 0 else LaurentQ()
        if lam % 2 == 0:
            raise ValueError("derivative tabulated only for odd lam")
        return base * Fraction(lam + 1, 2)
    if s_exp == 1:
        if not want_derivative:
            return one + q if lam % 2 else LaurentQ()
        if lam % 2:
            raise ValueError("derivative tabulated only for even lam")
        return (one + q) * (lam * half) + one
    if s_exp == -1:
        if not want_derivative:
            return one + qi if lam % 2 else LaurentQ()
        if lam % 2 or lam < 0:
            raise ValueError("derivative tabulated only for even lam >= 0")
        return (one + qi) * (lam * half) + qi
    raise ValueError("s_exp must be one of 0, 1, -1")


# ---------------------------------------------------------------------------
# recursion reducer

@dataclass
class Step:
    kind: str          # "unit", "unit-shift", "codual", "rank1", "zero", "empty"
    weight: str
    lam: int
    ell: int
    t: int
    shift: int
    n: int = 1

    @property
    def fiber_exponent(self) -> int:
        """Power of ``q`` from the off-diagonal fibre along a co-unit pivot."""
        return -(self.n - 1) if self.kind == "codual" else 0

    def poly(self) -> QXPoly:
        if self.kind == "zero":
            return QXPoly()
        if self.kind == "empty":
            return QXPoly.const(1)
        f = rank1_poly(self.weight, self.lam, self.ell, self.t).scale_x(self.shift)
        return f * LaurentQ.q_pow(self.fiber_exponent)

    def describe(self):
        return {"kind": self.kind, "weight": self.weight, "lam": self.lam, "n": self.n,
                "lattice_rank": self.ell, "type": self.t, "shift": self.shift}


@dataclass
class ReductionTrace:
    steps: list = field(default_factory=list)
    core: tuple | None = None     # (T, phi, shift) left for the oracle

    @property
    def reducible(self) -> bool:
        return self.core is None

    def factor_poly(self) -> QXPoly:
        out = QXPoly.const(1)
        for s in self.steps:
            out = out * s.poly()
        return out

    def closed_poly(self) -> QXPoly | None:
        return self.factor_poly() if self.reducible else None

    def describe(self):
        d = {"steps": [s.describe() for s in self.steps], "reducible": self.reducible}
        if self.core is not None:
            T, phi, shift = self.core
            d["core"] = {"T": T.to_json(), "phi": phi.descriptor(), "shift": shift}
        return d


def _val(e):
    return e.valuation()


def _support_ok(T: HermMatrix, w, t) -> bool:
    for i in range(T.n):
        for j in range(T.n):
            v = _val(T[i, j])
            floor = -1 if (w[i] == Y and w[j] == Y and t > 0) else 0
            if v < floor:
                return False
    return True


def _unit_move(T: HermMatrix, i: int, j: int, target: int):
    """Try ``e_i <- e_i + s e_j`` so that the new ``(i, i)`` entry has valuation ``target``."""
    ctx = T.ctx
    n = T.n
    for s in (ctx.elt(1), ctx.sqrt_u, ctx.elt(-1), -ctx.sqrt_u):
        U = [[ctx.elt(1 if a == b else 0) for b in range(n)] for a in range(n)]
        U[j][i] = s
        T2 = T.congruent(U)
        if _val(T2[i, i]) == target:
            return T2
    return None


def _find_pivot(T: HermMatrix, w, ell, t):
    """Return ``(kind, index, T')`` for the first eligible pivot, or ``None``."""
    n = T.n
    eff = [Z if (c == Z or t == 0) else Y for c in w]
    zs = [i for i in range(n) if eff[i] == Z]
    ys = [i for i in range(n) if eff[i] == Y]
    zkind = "unit" if t < ell else "unit-shift"
    for i in zs:
        if _val(T[i, i]) == 0:
            return zkind, i, T
    if t > 0:
        for i in ys:
            if _val(T[i, i]) == -1:
                return "codual", i, T
    for i in zs:
        for j in zs:
            if i != j and _val(T[i, j]) == 0:
                T2 = _unit_move(T, i, j, 0)
                if T2 is not None:
                    return zkind, i, T2
    if t > 0:
        for i in ys:
            for j in ys:
                if i != j and _val(T[i, j]) == -1:
                    T2 = _unit_move(T, i, j, -1)
                    if T2 is not None:
                        return "codual", i, T2
    return None


def recursion_reduce(T: HermMatrix, phi: AdmissibleFunction) -> ReductionTrace:
    """Factor the density of ``phi`` at ``T`` by splitting off eligible pivots.

    A unit diagonal entry at a Z-position splits off a rank-one factor over
    ``L``; a valuation -1 entry at a Y-position splits off a factor over
    ``L^#`` and lowers the type; with self-dual measures it also carries
    ``q^-(n-1)``, the volume of the fibre of the off-diagonal entries along a
    vector of norm valuation -1.  When the lattice has full type, a unit
    pivot leaves ``L`` intact but consumes one added column, which shows up
    as the substitution ``X -> -q X`` in the remaining factor.  Whatever
    cannot be split is returned as ``core``.
    """
    if not T.nonsingular:
        raise LatticeError("recursion_reduce needs a nonsingular target")
    if T.n != phi.n:
        raise LatticeError("target size differs from the number of weight entries")
    trace = ReductionTrace()
    w = list(phi.weight.w)
    ell, t, shift = phi.lattice_rank, phi.type_t, 0
    while True:
        n = T.n
        if n == 0:
            trace.steps.append(Step("empty", "", 0, ell, t, shift))
            return trace
        if not _support_ok(T, w, t):
            trace.steps.append(Step("zero", "", 0, ell, t, shift))
            return trace
        if n == 1:
            lam = _val(T[0, 0])
            wt = w[0] if t > 0 else Z
            trace.steps.append(Step("rank1", wt, lam, ell, t, shift))
            return trace
        found = _find_pivot(T, w, ell, t)
        if found is None:
            trace.core = (T, AdmissibleFunction(WeightVector(tuple(w)), t, ell), shift)
            return trace
        kind, i, T = found
        mode = "codual" if kind == "codual" else "unit"
        _, T = gram_schmidt_split(T, i, mode)
        wt = Y if kind == "codual" else Z
        trace.steps.append(Step(kind, wt, -1 if kind == "codual" else 0, ell, t, shift, n))
        del w[i]
        if kind == "unit":
            ell -= 1
        elif kind == "codual":
            ell, t = ell - 1, t - 1
        else:
            shift += 1


# ---------------------------------------------------------------------------
# density polynomials at fixed q

@dataclass
class DensityPoly:
    """``F(X) = sum coeffs[j] X^j`` with ``X = (-q)^(-k)`` for ``k`` added columns."""

    q_value: int
    coeffs: list
    stabilization_order: int = 0
    provenance: str = "closed"
    stabilized: bool = True

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        return sum((c * x ** j for j, c in enumerate(self.coeffs)), Fraction(0))

    def at_columns(self, k: int) -> Fraction:
        return self(Fraction(-self.q_value) ** (-k))

    def value_at_one(self) -> Fraction:
        return sum(self.coeffs, Fraction(0))

    def scale_x(self, s: int) -> "DensityPoly":
        f = Fraction(-self.q_value) ** s
        return DensityPoly(self.q_value, [c * f ** j for j, c in enumerate(self.coeffs)],
                           self.stabilization_order, self.provenance, self.stabilized)

    def __mul__(self, other: "DensityPoly") -> "DensityPoly":
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        prov = self.provenance if self.provenance == other.provenance else "mixed"
        return DensityPoly(self.q_value, _trim(out),
                           max(self.stabilization_order, other.stabilization_order),
                           prov, self.stabilized and other.stabilized)

    @classmethod
    def from_qx(cls, poly: QXPoly, q: int) -> "DensityPoly":
        vals = poly.evaluate_q(q)
        deg = max(vals, default=0)
        return cls(q, _trim([vals.get(j, Fraction(0)) for j in range(deg + 1)]))


def _trim(c):
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c or [Fraction(0)]


def derivative_at_one(F: DensityPoly, convention: str = "column") -> Fraction:
    """``-dF/dX`` at ``X = 1``.

    ``column`` differentiates in ``(-q)^(-k)`` with ``k`` the number of
    added columns; ``plane`` differentiates in ``(-q)^(-r)`` with ``r``
    hyperbolic planes, which is twice the column value.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    d = -sum((j * c for j, c in enumerate(F.coeffs)), Fraction(0))
    return 2 * d if convention == "plane" else d


def _lagrange_coeffs(xs, ys):
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for a in range(len(basis) - 1):
                basis[a] -= xs[j] * basis[a + 1]
            denom *= xs[i] - xs[j]
        f = ys[i] / denom
        for a in range(n):
            coeffs[a] += f * basis[a]
    return _trim(coeffs)


def interpolate_from_values(q: int, value_at, max_nodes: int = 40) -> DensityPoly:
    """Interpolate through ``X_k = (-q)^(-k)`` until two further nodes are predicted."""
    xs, ys = [], []

    def node(k):
        while len(ys) <= k:
            kk = len(ys)
            xs.append(Fraction(-q) ** (-kk))
            ys.append(Fraction(value_at(kk)))
        return ys[k]

    R = 0
    while R + 2 < max_nodes:
        for k in range(R + 3):
            node(k)
        poly = DensityPoly(q, _lagrange_coeffs(xs[:R + 1], ys[:R + 1]), R + 1, "oracle")
        if poly(xs[R + 1]) == ys[R + 1] and poly(xs[R + 2]) == ys[R + 2]:
            return poly
        R += 1
    raise InterpolationError(f"no stable interpolant within {max_nodes} nodes")


def interpolate_FT(phi: AdmissibleFunction, T: HermMatrix, value_source: str = "oracle", *,
                   budget: int = DEFAULT_BUDGET, max_nodes: int = 40) -> DensityPoly:
    """Density polynomial of ``phi`` at ``T`` from oracle values or the closed chain."""
    q = T.ctx.q
    if value_source == "closed":
        trace = recursion_reduce(T, phi)
        if not trace.reducible:
            raise LatticeError("target is not reducible to closed rank-one factors")
        return DensityPoly.from_qx(trace.factor_poly(), q)
    if value_source != "oracle":
        raise ValueError(f"unknown value source {value_source!r}")
    flags = []

    def value_at(k):
        res = weighted_alpha_detail(phi, T, columns=k, budget=budget, check_next=(k == 0))
        if k == 0:
            flags.append(res.count.stabilized)
        return res.value

    poly = interpolate_from_values(q, value_at, max_nodes)
    poly.stabilized = all(flags)
    return poly
