"""Hermitian matrices over F, vertex lattices and admissible functions."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .field import INF, FElement, PrimeContext


class LatticeError(ValueError):
    """Raised on singular input, bad shapes or violated pivot preconditions."""


class HermMatrix:
    """An exact hermitian ``n x n`` matrix over F.

    Entries are :class:`FElement`; the constructor checks hermitian symmetry
    and that diagonal entries lie in F0.
    """

    __slots__ = ("ctx", "rows", "_det")

    def __init__(self, ctx: PrimeContext, rows: Sequence[Sequence]):
        self.ctx = ctx
        self.rows = tuple(tuple(e if isinstance(e, FElement) else ctx.elt(e) for e in r)
                          for r in rows)
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise LatticeError("matrix is not square")
        for i in range(n):
            for j in range(i, n):
                if self.rows[i][j] != self.rows[j][i].conj():
                    raise LatticeError(f"entry ({i},{j}) breaks hermitian symmetry")
        self._det = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def diagonal(cls, ctx: PrimeContext, entries) -> "HermMatrix":
        n = len(entries)
        return cls(ctx, [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_exponents(cls, ctx: PrimeContext, exps) -> "HermMatrix":
        return cls.diagonal(ctx, [ctx.pi_power(e) for e in exps])

    @classmethod
    def identity(cls, ctx: PrimeContext, n: int) -> "HermMatrix":
        return cls.from_exponents(ctx, [0] * n)

    # -- basic protocol -------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, HermMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"HermMatrix({[list(map(repr, r)) for r in self.rows]})"

    def min_valuation(self):
        return min((e.valuation() for r in self.rows for e in r), default=INF)

    def is_integral(self) -> bool:
        return self.min_valuation() >= 0

    def scaled(self, c) -> "HermMatrix":
        return HermMatrix(self.ctx, [[c * e for e in r] for r in self.rows])

    def permuted(self, perm: Sequence[int]) -> "HermMatrix":
        """Matrix ``P^* S P`` whose ``i``-th basis vector is the old ``perm[i]``."""
        return HermMatrix(self.ctx, [[self.rows[a][b] for b in perm] for a in perm])

    def principal(self, idx: Sequence[int]) -> "HermMatrix":
        return self.permuted(idx)

    def congruent(self, U: Sequence[Sequence[FElement]]) -> "HermMatrix":
        """``conj(U)^t S U``."""
        n, ctx = self.n, self.ctx
        m = len(U[0])
        SU = [[sum((self.rows[i][k] * U[k][j] for k in range(n)), ctx.elt(0))
               for j in range(m)] for i in range(n)]
        return HermMatrix(ctx, [[sum((U[k][i].conj() * SU[k][j] for k in range(n)), ctx.elt(0))
                                 for j in range(m)] for i in range(m)])

    def block_sum(self, other: "HermMatrix") -> "HermMatrix":
        n, m = self.n, other.n
        rows = [list(r) + [0] * m for r in self.rows] + [[0] * n + list(r) for r in other.rows]
        return HermMatrix(self.ctx, rows)

    def det(self) -> FElement:
        if self._det is None:
            self._det = _det([list(r) for r in self.rows], self.ctx)
        return self._det

    @property
    def nonsingular(self) -> bool:
        return bool(self.det())

    def inverse_rows(self):
        return _inverse([list(r) for r in self.rows], self.ctx)

    def to_json(self):
        return [[[str(e.x), str(e.y)] for e in r] for r in self.rows]


def _det(a, ctx):
    n = len(a)
    a = [list(r) for r in a]
    d = ctx.elt(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return ctx.elt(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        d = d * a[c][c]
        inv = a[c][c].inverse()
        for r in range(c + 1, n):
            if a[r][c]:
                f = a[r][c] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return d


def _inverse(a, ctx):
    n = len(a)
    m = [list(r) + [ctx.elt(1 if i == j else 0) for j in range(n)] for i, r in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            raise LatticeError("singular matrix")
        m[c], m[piv] = m[piv], m[c]
        inv = m[c][c].inverse()
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [r[n:] for r in m]


# ---------------------------------------------------------------------------
# duals, vertex lattices, Jordan splitting

def dual_gram(S: HermMatrix) -> HermMatrix:
    """Gram matrix of the hermitian dual lattice in the dual basis."""
    if not S.nonsingular:
        raise LatticeError("dual of a singular form")
    # dual basis is e S^-1, whose Gram is (S^-1)^* S S^-1 = S^-1
    return HermMatrix(S.ctx, S.inverse_rows())


def _swap(M, U, i, j):
    M[i], M[j] = M[j], M[i]
    for r in M:
        r[i], r[j] = r[j], r[i]
    for r in U:
        r[i], r[j] = r[j], r[i]


def _add_col(M, U, src, dst, c):
    """Basis change e_dst <- e_dst + c e_src."""
    n = len(M)
    for r in range(n):
        M[r][dst] = M[r][dst] + M[r][src] * c
    cc = c.conj()
    for k in range(n):
        M[dst][k] = M[dst][k] + cc * M[src][k]
    for r in U:
        r[dst] = r[dst] + r[src] * c


def diagonalize(S: HermMatrix):
    """Jordan splitting of a nonsingular hermitian matrix.

    Returns ``(exponents, U, units)`` with exponents sorted ascending and
    ``conj(U)^t S U = diag(p^e_i * units_i)``.  The units are rationals prime
    to ``p``; they are not rescaled to 1 because a norm preimage need not lie
    in Q(sqrt(u)).  ``U`` is invertible over O_F when S is integral.
    """
    if not S.nonsingular:
        raise LatticeError("cannot diagonalize a singular form")
    ctx, n = S.ctx, S.n
    M = [list(r) for r in S.rows]
    U = [[ctx.elt(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for c in range(n):
        best = None
        for i in range(c, n):
            for j in range(i, n):
                v = M[i][j].valuation()
                key = (v, 0 if i == j else 1, i, j)
                if best is None or key < best:
                    best = key
        v, offdiag, i, j = best
        if offdiag:
            # e_i + s e_j with s in {1, sqrt(u)}: trace(s * M_ij) has valuation v
            s = ctx.elt(1) if M[i][j].trace().valuation() == v else ctx.sqrt_u
            _add_col(M, U, j, i, s)
        _swap(M, U, c, i)
        piv_inv = M[c][c].inverse()
        for k in range(c + 1, n):
            if M[c][k]:
                _add_col(M, U, c, k, -(M[c][k] * piv_inv))
    diag = [M[i][i] for i in range(n)]
    exps = [d.valuation() for d in diag]
    order = sorted(range(n), key=lambda i: (exps[i], i))
    U = [[row[i] for i in order] for row in U]
    p = ctx.p
    units = [diag[i].x / Fraction(p) ** exps[i] for i in order]
    return [exps[i] for i in order], U, units


def jordan_exponents(S: HermMatrix) -> tuple[int, ...]:
    return tuple(diagonalize(S)[0])


def vertex_type(S: HermMatrix):
    """Type ``t`` of the lattice with Gram ``S``, or ``None`` if not a vertex lattice."""
    if not S.nonsingular:
        raise LatticeError("vertex test needs a nonsingular form")
    if not S.is_integral():
        return None
    inv = S.inverse_rows()
    p = S.ctx.p
    if any((e * p).valuation() < 0 for r in inv for e in r):
        return None
    exps = jordan_exponents(S)
    return sum(1 for e in exps if e > 0)


def gram_schmidt_split(S: HermMatrix, pivot: int, mode: str = "unit"):
    """Split off the basis vector ``pivot``.

    Returns ``(t, T_flat)`` with ``t`` the pivot diagonal entry and ``T_flat``
    the Schur complement ``T2 - t^-1 t21 t12``.  ``mode='unit'`` needs
    ``val(t) == 0``, ``mode='codual'`` needs ``val(t) == -1``.
    """
    n = S.n
    t = S[pivot, pivot]
    need = {"unit": 0, "codual": -1}[mode]
    if t.valuation() != need:
        raise LatticeError(f"pivot valuation {t.valuation()} but mode {mode!r} needs {need}")
    rest = [i for i in range(n) if i != pivot]
    tinv = t.inverse()
    rows = [[S[i, j] - S[i, pivot] * tinv * S[pivot, j] for j in rest] for i in rest]
    return t, HermMatrix(S.ctx, rows)


def moment_matrix(ctx: PrimeContext, n: int, h: int, a: int, b: int) -> HermMatrix:
    """The diagonal moment matrix ``S^{[h]}_{a,b}``."""
    if not (0 <= h <= n and a >= 0 and b >= 0 and a + b == n):
        raise LatticeError(f"bad moment-matrix indices n={n}, h={h}, a={a}, b={b}")
    if h >= b:
        exps = [0] * (n - h) + [1] * (h - b) + [-1] * b
    else:
        exps = [0] * (n - h) + [-1] * h
    return HermMatrix.from_exponents(ctx, exps)


def det_valuation(T: HermMatrix) -> int:
    return T.det().valuation()


def represents(space_parity: str, T: HermMatrix, rank: int | None = None) -> bool:
    """Whether the hermitian space of the given determinant parity contains T's Gram."""
    if rank is not None and rank != T.n:
        raise LatticeError("rank mismatch between space and T")
    if not T.nonsingular:
        raise LatticeError("representability test needs nonsingular T")
    want = {"even": 0, "odd": 1}[space_parity]
    return det_valuation(T) % 2 == want


# ---------------------------------------------------------------------------
# weights and admissible functions

Z, Y = "Z", "Y"


@dataclass(frozen=True)
class WeightVector:
    w: tuple[str, ...]

    def __post_init__(self):
        w = tuple(self.w)
        if not w or any(c not in (Z, Y) for c in w):
            raise LatticeError(f"bad weight vector {self.w!r}")
        object.__setattr__(self, "w", w)

    @classmethod
    def parse(cls, s: str) -> "WeightVector":
        return cls(tuple(s.strip().upper()))

    def __len__(self):
        return len(self.w)

    def __str__(self):
        return "".join(self.w)

    @property
    def a(self) -> int:
        return self.w.count(Z)

    @property
    def b(self) -> int:
        return self.w.count(Y)

    def sorting_permutation(self) -> list[int]:
        return [i for i, c in enumerate(self.w) if c == Z] + [i for i, c in enumerate(self.w) if c == Y]

    def without(self, i: int) -> "WeightVector":
        return WeightVector(self.w[:i] + self.w[i + 1:])


@dataclass(frozen=True)
class AdmissibleFunction:
    """``phi^{[t]}_w``: Z-columns run over ``L``, Y-columns over ``L^#``.

    ``L`` is a vertex lattice of type ``type_t`` and rank ``lattice_rank``
    (defaults to the length of the weight, as for functions on V^n).  The
    Gram matrix of ``L`` is taken as ``diag(1^(rank-t), p^t)``.
    """

    weight: WeightVector
    type_t: int
    lattice_rank: int | None = field(default=None)

    def __post_init__(self):
        if isinstance(self.weight, str):
            object.__setattr__(self, "weight", WeightVector.parse(self.weight))
        if self.lattice_rank is None:
            object.__setattr__(self, "lattice_rank", len(self.weight))
        if not 0 <= self.type_t <= self.lattice_rank:
            raise LatticeError(f"type {self.type_t} outside [0, {self.lattice_rank}]")

    @classmethod
    def ab(cls, a: int, b: int, t: int) -> "AdmissibleFunction":
        return cls(WeightVector((Z,) * a + (Y,) * b), t)

    @property
    def n(self) -> int:
        return len(self.weight)

    @property
    def a(self) -> int:
        return self.weight.a

    @property
    def b(self) -> int:
        return self.weight.b

    def effective_weight(self) -> tuple[str, ...]:
        """Weights with Y replaced by Z when ``L = L^#`` (type 0)."""
        if self.type_t == 0:
            return (Z,) * self.n
        return self.weight.w

    def lattice_gram(self, ctx: PrimeContext) -> HermMatrix:
        r, t = self.lattice_rank, self.type_t
        return HermMatrix.from_exponents(ctx, [0] * (r - t) + [1] * t)

    def space_parity(self) -> str:
        return "odd" if self.type_t % 2 else "even"

    def with_type(self, t: int) -> "AdmissibleFunction":
        return AdmissibleFunction(self.weight, t, None if self.lattice_rank == self.n else self.lattice_rank)

    def descriptor(self) -> str:
        return f"{self.weight}@{self.type_t}/{self.lattice_rank}"


def sort_weight(T: HermMatrix, phi: AdmissibleFunction):
    """Permute to the canonical ``(Z^a, Y^b)`` order; densities are invariant."""
    perm = phi.weight.sorting_permutation()
    w = WeightVector(tuple(phi.weight.w[i] for i in perm))
    return T.permuted(perm), AdmissibleFunction(w, phi.type_t, phi.lattice_rank)


# ---------------------------------------------------------------------------
# literal parsing for the command line

_PI_RE = re.compile(r"^\s*(?:(-?[0-9/]+)\s*\*?\s*)?(?:ϖ|w|pi)\s*(?:\^\s*\(?\s*(-?\d+)\s*\)?)?\s*$")


def parse_scalar(tok, ctx: PrimeContext) -> FElement:
    """Parse ``3``, ``"1/3"``, ``"ϖ^2"``, ``"w^-1"``, ``[x, y]`` into F."""
    if isinstance(tok, list):
        if len(tok) != 2:
            raise LatticeError(f"entry {tok!r} must be a pair [x, y]")
        return ctx.elt(parse_scalar(tok[0], ctx).x, parse_scalar(tok[1], ctx).x)
    if isinstance(tok, (int,)):
        return ctx.elt(tok)
    if isinstance(tok, float):
        raise LatticeError("floating point entries are not exact")
    s = str(tok).strip()
    m = _PI_RE.match(s)
    if m:
        coeff = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        k = int(m.group(2)) if m.group(2) else 1
        return ctx.elt(coeff * Fraction(ctx.p) ** k)
    try:
        return ctx.elt(Fraction(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise LatticeError(f"cannot parse entry {tok!r}") from exc


def parse_matrix(text: str, ctx: PrimeContext) -> HermMatrix:
    """Parse a JSON matrix literal; bare ϖ tokens are quoted automatically."""
    fixed = re.sub(r"(?<![\"\w])((?:-?[0-9/]+\s*\*\s*)?(?:ϖ|w|pi)(?:\^\(?-?\d+\)?)?)", r'"\1"', text)
    try:
        data = json.loads(fixed)
    except json.JSONDecodeError as exc:
        raise LatticeError(f"malformed matrix literal {text!r}") from exc
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise LatticeError(f"matrix literal must be a list of rows: {text!r}")
    return HermMatrix(ctx, [[parse_scalar(e, ctx) for e in r] for r in data])
