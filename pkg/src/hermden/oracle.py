"""Brute-force ground truth for representation densities.

Two independent counting paths are provided.

``count_representations`` / ``weighted_alpha_oracle`` use a character-sum
count.  The Gram map ``x -> conj(x)^t S x`` is a sum of row contributions,
so the number of solutions of ``S[x] = T`` in the finite group
``Herm_n(O_F / p^K)`` is the convolution of per-row histograms.  Each
histogram is Fourier transformed once with numpy; the transforms are
integer valued because the histograms are invariant under scaling by unit
norms, and the final character sum is evaluated in exact Python integers.
The cost depends on ``K`` and ``n`` but not on the number of rows.

``naive_count`` / ``naive_weighted_alpha`` enumerate matrices column by
column with early rejection on the Gram entries already determined.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .field import PrimeContext
from .lattice import AdmissibleFunction, HermMatrix, LatticeError, Y, diagonalize

#: default cap on array cells touched by a single group count
DEFAULT_BUDGET = 2 * 10**7
#: default cap on matrices visited by the naive enumerator
NAIVE_BUDGET = 3 * 10**6
NORMALIZATIONS = ("volume", "lift", "rep")


class BudgetExceeded(RuntimeError):
    """The requested count is beyond the configured budget."""


class SingularTarget(ValueError):
    """The target matrix is singular; its density need not stabilize."""


@dataclass(frozen=True)
class CountResult:
    raw_count: int
    k: int
    normalized: Fraction
    stabilized: bool
    rows: int
    cols: int


def _coords(n):
    out = [("d", i, i) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            out += [("r", i, j), ("i", i, j)]
    return out


def group_cost(p: int, K: int, n: int) -> int:
    if n == 1:
        return p ** K
    return max(p ** (2 * K * n), p ** (K * n * n))


def _norm_hist(p: int, u: int, K: int) -> np.ndarray:
    """Histogram of ``a^2 - u b^2`` over ``(a, b) mod p^K``, as a circular convolution."""
    M = p ** K
    r = np.arange(M, dtype=np.int64)
    sa = np.bincount((r * r) % M, minlength=M)
    sb = np.bincount((-u * r * r) % M, minlength=M)
    conv = np.fft.ifft(np.fft.fft(sa) * np.fft.fft(sb)).real
    H = np.rint(conv)
    if np.abs(conv - H).max() > 0.25:
        raise ArithmeticError("norm histogram convolution lost precision")
    return H.astype(np.int64)


@lru_cache(maxsize=128)
def _hist_hat(p: int, u: int, K: int, n: int, wexp: tuple) -> np.ndarray:
    """Fourier transform of the histogram of one row's Gram contribution."""
    M = p ** K
    if n == 1:
        # the norm form separates, so rank one needs no pair enumeration
        w = pow(p, wexp[0][0], M) if wexp[0][0] < K else 0
        HN = _norm_hist(p, u, K)
        H = np.bincount((np.arange(M, dtype=np.int64) * w) % M, weights=HN, minlength=M)
        H = np.rint(H).astype(np.int64)
    else:
        H = _pair_hist(p, u, K, n, wexp)
    Fh = np.fft.fftn(H)
    R = np.rint(Fh.real)
    if np.abs(Fh.real - R).max() > 0.25 or np.abs(Fh.imag).max() > 0.25:
        raise ArithmeticError("histogram transform is not integral; precision lost")
    R = R.astype(np.int64)
    R.setflags(write=False)
    return R


def _pair_hist(p, u, K, n, wexp):
    M = p ** K
    r = np.arange(M, dtype=np.int64)
    grids = np.meshgrid(*([r] * (2 * n)), indexing="ij")
    A = [g.ravel() for g in grids[0::2]]
    B = [g.ravel() for g in grids[1::2]]
    idx = np.zeros(A[0].shape, dtype=np.int64)
    for kind, i, j in _coords(n):
        w = pow(p, wexp[i][j], M) if wexp[i][j] < K else 0
        # conj(c_i) c_j = a_i a_j - u b_i b_j + sqrt(u) (a_i b_j - b_i a_j)
        if kind == "i":
            val = (A[i] * B[j] - B[i] * A[j]) % M
        else:
            val = (A[i] * A[j] - u * B[i] * B[j]) % M
        idx = idx * M + (val * w) % M
    return np.bincount(idx, minlength=M ** (n * n)).reshape((M,) * (n * n))


def _group_count(ctx: PrimeContext, K: int, n: int, rows: dict, tcoords, budget: int) -> int:
    """Number of row tuples whose Gram sum equals ``tcoords`` in ``Herm_n(O/p^K)``.

    ``rows`` maps a weight-exponent matrix (tuple of tuples) to its multiplicity.
    """
    p, u = ctx.p, ctx.u
    M = p ** K
    if group_cost(p, K, n) > budget:
        raise BudgetExceeded(f"group count p={p}, K={K}, n={n} exceeds budget {budget}")
    const = 1
    live = {}
    for w, mult in rows.items():
        if all(e >= K for r in w for e in r):
            const *= p ** (2 * K * n * mult)
        else:
            live[w] = live.get(w, 0) + mult
    G = M ** (n * n)
    if not live:
        return const if all(t % M == 0 for t in tcoords) else 0
    grids = np.meshgrid(*([np.arange(M, dtype=np.int64)] * (n * n)), indexing="ij")
    pair = np.zeros((M,) * (n * n), dtype=np.int64)
    for g, t in zip(grids, tcoords):
        pair = (pair + g * (t % M)) % M
    m0 = pair == 0
    m1 = (pair % (M // p) == 0) & ~m0

    def total(mask):
        if not mask.any():
            return 0
        acc = None
        for w, mult in live.items():
            v = _hist_hat(p, u, K, n, w)[mask].astype(object) ** mult
            acc = v if acc is None else acc * v
        return int(acc.sum())

    s0, s1 = total(m0), total(m1)
    # Ramanujan sums: averaging e(a x / M) over units a gives 1 or -1/(p-1) or 0
    if s1 % (p - 1):
        raise ArithmeticError("character sum not divisible by p-1")
    tot = s0 - s1 // (p - 1)
    if tot % G:
        raise ArithmeticError("character sum not divisible by the group order")
    return const * (tot // G)


def _target_coords(T: HermMatrix, K: int):
    out = []
    for kind, i, j in _coords(T.n):
        a, b = T[i, j].residue(K)
        out.append(b if kind == "i" else a)
    return tuple(out)


def _jordan_top(T: HermMatrix) -> int:
    return max(diagonalize(T)[0])


def _check_target(T: HermMatrix):
    if not T.nonsingular:
        raise SingularTarget("target matrix is singular")


def _default_k(Tscaled: HermMatrix) -> int:
    return max(1, _jordan_top(Tscaled) + 1)


def _uniform(s: int, n: int):
    return tuple(tuple(s for _ in range(n)) for _ in range(n))


def count_representations(S: HermMatrix, T: HermMatrix, k: int | None = None, *,
                          budget: int = DEFAULT_BUDGET, check_next: bool = True) -> CountResult:
    """Normalized count of ``x`` with ``conj(x)^t S x = T`` modulo ``p^k``.

    When S or T has entries of valuation -1 both are multiplied by ``p``
    first and the normalization exponent is left unchanged.  ``k``
    defaults to one more than the top Jordan exponent of the scaled target;
    the count is repeated at ``k+1`` to decide ``stabilized`` when that is
    within budget.
    """
    _check_target(T)
    if not S.nonsingular:
        raise LatticeError("S must be nonsingular")
    if min(S.min_valuation(), T.min_valuation()) < -1:
        raise LatticeError("entries of valuation below -1 are not supported")
    ctx, n, m = S.ctx, T.n, S.n
    sigma = 1 if min(S.min_valuation(), T.min_valuation()) < 0 else 0
    Ss, Ts = S.scaled(ctx.p ** sigma), T.scaled(ctx.p ** sigma)
    exps = diagonalize(Ss)[0]
    rows = {}
    for e in exps:
        w = _uniform(e, n)
        rows[w] = rows.get(w, 0) + 1
    K = k if k is not None else _default_k(Ts)

    def at(KK):
        c = _group_count(ctx, KK, n, rows, _target_coords(Ts, KK), budget)
        return c, Fraction(c, ctx.p ** (KK * n * (2 * m - n)))

    c, val = at(K)
    stabilized = False
    if check_next and group_cost(ctx.p, K + 1, n) <= budget:
        stabilized = at(K + 1)[1] == val
    return CountResult(c, K, val, stabilized, m, n)


# ---------------------------------------------------------------------------
# weighted densities

def _scaled_rows(phi: AdmissibleFunction, extra: int):
    """Row weight matrices after the global scaling, with multiplicities."""
    w = phi.effective_weight()
    n, t, ell = phi.n, phi.type_t, phi.lattice_rank
    y = [1 if c == Y else 0 for c in w]
    sigma = 1 if (t > 0 and any(y)) else 0
    rows = {}
    for e, mult in ((0, ell - t + extra), (1, t)):
        if mult:
            wexp = tuple(tuple(sigma + e * (1 - y[i] - y[j]) for j in range(n)) for i in range(n))
            rows[wexp] = rows.get(wexp, 0) + mult
    return rows, sigma


def normalization_exponent(phi: AdmissibleFunction, normalization: str) -> int:
    """Exponent ``e`` such that ``q^e`` turns a self-dual-volume density into ``normalization``.

    ``volume`` is the density for self-dual Haar measures.  ``lift``
    multiplies by ``q^(n^2)`` whenever Y-columns are scaled, matching the
    convention in which a dual-lattice density is a representation density
    times ``|Nm det|^(n/2)``.  ``rep`` further divides out the lattice
    volume, leaving the bare representation density.
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    if normalization == "volume":
        return 0
    _, sigma = _scaled_rows(phi, 0)
    n, t = phi.n, phi.type_t
    e = sigma * n * n
    if normalization == "rep":
        e += t * (phi.a - phi.b)
    return e


def normalization_factor(phi: AdmissibleFunction, normalization: str, q) -> Fraction:
    return Fraction(q) ** normalization_exponent(phi, normalization)


def volume_factor(phi: AdmissibleFunction, q):
    """``vol(L)^a vol(L^#)^b`` for self-dual measures, i.e. ``q^(t(b-a))``."""
    t = phi.type_t
    w = phi.effective_weight()
    a = sum(1 for c in w if c != Y)
    return Fraction(q) ** (t * (len(w) - 2 * a))


@dataclass(frozen=True)
class WeightedResult:
    value: Fraction
    count: CountResult
    sigma: int
    columns: int


def weighted_alpha_detail(phi: AdmissibleFunction, T: HermMatrix, *, columns: int = 0,
                          k: int | None = None, budget: int = DEFAULT_BUDGET,
                          check_next: bool = True) -> WeightedResult:
    """Self-dual-volume density of ``phi`` at ``T`` with ``columns`` unimodular columns added."""
    _check_target(T)
    if T.n != phi.n:
        raise LatticeError("target size differs from the number of weight entries")
    ctx, n = T.ctx, T.n
    p = ctx.p
    rows, sigma = _scaled_rows(phi, columns)
    m = phi.lattice_rank + columns
    Ts = T.scaled(p ** sigma)
    vol = volume_factor(phi, p) * Fraction(p) ** (-sigma * n * n)
    if Ts.min_valuation() < 0:
        cr = CountResult(0, 0, Fraction(0), True, m, n)
        return WeightedResult(Fraction(0), cr, sigma, columns)
    K = k if k is not None else _default_k(Ts)

    def at(KK):
        c = _group_count(ctx, KK, n, rows, _target_coords(Ts, KK), budget)
        return c, Fraction(c, p ** (KK * n * (2 * m - n)))

    c, val = at(K)
    stabilized = False
    if check_next and group_cost(p, K + 1, n) <= budget:
        stabilized = at(K + 1)[1] == val
    cr = CountResult(c, K, val, stabilized, m, n)
    return WeightedResult(vol * val, cr, sigma, columns)


def weighted_alpha_oracle(phi: AdmissibleFunction, r: int, T: HermMatrix, *,
                          normalization: str = "volume", columns: int | None = None,
                          budget: int = DEFAULT_BUDGET) -> Fraction:
    """Weighted density ``alpha_T(r, phi)`` with ``r`` hyperbolic planes.

    Each hyperbolic plane is realised as two orthonormal columns, which is
    unimodularly equivalent.  ``columns`` overrides ``2r`` to allow an odd
    number of added columns.
    """
    cols = 2 * r if columns is None else columns
    res = weighted_alpha_detail(phi, T, columns=cols, budget=budget)
    return res.value * normalization_factor(phi, normalization, T.ctx.q)


# ---------------------------------------------------------------------------
# naive enumeration

def _enum_columns(m, M, cap_left):
    if M ** (2 * m) > cap_left:
        raise BudgetExceeded(f"naive enumeration of {M ** (2 * m)} columns exceeds budget")
    return list(itertools.product(range(M), repeat=2 * m))


def _naive(p, u, M, m, n, gram_entry, target, visit_cap):
    """Count column tuples with ``gram_entry(ci, cj) == target[i][j]``, pruned by prefixes."""
    cols = _enum_columns(m, M, visit_cap)
    # columns whose own norm is already wrong are rejected once, up front
    valid = [[c for c in cols if gram_entry(c, c, j, j) == target[j][j]] for j in range(n)]
    visited = len(cols) * n

    def rec(chosen):
        nonlocal visited
        j = len(chosen)
        if j == n:
            return 1
        total = 0
        for c in valid[j]:
            visited += 1
            if visited > visit_cap:
                raise BudgetExceeded("naive enumeration exceeded its visit budget")
            if all(gram_entry(chosen[i], c, i, j) == target[i][j] for i in range(j)):
                total += rec(chosen + [c])
        return total

    return rec([])


def naive_count(S: HermMatrix, T: HermMatrix, k: int, *, budget: int = NAIVE_BUDGET) -> int:
    """Direct enumeration of ``x mod p^k`` with ``S[x] = T mod p^k`` (integral S, T, any S)."""
    _check_target(T)
    if not (S.is_integral() and T.is_integral()):
        raise LatticeError("naive_count needs integral S and T")
    ctx = S.ctx
    p, u, M, m, n = ctx.p, ctx.u, ctx.p ** k, S.n, T.n
    Sr = [[S[i, j].residue(k) for j in range(m)] for i in range(m)]
    tgt = [[T[i, j].residue(k) for j in range(n)] for i in range(n)]

    def mul(x, y):
        return ((x[0] * y[0] + u * x[1] * y[1]) % M, (x[0] * y[1] + x[1] * y[0]) % M)

    def gram(ci, cj, i, j):
        vi = [(ci[2 * r], (-ci[2 * r + 1]) % M) for r in range(m)]
        vj = [(cj[2 * r], cj[2 * r + 1]) for r in range(m)]
        acc = (0, 0)
        for a in range(m):
            if not any(vi[a]):
                continue
            for b in range(m):
                z = mul(mul(vi[a], Sr[a][b]), vj[b])
                acc = ((acc[0] + z[0]) % M, (acc[1] + z[1]) % M)
        return acc

    return _naive(p, u, M, m, n, gram, tgt, budget)


def naive_weighted_alpha(phi: AdmissibleFunction, T: HermMatrix, K: int, *, columns: int = 0,
                         budget: int = NAIVE_BUDGET) -> Fraction:
    """Lattice-point fraction of ``Lambda / p^(K+s) Lambda`` meeting ``T`` to precision ``p^K``.

    Coordinates are taken in the basis of ``L`` for Z-columns and of
    ``L^#`` for Y-columns; a row of norm ``p^e`` then contributes
    ``p^(e(1 - y_i - y_j))`` to Gram entry ``(i, j)``.  ``s`` is 1 when
    Y-columns carry a non-integral form, and everything is multiplied by
    ``p^s`` to stay integral.  This is the volume normalization.
    """
    _check_target(T)
    ctx = T.ctx
    p, u, n = ctx.p, ctx.u, T.n
    w = phi.effective_weight()
    t, ell = phi.type_t, phi.lattice_rank
    m = ell + columns
    row_e = [0] * (ell - t) + [1] * t + [0] * columns
    ys = [1 if c == Y else 0 for c in w]
    sigma = 1 if (t > 0 and any(ys)) else 0
    M = p ** (K + sigma)
    # scaled target p^sigma T must match to precision p^(K+sigma)
    Ts = T.scaled(p ** sigma)
    if Ts.min_valuation() < 0:
        return Fraction(0)
    tgt = [[Ts[i, j].residue(K + sigma) for j in range(n)] for i in range(n)]

    def gram(ci, cj, i, j):
        re = im = 0
        for r in range(m):
            a1, b1 = ci[2 * r], ci[2 * r + 1]
            a2, b2 = cj[2 * r], cj[2 * r + 1]
            if not (a1 or b1) or not (a2 or b2):
                continue
            ex = sigma + row_e[r] * (1 - ys[i] - ys[j])
            f = p ** ex
            re += f * (a1 * a2 - u * b1 * b2)
            im += f * (a1 * b2 - b1 * a2)
        return (re % M, im % M)

    good = _naive(p, u, M, m, n, gram, tgt, budget)
    vol = volume_factor(phi, p)
    return vol * Fraction(p) ** (K * n * n) * Fraction(good, p ** (2 * (K + sigma) * m * n))
