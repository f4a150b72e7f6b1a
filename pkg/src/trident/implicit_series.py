"""Local expansions of the curve inside a patch.

Two constructions are provided.

``build_series`` / ``approximants`` follow the iterative construction of
u = X_s(v, w) + u*Y_s(u, v, w) at the patch corner and derive the monomial
approximants G_{e,f}(v, delta) with certified truncation errors.  For s <= 3
the recurrence is applied literally; its degrees grow like k^(2^s), so for
larger s the X-recurrence is applied modulo total degree s+1 and the pair is
re-normalised so that the identity stays exact (see ``_truncated_step``).

``jet_approximants`` is the fast path used by the search pipeline: it
expands t1 as a power series in (v, w) around a high-precision curve point
near the patch centre using univariate FLINT series, and bounds everything it
drops with a majorant series.  No exact residual computation is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import flint

from .forms import TernaryForm, eval_dehomogenized
from .patch_cover import Patch, PatchConstants

_CTX = flint.fmpq_mpoly_ctx.get(("u", "v", "w"), "lex")
_U, _V, _W = _CTX.gens()
fmpq = flint.fmpq


def _q(x) -> "flint.fmpq":
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    return fmpq(x)


def _frac(x) -> Fraction:
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    x = fmpq(x)
    return Fraction(int(x.p), int(x.q))


def _series(coeffs, n):
    return flint.fmpq_series(coeffs, prec=n)


# ---------------------------------------------------------------------------
# Orientation
# ---------------------------------------------------------------------------


def swap_xy(F: TernaryForm) -> TernaryForm:
    return F.signed_permute((1, 0, 2), (1, 1, 1))


def oriented(F: TernaryForm, patch: Patch) -> tuple[TernaryForm, Patch, bool]:
    """Return (F', patch', swapped) with grad_index 1 in the returned frame."""
    if patch.grad_index == 2:
        p = Patch(patch.j, patch.i, patch.M, patch.M0, 1, patch.grad_sign, patch.halo)
        return swap_xy(F), p, True
    return F, patch, False


# ---------------------------------------------------------------------------
# Local data at a base point
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalCoords:
    a: Fraction
    b: Fraction
    u: Fraction
    v: Fraction
    w: Fraction
    delta: Fraction


def local_coords(F: TernaryForm, patch: Patch, t1: Fraction, t2: Fraction) -> LocalCoords:
    a, b = patch.a, patch.b
    delta = Fraction(eval_dehomogenized(F, Fraction(t1), Fraction(t2)))
    F0 = Fraction(eval_dehomogenized(F, a, b))
    return LocalCoords(a, b, t1 - a, t2 - b, delta - F0, delta)


def _shifted(F: TernaryForm, a, b):
    """Polynomial F(a+u, b+v, 1) - F(a, b, 1) in the (u, v, w) context."""
    aq, bq = _q(a), _q(b)
    total = _CTX.from_dict({})
    for (e1, e2, _), c in F.coeffs:
        total += c * (aq + _U) ** e1 * (bq + _V) ** e2
    const = total.to_dict().get((0, 0, 0), 0)
    return total - const, _frac(const)


def local_data(F: TernaryForm, patch: Patch, lam: Fraction | None = None):
    """(F1, F2, f) with F(a+u, b+v, 1) - F(a, b, 1) = F1 u + F2 v + f(u, v).

    ``patch`` must have grad_index 1 (call :func:`oriented` first).
    """
    if patch.grad_index != 1:
        raise ValueError("local_data expects grad_index 1; orient the patch first")
    Q, _ = _shifted(F, patch.a, patch.b)
    d = Q.to_dict()
    F1 = _frac(d.get((1, 0, 0), 0))
    F2 = _frac(d.get((0, 1, 0), 0))
    if lam is not None and abs(F1) < lam / 6:
        raise ValueError("patch gradient certificate violated")
    f = Q - _q(F1) * _U - _q(F2) * _V
    return F1, F2, f


# ---------------------------------------------------------------------------
# The (X_s, Y_s) construction
# ---------------------------------------------------------------------------


@dataclass
class ImplicitSeries:
    s: int
    X: object  # fmpq_mpoly in (u, v, w); only v, w occur
    Y: object  # fmpq_mpoly in (u, v, w)
    coeff_bound: Fraction
    a: Fraction
    b: Fraction
    F0: Fraction
    F: TernaryForm
    literal: bool
    Q: object = field(repr=False, default=None)  # w as a polynomial in (u, v)

    def X_text(self) -> str:
        return str(self.X)

    def Y_text(self) -> str:
        return str(self.Y)

    def identity_holds(self) -> bool:
        """u == X_s(v, w(u,v)) + u*Y_s(u, v, w(u,v)) as polynomials."""
        lhs = self.X.compose(_U, _V, self.Q) + _U * self.Y.compose(_U, _V, self.Q)
        return lhs == _U


def _divide_by_u(p):
    d = p.to_dict()
    if any(e[0] == 0 for e in d):
        raise ArithmeticError("polynomial not divisible by u")
    return _CTX.from_dict({(e[0] - 1, e[1], e[2]): c for e, c in d.items()})


def _truncate(p, deg: int):
    return _CTX.from_dict({e: c for e, c in p.to_dict().items() if sum(e) <= deg})


def _min_degree(p) -> int:
    d = p.to_dict()
    return min((sum(e) for e in d), default=10**9)


def _compose_u_trunc(Y, Xs, deg: int):
    """Y(Xs, v, w) truncated to total degree <= deg (Horner in u)."""
    by_u: dict[int, dict] = {}
    for e, c in Y.to_dict().items():
        by_u.setdefault(int(e[0]), {})[(0, e[1], e[2])] = c
    if not by_u:
        return _CTX.from_dict({})
    top = max(by_u)
    acc = _CTX.from_dict(by_u.get(top, {}))
    for i in range(top - 1, -1, -1):
        acc = _truncate(acc * Xs, deg) + _CTX.from_dict(by_u.get(i, {}))
    return _truncate(acc, deg)


def _coeff_bound(*polys) -> Fraction:
    best = Fraction(0)
    for p in polys:
        for c in p.to_dict().values():
            best = max(best, abs(_frac(c)))
    return best


def build_series(F: TernaryForm, patch: Patch, s: int, literal: bool | None = None) -> ImplicitSeries:
    """X_s, Y_s with u = X_s(v, w) + u Y_s(u, v, w) on the local curve w = w(u, v).

    ``literal=None`` applies the recurrence verbatim for s <= 3 and the
    degree-truncated variant beyond.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    if literal is None:
        literal = s <= 3
    F1, F2, f = local_data(F, patch)
    if F1 == 0:
        raise ValueError("F1 vanishes at the base point")
    Q, F0 = _shifted(F, patch.a, patch.b)
    f0v = f.compose(_CTX.from_dict({}), _V, _W)  # f(0, v)
    iF1 = _q(1 / F1)
    X = (_W - _q(F2) * _V - f0v) * iF1
    Y = _divide_by_u(f0v - f) * iF1 if not (f0v - f).is_zero() else _CTX.from_dict({})
    w_of_0v = Q.compose(_CTX.from_dict({}), _V, _W)
    for step in range(1, s):
        if literal:
            YX = Y.compose(X, _V, _W)
            Ynext = Y.compose(X + _U * Y, _V, _W)
            diff = Ynext - YX
            q = _divide_by_u(diff) if not diff.is_zero() else _CTX.from_dict({})
            X, Y = X * (1 + YX), X * q + Y * Y
        else:
            X, Y = _truncated_step(X, Y, step, Q, w_of_0v)
    return ImplicitSeries(s, X, Y, _coeff_bound(X, Y), patch.a, patch.b, F0, F, literal, Q)


def _truncated_step(X, Y, s, Q, w_of_0v):
    """One application of X_{s+1} = X_s (1 + Y_s(X_s, v, w)) kept modulo degree s+2.

    The truncation T agrees with the implicit function to order s+1, so
    R(v) = T(v, w(0, v)) is O(v^(s+2)); X = T - R then vanishes on u = 0
    and Y = (u - X(v, w(u, v)))/u is an exact polynomial of order >= s+1.
    """
    deg = s + 1
    YX = _compose_u_trunc(Y, X, deg)
    T = _truncate(X * (1 + YX), deg)
    R = T.compose(_U, _V, w_of_0v)
    Xn = T - R
    Yn = _divide_by_u(_U - Xn.compose(_U, _V, Q)) if not (_U - Xn.compose(_U, _V, Q)).is_zero() else _CTX.from_dict({})
    return Xn, Yn


# ---------------------------------------------------------------------------
# Approximants
# ---------------------------------------------------------------------------


class Approximant:
    """t1^e t2^f ~ G(v, d) with v = t2 - v0 and d = delta - d0.

    ``v_size``/``d_size`` bound |v| and |d| over the in-patch box and
    ``err_bound`` bounds |t1^e t2^f - G| there.  Exponents refer to the
    oriented frame.  Fast-path approximants carry ``scaled`` (balls for the
    coefficients times v_size^i d_size^j); the rational G is then derived
    lazily from the ball midpoints, whose radii are part of err_bound.
    """

    __slots__ = ("e", "f", "_G", "err_bound", "v0", "d0", "v_size", "d_size", "scaled",
                 "scale", "ints", "err_scaled")

    def __init__(self, e, f, G, err_bound, v0, d0, v_size, d_size, scaled=None, scale=1,
                 ints=None, err_scaled=None):
        self.e, self.f = e, f
        self._G = G
        self.err_bound = err_bound
        self.v0, self.d0 = v0, d0
        self.v_size, self.d_size = v_size, d_size
        self.scaled = scaled
        # lattice data: integers E with |S*coef*size - E| accounted in err_scaled
        self.scale = scale
        self.ints = ints
        self.err_scaled = err_scaled

    @property
    def G(self) -> dict:
        if self._G is None:
            G = {}
            for (i, j), c in (self.scaled or {}).items():
                m, x = c.mid().man_exp()
                val = Fraction(int(m)) * Fraction(2) ** int(x)
                if val:
                    G[(i, j)] = val / (self.scale * self.v_size**i * self.d_size**j)
            self._G = G
        return self._G

    def __repr__(self):
        return f"Approximant(e={self.e}, f={self.f}, terms={len(self.G)}, err_bound={float(self.err_bound):.3g})"

    def evaluate(self, t2: Fraction, delta: Fraction) -> Fraction:
        v = Fraction(t2) - self.v0
        d = Fraction(delta) - self.d0
        return sum(_frac(c) * v**i * d**j for (i, j), c in self.G.items())


def _abs_size_sum(poly, sizes) -> Fraction:
    total = Fraction(0)
    for e, c in poly.to_dict().items():
        term = abs(_frac(c))
        for x, n in zip(sizes, map(int, e)):
            if n:
                term *= x**n
        total += term
    return total


def approximants(series: ImplicitSeries, patch: Patch, N: int, B: int, h: int,
                 threshold: Fraction | None = None, budget: Fraction | None = None) -> list[Approximant]:
    """G_{e,f} for every monomial t1^e t2^f with e + f <= h.

    u is replaced by X_s(v, delta - F(a,b,1)); the remainder u*Y_s is bounded
    by side * sup|Y_s| over the patch box, and monomials v^i delta^j of size
    below ``threshold`` (default M^-(H(H-1)/2)) are dropped and accounted for.
    """
    k = series.F.degree
    H = (h + 1) * (h + 2) // 2
    side = patch.side
    eta = Fraction(N) / (Fraction(B, 2) ** k)
    if threshold is None:
        threshold = Fraction(1, patch.M ** (H * (H - 1) // 2))
    F0 = series.F0
    Wmax = eta + abs(F0)
    yb = _abs_size_sum(series.Y, (side, side, Wmax)) if not series.Y.is_zero() else Fraction(0)
    E = side * yb
    Xd = series.X.compose(_U, _V, _W - _q(F0))  # w now plays the role of delta
    xb = _abs_size_sum(Xd, (side, side, eta))
    a, b = series.a, series.b
    R = abs(a) + side + E
    T2 = abs(b) + side
    out = []
    t1 = _q(a) + Xd
    for e in range(h + 1):
        t1e = t1**e
        for f_ in range(h + 1 - e):
            P = t1e * (_q(b) + _V) ** f_
            kept = {}
            dropped = Fraction(0)
            for exps, c in P.to_dict().items():
                i, j = int(exps[1]), int(exps[2])
                size = side**i * eta**j
                cf = _frac(c)
                if size >= threshold:
                    kept[(i, j)] = cf
                else:
                    dropped += abs(cf) * size
            err = dropped + (e * R ** max(e - 1, 0) * E * T2**f_ if e else 0)
            if budget is not None and err > budget:
                raise ValueError("approximant error exceeds the downstream budget")
            out.append(Approximant(e, f_, kept, err, b, Fraction(0), side, eta))
    return out


# ---------------------------------------------------------------------------
# Fast local jets
# ---------------------------------------------------------------------------


def jet_shape(r: float, omega: float, order: int) -> tuple[int, ...]:
    """Columns v^i w^j kept by the jet: r^i omega^j >= r^order, with j <= 3."""
    shape = []
    lr = math.log(r)
    lo = math.log(omega) if omega > 0 else -1e300
    j = 0
    while j <= 3 and j * lo >= order * lr - 1e-9:
        shape.append(int(math.floor((order * lr - j * lo) / lr + 1e-9)))
        j += 1
    return tuple(shape) if shape else (order,)


def _majorant_value(terms, q10, V, W):
    """Smallest U >= 0 with q10 U = W + sum |q_ij| U^i V^j, or None if there is none.

    ``terms`` lists (i, j, |q_ij|) with (i, j) != (1, 0), all rounded outward.
    Newton from 0 increases monotonically to the root of the concave map;
    the returned value is confirmed to be a super-solution with slack.
    """
    U = 0.0
    for _ in range(80):
        p = W
        dp = 0.0
        for i, j, c in terms:
            t = c * V**j
            p += t * U**i
            if i:
                dp += i * t * U ** (i - 1)
        p /= q10
        dp /= q10
        if dp >= 1.0 or not math.isfinite(p):
            return None
        step = (p - U) / (1.0 - dp)
        U += step
        if step <= 1e-14 * U:
            break
    else:
        return None
    Ut = U * (1 + 1e-9) + 1e-300
    p = W
    for i, j, c in terms:
        p += c * Ut**i * V**j
    if p / q10 * (1 + 1e-12) > Ut:
        return None
    return Ut


@dataclass
class JetBudget:
    """Level-wide data for :func:`jet_approximants`.

    The tail of every expansion beyond the explicitly computed orders is
    bounded once per level by a majorant built from global coefficient
    bounds (|q10| >= lambda/6 on the certified block).
    """

    k: int
    h: int
    r: Fraction
    eta: Fraction
    omega: float
    shape: tuple[int, ...]
    ext: tuple[int, ...]
    tail: dict
    halo: int
    reach: Fraction
    bits: int
    prec: int
    f0_tol: "flint.fmpq"
    omega_frac: Fraction
    r_arb: object = None
    omega_arb: object = None
    columns: tuple = ()
    ncols: int = 0

    def __post_init__(self):
        old = flint.ctx.prec
        flint.ctx.prec = self.prec
        self.r_arb = flint.arb(1) / int(1 / self.r)
        self.omega_arb = _arb_exact(_q(self.omega_frac))
        flint.ctx.prec = old
        self.columns = tuple((i, j) for j, I in enumerate(self.shape) for i in range(I + 1))
        self.ncols = len(self.columns)


def _global_taylor_bounds(F: TernaryForm, R: float):
    out: dict = {}
    for (e1, e2, _), c in F.coeffs:
        for i in range(e1 + 1):
            for j in range(e2 + 1):
                if (i, j) in ((0, 0), (1, 0)):
                    continue
                out[(i, j)] = out.get((i, j), 0.0) + abs(c) * math.comb(e1, i) * math.comb(e2, j) * R ** (e1 - i)
    return [(i, j, c * (1 + 1e-12)) for (i, j), c in out.items() if c]


def jet_budget(F: TernaryForm, lam: Fraction, D: int, N: int, B, h: int,
               order: int | None = None, extra: int = 4, halo: int = 2) -> JetBudget | None:
    k = F.degree
    H = (h + 1) * (h + 2) // 2
    if order is None:
        order = H + 1
    r = Fraction(1, 2 * D)
    eta = Fraction(N) / (Fraction(B) / 2) ** k
    omega = float(eta) * (1 + 2.0**-20)
    rf = float(r) * (1 + 1e-15)
    shape = jet_shape(rf, omega, order)
    J = len(shape) - 1
    ext = [I + extra for I in shape]
    if J < 3:
        ext.append(max(extra - 1, 0))
    ext = tuple(ext)
    Jx = len(ext) - 1
    reach = (2 * halo + 1) * r
    R = 1.0 + float(reach) * (1 + 1e-12)
    terms = _global_taylor_bounds(F, R)
    a10 = float(Fraction(lam) / 6) * (1 - 1e-12)
    grid = {}
    for a in range(1, 60):
        V = rf * 2.0**a
        row = {}
        for b in range(0, 400, 4):
            W = omega * 2.0**b
            U = _majorant_value(terms, a10, V, W)
            if U is None:
                break
            row[b] = U
        if not row:
            break
        grid[a] = row
    Wrow = {}
    for b in range(0, 400, 2):
        U = _majorant_value(terms, a10, rf, omega * 2.0**b)
        if U is None:
            break
        Wrow[b] = U
    if not grid or not Wrow:
        return None
    tail = {}
    for e in range(h + 1):
        for f_ in range(h + 1 - e):
            tot = 0.0
            for j, E in enumerate(ext):
                best = math.inf
                for a, row in grid.items():
                    V = rf * 2.0**a
                    for b, U in row.items():
                        val = 2.0 ** (-a * (E + 1) - b * j) * (R + U) ** e * (1.0 + V) ** f_
                        best = min(best, val)
                tot += best
            best = math.inf
            for b, U in Wrow.items():
                best = min(best, 2.0 ** (-b * (Jx + 1)) * (R + U) ** e * (1.0 + rf) ** f_)
            tot += best
            tail[(e, f_)] = tot * (1 + 1e-9)
    lb = math.log2(float(Fraction(B)))
    bits = int(-math.log2(float(eta))) + 48
    prec = 112 + math.ceil(2 * h * lb)
    f0_tol = _q(eta) * fmpq(1, 2**24)
    omega_frac = Fraction(omega)
    return JetBudget(k, h, r, eta, float(omega_frac), shape, ext, tail, halo, reach, bits, prec, f0_tol, omega_frac)


@dataclass
class JetInfo:
    base_t1: Fraction
    F0: Fraction
    ok: bool
    reason: str = ""


def _newton_base(F: TernaryForm, c1: Fraction, c2: Fraction, reach: Fraction, bits: int):
    """Dyadic s with F(s, c2, 1) ~ 0 and |s - c1| < reach, or None."""
    k = F.degree
    c2q = _q(c2)
    gam = [fmpq(0)] * (k + 1)
    for (e1, e2, _), c in F.coeffs:
        gam[e1] += c * c2q**e2
    gf = [float(g) for g in gam]

    def g(x):
        val = 0.0
        der = 0.0
        for a in range(k, -1, -1):
            der = der * x + val
            val = val * x + gf[a]
        return val, der

    lo, hi = float(c1 - reach), float(c1 + reach)
    glo, ghi = g(lo)[0], g(hi)[0]
    if glo == 0:
        s = lo
    elif ghi == 0:
        s = hi
    elif (glo > 0) == (ghi > 0):
        return None
    else:
        s = float(c1)
        for _ in range(100):
            val, der = g(s)
            if val == 0:
                break
            if (val > 0) == (glo > 0):
                lo = s
            else:
                hi = s
            nxt = s - val / der if der else 0.5 * (lo + hi)
            if not (lo < nxt < hi):
                nxt = 0.5 * (lo + hi)
            if abs(nxt - s) <= 4e-16 * max(1.0, abs(s)):
                s = nxt
                break
            s = nxt
    scale = 2**bits
    sq = fmpq(round(s * 2**60), 2**60)
    for _ in range(1 if bits <= 100 else 2):
        val = fmpq(0)
        der = fmpq(0)
        for a in range(k, -1, -1):
            der = der * sq + val
            val = val * sq + gam[a]
        if der == 0:
            return None
        sq = sq - val / der
        sq = fmpq((sq * scale).floor(), scale)
    return sq


def _taylor_rows(F: TernaryForm, s, c2):
    """q[i][j] with F(s+u, c2+v, 1) - F(s, c2, 1) = sum q_ij u^i v^j."""
    k = F.degree
    c2q = _q(c2)
    rows = [[fmpq(0)] * (k + 1) for _ in range(k + 1)]
    spow = [fmpq(1)]
    cpow = [fmpq(1)]
    for _ in range(k):
        spow.append(spow[-1] * s)
        cpow.append(cpow[-1] * c2q)
    for (e1, e2, _), c in F.coeffs:
        for i in range(e1 + 1):
            bi = math.comb(e1, i) * c
            for j in range(e2 + 1):
                rows[i][j] += bi * math.comb(e2, j) * spow[e1 - i] * cpow[e2 - j]
    F0 = rows[0][0]
    rows[0][0] = fmpq(0)
    return rows, F0


def _arb_exact(x):
    """arb enclosure of a rational (exact for dyadics that fit the precision)."""
    x = _q(x) if isinstance(x, (Fraction, int)) else x
    return flint.arb(x.p) / flint.arb(x.q) if x.q != 1 else flint.arb(x.p)


def jet_approximants(F: TernaryForm, patch: Patch, budget: JetBudget, scale: int = 1):
    """Approximants of t1^e t2^f (e + f <= h) around the patch centre.

    ``F`` and ``patch`` must be oriented (grad_index 1).  Expansion variables
    are v = t2 - c2 and d = delta - F0, F0 = F(s, c2, 1) at a dyadic curve
    point s near the centre.  Series are computed in ball arithmetic in the
    scaled variables v/r, d/omega, so every coefficient is directly the size
    of its column; ball radii enter the error bound.  With ``scale`` = S each
    approximant also carries integers E_ij within 1 + S*radius of S times the
    scaled coefficients (``ints``, ordered as ``budget.columns``) and
    ``err_scaled`` >= S*err_bound + that rounding slack.
    Returns (approximants or [], JetInfo).
    """
    k = F.degree
    h = budget.h
    r = budget.r
    c1, c2 = patch.center
    reach = min(budget.reach, (2 * patch.halo + 1) * r)
    info = JetInfo(c1, Fraction(0), False)
    s = _newton_base(F, c1, c2, reach, budget.bits)
    if s is None:
        info.reason = "no curve point in block"
        return [], info
    rows, F0q = _taylor_rows(F, s, c2)
    if abs(F0q) > budget.f0_tol:
        info.reason = "base point not accurate"
        return [], info
    q10 = rows[1][0]
    if q10 == 0:
        info.reason = "vanishing derivative"
        return [], info
    rf = float(r) * (1 + 1e-15)
    of = budget.omega
    terms = []
    for i in range(k + 1):
        for j in range(k + 1):
            if (i, j) in ((0, 0), (1, 0)) or rows[i][j] == 0:
                continue
            terms.append((i, j, abs(float(rows[i][j])) * (1 + 1e-12) + 1e-300))
    Ubox = _majorant_value(terms, abs(float(q10)) * (1 - 1e-12), rf, of)
    if Ubox is None or abs(float(s - _q(c1))) * (1 + 1e-12) + Ubox >= float(reach) * (1 - 1e-9):
        info.reason = "expansion leaves certified block"
        return [], info

    old_prec = flint.ctx.prec
    flint.ctx.prec = budget.prec
    try:
        out = _jet_series(rows, s, c2, k, h, budget, scale)
    finally:
        flint.ctx.prec = old_prec
    info.base_t1, info.F0 = _frac(s), _frac(F0q)
    for a in out:
        a.v0, a.d0 = c2, info.F0
    info.ok = True
    return out, info


def _jet_series(rows, s, c2, k, h, budget, scale):
    arb = flint.arb
    shape, ext = budget.shape, budget.ext
    J = len(shape) - 1
    Jx = len(ext) - 1
    n = max(ext) + 1
    rA = budget.r_arb
    # scaled Taylor rows: P_i(v^) = sum_j q_ij r^j v^j
    rp = [arb(1)]
    for _ in range(k):
        rp.append(rp[-1] * rA)
    P = []
    for row in rows:
        P.append(flint.arb_series([_arb_exact(c) * rp[j] if c != 0 else 0 for j, c in enumerate(row)], prec=n))
    q10 = _arb_exact(rows[1][0])

    def horner(m, U):
        acc = None
        for i in range(k, m - 1, -1):
            term = P[i] * math.perm(i, m) if m else P[i]
            acc = term if acc is None else acc * U + term
        return acc

    # U0 by Newton; each step doubles the correct order
    U = -P[0] / q10
    order = 2
    while order < n:
        U = U - _eval_Q(P, U, k) / horner(1, U)
        order *= 2
    Us = [U]
    omega_arb = budget.omega_arb
    if Jx >= 1:
        U1 = 1 / horner(1, U)
        Us.append(U1 * omega_arb)
        if Jx >= 2:
            Quu = horner(2, U)
            U2 = -(Quu * U1 * U1 * U1) / 2
            Us.append(U2 * (omega_arb * omega_arb))
            if Jx >= 3:
                Quuu = horner(3, U) if k >= 3 else flint.arb_series([0], prec=n)
                U3 = -(Quu * U1 * U2 + Quuu * U1 * U1 * U1 / 6) * U1
                Us.append(U3 * (omega_arb**3))
    sA = _arb_exact(s)
    T1 = [Us[0] + sA] + Us[1:]

    def mul(A, Bp):
        res = [None] * (Jx + 1)
        for i, x in enumerate(A):
            if x is None:
                continue
            for j, y in enumerate(Bp):
                if i + j <= Jx and y is not None:
                    t = x * y
                    res[i + j] = t if res[i + j] is None else res[i + j] + t
        return res

    powers = [[flint.arb_series([1], prec=n)] + [None] * Jx, T1]
    for _ in range(h - 1):
        powers.append(mul(powers[-1], T1))
    SA = arb(scale)
    T2 = flint.arb_series([_arb_exact(c2), rA], prec=n)
    tail = budget.tail
    ncols = budget.ncols
    zero_arb = arb(0)
    out = []
    for e in range(h + 1):
        sers = [ser * SA if ser is not None else None for ser in powers[e]]
        for f_ in range(h + 1 - e):
            if f_:
                sers = [ser * T2 if ser is not None else None for ser in sers]
            G = {}
            ints = []
            err = zero_arb
            for j in range(Jx + 1):
                keep = shape[j] if j <= J else -1
                cs = sers[j].coeffs() if sers[j] is not None else []
                for i, c in enumerate(cs[: keep + 1]):
                    G[(i, j)] = c
                    ints.append(c.mid().floor().unique_fmpz())
                    err += c.rad()
                if len(cs) <= keep:
                    ints.extend([0] * (keep + 1 - len(cs)))
                for c in cs[keep + 1: ext[j] + 1]:
                    err += abs(c)
            errs = float(err.upper()) * (1 + 1e-9) + tail[(e, f_)] * scale
            out.append(Approximant(e, f_, None, errs / scale * (1 + 1e-12), c2, Fraction(0), budget.r,
                                   budget.omega_frac, scaled=G, scale=scale, ints=ints,
                                   err_scaled=(errs + ncols) * (1 + 1e-12)))
    return out


def _eval_Q(P, U, k):
    acc = P[k]
    for i in range(k - 1, 0, -1):
        acc = acc * U + P[i]
    return acc * U + P[0]
