"""Good-square covering of the curve F(t1, t2, 1) = 0 on [-1, 1]^2.

Everything is certified with interval arithmetic.  On the grid of mesh
1/D (D = M0*M) the scaled polynomial F(X1, X2, D) = D^k F(X1/D, X2/D, 1) has
integer inputs, so the quadtree below runs on exact integer intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .forms import TernaryForm, eval_dehomogenized

# ---------------------------------------------------------------------------
# Scalar interval arithmetic over Fractions (used for the constants)
# ---------------------------------------------------------------------------


def _ipow(lo, hi, e):
    if e == 0:
        return (1, 1)
    a, b = lo**e, hi**e
    if e % 2 == 0:
        if lo <= 0 <= hi:
            return (0, max(a, b))
        return (min(a, b), max(a, b))
    return (a, b)


def _imul(x, y):
    prods = (x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1])
    return (min(prods), max(prods))


def interval_eval(F: TernaryForm, box) -> tuple[Fraction, Fraction]:
    """Enclosure of F(t1, t2, 1) over box = ((l1, h1), (l2, h2))."""
    (l1, h1), (l2, h2) = box
    lo = hi = 0
    for (a, b, _), c in F.coeffs:
        p = _imul(_ipow(l1, h1, a), _ipow(l2, h2, b))
        if c > 0:
            lo += c * p[0]
            hi += c * p[1]
        else:
            lo += c * p[1]
            hi += c * p[0]
    return lo, hi


def _sup_abs(F: TernaryForm | None, cells: int = 16) -> Fraction:
    """Certified upper bound of |F(t1, t2, 1)| on [-1, 1]^2."""
    if F is None:
        return Fraction(0)
    best = Fraction(0)
    step = Fraction(2, cells)
    for i in range(cells):
        for j in range(cells):
            box = ((-1 + i * step, -1 + (i + 1) * step), (-1 + j * step, -1 + (j + 1) * step))
            lo, hi = interval_eval(F, box)
            best = max(best, abs(lo), abs(hi))
    return best


# ---------------------------------------------------------------------------
# Constants of the covering lemma
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PatchConstants:
    lam: Fraction
    M0: int
    lipschitz: Fraction

    @property
    def lambda_(self) -> Fraction:
        return self.lam


class SubdivisionError(RuntimeError):
    pass


def _dehom_partials(F: TernaryForm):
    return [F.partial(i) for i in range(3)]


def compute_constants(F: TernaryForm, max_depth: int = 9, accept: Fraction = Fraction(4, 5)) -> PatchConstants:
    """Certified (lambda, M0) for F.

    lambda: [-1,1]^2 is subdivided adaptively; on each cell the bound
    max_i (|F_i(centre)| - slack_i) (or the interval enclosure, if better)
    is accepted once it reaches ``accept`` times the centre value.
    M0: smallest integer with M0 >= 3k/lambda, M0 >= sup|F2| and
    V/M0 <= lambda/6 where V bounds the variation rate of F1 and F2.
    """
    k = F.degree
    parts = _dehom_partials(F)
    # second derivatives of F_i with respect to t1, t2 (x3 = 1 fixed)
    second = [[None if p is None else p.partial(j) for j in (0, 1)] for p in parts]
    sup_second = [[_sup_abs(s) for s in row] for row in second]
    rate = [sum(row) for row in sup_second]  # |grad F_i|_1 bound

    lam = None
    stack = [(Fraction(-1), Fraction(-1), Fraction(2), 0)]
    while stack:
        x0, y0, w, depth = stack.pop()
        half = w / 2
        cx, cy = x0 + half, y0 + half
        box = ((x0, x0 + w), (y0, y0 + w))
        best_center = Fraction(0)
        lb = Fraction(0)
        for p, r in zip(parts, rate):
            if p is None:
                continue
            cval = abs(Fraction(eval_dehomogenized(p, cx, cy)))
            best_center = max(best_center, cval)
            lb = max(lb, cval - r * half)
            lo, hi = interval_eval(p, box)
            if lo > 0 or hi < 0:
                lb = max(lb, min(abs(lo), abs(hi)))
        if lb > 0 and (lb >= accept * best_center or depth >= max_depth):
            lam = lb if lam is None else min(lam, lb)
            continue
        if depth >= max_depth:
            raise SubdivisionError(
                f"no partial derivative bounded away from 0 near ({float(cx):.4g}, {float(cy):.4g}); "
                "form looks singular"
            )
        for dx in (0, half):
            for dy in (0, half):
                stack.append((x0 + dx, y0 + dy, half, depth + 1))
    # tidy the rational a little (rounding down keeps it a valid lower bound)
    if lam.denominator > 1024:
        tidy = Fraction(math.floor(lam * 1024), 1024)
        if tidy > 0:
            lam = tidy
    V = max(rate[0], rate[1])
    sup_f2 = _sup_abs(parts[1])
    M0 = max(
        math.ceil(Fraction(3 * k) / lam),
        math.ceil(sup_f2),
        math.ceil(6 * V / lam) if V else 1,
        1,
    )
    return PatchConstants(lam=lam, M0=int(M0), lipschitz=V)


# ---------------------------------------------------------------------------
# Vectorised integer interval evaluation of F(X1, X2, D)
# ---------------------------------------------------------------------------


def _vpow(lo, hi, e):
    if e == 0:
        one = np.ones_like(lo)
        return one, one
    a, b = lo**e, hi**e
    if e % 2:
        return a, b
    mn, mx = np.minimum(a, b), np.maximum(a, b)
    straddle = (lo <= 0) & (hi >= 0)
    mn = np.where(straddle, 0, mn)
    return mn, mx


def _vmul(a, b):
    p = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return np.minimum(np.minimum(p[0], p[1]), np.minimum(p[2], p[3])), np.maximum(
        np.maximum(p[0], p[1]), np.maximum(p[2], p[3])
    )


def scaled_interval(F: TernaryForm, D: int, l1, h1, l2, h2):
    """Enclosure of F(X1, X2, D) for X1 in [l1, h1], X2 in [l2, h2] (arrays)."""
    lo = np.zeros_like(l1)
    hi = np.zeros_like(l1)
    for (a, b, c), co in F.coeffs:
        p = _vmul(_vpow(l1, h1, a), _vpow(l2, h2, b))
        s = co * D**c
        if s > 0:
            lo = lo + s * p[0]
            hi = hi + s * p[1]
        else:
            lo = lo + s * p[1]
            hi = hi + s * p[0]
    return lo, hi


def _dtype_for(F: TernaryForm, D: int, extra: int = 1):
    bound = sum(abs(c) for _, c in F.coeffs) * (D + 4) ** F.degree * 4 * extra
    return np.int64 if bound < 2**62 else object


# ---------------------------------------------------------------------------
# Patches
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Patch:
    """Grid square [a, a+side] x [b, b+side], side = 1/(M0*M).

    ``i``, ``j`` are grid indices (a = -1 + i/D).  ``halo`` is the number of
    neighbouring cells on every side over which the gradient certificate
    also holds (2 when the 5x5 block around the cell is certified).
    """

    i: int
    j: int
    M: int
    M0: int
    grad_index: int
    grad_sign: int
    halo: int = 0

    @property
    def D(self) -> int:
        return self.M0 * self.M

    @property
    def side(self) -> Fraction:
        return Fraction(1, self.D)

    @property
    def a(self) -> Fraction:
        return Fraction(self.i - self.D, self.D)

    @property
    def b(self) -> Fraction:
        return Fraction(self.j - self.D, self.D)

    @property
    def center(self) -> tuple[Fraction, Fraction]:
        h = Fraction(1, 2 * self.D)
        return self.a + h, self.b + h

    def contains(self, t1: Fraction, t2: Fraction) -> bool:
        return self.a <= t1 <= self.a + self.side and self.b <= t2 <= self.b + self.side

    def key(self) -> tuple[int, int, int]:
        return (self.M, self.i, self.j)


def _grid_candidates(F: TernaryForm, D: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices (i, j) of grid cells whose interval value meets [-D^(k-1), D^(k-1)]."""
    k = F.degree
    n = 2 * D
    dtype = _dtype_for(F, D)
    thr = D ** (k - 1)
    size = 1
    while size < n:
        size *= 2
    i0 = np.array([0], dtype=np.int64)
    j0 = np.array([0], dtype=np.int64)
    while True:
        hi_i = np.minimum(i0 + size, n)
        hi_j = np.minimum(j0 + size, n)
        l1 = (i0 - D).astype(dtype)
        h1 = (hi_i - D).astype(dtype)
        l2 = (j0 - D).astype(dtype)
        h2 = (hi_j - D).astype(dtype)
        lo, hi = scaled_interval(F, D, l1, h1, l2, h2)
        keep = np.asarray((lo <= thr) & (hi >= -thr), dtype=bool)
        i0, j0 = i0[keep], j0[keep]
        if size == 1 or len(i0) == 0:
            return i0, j0
        size //= 2
        ii = np.concatenate([i0, i0 + size, i0, i0 + size])
        jj = np.concatenate([j0, j0, j0 + size, j0 + size])
        ok = (ii < n) & (jj < n)
        i0, j0 = ii[ok], jj[ok]


def _certify_gradient(F, consts, D, i, j, margin):
    """Per cell: (index, sign) certified on the block of cells i-margin..i+margin, else (0, 0)."""
    k = F.degree
    lam = consts.lam
    thr_num = lam.numerator * D ** (k - 1)
    scale = 6 * lam.denominator
    dtype = _dtype_for(F, D, extra=scale)
    n = 2 * D
    l1 = (np.maximum(i - margin, -4 * D) - D).astype(dtype)
    h1 = (i + 1 + margin - D).astype(dtype)
    l2 = (np.maximum(j - margin, -4 * D) - D).astype(dtype)
    h2 = (j + 1 + margin - D).astype(dtype)
    results = []
    centre_vals = []
    for idx in (0, 1):
        P = F.partial(idx)
        if P is None:
            results.append(np.zeros(len(i), dtype=np.int64))
            centre_vals.append(np.zeros(len(i), dtype=float))
            continue
        lo, hi = scaled_interval(P, D, l1, h1, l2, h2)
        pos = np.asarray(lo * scale >= thr_num, dtype=bool)
        neg = np.asarray(hi * scale <= -thr_num, dtype=bool)
        results.append(np.where(pos, 1, np.where(neg, -1, 0)))
        mid = (np.asarray(lo, dtype=float) + np.asarray(hi, dtype=float)) / 2
        centre_vals.append(np.abs(mid))
    s1, s2 = results
    c1, c2 = centre_vals
    use2 = (s2 != 0) & ((s1 == 0) | (c2 > c1))
    index = np.where(use2, 2, np.where(s1 != 0, 1, 0))
    sign = np.where(use2, s2, s1)
    return index, sign


def good_squares(F: TernaryForm, consts: PatchConstants, M: int, halo: int = 2) -> list[Patch]:
    """All cells of the 1/(M0*M) grid on [-1,1]^2 that may contain a point with |F| <= 1/(M0*M).

    Each patch gets the gradient index with the larger |F_i| among those
    certified >= lambda/6 with constant sign; the certificate is attempted on
    the (2*halo+1)^2 block around the cell first and on the cell alone if
    that fails.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    D = consts.M0 * M
    i, j = _grid_candidates(F, D)
    if len(i) == 0:
        return []
    index, sign = _certify_gradient(F, consts, D, i, j, halo)
    got_halo = np.where(index != 0, halo, 0)
    bad = index == 0
    if bad.any():
        idx2, sgn2 = _certify_gradient(F, consts, D, i[bad], j[bad], 0)
        index[bad], sign[bad] = idx2, sgn2
    order = np.lexsort((i, j))
    out = []
    for t in order:
        gi = int(index[t])
        if gi == 0:
            gi, gs = _refine_uncertified(F, consts, D, int(i[t]), int(j[t]))
            if gi is None:
                continue
        else:
            gs = int(sign[t])
        out.append(Patch(int(i[t]), int(j[t]), M, consts.M0, gi, gs, int(got_halo[t])))
    return out


def _refine_uncertified(F, consts, D, i, j, parts=8):
    """Sub-cell check for a cell whose gradient could not be certified.

    Returns (None, None) if no sub-cell can meet the band (the cell is
    dropped), otherwise (0, 0): the patch is kept but marked uncertified so
    the pipeline enumerates it directly.
    """
    Dq = D * parts
    ii = np.array([i * parts + a for a in range(parts) for _ in range(parts)], dtype=np.int64)
    jj = np.array([j * parts + b for _ in range(parts) for b in range(parts)], dtype=np.int64)
    dtype = _dtype_for(F, Dq)
    lo, hi = scaled_interval(
        F, Dq, (ii - Dq).astype(dtype), (ii + 1 - Dq).astype(dtype), (jj - Dq).astype(dtype), (jj + 1 - Dq).astype(dtype)
    )
    thr = Dq ** F.degree // D  # |F| <= 1/D scaled by Dq^k
    if not np.any((lo <= thr) & (hi >= -thr)):
        return None, None
    return 0, 0


def patch_of_direction(patches: Sequence[Patch], t1: Fraction, t2: Fraction) -> list[Patch]:
    return [p for p in patches if p.contains(t1, t2)]


def cells_containing(D: int, t1: Fraction, t2: Fraction) -> list[tuple[int, int]]:
    """Grid cells (closed squares) containing the point (t1, t2) of [-1,1]^2."""
    out = []
    x = (t1 + 1) * D
    y = (t2 + 1) * D
    xs = {math.floor(x)} | ({math.floor(x) - 1} if x == math.floor(x) else set())
    ys = {math.floor(y)} | ({math.floor(y) - 1} if y == math.floor(y) else set())
    for a in xs:
        for b in ys:
            if 0 <= a < 2 * D and 0 <= b < 2 * D:
                out.append((a, b))
    return out
