"""Auxiliary forms: parameters, monomial sizes, column reduction and fitting.

Verify mode fits an exact kernel form through known points
(:func:`fit_nullspace`); search mode (:func:`fit_lattice`) finds integer
forms that are provably small on the whole patch from the local
approximants, so that they vanish at every in-patch integer solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import flint

from .forms import TernaryForm, iroot
from .patch_cover import Patch, PatchConstants


class ParameterRangeError(ValueError):
    """Raised when (B, N) fall outside the admissible range of a mode."""

    def __init__(self, condition: str, detail: str):
        super().__init__(f"condition {condition} violated: {detail}")
        self.condition = condition


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolverParams:
    B: Fraction
    N: int
    k: int
    h: int
    H: int
    s: int
    M: int
    mode: str
    c: Fraction
    c_prime: Fraction
    M0: int

    @property
    def eta(self) -> Fraction:
        """Upper bound N (B/2)^-k for |F(t1, t2, 1)| at in-shell solutions."""
        return Fraction(self.N) / (Fraction(self.B) / 2) ** self.k

    @property
    def D(self) -> int:
        return self.M0 * self.M


DEFAULT_C = {"theorem1": Fraction(1, 8), "theorem2": Fraction(1)}
DEFAULT_C_PRIME = Fraction(1)


def _floor_root(x: Fraction, n: int) -> int:
    """floor(x^(1/n)) for rational x >= 0."""
    # floor(x^(1/n)) == floor(floor(x)^(1/n)) because (m+1)^n is an integer
    return iroot(x.numerator // x.denominator, n)[0]


def choose_parameters(B, N: int, k: int, mode: str = "theorem1", M0: int = 1,
                      c=None, c_prime=None, h: int | None = None) -> SolverParams:
    """Parameters (M, h, H, s) with the admissibility checks of the chosen mode.

    theorem1: h = 2, M = floor(c B^(9/10) N^(1/10)); requires (c0) and (c3).
    theorem2: h = floor((k-1)/2), M = floor(c B^(4/(h+3))); requires (c0),
    (c1) and N <= c' B.
    """
    if k < 3:
        raise ValueError("forms of degree k >= 3 are required")
    if N < 1:
        raise ValueError("N must be positive")
    B = Fraction(B)
    if B < 2:
        raise ValueError("B must be at least 2")
    c = Fraction(DEFAULT_C[mode] if c is None else c)
    c_prime = Fraction(DEFAULT_C_PRIME if c_prime is None else c_prime)
    if mode == "theorem1":
        h = 2
        M = _floor_root(c**10 * B**9 * N, 10)
    elif mode == "theorem2":
        h = (k - 1) // 2 if h is None else h
        if h < 1:
            raise ValueError("theorem2 needs k >= 3")
        M = _floor_root(c ** (h + 3) * B**4, h + 3)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    M = max(M, 1)
    H = (h + 1) * (h + 2) // 2
    s = H * (H - 1) // 2
    eta = Fraction(N) / (B / 2) ** k
    if Fraction(M) > 1 / (eta * M0):
        raise ParameterRangeError("(c0)", f"M={M} exceeds (B/2)^k N^-1 M0^-1")
    if mode == "theorem1":
        if Fraction(1, M**3) < eta:
            raise ParameterRangeError("(c3)", f"M^-3 < N (B/2)^-k for M={M}")
    else:
        if eta > Fraction(1, M ** (H - 1)):
            raise ParameterRangeError("(c1)", f"N (B/2)^-k > M^-(H-1) for M={M}")
        if N > c_prime * B:
            raise ParameterRangeError("(c2)", f"N > c' B")
    return SolverParams(B, N, k, h, H, s, M, mode, c, c_prime, M0)


# ---------------------------------------------------------------------------
# Monomial sizes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonomialOrder:
    X_v: Fraction
    X_delta: Fraction
    ordered: tuple  # of (e, f) for v^e delta^f
    pattern: str  # "powers_of_v" or "delta_in_first_H"

    def size(self, m) -> Fraction:
        e, f = m
        return self.X_v**e * self.X_delta**f


def order_monomials(params: SolverParams, consts: PatchConstants | None = None, count: int | None = None) -> MonomialOrder:
    """Monomials v^e delta^f by non-increasing size, ties with larger e first."""
    M0 = consts.M0 if consts is not None else params.M0
    X_v = Fraction(1, M0 * params.M)
    X_d = params.eta
    H = params.H
    top = count or 2 * H
    cands = [(e, f) for e in range(top + 1) for f in range(top + 1)]
    cands.sort(key=lambda m: (-(X_v ** m[0] * X_d ** m[1]), -m[0]))
    ordered = tuple(cands[:top])
    pattern = "powers_of_v" if all(f == 0 for _, f in ordered[:H]) else "delta_in_first_H"
    return MonomialOrder(X_v, X_d, ordered, pattern)


# ---------------------------------------------------------------------------
# Column reduction with an explicit determinant bound
# ---------------------------------------------------------------------------


def monomials_upto(n: int, D: int) -> list[tuple[int, ...]]:
    out = []

    def rec(prefix, left, rem):
        if left == 0:
            out.append(tuple(prefix))
            return
        for e in range(rem + 1):
            rec(prefix + [e], left - 1, rem - e)

    rec([], n, D)
    return out


def _msize(m, sizes) -> Fraction:
    out = Fraction(1)
    for x, e in zip(sizes, m):
        out *= Fraction(x) ** e
    return out


def C_bound(H: int, n: int, D: int) -> int:
    """C(H, D) = H! (2^H)^H T(n, D)^H with T(n, D) = #monomials of degree <= D."""
    T = math.comb(n + D, D)
    return math.factorial(H) * (2**H) ** H * T**H


@dataclass
class DetBound:
    reduced: list  # polynomials as {exponent tuple: Fraction}
    indices: list  # 1-based index of each reduced column's leading monomial (None if zero)
    bound: Fraction
    monomials: list = field(repr=False, default_factory=list)
    sign: int = 1  # det(g) = sign * det(f)

    @property
    def vanishes(self) -> bool:
        return any(i is None for i in self.indices)


def _height(p: dict) -> Fraction:
    return max((abs(Fraction(c)) for c in p.values()), default=Fraction(0))


def reduce_columns(fs: Sequence[dict], sizes: Sequence, D: int | None = None) -> DetBound:
    """Reduce H polynomials so their leading-monomial indices strictly increase.

    ``fs`` are polynomials {exponent tuple: coefficient} in n variables whose
    sizes are ``sizes``.  Monomials of degree <= D are ranked by size
    (largest first, ties lexicographic).  At each step the remaining column
    with the earliest leading monomial and the largest leading coefficient is
    moved forward and that monomial is cleared from the later columns using
    ratios of modulus at most 1.
    """
    H = len(fs)
    n = len(sizes)
    if D is None:
        D = max((sum(m) for f in fs for m in f), default=0)
    mons = monomials_upto(n, D)
    mons.sort(key=lambda m: (-_msize(m, sizes), m))
    index = {m: t for t, m in enumerate(mons)}
    cols = [{m: Fraction(c) for m, c in f.items() if c} for f in fs]
    hmax = max((_height(f) for f in cols), default=Fraction(0))

    def lead(p):
        return min((index[m] for m in p), default=None)

    sign = 1
    indices: list = []
    for t in range(H):
        leads = [(lead(cols[j]), j) for j in range(t, H)]
        live = [(l, j) for l, j in leads if l is not None]
        if not live:
            indices.extend([None] * (H - t))
            break
        lmin = min(l for l, _ in live)
        m = mons[lmin]
        best = max((j for l, j in live if l == lmin), key=lambda j: abs(cols[j][m]))
        if best != t:
            cols[t], cols[best] = cols[best], cols[t]
            sign = -sign
        piv = cols[t][m]
        for j in range(t + 1, H):
            cj = cols[j].get(m)
            if cj:
                ratio = cj / piv
                new = dict(cols[j])
                for mm, cc in cols[t].items():
                    val = new.get(mm, 0) - ratio * cc
                    if val:
                        new[mm] = val
                    else:
                        new.pop(mm, None)
                cols[j] = new
        indices.append(lmin + 1)
    prod = Fraction(1)
    for m in mons[:H]:
        prod *= _msize(m, sizes)
    bound = C_bound(H, n, D) * hmax**H * prod
    return DetBound(cols, indices, bound, mons, sign)


def eval_poly(p: dict, x: Sequence) -> Fraction:
    total = Fraction(0)
    for m, c in p.items():
        term = Fraction(c)
        for xi, e in zip(x, m):
            term *= Fraction(xi) ** e
        total += term
    return total


def det_at(fs: Sequence[dict], points: Sequence[Sequence]) -> Fraction:
    mat = [[eval_poly(f, x) for f in fs] for x in points]
    return _det_fraction(mat)


def _det_fraction(mat) -> Fraction:
    n = len(mat)
    if n == 0:
        return Fraction(1)
    den = 1
    for row in mat:
        for v in row:
            den = den * Fraction(v).denominator // math.gcd(den, Fraction(v).denominator)
    imat = flint.fmpz_mat([[int(Fraction(v) * den) for v in row] for row in mat])
    return Fraction(int(imat.det()), den**n)


# ---------------------------------------------------------------------------
# Auxiliary forms
# ---------------------------------------------------------------------------


def ternary_monomials(h: int) -> list[tuple[int, int, int]]:
    """Degree-h exponents in descending lexicographic order."""
    return [(a, b, h - a - b) for a in range(h, -1, -1) for b in range(h - a, -1, -1)]


@dataclass(frozen=True)
class AuxForm:
    form: TernaryForm
    patch: Patch | None
    provenance: str  # "nullspace" or "lattice"
    height: int

    @property
    def degree(self) -> int:
        return self.form.degree


def normalize_form(coeffs: dict[tuple[int, int, int], int], h: int) -> TernaryForm | None:
    """Primitive form with positive leading coefficient (descending lex order)."""
    vals = [int(v) for v in coeffs.values() if v]
    if not vals:
        return None
    g = 0
    for v in vals:
        g = math.gcd(g, v)
    lead = next(coeffs[m] for m in ternary_monomials(h) if coeffs.get(m))
    sgn = 1 if lead > 0 else -1
    return TernaryForm(h, {m: sgn * int(v) // g for m, v in coeffs.items() if v})


def _aux(form: TernaryForm, patch, provenance) -> AuxForm:
    return AuxForm(form, patch, provenance, form.height)


@dataclass(frozen=True)
class NullspaceSignal:
    kind: str  # "rank_full" or "empty"


RANK_FULL = NullspaceSignal("rank_full")
NO_POINTS = NullspaceSignal("empty")


def monomial_matrix(points: Iterable[Sequence[int]], h: int) -> flint.fmpz_mat:
    mons = ternary_monomials(h)
    return flint.fmpz_mat([[x[0] ** a * x[1] ** b * x[2] ** c for a, b, c in mons] for x in points])


def kernel_forms(points: Sequence[Sequence[int]], h: int) -> list[TernaryForm]:
    """Reduced basis of the integer forms of degree h vanishing at the points.

    LLL with a unimodular transform on the transposed monomial matrix turns
    dependencies into zero rows; the matching transform rows span the full
    (saturated) integer kernel.
    """
    mons = ternary_monomials(h)
    if not points:
        return [normalize_form({m: 1}, h) for m in mons]
    A = monomial_matrix(points, h).transpose()
    L, T = A.lll(transform=True)
    kern = [[int(T[i, j]) for j in range(T.ncols())] for i in range(L.nrows())
            if all(L[i, j] == 0 for j in range(L.ncols()))]
    if not kern:
        return []
    K = flint.fmpz_mat(kern).lll()
    out = []
    for i in range(K.nrows()):
        f = normalize_form({m: int(K[i, t]) for t, m in enumerate(mons)}, h)
        if f is not None:
            out.append(f)
    out.sort(key=lambda f: (f.height, str(f)))
    return out


def fit_nullspace(points: Sequence[Sequence[int]], h: int, patch: Patch | None = None):
    """Primitive integer degree-h form through all points, or a signal.

    Returns :data:`NO_POINTS` for an empty list, :data:`RANK_FULL` when the
    monomial matrix has rank H, and otherwise the kernel form of smallest
    height (exact fraction-free elimination).
    """
    if not points:
        return NO_POINTS
    if any(tuple(x) == (0, 0, 0) for x in points):
        raise ValueError("points must be nonzero")
    forms = kernel_forms(points, h)
    if not forms:
        return RANK_FULL
    return _aux(forms[0], patch, "nullspace")


# ---------------------------------------------------------------------------
# Lattice fitting
# ---------------------------------------------------------------------------


class LatticeFit:
    """Outcome of :func:`fit_lattice_all`.

    ``vectors`` holds the certified coefficient vectors (ordered as
    ``ternary_monomials(h)``, shortest first); ``empty`` is set when they
    span all forms of degree h, which proves the patch has no solutions.
    """

    __slots__ = ("vectors", "h", "patch", "bounds", "_forms")

    def __init__(self, vectors, h, patch, bounds):
        self.vectors = vectors
        self.h = h
        self.patch = patch
        self.bounds = bounds
        self._forms = None

    @property
    def empty(self) -> bool:
        return len(self.vectors) == (self.h + 1) * (self.h + 2) // 2

    @property
    def reason(self) -> str:
        return "" if self.vectors else "no certified vector"

    @property
    def forms(self) -> list:
        if self._forms is None:
            mons = ternary_monomials(self.h)
            out = []
            for lam in self.vectors:
                f = normalize_form({m: l for m, l in zip(mons, lam) if l}, self.h)
                if f is not None:
                    out.append(_aux(f, self.patch, "lattice"))
            self._forms = out
        return self._forms


def oriented_exponents(h: int, swapped: bool) -> list[tuple[tuple[int, int, int], tuple[int, int]]]:
    """(ternary exponent, approximant exponent (e, f)) pairs."""
    out = []
    for a, b, c in ternary_monomials(h):
        out.append(((a, b, c), (b, a) if swapped else (a, b)))
    return out


def lattice_scale(B, h: int) -> tuple[int, int, int]:
    """(Bc, Z, S): Bc >= B integer, S = Bc^h 2^Z."""
    Bc = math.ceil(Fraction(B))
    Z = 40 + math.ceil(h * math.log2(max(Bc, 2)))
    return Bc, Z, Bc**h * 2**Z


def _approx_ints(a, columns, S: int):
    """Integer columns and scaled error for an approximant without lattice data."""
    ints = []
    for col in columns:
        c = Fraction(a.G.get(col, 0))
        i, j = col
        val = c * Fraction(a.v_size) ** i * Fraction(a.d_size) ** j * S
        ints.append(math.floor(val))
    extra = sum(abs(Fraction(c)) * Fraction(a.v_size) ** i * Fraction(a.d_size) ** j
                for (i, j), c in a.G.items() if (i, j) not in set(columns))
    err = float((Fraction(a.err_bound) + extra) * S) * (1 + 1e-12) + len(columns)
    return ints, err


def fit_lattice_all(patch: Patch, approx: Sequence, params: SolverParams, swapped: bool = False,
                    B_level=None, columns=None) -> LatticeFit:
    """All reduced-basis forms certified to vanish on the in-patch solutions.

    Each approximant gives integers E (S times its coefficient sizes) and a
    scaled error e_mu.  For a coefficient vector lambda the form satisfies
    |A(x)| <= (sum_cols |(lambda E)_col| + sum_mu |lambda_mu| e_mu) / 2^Z
    for every in-patch x with |F(x)| <= N; the vector is certified when this
    bound is below 1, which forces A(x) = 0.
    """
    h = params.h
    Bl = params.B if B_level is None else B_level
    Bc, Z, S = lattice_scale(Bl, h)
    by_ef = {(a.e, a.f): a for a in approx}
    pairs = oriented_exponents(h, swapped)
    if columns is None:
        cols = sorted({c for a in approx for c in a.G}, key=lambda c: (c[1], c[0]))
    else:
        cols = list(columns)
    rows = []
    errs = []
    for _, ef in pairs:
        a = by_ef[ef]
        if a.ints is not None and a.scale == S:
            ints, err = a.ints, a.err_scaled
        else:
            ints, err = _approx_ints(a, cols, S)
        rows.append(ints)
        errs.append(err)
    Hn = len(pairs)
    ncol = len(rows[0])
    mat = []
    for m, row in enumerate(rows):
        diag = [0] * Hn
        diag[m] = max(1, math.ceil(errs[m]))
        mat.append(list(row) + diag)
    L, T = flint.fmpz_mat(mat).lll(transform=True)
    limit = 2**Z
    vectors = []
    bounds = []
    for lrow, lam in zip(L.tolist(), T.tolist()):
        main = sum(abs(x) for x in lrow[:ncol])
        tot = (float(main) + sum(float(abs(l)) * e for l, e in zip(lam, errs))) * (1 + 1e-12)
        bounds.append(tot / limit)
        if tot < limit and any(lam):
            vectors.append([int(l) for l in lam])
    order = sorted(range(len(vectors)), key=lambda i: sum(x * x for x in vectors[i]))
    return LatticeFit([vectors[i] for i in order], h, patch, bounds)


def fit_lattice(patch: Patch, approx: Sequence, params: SolverParams, swapped: bool = False,
                B_level=None) -> AuxForm | None:
    """The shortest certified lattice form, or None (patch falls back to enumeration)."""
    fit = fit_lattice_all(patch, approx, params, swapped, B_level)
    return fit.forms[0] if fit.forms else None
