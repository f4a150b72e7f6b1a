"""Integer points of F(x) = N (or |F(x)| <= N) on lines and conics.

Auxiliary forms of degree 1 or 2 are split into rational components; each
line or conic with a rational point is parameterized by binary forms
(f1, f2, f3), which turns F = N into binary form equations G(u, v) = N0
solved by divisor splitting, a Pell-type scan or bounded Thue enumeration.
Everything is exact; every emitted point is checked by substitution.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import flint
import numpy as np

from .forms import (
    BinaryForm,
    TernaryForm,
    binary_ctx,
    content,
    divisors,
    exact_root,
    factorize,
    iroot,
    ternary_ctx,
)

Triple = tuple[int, int, int]

EQUATION = "equation"  # F(x) = N
SIGNED = "signed"  # |F(x)| = N
INEQUALITY = "inequality"  # |F(x)| <= N


# ---------------------------------------------------------------------------
# Components
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CurveComponent:
    """A rational line, conic or conjugate line pair.

    For ``conjugate-line-pair`` the form is the rational quadratic that
    splits only over a quadratic field; its rational points are the
    multiples of ``point`` (the intersection of the two lines).
    """

    kind: str
    form: TernaryForm
    point: Triple | None = None

    def __str__(self) -> str:
        return f"{self.kind}: {self.form}"


def _primitive(vec: Sequence[int]) -> Triple:
    g = content(vec)
    if g == 0:
        raise ValueError("zero vector")
    out = [int(c) // g for c in vec]
    for c in out:
        if c:
            if c < 0:
                out = [-x for x in out]
            break
    return tuple(out)


def _as_form(A) -> TernaryForm:
    return A.form if hasattr(A, "form") else A


def quadratic_matrix(Q: TernaryForm) -> flint.fmpz_mat:
    """Integer symmetric S with 2 Q(x) = x^T S x."""
    S = [[0] * 3 for _ in range(3)]
    for e, c in Q.coeffs:
        idx = [i for i in range(3) for _ in range(e[i])]
        if idx[0] == idx[1]:
            S[idx[0]][idx[0]] += 2 * c
        else:
            S[idx[0]][idx[1]] += c
            S[idx[1]][idx[0]] += c
    return flint.fmpz_mat(S)


def _integer_kernel(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """A basis (in Hermite form) of the integer kernel of a matrix."""
    M = flint.fmpz_mat([list(r) for r in rows]).transpose()
    L, T = M.lll(transform=True)
    basis = [T.tolist()[i] for i, row in enumerate(L.tolist()) if not any(row)]
    if not basis:
        return []
    H = flint.fmpz_mat(basis).hnf().tolist()
    return [[int(c) for c in r] for r in H if any(r)]


def factor_aux(A) -> list[CurveComponent]:
    """Rational components of an auxiliary form of degree 1 or 2."""
    A = _as_form(A)
    if A.degree not in (1, 2):
        raise ValueError("auxiliary form must have degree 1 or 2")
    _, factors = A.to_flint().factor()
    out: list[CurveComponent] = []
    seen = set()
    for f, _ in factors:
        form = TernaryForm.from_flint(f)
        if form.coeffs[0][1] < 0:
            form = TernaryForm(form.degree, {e: -c for e, c in form.coeffs})
        if form in seen:
            continue
        seen.add(form)
        if form.degree == 1:
            out.append(CurveComponent("line", form))
            continue
        S = quadratic_matrix(form)
        if S.rank() == 3:
            out.append(CurveComponent("conic", form))
        else:
            # irreducible over Q but of rank 2: two conjugate lines meeting
            # in a rational point
            ker = _integer_kernel(S.tolist())
            out.append(CurveComponent("conjugate-line-pair", form, _primitive(ker[0])))
    return out


# ---------------------------------------------------------------------------
# Local solvability of conics
# ---------------------------------------------------------------------------


def _diagonalize(S: Sequence[Sequence[int]]) -> list[Fraction]:
    """Diagonal entries of a rational congruence diagonalization of S."""
    A = [[Fraction(int(c)) for c in row] for row in S]
    n = len(A)
    diag = []
    for i in range(n):
        if A[i][i] == 0:
            j = next((j for j in range(i + 1, n) if A[j][j] != 0), None)
            if j is not None:
                A[i], A[j] = A[j], A[i]
                for row in A:
                    row[i], row[j] = row[j], row[i]
            else:
                j = next((j for j in range(i + 1, n) if A[i][j] != 0), None)
                if j is not None:
                    # replace e_i by e_i + e_j to create a nonzero pivot
                    for c in range(n):
                        A[i][c] += A[j][c]
                    for r in range(n):
                        A[r][i] += A[r][j]
        p = A[i][i]
        diag.append(p)
        if p == 0:
            continue
        for r in range(i + 1, n):
            f = A[r][i] / p
            if f:
                for c in range(n):
                    A[r][c] -= f * A[i][c]
                for c in range(n):
                    A[c][r] -= f * A[c][i]
    return diag


def _squarefree_int(x: Fraction) -> int:
    n = x.numerator * x.denominator
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in factorize(n).items():
        if e % 2:
            out *= p
    return sign * out


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def hilbert_symbol(a: int, b: int, p) -> int:
    """Hilbert symbol (a, b)_p for nonzero integers; p a prime or "inf"."""
    if p == "inf":
        return -1 if a < 0 and b < 0 else 1
    alpha = beta = 0
    while a % p == 0:
        a //= p
        alpha += 1
    while b % p == 0:
        b //= p
        beta += 1
    if p != 2:
        s = (-1) ** (alpha * beta * ((p - 1) // 2))
        return s * _legendre(a, p) ** beta * _legendre(b, p) ** alpha
    eps = lambda x: ((x - 1) // 2) % 2
    omg = lambda x: ((x * x - 1) // 8) % 2
    return (-1) ** (eps(a) * eps(b) + alpha * omg(b) + beta * omg(a))


def failing_places(Q: TernaryForm) -> list:
    """Places where the conic Q = 0 has no nontrivial local point."""
    d = _diagonalize(quadratic_matrix(Q).tolist())
    if any(x == 0 for x in d):
        return []
    a, b, c = (_squarefree_int(x) for x in d)
    x, y = -a * c, -b * c
    places = ["inf"] + sorted({2} | set(factorize(a * b * c)))
    return [p for p in places if hilbert_symbol(x, y, p) != 1]


# ---------------------------------------------------------------------------
# Parameterization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Parameterization:
    """x = lambda/nu * (f1(u, v), f2(u, v), f3(u, v)), nu | R."""

    component: CurveComponent
    f: tuple[BinaryForm, BinaryForm, BinaryForm]
    degree: int
    R: int
    point: Triple | None = None

    @property
    def nus(self) -> list[int]:
        return divisors(self.R)

    def __call__(self, u: int, v: int) -> Triple:
        return tuple(fi(u, v) for fi in self.f)


@dataclass(frozen=True)
class NoRationalPoint:
    component: CurveComponent
    places: tuple

    def __bool__(self) -> bool:
        return False


def _bf(poly, degree: int) -> BinaryForm:
    d = {tuple(int(e) for e in k): int(c) for k, c in poly.to_dict().items()}
    return BinaryForm(degree, d)


def _resolvent(fs: Sequence[BinaryForm]) -> int:
    from .forms import binary_resultant

    g = 0
    for a, b in itertools.combinations(fs, 2):
        g = math.gcd(g, binary_resultant(a, b))
    return abs(g)


def _line_param(comp: CurveComponent) -> Parameterization:
    a = [comp.form[(1, 0, 0)], comp.form[(0, 1, 0)], comp.form[(0, 0, 1)]]
    b1, b2 = _integer_kernel([a])
    ctx = binary_ctx()
    u, v = ctx.gens()
    fs = tuple(_bf(b1[i] * u + b2[i] * v, 1) for i in range(3))
    R = _resolvent(fs)
    return Parameterization(comp, fs, 1, R or 1)


def find_rational_point(Q: TernaryForm, small: int = 12, height_bound: int = 10**6) -> Triple | None:
    """A primitive integer point on Q = 0 (small exhaustive search first)."""
    rng = np.arange(-small, small + 1, dtype=np.int64)
    X1, X2, X3 = np.meshgrid(rng, rng, rng, indexing="ij")
    val = np.zeros_like(X1)
    for e, c in Q.coeffs:
        val += c * X1 ** e[0] * X2 ** e[1] * X3 ** e[2]
    hits = np.argwhere(val == 0)
    best = None
    for i, j, l in hits:
        p = (int(rng[i]), int(rng[j]), int(rng[l]))
        if p == (0, 0, 0) or math.gcd(*p) != 1:
            continue
        key = (max(map(abs, p)), sum(map(abs, p)), [-abs(c) for c in p], [-c for c in p])
        if best is None or key < best[0]:
            best = (key, p)
    if best is not None:
        return _primitive(best[1])
    import sympy
    from sympy.solvers.diophantine.diophantine import diop_ternary_quadratic

    xs = sympy.symbols("x1 x2 x3")
    expr = sum(c * xs[0] ** e[0] * xs[1] ** e[1] * xs[2] ** e[2] for e, c in Q.coeffs)
    sol = diop_ternary_quadratic(expr)
    if sol is None or sol[0] is None:
        return None
    p = _primitive([int(c) for c in sol])
    if Q(p) != 0 or max(map(abs, p)) > height_bound:
        return None
    return p


def _complete_basis(P: Triple) -> tuple[list[int], list[int]]:
    """e1, e2 with (P, e1, e2) a basis of Z^3."""
    # w . P = 1 from two extended gcds; Z^3 = Z P + ker(w)
    g1, s1, t1 = _xgcd(P[0], P[1])
    g, s2, t2 = _xgcd(g1, P[2])
    w = [s2 * s1, s2 * t1, t2]
    assert g == 1 and sum(a * b for a, b in zip(w, P)) == 1
    e1, e2 = _integer_kernel([w])
    return e1, e2


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _conic_param(comp: CurveComponent, P: Triple) -> Parameterization:
    S = quadratic_matrix(comp.form).tolist()
    S = [[int(c) for c in r] for r in S]
    e1, e2 = _complete_basis(P)
    ctx = binary_ctx()
    u, v = ctx.gens()
    d = [v * e1[i] + u * e2[i] for i in range(3)]
    Sd = [sum(S[i][j] * d[j] for j in range(3)) for i in range(3)]
    dSd = sum(d[i] * Sd[i] for i in range(3))
    PSd = sum(P[i] * Sd[i] for i in range(3))
    # Q(alpha P + beta d) = 0 for alpha = Q(d), beta = -2 B(P, d); doubled
    polys = [dSd * P[i] - 2 * PSd * d[i] for i in range(3)]
    g = 0
    for p in polys:
        for c in p.coeffs():
            g = math.gcd(g, int(c))
    polys = [p / g for p in polys] if g > 1 else polys
    lead = next(int(c) for p in polys for c in p.coeffs() if int(c))
    if lead < 0:
        polys = [-p for p in polys]
    fs = tuple(_bf(p, 2) for p in polys)
    R = _resolvent(fs)
    return Parameterization(comp, fs, 2, R, P)


def parameterize(comp: CurveComponent, height_bound: int = 10**6):
    """Binary-form parameterization of a line or conic, or NoRationalPoint."""
    if comp.kind == "line":
        return _line_param(comp)
    if comp.kind != "conic":
        raise ValueError("only lines and conics are parameterized")
    places = failing_places(comp.form)
    if places:
        return NoRationalPoint(comp, tuple(places))
    P = find_rational_point(comp.form, height_bound=height_bound)
    if P is None:
        return NoRationalPoint(comp, ())
    return _conic_param(comp, P)


def compose_param(F: TernaryForm, fs: Sequence[BinaryForm]):
    """F(f1, f2, f3) as a flint polynomial in (u, v)."""
    polys = [fi.to_flint() for fi in fs]
    return F.to_flint().compose(*polys, ctx=binary_ctx())


# ---------------------------------------------------------------------------
# Special components
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpecialCertificate:
    """F(f1', f2', f3') = c v^(d k) identically, f' = f o U with U unimodular."""

    component: CurveComponent
    param: Parameterization
    c: int
    exponent: int
    change: tuple[tuple[int, int], tuple[int, int]]

    def verify(self, F: TernaryForm) -> bool:
        G = compose_param(F, self.param.f)
        u, v = binary_ctx().gens()
        return G - self.c * v**self.exponent == 0


def _substitute(f: BinaryForm, U) -> BinaryForm:
    ctx = binary_ctx()
    u, v = ctx.gens()
    (a, b), (c, d) = U
    return _bf(f.to_flint().compose(a * u + b * v, c * u + d * v, ctx=ctx), f.degree)


def detect_special(comp: CurveComponent, param: Parameterization, F: TernaryForm) -> SpecialCertificate | None:
    """Certificate that F(f1, f2, f3) is a constant times a power of a linear form."""
    G = compose_param(F, param.f)
    if G == 0:
        return None
    c0, factors = G.factor()
    if len(factors) != 1:
        return None
    L, e = factors[0]
    if L.total_degree() != 1 or e != param.degree * F.degree:
        return None
    ld = L.to_dict()
    alpha = int(ld.get((1, 0), 0))
    beta = int(ld.get((0, 1), 0))
    g, s, t = _xgcd(alpha, beta)
    assert g == 1
    # new variables (u', v') with v' = alpha u + beta v; u = beta u' + s v', v = -alpha u' + t v'
    U = ((beta, s), (-alpha, t))
    fs = tuple(_substitute(f, U) for f in param.f)
    new = Parameterization(comp, fs, param.degree, _resolvent(fs) or param.R, param.point)
    cert = SpecialCertificate(comp, new, int(c0), e, U)
    assert cert.verify(F), "special identity failed"
    return cert


# ---------------------------------------------------------------------------
# Binary form equations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BinaryFormEquation:
    """G(u, v) = rhs, classified by the rational factorization of G."""

    G: BinaryForm
    rhs: int
    kind: str
    c: int
    factors: tuple  # ((BinaryForm, exponent), ...), primitive irreducible

    @property
    def split(self) -> tuple[BinaryForm, BinaryForm] | None:
        """(G1, G2) coprime with G = G1 G2, for the split kind."""
        if self.kind != "split-coprime":
            return None
        ctx = binary_ctx()
        g1, e1 = self.factors[0]
        G1 = g1.to_flint() ** e1
        G2 = ctx.from_dict({(0, 0): self.c})
        for g, e in self.factors[1:]:
            G2 = G2 * g.to_flint() ** e
        return _bf(G1, G1.total_degree()), _bf(G2, G2.total_degree())


def binary_equation(G: BinaryForm, rhs: int) -> BinaryFormEquation:
    if rhs == 0:
        raise ValueError("rhs 0 is a degenerate component; handle it separately")
    c0, facs = G.to_flint().factor()
    factors = tuple((_bf(f, f.total_degree()), int(e)) for f, e in facs)
    if len(factors) > 1:
        kind = "split-coprime"
    elif not factors:
        raise ValueError("constant form")
    else:
        d = factors[0][0].degree
        kind = {1: "special-linear", 2: "pell"}.get(d, "thue")
    return BinaryFormEquation(G, int(rhs), kind, int(c0), factors)


Range = tuple[int, int]


def _norm_bounds(bounds) -> tuple[Range, Range]:
    bu, bv = bounds
    bu = (-bu, bu) if isinstance(bu, int) else (int(bu[0]), int(bu[1]))
    bv = (-bv, bv) if isinstance(bv, int) else (int(bv[0]), int(bv[1]))
    return bu, bv


def _swap_form(g: BinaryForm) -> BinaryForm:
    return BinaryForm(g.degree, {(j, i): c for (i, j), c in g.coeffs})


def _values_for_power(c: int, e: int, rhs: int) -> list[int]:
    """All m with c * m^e = rhs."""
    if rhs % c:
        return []
    m = exact_root(rhs // c, e)
    if m is None:
        return []
    return [m, -m] if e % 2 == 0 and m else [m]


def solve_binary(eq: BinaryFormEquation, bounds) -> list[tuple[int, int]]:
    """All (u, v) within the bounds with G(u, v) = rhs."""
    (ulo, uhi), (vlo, vhi) = _norm_bounds(bounds)
    if ulo > uhi or vlo > vhi:
        return []
    rng = ((ulo, uhi), (vlo, vhi))
    out: set[tuple[int, int]] = set()
    if eq.kind == "split-coprime":
        G1, G2 = eq.split
        for d in divisors(eq.rhs):
            for s in (1, -1):
                out.update(_solve_pair(G1, s * d, G2, eq.rhs // (s * d), rng))
    else:
        g, e = eq.factors[0]
        for m in _values_for_power(eq.c, e, eq.rhs):
            if eq.kind == "special-linear":
                out.update(_solve_linear(g, m, rng))
            elif eq.kind == "pell":
                out.update(solve_quadratic(g, m, rng))
            else:
                out.update(solve_thue(g, m, rng))
    res = sorted(p for p in out if ulo <= p[0] <= uhi and vlo <= p[1] <= vhi)
    for u, v in res:
        assert eq.G(u, v) == eq.rhs
    return res


def _solve_linear(g: BinaryForm, m: int, rng) -> list[tuple[int, int]]:
    (ulo, uhi), (vlo, vhi) = rng
    a = g.as_dict().get((1, 0), 0)
    b = g.as_dict().get((0, 1), 0)
    gg, s, t = _xgcd(a, b)
    if m % gg:
        return []
    u0, v0 = s * (m // gg), t * (m // gg)
    du, dv = b // gg, -a // gg  # (u0 + T du, v0 + T dv)
    lo, hi = -math.inf, math.inf
    for x0, dx, xl, xh in ((u0, du, ulo, uhi), (v0, dv, vlo, vhi)):
        if dx == 0:
            if not xl <= x0 <= xh:
                return []
            continue
        a1 = Fraction(xl - x0, dx)
        a2 = Fraction(xh - x0, dx)
        lo = max(lo, math.ceil(min(a1, a2)))
        hi = min(hi, math.floor(max(a1, a2)))
    return [(u0 + T * du, v0 + T * dv) for T in range(lo, hi + 1)]


def _int_roots(coeffs_low_first: Sequence[int]) -> list[int]:
    """Integer roots of a univariate integer polynomial (not identically 0)."""
    p = flint.fmpz_poly([int(c) for c in coeffs_low_first])
    if p.degree() < 0:
        raise ValueError("zero polynomial")
    if p.degree() == 0:
        return []
    return [int(r) for r, _ in p.roots()]


def _poly_in_u(g: BinaryForm, v: int, m: int) -> list[int]:
    """Coefficients (low first) of g(u, v) - m as a polynomial in u."""
    cl = [0] * (g.degree + 1)
    for (i, j), c in g.coeffs:
        cl[i] += c * v**j
    cl[0] -= m
    return cl


def _solve_pair(G1: BinaryForm, N1: int, G2: BinaryForm, N2: int, rng) -> list[tuple[int, int]]:
    """Solutions of G1 = N1 and G2 = N2 by elimination of u."""
    (ulo, uhi), (vlo, vhi) = rng
    ctx = binary_ctx()
    P1 = G1.to_flint() - N1
    P2 = G2.to_flint() - N2
    res = P1.resultant(P2, "u")
    out = []
    # res is a polynomial in v alone
    rd = res.to_dict()
    deg = max((int(k[1]) for k in rd), default=0)
    cl = [0] * (deg + 1)
    for k, c in rd.items():
        cl[int(k[1])] += int(c)
    if not any(cl):
        raise ArithmeticError("coprime forms gave a zero resultant")
    vs = _int_roots(cl) if deg > 0 else []
    for v in vs:
        if not vlo <= v <= vhi:
            continue
        # at least one of the two is a nonzero polynomial in u (the forms are coprime)
        polys = [c for c in (_poly_in_u(G1, v, N1), _poly_in_u(G2, v, N2)) if any(c)]
        for u in _int_roots(polys[0]) if polys else []:
            if ulo <= u <= uhi and G1(u, v) == N1 and G2(u, v) == N2:
                out.append((u, v))
    return out


# -- quadratic ---------------------------------------------------------------


def _isqrt_exact(n: int) -> int | None:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def _quad_scan(a: int, b: int, c: int, m: int, rng) -> list[tuple[int, int]]:
    (ulo, uhi), (vlo, vhi) = rng
    Delta = b * b - 4 * a * c
    out = []
    for v in range(vlo, vhi + 1):
        s = _isqrt_exact(Delta * v * v + 4 * a * m)
        if s is None:
            continue
        for sg in ((s, -s) if s else (0,)):
            num = -b * v + sg
            if num % (2 * a) == 0:
                u = num // (2 * a)
                if ulo <= u <= uhi:
                    out.append((u, v))
    return out


def pell_unit(D: int, depth: int = 20000) -> tuple[int, int] | None:
    """Fundamental solution of x^2 - D y^2 = 1 (D > 0 not a square)."""
    a0 = math.isqrt(D)
    if a0 * a0 == D:
        return None
    m, d, a = 0, 1, a0
    p0, p1 = 1, a0
    q0, q1 = 0, 1
    for _ in range(depth):
        if p1 * p1 - D * q1 * q1 == 1:
            return p1, q1
        m = d * a - m
        d = (D - m * m) // d
        a = (a0 + m) // d
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
    return None


def _quad_orbits(a: int, b: int, c: int, m: int, rng, unit) -> list[tuple[int, int]] | None:
    """Solutions via X^2 - Delta Y^2 = K orbits, X = 2au + bv, Y = v."""
    (ulo, uhi), (vlo, vhi) = rng
    Delta = b * b - 4 * a * c
    K = 4 * a * m
    x1, y1 = unit
    if K > 0:
        ybound = math.isqrt(y1 * y1 * K // (2 * (x1 + 1))) + 1
    else:
        ybound = math.isqrt(y1 * y1 * (-K) // (2 * (x1 - 1))) + 1
    V = max(abs(vlo), abs(vhi))
    if ybound >= V:
        return None
    Xmax = 2 * abs(a) * max(abs(ulo), abs(uhi)) + abs(b) * V
    sq = math.sqrt(Delta)
    L = (Xmax + V * sq) * (1 + 1e-9) + 2
    seeds = []
    for Y in range(0, ybound + 1):
        X = _isqrt_exact(K + Delta * Y * Y)
        if X is not None:
            seeds += [(X, Y), (-X, Y), (X, -Y), (-X, -Y)]
    sols = set()
    for X0, Y0 in seeds:
        for step in ((x1, y1), (x1, -y1)):
            X, Y = X0, Y0
            for _ in range(10000):
                if abs(X) <= Xmax and abs(Y) <= V:
                    sols.add((X, Y))
                elif abs(X + Y * sq) > L and abs(X - Y * sq) > L:
                    break
                X, Y = X * step[0] + Delta * Y * step[1], X * step[1] + Y * step[0]
    out = []
    for X, Y in sols:
        num = X - b * Y
        if num % (2 * a) == 0:
            u = num // (2 * a)
            if ulo <= u <= uhi and vlo <= Y <= vhi:
                out.append((u, Y))
    return out


def solve_quadratic(g: BinaryForm, m: int, rng, accelerate: bool = True) -> list[tuple[int, int]]:
    """g(u, v) = m for a binary quadratic g within the ranges."""
    (ulo, uhi), (vlo, vhi) = rng
    d = g.as_dict()
    a, b, c = d.get((2, 0), 0), d.get((1, 1), 0), d.get((0, 2), 0)
    if a == 0:
        if c == 0:
            raise ValueError("u v is reducible")
        return [(u, v) for v, u in solve_quadratic(_swap_form(g), m, ((vlo, vhi), (ulo, uhi)), accelerate)]
    Delta = b * b - 4 * a * c
    if accelerate and Delta > 0 and _isqrt_exact(Delta) is None:
        unit = pell_unit(Delta)
        if unit is not None:
            res = _quad_orbits(a, b, c, m, rng, unit)
            if res is not None:
                return res
    if (uhi - ulo) < (vhi - vlo) and c != 0:
        return [(u, v) for v, u in _quad_scan(c, b, a, m, ((vlo, vhi), (ulo, uhi)))]
    return _quad_scan(a, b, c, m, rng)


# -- Thue ----------------------------------------------------------------------


def solve_thue(g: BinaryForm, m: int, rng) -> list[tuple[int, int]]:
    """g(u, v) = m, g squarefree of degree >= 3, by enumeration of one variable.

    For fixed v != 0 every solution has u within eps(v) of Re(theta) v for a
    root theta of g(t, 1), where eps(v) = |m| / (|a| |v|^(d-1) (sep/2)^(d-1))
    follows from the root separation sep.  Large eps is handled by exact
    integer root finding in u.  The shorter of the two ranges is enumerated.
    """
    (ulo, uhi), (vlo, vhi) = rng
    d = g.as_dict()
    a_u, a_v = d.get((g.degree, 0), 0), d.get((0, g.degree), 0)
    if a_u == 0 and a_v == 0:
        raise ValueError("form must be squarefree with a nonzero extreme coefficient")
    if a_u == 0 or (a_v != 0 and (uhi - ulo) < (vhi - vlo)):
        swapped = _thue_over_v(_swap_form(g), m, ((vlo, vhi), (ulo, uhi)))
        return sorted((u, v) for v, u in swapped)
    return _thue_over_v(g, m, rng)


def _thue_over_v(g: BinaryForm, m: int, rng) -> list[tuple[int, int]]:
    (ulo, uhi), (vlo, vhi) = rng
    d = g.as_dict()
    deg = g.degree
    a_d = d.get((deg, 0), 0)
    if a_d == 0:
        raise ValueError("form must be squarefree with nonzero extreme coefficients")
    out = []
    if vlo <= 0 <= vhi:
        r = None if m % a_d else exact_root(m // a_d, deg)
        for u in ([r, -r] if r is not None and deg % 2 == 0 else [r] if r is not None else []):
            if ulo <= u <= uhi:
                out.append((u, 0))
    poly = flint.fmpz_poly(list(reversed(g.coefficient_list())))
    roots = []
    for z, mult in poly.complex_roots():
        roots.append((float(z.real.mid()), float(z.imag.mid()), float(z.real.rad()) + float(z.imag.rad())))
    sep = min((math.hypot(x1 - x2, y1 - y2) - r1 - r2
               for (x1, y1, r1), (x2, y2, r2) in itertools.combinations(roots, 2)), default=1.0)
    if sep <= 0:
        raise ValueError("roots not separated; form is not squarefree")
    vs = np.concatenate([np.arange(vlo, min(vhi, -1) + 1), np.arange(max(vlo, 1), vhi + 1)]).astype(np.float64)
    if vs.size == 0:
        return sorted(set(out))
    av = np.abs(vs)
    eps = abs(m) / (abs(a_d) * av ** (deg - 1) * (sep / 2) ** (deg - 1)) * (1 + 1e-9) + 1e-9
    coef = np.array(g.coefficient_list(), dtype=np.float64)  # u^d ... v^d
    slow_v = set()
    cand_u: list[np.ndarray] = []
    cand_v: list[np.ndarray] = []
    for re_, im_, rad in roots:
        ok = np.abs(im_) * av - rad * av <= eps + 1e-6
        center = re_ * vs
        width = eps + rad * av + 1e-9 * np.abs(center) + 1
        lo = np.maximum(np.ceil(center - width), ulo)
        hi = np.minimum(np.floor(center + width), uhi)
        wide = ok & (hi - lo > 64)
        slow_v.update(int(x) for x in vs[wide])
        sel = ok & ~wide & (hi >= lo)
        for off in range(0, 66):
            mask = sel & (lo + off <= hi)
            if not mask.any():
                break
            cand_u.append(lo[mask] + off)
            cand_v.append(vs[mask])
    if cand_u:
        U = np.concatenate(cand_u)
        Vv = np.concatenate(cand_v)
        val = np.zeros_like(U)
        mag = np.zeros_like(U)
        for j, cf in enumerate(coef):
            term = cf * U ** (deg - j) * Vv**j
            val += term
            mag += np.abs(term)
        keep = np.abs(val - m) <= mag * 1e-12 + 1
        for u, v in zip(U[keep], Vv[keep]):
            u, v = int(u), int(v)
            if g(u, v) == m:
                out.append((u, v))
    for v in slow_v:
        for u in _int_roots(_poly_in_u(g, v, m)):
            if ulo <= u <= uhi:
                out.append((u, v))
    return sorted(set(out))


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Region:
    """max |x_i| <= B, optionally lo < x3 <= hi and x1/x3, x2/x3 in closed intervals."""

    B: int
    shell: tuple[int, int] | None = None
    t1: tuple[Fraction, Fraction] | None = None
    t2: tuple[Fraction, Fraction] | None = None

    def contains(self, x: Sequence[int]) -> bool:
        if max(abs(c) for c in x) > self.B:
            return False
        if self.shell is not None and not self.shell[0] < x[2] <= self.shell[1]:
            return False
        for i, iv in ((0, self.t1), (1, self.t2)):
            if iv is not None:
                if x[2] <= 0 or not iv[0] * x[2] <= x[i] <= iv[1] * x[2]:
                    return False
        return True

    def constraints(self) -> list[tuple[tuple[Fraction, Fraction, Fraction], Fraction]]:
        """Linear inequalities c . x <= r describing the region."""
        out = []
        for i in range(3):
            e = [Fraction(0)] * 3
            e[i] = Fraction(1)
            out.append((tuple(e), Fraction(self.B)))
            out.append((tuple(-c for c in e), Fraction(self.B)))
        if self.shell is not None:
            out.append(((Fraction(0), Fraction(0), Fraction(-1)), Fraction(-(self.shell[0] + 1))))
            out.append(((Fraction(0), Fraction(0), Fraction(1)), Fraction(self.shell[1])))
        for i, iv in ((0, self.t1), (1, self.t2)):
            if iv is not None:
                lo, hi = Fraction(iv[0]), Fraction(iv[1])
                c = [Fraction(0)] * 3
                c[i], c[2] = Fraction(-1), lo
                out.append((tuple(c), Fraction(0)))
                c = [Fraction(0)] * 3
                c[i], c[2] = Fraction(1), -hi
                out.append((tuple(c), Fraction(0)))
        return out


def _polygon_box(cons) -> tuple[Range, Range] | None:
    """Integer bounding box of {(u, v): a u + b v <= r for all}, or None if empty.

    Vertices are located in floating point with a safety margin, which can
    only enlarge the box; the exact computation is used when the float pass
    sees an empty polygon.
    """
    fc = [(float(a), float(b), float(r)) for a, b, r in cons]
    pts = []
    near = False
    for (a1, b1, r1), (a2, b2, r2) in itertools.combinations(fc, 2):
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        u = (r1 * b2 - r2 * b1) / det
        v = (a1 * r2 - a2 * r1) / det
        worst = max((a * u + b * v - r) / (abs(r) + abs(a * u) + abs(b * v) + 1) for a, b, r in fc)
        if worst <= 1e-9:
            pts.append((u, v))
        elif worst <= 1e-3:
            near = True
    if not pts:
        # a clearly violated float vertex set means the polygon is empty
        return _polygon_box_exact(cons) if near else None
    us = [p[0] for p in pts]
    vs = [p[1] for p in pts]
    pad = lambda x: 1e-7 * (abs(x) + 1) + 1e-6
    umin, umax, vmin, vmax = min(us), max(us), min(vs), max(vs)
    return ((math.ceil(umin - pad(umin)), math.floor(umax + pad(umax))),
            (math.ceil(vmin - pad(vmin)), math.floor(vmax + pad(vmax))))


def _polygon_box_exact(cons) -> tuple[Range, Range] | None:
    pts = []
    for (a1, b1, r1), (a2, b2, r2) in itertools.combinations(cons, 2):
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        u = Fraction(r1 * b2 - r2 * b1) / det
        v = Fraction(a1 * r2 - a2 * r1) / det
        if all(a * u + b * v <= r for a, b, r in cons):
            pts.append((u, v))
    if not pts:
        return None
    us = [p[0] for p in pts]
    vs = [p[1] for p in pts]
    return (math.ceil(min(us)), math.floor(max(us))), (math.ceil(min(vs)), math.floor(max(vs)))


# ---------------------------------------------------------------------------
# Solving on components
# ---------------------------------------------------------------------------


def _targets(N: int, mode: str) -> list[int]:
    if mode == EQUATION:
        return [N]
    if mode == SIGNED:
        return [N, -N]
    return [n for n in range(-N, N + 1) if n]


def _accept(F: TernaryForm, x, N: int, mode: str, region: Region) -> bool:
    val = F(x)
    if mode == EQUATION:
        ok = val == N
    elif mode == SIGNED:
        ok = abs(val) == N
    else:
        ok = abs(val) <= N
    return ok and region.contains(x)


def _multiples(p: Triple, F: TernaryForm, N: int, mode: str, region: Region) -> list[Triple]:
    """Points m p (m != 0) in the region satisfying the F-condition."""
    k = F.degree
    Fp = F(p)
    out = []
    top = region.B // max(abs(c) for c in p)
    if Fp == 0:
        if mode == INEQUALITY:
            out = [tuple(m * c for c in p) for m in range(-top, top + 1) if m]
    else:
        for n in _targets(N, mode):
            if n % Fp == 0:
                m = exact_root(n // Fp, k)
                if m:
                    cands = [m, -m] if k % 2 == 0 else [m]
                    out += [tuple(mm * c for c in p) for mm in cands]
    return [x for x in out if _accept(F, x, N, mode, region)]


def _zero_directions(G) -> list[tuple[int, int]]:
    """Primitive (u, v) with G(u, v) = 0 (linear factors of G)."""
    out = []
    _, facs = G.factor()
    for f, _ in facs:
        if f.total_degree() == 1:
            d = f.to_dict()
            a, b = int(d.get((1, 0), 0)), int(d.get((0, 1), 0))
            out.append((b, -a))
    return out


def _line_points(comp, param, F, N, mode, region) -> list[Triple]:
    cons = []
    for c, r in region.constraints():
        a = sum(ci * fi.as_dict().get((1, 0), 0) for ci, fi in zip(c, param.f))
        b = sum(ci * fi.as_dict().get((0, 1), 0) for ci, fi in zip(c, param.f))
        cons.append((a, b, r))
    box = _polygon_box(cons)
    if box is None:
        return []
    G = compose_param(F, param.f)
    out = []
    if G == 0:
        if mode == INEQUALITY:
            (ul, uh), (vl, vh) = box
            out = [param(u, v) for u in range(ul, uh + 1) for v in range(vl, vh + 1)]
    else:
        Gf = _bf(G, F.degree)
        for n in _targets(N, mode):
            for u, v in solve_binary(binary_equation(Gf, n), box):
                out.append(param(u, v))
        if mode == INEQUALITY:
            for u0, v0 in _zero_directions(G):
                p = param(u0, v0)
                if any(p):
                    out += _multiples(_primitive(p), F, N, mode, region)
    return [x for x in out if _accept(F, x, N, mode, region)]


def _conic_uv_bound(param: Parameterization, scale: Fraction) -> int:
    """|u|, |v| bound given |f_i(u, v)| <= scale for all i."""
    C = [[f.as_dict().get(m, 0) for m in ((2, 0), (1, 1), (0, 2))] for f in param.f]
    Ci = flint.fmpq_mat(flint.fmpz_mat(C)).inv()
    bound = 0
    for row in (0, 2):
        s = sum(abs(Fraction(int(Ci[row, j].p), int(Ci[row, j].q))) for j in range(3))
        bound = max(bound, s * scale)
    return iroot(math.floor(bound), 2)[0] + 1


def _conic_points(comp, param, F, N, mode, region) -> list[Triple]:
    k = F.degree
    G = compose_param(F, param.f)
    out = []
    if G == 0:
        raise ArithmeticError("conic contained in F = 0")
    Gf = _bf(G, 2 * k)
    # x = (lam / nu) f(u, v) with nu | R and lam^k | nu^k n; only the ratio
    # rho = lam / nu matters, so each reduced ratio is solved once
    for n in _targets(N, mode):
        ratios = {}
        for nu in param.nus:
            for lam in divisors(nu * n):
                if (nu**k * n) % lam**k == 0:
                    ratios.setdefault(Fraction(lam, nu), nu)
        signed = sorted({sg * rho for rho in ratios for sg in (1, -1)})
        for rho in signed:
            rhs = Fraction(n) / rho**k
            if rhs.denominator != 1:
                continue
            W = _conic_uv_bound(param, Fraction(region.B) / abs(rho))
            for u, v in solve_binary(binary_equation(Gf, int(rhs)), (W, W)):
                if math.gcd(u, v) != 1:
                    continue
                x = tuple(rho * c for c in param(u, v))
                if any(c.denominator != 1 for c in x):
                    continue
                x = tuple(int(c) for c in x)
                if _accept(F, x, N, mode, region):
                    assert param.R % rho.denominator == 0
                    out.append(x)
    if mode == INEQUALITY:
        for u0, v0 in _zero_directions(G):
            p = param(u0, v0)
            if any(p):
                out += _multiples(_primitive(p), F, N, mode, region)
    return out


def _isqrt_exact_vec(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Integer square roots of an int64 array and a mask of perfect squares."""
    ok = d >= 0
    s = np.floor(np.sqrt(np.where(ok, d, 0).astype(np.float64))).astype(np.int64)
    root = np.full(d.shape, -1, dtype=np.int64)
    for off in (-1, 0, 1):
        c = s + off
        hit = ok & (c >= 0) & (c * c == d)
        root = np.where(hit, c, root)
    return root, root >= 0


def slice_points(form: TernaryForm, region: Region) -> list[Triple]:
    """Integer points of a degree <= 2 curve in a patch region, by slicing.

    For every x3 in the shell and x1 in its interval the form is a
    polynomial of degree <= 2 in x2, solved exactly.  The work is the number
    of (x3, x1) pairs, which is small for a thin patch.
    """
    if region.shell is None or region.t1 is None or region.t2 is None:
        raise ValueError("slicing needs a patch region")
    d = {e: c for e, c in form.coeffs}
    q = lambda e: d.get(e, 0)
    lo, hi = region.shell
    lo = max(lo, 0)
    if hi <= lo:
        return []
    x3 = np.arange(lo + 1, hi + 1, dtype=np.int64)
    t1lo, t1hi = Fraction(region.t1[0]), Fraction(region.t1[1])
    a1 = -((-t1lo.numerator * x3) // t1lo.denominator)  # ceil
    b1 = (t1hi.numerator * x3) // t1hi.denominator
    width = int(max(0, (b1 - a1).max(initial=-1) + 1))
    if width == 0:
        return []
    X3 = np.repeat(x3, width)
    X1 = np.repeat(a1, width) + np.tile(np.arange(width, dtype=np.int64), len(x3))
    keep = X1 <= np.repeat(b1, width)
    X1, X3 = X1[keep], X3[keep]
    height = max(abs(c) for c in d.values())
    big = 64 * height * height * max(hi, region.B) ** 4 >= 2**62
    if form.degree == 1:
        A = np.zeros_like(X1)
        Bc = np.full_like(X1, q((0, 1, 0)))
        C = q((1, 0, 0)) * X1 + q((0, 0, 1)) * X3
    else:
        A = np.full_like(X1, q((0, 2, 0)))
        Bc = q((1, 1, 0)) * X1 + q((0, 1, 1)) * X3
        C = q((2, 0, 0)) * X1 * X1 + q((1, 0, 1)) * X1 * X3 + q((0, 0, 2)) * X3 * X3
    if big:
        return _slice_points_exact(form, region, X1, X3)
    out = []
    a = int(A[0]) if len(A) else 0
    if a != 0:
        disc = Bc * Bc - 4 * a * C
        root, sq = _isqrt_exact_vec(disc)
        for sg in (1, -1):
            num = -Bc + sg * root
            hit = sq & (num % (2 * a) == 0)
            for x1, x2, x3_ in zip(X1[hit], (num[hit] // (2 * a)), X3[hit]):
                out.append((int(x1), int(x2), int(x3_)))
    else:
        lin = Bc != 0
        hit = lin & (C % np.where(lin, Bc, 1) == 0)
        for x1, x2, x3_ in zip(X1[hit], -(C[hit] // Bc[hit]), X3[hit]):
            out.append((int(x1), int(x2), int(x3_)))
        degenerate = (~lin) & (C == 0)
        if degenerate.any():
            # the curve contains a line x1 = const * x3 in this slice
            return _slice_points_exact(form, region, X1, X3)
    return sorted({x for x in out if region.contains(x) and form(x) == 0})


def _slice_points_exact(form, region, X1, X3) -> list[Triple]:
    d = {e: c for e, c in form.coeffs}
    out = []
    u = flint.fmpz_poly([0, 1])
    t2lo, t2hi = Fraction(region.t2[0]), Fraction(region.t2[1])
    for x1, x3 in zip(X1.tolist(), X3.tolist()):
        p = flint.fmpz_poly([0])
        for (e1, e2, e3), c in d.items():
            p += c * x1**e1 * x3**e3 * u**e2
        if p == 0:
            lo2 = math.ceil(t2lo * x3)
            hi2 = math.floor(t2hi * x3)
            out += [(x1, x2, x3) for x2 in range(lo2, hi2 + 1)]
            continue
        for r, _ in p.roots():
            out.append((x1, int(r), x3))
    return sorted({x for x in out if region.contains(x) and form(x) == 0})


def box_points(form: TernaryForm, region: Region) -> list[Triple]:
    """Integer points of a form in a small box: slice two coordinates, solve the third."""
    d = {e: c for e, c in form.coeffs}
    j = max(range(3), key=lambda i: max((e[i] for e in d), default=0))
    others = [i for i in range(3) if i != j]
    B = region.B
    u = flint.fmpz_poly([0, 1])
    out = []
    for a in range(-B, B + 1):
        for b in range(-B, B + 1):
            x = [0, 0, 0]
            x[others[0]], x[others[1]] = a, b
            p = flint.fmpz_poly([0])
            for e, c in d.items():
                p += c * x[others[0]] ** e[others[0]] * x[others[1]] ** e[others[1]] * u ** e[j]
            roots = range(-B, B + 1) if p == 0 else [int(r) for r, _ in p.roots()]
            for r in roots:
                x[j] = r
                out.append(tuple(x))
    return sorted({x for x in out if region.contains(x) and form(x) == 0})


BOX_SLICE_LIMIT = 40_000


def exact_root_floor(n: int, k: int) -> int:
    return iroot(n, k)[0]


def _slice_work(region: Region) -> int:
    if region.shell is None or region.t1 is None or region.t2 is None:
        return -1
    lo, hi = region.shell
    side = region.t1[1] - region.t1[0]
    return max(0, hi - lo) * (math.floor(side * hi) + 2)


SLICE_LIMIT = 400_000


def solve_on_component(comp: CurveComponent, F: TernaryForm, N: int, region: Region | int,
                       mode: str = EQUATION, param=None, height_bound: int = 10**6,
                       method: str = "auto") -> list[Triple]:
    """Integer points of the component in the region with F(x) = N (or |F(x)| <= N).

    ``method`` is "param" (parameterize and solve a binary form equation),
    "slice" (exact slicing, patch regions only) or "auto", which slices
    conics in thin patch regions or small boxes and parameterizes otherwise.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if isinstance(region, int):
        region = Region(region)
    work = _slice_work(region)
    use_slice = method == "slice" or (method == "auto" and comp.kind == "conic" and 0 <= work <= SLICE_LIMIT)
    small_box = method == "auto" and work < 0 and (2 * region.B + 1) ** 2 <= BOX_SLICE_LIMIT
    if comp.kind == "conjugate-line-pair":
        pts = _multiples(comp.point, F, N, mode, region)
    elif small_box and comp.kind == "conic":
        pts = [x for x in box_points(comp.form, region) if _accept(F, x, N, mode, region)]
    elif use_slice:
        pts = [x for x in slice_points(comp.form, region) if _accept(F, x, N, mode, region)]
    else:
        if param is None:
            param = parameterize(comp, height_bound)
        if not param:
            return []
        if comp.kind == "line":
            pts = _line_points(comp, param, F, N, mode, region)
        else:
            pts = _conic_points(comp, param, F, N, mode, region)
    if mode == INEQUALITY and region.contains((0, 0, 0)):
        pts.append((0, 0, 0))
    res = sorted(set(pts))
    for x in res:
        assert comp.form(x) == 0 and _accept(F, x, N, mode, region), x
    return res


# ---------------------------------------------------------------------------
# Intersections of two forms
# ---------------------------------------------------------------------------


@dataclass
class Intersection:
    points: list[Triple] = field(default_factory=list)
    components: list[CurveComponent] = field(default_factory=list)


_TRANSFORMS = [
    ((1, 0, 0), (1, 1, 0), (2, 0, 1)),
    ((1, 0, 0), (3, 1, 0), (-2, 0, 1)),
    ((1, 1, 0), (2, 3, 1), (1, 0, 1)),
    ((2, 1, 0), (5, 3, 1), (-3, 1, 2)),
]


def _unimodular_transforms():
    yield from _TRANSFORMS
    rng = random.Random(1)
    for _ in range(500):
        T = [[int(i == j) for j in range(3)] for i in range(3)]
        for _ in range(6):
            i, j = rng.sample(range(3), 2)
            c = rng.randint(-3, 3)
            T = [[T[r][s] + (c * T[j][s] if r == i else 0) for s in range(3)] for r in range(3)]
        yield tuple(tuple(r) for r in T)


def _linear_factors_x2x3(res) -> list[tuple[int, int]]:
    """Rational linear factors a*x2 + b*x3 of a binary form in (x2, x3).

    Goes through a univariate polynomial in x2/x3; the multivariate factor
    routine is avoided because it can overflow on huge coefficients.
    """
    d = res.to_dict()
    n = res.total_degree()
    coeffs = [int(d.get((0, i, n - i), 0)) for i in range(n + 1)]
    out = []
    if coeffs[n] == 0:
        out.append((0, 1))
    p = flint.fmpz_poly(coeffs)
    if p.degree() >= 1:
        for f, _ in p.factor()[1]:
            if f.degree() == 1:
                out.append((int(f[1]), int(f[0])))
    return out


def _rational_points_finite(A1, A2) -> list[Triple]:
    """Rational points of A1 = A2 = 0 when the forms share no component."""
    ctx = ternary_ctx()
    x1, x2, x3 = ctx.gens()
    for T in _unimodular_transforms():
        T = flint.fmpz_mat([list(r) for r in T])
        if T.det() ** 2 != 1:
            continue
        cols = [sum(int(T[i, j]) * (x1, x2, x3)[j] for j in range(3)) for i in range(3)]
        P1 = A1.compose(*cols)
        P2 = A2.compose(*cols)
        lead1 = P1.to_dict().get((P1.total_degree(), 0, 0), 0)
        lead2 = P2.to_dict().get((P2.total_degree(), 0, 0), 0)
        if lead1 == 0 or lead2 == 0:
            continue
        break
    else:
        raise ArithmeticError("no admissible transform")
    res = P1.resultant(P2, "x1")
    pts = set()
    for a, b in _linear_factors_x2x3(res):
        y2, y3 = b, -a
        g1 = P1.compose(x1, x2 * 0 + y2, x3 * 0 + y3)
        g2 = P2.compose(x1, x2 * 0 + y2, x3 * 0 + y3)
        g = g1.gcd(g2)
        if g.total_degree() < 1:
            continue
        gd = g.to_dict()
        gx = flint.fmpz_poly([int(gd.get((i, 0, 0), 0)) for i in range(g.total_degree() + 1)])
        for h, _ in gx.factor()[1]:
            if h.degree() != 1:
                continue
            c0, c1 = int(h[0]), int(h[1])
            # c1 y1 + c0 = 0 with (y2, y3) fixed; homogenize by c1
            y = (-c0, c1 * y2, c1 * y3)
            x = [sum(int(T[i, j]) * y[j] for j in range(3)) for i in range(3)]
            pts.add(_primitive(x))
    return sorted(pts)


def intersect_forms(A, B_) -> Intersection:
    """Common components and isolated rational points of two forms."""
    A = _as_form(A).to_flint()
    Bf = _as_form(B_).to_flint()
    g = A.gcd(Bf)
    out = Intersection()
    if g.total_degree() >= 1:
        out.components = factor_aux(TernaryForm.from_flint(g))
        A1 = A / g
        B1 = Bf / g
        if A1.total_degree() >= 1 and B1.total_degree() >= 1:
            out.points = _rational_points_finite(A1, B1)
        for comp in out.components:
            if comp.kind == "conjugate-line-pair":
                out.points.append(comp.point)
        out.components = [c for c in out.components if c.kind != "conjugate-line-pair"]
        out.points = sorted(set(out.points))
        return out
    out.points = _rational_points_finite(A, Bf)
    return out


def points_on_intersection(inter: Intersection, F: TernaryForm, N: int, region: Region,
                           mode: str = EQUATION) -> list[Triple]:
    out = []
    for p in inter.points:
        out += _multiples(p, F, N, mode, region)
    for comp in inter.components:
        out += solve_on_component(comp, F, N, region, mode)
    return sorted(set(out))
