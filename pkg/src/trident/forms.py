"""Homogeneous ternary and binary integer forms, plus integer utilities.

Forms are stored as sparse exponent maps.  Heavy algebra (composition,
resultants, factoring) is delegated to FLINT through ``python-flint``; the
conversions live here so the rest of the package can stay in terms of
:class:`TernaryForm` and :class:`BinaryForm`.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import flint
import gmpy2

IntegerTriple = tuple[int, int, int]

VARS = ("x1", "x2", "x3")
_ZCTX = flint.fmpz_mpoly_ctx.get(VARS, "lex")
_QCTX = flint.fmpq_mpoly_ctx.get(VARS, "lex")
_BZCTX = flint.fmpz_mpoly_ctx.get(("u", "v"), "lex")


def ternary_ctx():
    return _ZCTX


def binary_ctx():
    return _BZCTX


# ---------------------------------------------------------------------------
# Ternary forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TernaryForm:
    """Homogeneous form in x1, x2, x3 with integer coefficients."""

    degree: int
    coeffs: tuple[tuple[IntegerTriple, int], ...]
    _lookup: dict = field(default=None, repr=False, compare=False, hash=False)

    def __init__(self, degree: int, coeffs: Mapping[IntegerTriple, int] | Iterable):
        items = dict(coeffs.items() if isinstance(coeffs, Mapping) else coeffs)
        clean = {}
        for exp, c in items.items():
            exp = tuple(int(e) for e in exp)
            c = int(c)
            if len(exp) != 3 or min(exp) < 0 or sum(exp) != degree:
                raise ValueError(f"exponent {exp} is not homogeneous of degree {degree}")
            if c:
                clean[exp] = clean.get(exp, 0) + c
        clean = {e: c for e, c in clean.items() if c}
        if not clean:
            raise ValueError("the zero polynomial is not a form")
        object.__setattr__(self, "degree", int(degree))
        object.__setattr__(self, "coeffs", tuple(sorted(clean.items(), reverse=True)))
        object.__setattr__(self, "_lookup", clean)

    # -- basic protocol ---------------------------------------------------
    def __getitem__(self, exp: IntegerTriple) -> int:
        return self._lookup.get(tuple(exp), 0)

    def as_dict(self) -> dict[IntegerTriple, int]:
        return dict(self._lookup)

    def __str__(self) -> str:
        return format_polynomial(self._lookup, VARS)

    def __call__(self, x: Sequence[int]) -> int:
        return eval_form(self, x)

    @property
    def height(self) -> int:
        return max(abs(c) for _, c in self.coeffs)

    # -- conversions --------------------------------------------------------
    def to_flint(self):
        return _ZCTX.from_dict(self._lookup)

    def to_flint_q(self):
        return _QCTX.from_dict(self._lookup)

    @classmethod
    def from_flint(cls, poly) -> "TernaryForm":
        d = {tuple(int(e) for e in exp): int(c) for exp, c in poly.to_dict().items()}
        deg = {sum(e) for e in d}
        if len(deg) != 1:
            raise ValueError("polynomial is not homogeneous")
        return cls(deg.pop(), d)

    # -- algebra --------------------------------------------------------------
    def partial(self, i: int) -> "TernaryForm | None":
        """Partial derivative with respect to x_{i+1} (0-based index); None if zero."""
        out = {}
        for exp, c in self.coeffs:
            if exp[i]:
                e = list(exp)
                e[i] -= 1
                out[tuple(e)] = out.get(tuple(e), 0) + c * exp[i]
        out = {e: c for e, c in out.items() if c}
        return TernaryForm(self.degree - 1, out) if out else None

    def compose_linear(self, matrix: Sequence[Sequence[int]]) -> "TernaryForm":
        """Return F(M x) for an integer 3x3 matrix M (rows give new x_i)."""
        x = _ZCTX.gens()
        subs = [sum(int(matrix[i][j]) * x[j] for j in range(3)) for i in range(3)]
        return TernaryForm.from_flint(self.to_flint().compose(*subs))

    def signed_permute(self, perm: Sequence[int], signs: Sequence[int]) -> "TernaryForm":
        """Return G with G(y) = F(x) where x[perm[j]] = signs[j] * y[j]."""
        out = {}
        for exp, c in self.coeffs:
            new = [0, 0, 0]
            sign = 1
            for j in range(3):
                e = exp[perm[j]]
                new[j] = e
                if signs[j] < 0 and e % 2:
                    sign = -sign
            out[tuple(new)] = out.get(tuple(new), 0) + sign * c
        return TernaryForm(self.degree, out)

    def diagonal_coefficients(self) -> tuple[int, int, int] | None:
        """(c1, c2, c3) if F = c1 x1^k + c2 x2^k + c3 x3^k with all ci nonzero."""
        k = self.degree
        cs = (self[(k, 0, 0)], self[(0, k, 0)], self[(0, 0, k)])
        if len(self.coeffs) == 3 and all(cs):
            return cs
        return None


def eval_form(F: TernaryForm, x: Sequence[int]) -> int:
    x1, x2, x3 = (int(t) for t in x)
    total = 0
    for (a, b, c), co in F.coeffs:
        total += co * x1**a * x2**b * x3**c
    return total


def eval_dehomogenized(F: TernaryForm, t1, t2):
    """F(t1, t2, 1) in whatever numeric type t1, t2 carry."""
    total = 0
    for (a, b, _), co in F.coeffs:
        total += co * t1**a * t2**b
    return total


def gradient(F: TernaryForm, t1, t2) -> tuple[Fraction, Fraction, Fraction]:
    """The three partials of F at (t1, t2, 1), computed exactly."""
    t1, t2 = Fraction(t1), Fraction(t2)
    out = []
    for i in range(3):
        P = F.partial(i)
        out.append(Fraction(0) if P is None else Fraction(eval_dehomogenized(P, t1, t2)))
    return tuple(out)


# ---------------------------------------------------------------------------
# Parsing and printing
# ---------------------------------------------------------------------------

_TERM_RE = re.compile(r"([+-]?)([^+-]+)")
_FACTOR_RE = re.compile(r"^(x[123]|[uvw])(?:(?:\^|\*\*)(\d+))?$")


def _parse_monomials(text: str, names: Sequence[str]) -> dict[tuple[int, ...], int]:
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ValueError("empty form")
    s = s.replace("**", "^")
    out: dict[tuple[int, ...], int] = {}
    pos = 0
    for m in _TERM_RE.finditer(s):
        if m.start() != pos:
            raise ValueError(f"cannot parse near {s[pos:]!r}")
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        body = m.group(2)
        coef = 1
        exps = [0] * len(names)
        for part in body.split("*"):
            if not part:
                raise ValueError(f"malformed term {body!r}")
            if part.isdigit():
                coef *= int(part)
                continue
            fm = _FACTOR_RE.match(part)
            if not fm or fm.group(1) not in names:
                raise ValueError(f"unknown factor {part!r}")
            exps[names.index(fm.group(1))] += int(fm.group(2) or 1)
        key = tuple(exps)
        out[key] = out.get(key, 0) + sign * coef
    if pos != len(s):
        raise ValueError(f"cannot parse near {s[pos:]!r}")
    return {e: c for e, c in out.items() if c}


def parse_form(text: str) -> TernaryForm:
    """Parse e.g. ``"x1^3 + x2^3 - x3^3"`` or ``"2*x1*x2^2 - x3^3"``.

    Terms are signed products of an optional integer and powers of x1, x2, x3;
    ``^`` and ``**`` both denote powers.  The result must be homogeneous.
    """
    mons = _parse_monomials(text, VARS)
    degs = {sum(e) for e in mons}
    if len(degs) != 1:
        raise ValueError("form is not homogeneous")
    return TernaryForm(degs.pop(), mons)


def format_polynomial(coeffs: Mapping[tuple[int, ...], object], names: Sequence[str]) -> str:
    parts = []
    for exp in sorted(coeffs, reverse=True):
        c = coeffs[exp]
        if c == 0:
            continue
        mon = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, exp) if e)
        neg = c < 0
        mag = -c if neg else c
        if mon:
            body = mon if mag == 1 else f"{mag}*{mon}"
        else:
            body = str(mag)
        parts.append(("-" if neg else "+") + body)
    if not parts:
        return "0"
    out = "".join(parts)
    return out[1:] if out.startswith("+") else out


# ---------------------------------------------------------------------------
# Binary forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous form in (u, v); coefficients keyed by (i, j) for u^i v^j."""

    degree: int
    coeffs: tuple[tuple[tuple[int, int], int], ...]

    def __init__(self, degree: int, coeffs: Mapping[tuple[int, int], int] | Iterable):
        items = dict(coeffs.items() if isinstance(coeffs, Mapping) else coeffs)
        clean = {}
        for (i, j), c in items.items():
            if i + j != degree or i < 0 or j < 0:
                raise ValueError("binary form is not homogeneous")
            if int(c):
                clean[(int(i), int(j))] = int(c)
        object.__setattr__(self, "degree", int(degree))
        object.__setattr__(self, "coeffs", tuple(sorted(clean.items(), reverse=True)))

    def as_dict(self) -> dict[tuple[int, int], int]:
        return dict(self.coeffs)

    def __call__(self, u: int, v: int) -> int:
        return sum(c * u**i * v**j for (i, j), c in self.coeffs)

    def __str__(self) -> str:
        return format_polynomial(self.as_dict(), ("u", "v"))

    def coefficient_list(self) -> list[int]:
        """Coefficients of u^d, u^{d-1} v, ..., v^d."""
        d = self.as_dict()
        return [d.get((self.degree - j, j), 0) for j in range(self.degree + 1)]

    def to_flint(self):
        return _BZCTX.from_dict(self.as_dict())

    @classmethod
    def from_flint(cls, poly) -> "BinaryForm":
        d = {tuple(int(e) for e in exp): int(c) for exp, c in poly.to_dict().items()}
        degs = {sum(e) for e in d}
        if len(degs) != 1:
            raise ValueError("polynomial is not homogeneous")
        return cls(degs.pop(), d)

    def dehomogenize_u(self):
        """G(t, 1) as an fmpz_poly in t."""
        cl = self.coefficient_list()  # u^d ... v^d
        return flint.fmpz_poly(list(reversed(cl)))

    @property
    def height(self) -> int:
        return max((abs(c) for _, c in self.coeffs), default=0)


def parse_binary(text: str) -> BinaryForm:
    mons = _parse_monomials(text, ("u", "v"))
    degs = {sum(e) for e in mons}
    if len(degs) != 1:
        raise ValueError("binary form is not homogeneous")
    return BinaryForm(degs.pop(), mons)


def binary_resultant(f: BinaryForm, g: BinaryForm) -> int:
    """Resultant of two binary forms (Sylvester determinant in their coefficients)."""
    a = f.coefficient_list()
    b = g.coefficient_list()
    m, n = f.degree, g.degree
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + a + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + b + [0] * (size - n - 1 - i))
    return int(flint.fmpz_mat(rows).det())


# ---------------------------------------------------------------------------
# Nonsingularity
# ---------------------------------------------------------------------------


def _generic_shift(poly, a: int, b: int):
    x1, x2, x3 = _ZCTX.gens()
    return poly.compose(x1, x2 + a * x1, x3 + b * x1)


def _groebner_nonsingular(parts) -> bool:
    import sympy

    x1, x2, x3 = sympy.symbols("x1 x2 x3")
    exprs = [sympy.sympify(str(p).replace("^", "**")) for p in parts]
    G = sympy.groebner(exprs, x1, x2, x3, order="grevlex")
    lead = [sympy.Poly(g, x1, x2, x3).monoms(order="grevlex")[0] for g in G.exprs]
    pure = [False, False, False]
    for m in lead:
        nz = [i for i in range(3) if m[i]]
        if len(nz) == 1:
            pure[nz[0]] = True
    return all(pure)


def assert_nonsingular(F: TernaryForm, seed: int = 0) -> bool:
    """True iff the partials of F have no common complex zero besides the origin.

    Elimination: after a generic shear making the x1-leading coefficients
    constant, the common zeros of (F1, F2, F3) project into the common roots
    of Res_x1(F1, F2 + c F3) for several c.  A constant gcd certifies
    nonsingularity; otherwise a Groebner basis decides.
    """
    parts = [F.partial(i) for i in range(3)]
    if any(p is None for p in parts):
        return False if F.degree >= 2 else True
    polys = [p.to_flint() for p in parts]
    rng = random.Random(seed)
    x1 = _ZCTX.gens()[0]
    for _ in range(4):
        a, b = rng.randint(-7, 7), rng.randint(-7, 7)
        sh = [_generic_shift(p, a, b) for p in polys]
        kdeg = F.degree - 1
        if any(p.degrees()[0] != kdeg for p in sh):
            continue
        g = None
        for c in (1, 2, -3):
            other = sh[1] + c * sh[2]
            if other.degrees()[0] != kdeg:
                continue
            r = sh[0].resultant(other, "x1")
            if r.is_zero():
                g = None
                break
            g = r if g is None else g.gcd(r)
            if g.is_constant():
                return True
        if g is not None and g.is_constant():
            return True
    return _groebner_nonsingular([str(p) for p in parts])


# ---------------------------------------------------------------------------
# Integer utilities
# ---------------------------------------------------------------------------


def iroot(n: int, k: int) -> tuple[int, bool]:
    """Floor of the real k-th root of n >= 0 and whether it is exact."""
    if n < 0:
        raise ValueError("negative radicand")
    r, exact = gmpy2.iroot(gmpy2.mpz(n), k)
    return int(r), bool(exact)


def exact_root(n: int, k: int) -> int | None:
    """Integer m with m^k = n, or None.  Negative n allowed for odd k."""
    if n >= 0:
        r, ok = iroot(n, k)
        return r if ok else None
    if k % 2 == 0:
        return None
    r, ok = iroot(-n, k)
    return -r if ok else None


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic strong-probable-prime test (valid for n < 3.3e24)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n == p:
            return True
        if n % p == 0:
            return False
    return all(gmpy2.is_strong_prp(n, b) for b in _MR_BASES)


@lru_cache(maxsize=8)
def _small_primes(limit: int) -> tuple[int, ...]:
    return tuple(int(p) for p in primes_up_to(limit))


def primes_up_to(limit: int):
    """Numpy array of primes <= limit (sieve of Eratosthenes)."""
    import numpy as np

    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def is_power_free(n: int, l: int) -> bool:
    """True iff no prime p has p^l | n.

    Trial division by primes up to |n|^(1/(l+1)); the cofactor then has all
    prime factors above that bound, so it contains an l-th prime power only if
    it is itself a perfect l-th power.
    """
    if n == 0:
        raise ValueError("0 is divisible by every prime power")
    if l < 2:
        raise ValueError("l must be at least 2")
    m = abs(n)
    T, _ = iroot(m, l + 1)
    if T >= 2:
        for p in _small_primes(max(T, 1000)) if T <= 10**7 else _trial_range(T):
            if p > T:
                break
            if m % p == 0:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                if e >= l:
                    return False
    if m == 1:
        return True
    _, exact = iroot(m, l)
    return not exact


def _trial_range(T: int):
    yield 2
    p = 3
    while p <= T:
        yield p
        p += 2


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of a nonzero integer (sign dropped)."""
    import sympy

    return {int(p): int(e) for p, e in sympy.factorint(abs(n)).items()}


def divisors(n: int) -> list[int]:
    """Positive divisors of |n| (n != 0), ascending."""
    fac = factorize(n)
    divs = [1]
    for p, e in fac.items():
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def content(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, int(v))
    return g
