"""(k-1)-free values of p^k + h at primes.

``nu`` counts the residues n mod r^(k-1) with r^(k-1) | n^k + h; the local
factors 1 - nu(p) / (p^(k-2) (p-1)) multiply to the predicted density.
``census`` counts primes p <= X with p^k + h free of (k-1)-th powers and
compares with density * Li(X).  ``exception_count`` lists the solutions of
x^k + h = y^(k-1) z in dyadic boxes with two independent backends.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import flint
import mpmath
import numpy as np

from .forms import factorize, iroot, primes_up_to

SINGULAR_EXHAUSTION_PRIME = 13


class CeilingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Roots of n^k + h modulo prime powers
# ---------------------------------------------------------------------------


def _roots_mod_p(k: int, h: int, p: int) -> list[int]:
    if p <= 2000:
        n = np.arange(p, dtype=np.int64)
        acc = np.ones(p, dtype=np.int64)
        for _ in range(k):
            acc = (acc * n) % p
        return [int(r) for r in np.nonzero((acc + h) % p == 0)[0]]
    poly = flint.nmod_poly([h % p] + [0] * (k - 1) + [1], p)
    return sorted(int(r) for r, _ in poly.roots())


def _lift(k: int, h: int, r: int, p: int, e: int) -> int:
    """Newton lift of a simple root r mod p to p^e."""
    mod = p
    n = r
    while mod < p**e:
        mod = min(mod * mod, p**e)
        f = pow(n, k, mod) + h
        df = k * pow(n, k - 1, mod)
        n = (n - f * pow(df, -1, mod)) % mod
    return n % p**e


@lru_cache(maxsize=4096)
def roots_mod_prime_power(k: int, h: int, p: int, e: int, exhaust_limit: int = SINGULAR_EXHAUSTION_PRIME) -> tuple[int, ...]:
    """All n mod p^e with p^e | n^k + h.

    Simple roots mod p lift uniquely (Hensel).  A root where k n^(k-1) = 0
    mod p is singular; its lifts are found by exhausting n = r mod p up to
    p^e, which is allowed for p <= ``exhaust_limit``.
    """
    if h == 0:
        raise ValueError("h must be nonzero")
    if e < 1:
        return (0,)
    mod = p**e
    out = []
    for r in _roots_mod_p(k, h, p):
        if (k * pow(r, k - 1, p)) % p:
            out.append(_lift(k, h, r, p, e))
        else:
            if p > exhaust_limit:
                raise ValueError(f"singular root mod {p} beyond the exhaustion range")
            n = np.arange(r, mod, p, dtype=object)
            vals = [int(x) for x in n if (pow(int(x), k, mod) + h) % mod == 0]
            out.extend(vals)
    return tuple(sorted(out))


def roots_mod(k: int, h: int, m: int, exhaust_limit: int = SINGULAR_EXHAUSTION_PRIME) -> list[int]:
    """All n mod m with m | n^k + h, by CRT over the prime powers of m."""
    res, mod = [0], 1
    for p, e in sorted(factorize(m).items()) if m > 1 else []:
        q = p**e
        rs = roots_mod_prime_power(k, h, p, e, exhaust_limit)
        if not rs:
            return []
        inv = pow(mod, -1, q)
        res = [a + mod * (((b - a) * inv) % q) for a in res for b in rs]
        mod *= q
    return sorted(res)


def nu(r: int, k: int, h: int) -> int:
    """#{n mod r^(k-1): r^(k-1) | n^k + h}, multiplicative in r."""
    if r < 1:
        raise ValueError("r must be positive")
    out = 1
    for p, e in factorize(r).items() if r > 1 else []:
        out *= len(roots_mod_prime_power(k, h, p, e * (k - 1)))
    return out


def nu_exhaustive(r: int, k: int, h: int) -> int:
    """Direct count over all residues mod r^(k-1) (reference implementation)."""
    m = r ** (k - 1)
    return sum(1 for n in range(m) if (pow(n, k, m) + h) % m == 0)


# ---------------------------------------------------------------------------
# Density
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Density:
    k: int
    h: int
    P: int
    partial: Fraction
    tail_bound: Fraction
    factors: dict = field(default_factory=dict, compare=False)

    @property
    def value(self) -> float:
        return float(self.partial)

    @property
    def lower(self) -> float:
        """The omitted factors lie in [exp(-tail_bound), 1]."""
        return float(self.partial) * math.exp(-float(self.tail_bound))

    @property
    def upper(self) -> float:
        return float(self.partial)

    def to_json(self) -> dict:
        return {
            "k": self.k, "h": self.h, "P": self.P,
            "partial": f"{self.partial.numerator}/{self.partial.denominator}" if self.partial.denominator < 10**60 else None,
            "value": self.value, "lower": self.lower, "upper": self.upper,
            "tail_bound": float(self.tail_bound),
            "factors": {str(p): str(f) for p, f in sorted(self.factors.items())[:10]},
        }


def local_factor(p: int, k: int, h: int) -> Fraction:
    return 1 - Fraction(nu(p, k, h), p ** (k - 2) * (p - 1))


def tail_bound(P: int, k: int) -> Fraction:
    """Bound on |log prod_{p > P} factor| using nu(p) <= k for p not dividing kh.

    With x_p = k / (p^(k-2) (p-1)), -log(1 - x_p) <= x_p / (1 - x_p).  The
    sum over primes p > P is at most the sum over odd n >= n0 (n0 the
    first odd number > P), which by comparison with an integral is at most
    g(n0) + (1/2) int_{n0}^inf g, where g(t) <= c k / (t-1)^(k-1).
    """
    if k < 3:
        raise ValueError("k >= 3")
    n0 = P + 1 if P % 2 == 0 else P + 2
    n0 = max(n0, 3)
    x0 = Fraction(k, n0 ** (k - 2) * (n0 - 1))
    if x0 >= 1:
        raise ValueError("P too small for the tail bound")
    c = 1 / (1 - x0)
    g0 = c * x0
    integral = c * Fraction(k, (k - 2) * (n0 - 1) ** (k - 2))
    return g0 + integral / 2


def density(k: int, h: int, P: int) -> Density:
    """Exact partial product over p <= P with p not dividing h, and its tail bound."""
    if P < 2:
        raise ValueError("P must be at least 2")
    if h == 0:
        raise ValueError("h must be nonzero")
    prod = Fraction(1)
    factors = {}
    for p in primes_up_to(P):
        p = int(p)
        if h % p == 0:
            continue
        f = local_factor(p, k, h)
        if p <= 100:
            factors[p] = f
        prod *= f
    return Density(k, h, P, prod, tail_bound(P, k), factors)


# ---------------------------------------------------------------------------
# Census
# ---------------------------------------------------------------------------


def Li(X: float) -> float:
    """Offset logarithmic integral int_2^X dt / log t by adaptive quadrature."""
    if X <= 2:
        return 0.0
    with mpmath.workdps(20):
        pts = [2] + [float(10**j) for j in range(1, int(math.log10(X)) + 1) if 10**j < X] + [X]
        return float(mpmath.quad(lambda t: 1 / mpmath.log(t), pts))


@dataclass(frozen=True)
class CensusRow:
    X: int
    pi: int
    count: int
    li: float
    predicted: float
    rel_error: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _sieve_limit(k: int, X: int) -> int:
    # q^(k-1) must stay well inside int64 for the residue test
    return max(2, min(X, 2000, int((2**62) ** (1 / (k - 1)))))


def power_free_flags(k: int, h: int, primes: np.ndarray) -> np.ndarray:
    """flags[i] = p_i^k + h is (k-1)-free.

    Small primes q are sieved through the residues of n^k + h mod q^(k-1);
    the remaining values are factored.
    """
    free = np.ones(len(primes), dtype=bool)
    if len(primes) == 0:
        return free
    L = _sieve_limit(k, int(primes[-1]))
    for q in primes_up_to(L):
        q = int(q)
        m = q ** (k - 1)
        rs = roots_mod_prime_power(k, h, q, k - 1, exhaust_limit=max(SINGULAR_EXHAUSTION_PRIME, q if m <= 10**6 else 0))
        if rs:
            free &= ~np.isin(primes % m, np.array(rs, dtype=np.int64))
    for i in np.nonzero(free)[0]:
        v = int(primes[i]) ** k + h
        if v == 0 or any(e >= k - 1 for _, e in _factor_pairs(abs(v))):
            free[i] = False
    return free


def census(k: int, h: int, X: int, checkpoints=None, P: int = 10_000, ceiling: int = 10**7) -> list[CensusRow]:
    """Rows (X', pi(X'), count, Li, c Li, relative error) at the checkpoints."""
    if X > ceiling:
        raise CeilingError(f"X={X} exceeds the census ceiling {ceiling}")
    if X < 2:
        raise ValueError("X must be at least 2")
    primes = primes_up_to(X)
    flags = power_free_flags(k, h, primes)
    cum = np.cumsum(flags)
    c = density(k, h, P).value
    if checkpoints is None:
        checkpoints = [10**j for j in range(1, int(math.log10(X)) + 1) if 10**j <= X]
        if X not in checkpoints:
            checkpoints.append(X)
    rows = []
    for x in sorted(set(checkpoints)):
        n = int(np.searchsorted(primes, x, side="right"))
        cnt = int(cum[n - 1]) if n else 0
        li = Li(x)
        pred = c * li
        rows.append(CensusRow(x, n, cnt, li, pred, cnt / pred - 1 if pred else float("nan")))
    return rows


def mobius_crosscheck(k: int, h: int, X: int, D0: int | None = None) -> dict:
    """The census count rebuilt as sum_d mu(d) #{p <= X: d^(k-1) | p^k + h}.

    Squarefree d <= D0 are counted through residue classes mod d^(k-1)
    (CRT of the lifted roots).  The remaining d are accounted for prime by
    prime from the factorization of p^k + h; terms with
    d^(k-1) > X^k + |h| vanish, so the sum is exact.
    """
    if X > 10**6:
        raise CeilingError("cross-check is meant for X <= 10^6")
    primes = primes_up_to(X)
    D0 = math.isqrt(X) if D0 is None else D0
    small = 0
    for d in range(1, D0 + 1):
        fac = factorize(d) if d > 1 else {}
        if any(e > 1 for e in fac.values()):
            continue
        mu = (-1) ** len(fac)
        m = d ** (k - 1)
        rs = roots_mod(k, h, m, exhaust_limit=max(SINGULAR_EXHAUSTION_PRIME, D0))
        if not rs:
            continue
        if m <= 2**62:
            A = int(np.isin(primes % m, np.array(rs, dtype=np.int64)).sum())
        else:
            rset = set(rs)
            A = sum(1 for p in primes if int(p) % m in rset)
        small += mu * A
    large = 0
    for p in primes:
        v = int(p) ** k + h
        if v == 0:
            raise ValueError("p^k + h = 0 is divisible by every d")
        qs = [int(q) for q, e in _factor_pairs(abs(v)) if e >= k - 1]
        for r in range(1, len(qs) + 1):
            for sub in itertools.combinations(qs, r):
                d = math.prod(sub)
                if d > D0:
                    large += (-1) ** r
    direct = int(power_free_flags(k, h, primes).sum())
    return {"X": X, "D0": D0, "small_d": small, "large_d": large, "total": small + large,
            "direct": direct, "equal": small + large == direct}


def _factor_pairs(n: int):
    return [(int(q), int(e)) for q, e in flint.fmpz(n).factor()] if n > 1 else []


# ---------------------------------------------------------------------------
# x^k + h = y^(k-1) z
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExceptionResult:
    A: int
    B: int
    k: int
    h: int
    solutions: tuple
    backend: str

    @property
    def count(self) -> int:
        return len(self.solutions)


def _check_box(A, B, ceiling):
    if A < 1 or B < 1:
        raise ValueError("A and B must be positive")
    if max(A, B) > ceiling:
        raise CeilingError(f"box ({A}, {B}) exceeds the ceiling {ceiling}")


def exceptions_by_factoring(A: int, B: int, k: int, h: int, ceiling: int = 4096) -> ExceptionResult:
    """For each x, the y in (B, 2B] with y^(k-1) | x^k + h from the factorization."""
    _check_box(A, B, ceiling)
    out = []
    for x in range(A + 1, 2 * A + 1):
        v = x**k + h
        if v == 0:
            out += [(x, y, 0) for y in range(B + 1, 2 * B + 1)]
            continue
        opts = [[q**a for a in range(e // (k - 1) + 1)] for q, e in _factor_pairs(abs(v))]
        for combo in itertools.product(*opts):
            y = math.prod(combo)
            if B < y <= 2 * B:
                out.append((x, y, v // y ** (k - 1)))
    return ExceptionResult(A, B, k, h, tuple(sorted(out)), "factor")


def exceptions_by_residues(A: int, B: int, k: int, h: int, ceiling: int = 4096) -> ExceptionResult:
    """For each y, the x in (A, 2A] in the root classes of n^k = -h mod y^(k-1)."""
    _check_box(A, B, ceiling)
    out = []
    for y in range(B + 1, 2 * B + 1):
        m = y ** (k - 1)
        for r in roots_mod(k, h, m, exhaust_limit=2 * B):
            first = r + m * math.ceil((A + 1 - r) / m)
            for x in range(first, 2 * A + 1, m):
                out.append((x, y, (x**k + h) // m))
    return ExceptionResult(A, B, k, h, tuple(sorted(out)), "residue")


def exception_count(A: int, B: int, k: int, h: int, backend: str = "both", ceiling: int = 4096):
    """Solutions of x^k + h = y^(k-1) z with A < x <= 2A, B < y <= 2B.

    ``backend="both"`` runs the two methods and raises if they disagree.
    """
    if backend == "factor":
        return exceptions_by_factoring(A, B, k, h, ceiling)
    if backend == "residue":
        return exceptions_by_residues(A, B, k, h, ceiling)
    if backend != "both":
        raise ValueError(f"unknown backend {backend!r}")
    a = exceptions_by_factoring(A, B, k, h, ceiling)
    b = exceptions_by_residues(A, B, k, h, ceiling)
    if a.solutions != b.solutions:
        raise AssertionError(f"backends disagree on A={A}, B={B}: {set(a.solutions) ^ set(b.solutions)}")
    return a
