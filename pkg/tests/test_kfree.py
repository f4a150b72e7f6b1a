import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from trident.forms import factorize, is_power_free, primes_up_to
from trident.kfree import (
    CeilingError,
    Li,
    census,
    density,
    exception_count,
    exceptions_by_factoring,
    exceptions_by_residues,
    local_factor,
    mobius_crosscheck,
    nu,
    nu_exhaustive,
    tail_bound,
)


@pytest.mark.parametrize("r,expected", [(2, 1), (3, 3), (5, 1), (7, 3), (6, 3)])
def test_nu_examples(r, expected):
    assert nu(r, 3, 1) == expected


def test_nu_by_hand():
    assert [n for n in range(4) if (n**3 + 1) % 4 == 0] == [3]
    assert [n for n in range(9) if (n**3 + 1) % 9 == 0] == [2, 5, 8]
    assert nu_exhaustive(6, 3, 1) == 3


@pytest.mark.parametrize("k,h", [(3, 1), (3, -1), (3, 2), (4, 1), (4, 3), (5, -2)])
def test_nu_multiplicative_and_exhaustive(k, h):
    limit = 50 if k == 3 else 20
    for r in range(1, limit + 1):
        assert nu(r, k, h) == nu_exhaustive(r, k, h), r
    for a in range(1, 12):
        for b in range(1, 12):
            if math.gcd(a, b) == 1 and a * b <= limit:
                assert nu(a * b, k, h) == nu(a, k, h) * nu(b, k, h)


def test_nu_counts_roots_mod_p():
    for p in primes_up_to(200):
        p = int(p)
        for k, h in ((3, 1), (3, 2), (4, 1)):
            if (k * h) % p == 0:
                continue
            roots = sum(1 for n in range(p) if (n**k + h) % p == 0)
            assert nu(p, k, h) == roots


def test_density_factors():
    d = density(3, 1, 100)
    assert [d.factors[p] for p in (2, 3, 5, 7)] == [Fraction(1, 2), Fraction(1, 2), Fraction(19, 20), Fraction(13, 14)]
    assert local_factor(7, 3, 1) == Fraction(13, 14)


def test_density_skips_divisors_of_h():
    d = density(3, 6, 50)
    assert 2 not in d.factors and 3 not in d.factors


def test_density_monotone_and_bracketed():
    values = [density(3, 1, P) for P in (10, 100, 1000, 5000)]
    partials = [v.partial for v in values]
    assert partials == sorted(partials, reverse=True)
    for v in values[:-1]:
        assert v.lower <= values[-1].value * (1 + 1e-12)
        assert values[-1].value <= v.upper


def test_tail_bound():
    tb = tail_bound(1000, 3)
    assert tb < Fraction(3, 1000)
    # the bound dominates a direct partial sum of the tail
    direct = sum(-math.log(1 - 3 / (p * (p - 1))) for p in map(int, primes_up_to(200_000)) if p > 1000)
    assert direct <= float(tb)


def test_li():
    assert abs(Li(10**6) - 78626.5) < 1.0  # li(10^6) - li(2)


def test_census_small():
    rows = census(3, 1, 13, checkpoints=[13])
    assert rows[0].count == 1 and rows[0].pi == 6
    assert [is_power_free(p**3 + 1, 2) for p in (2, 3, 5, 7, 11, 13)] == [False] * 5 + [True]


def test_census_monotone_and_bounded():
    rows = census(3, 1, 50_000, checkpoints=[10, 100, 1000, 10_000, 50_000])
    counts = [r.count for r in rows]
    assert counts == sorted(counts)
    assert all(r.count <= r.pi for r in rows)


def test_census_ceiling():
    with pytest.raises(CeilingError):
        census(3, 1, 10**8, ceiling=10**7)


@pytest.mark.parametrize("k,h,X", [(3, 1, 20_000), (3, -1, 20_000), (3, 2, 10_000), (4, 1, 5_000)])
def test_mobius_crosscheck(k, h, X):
    res = mobius_crosscheck(k, h, X)
    assert res["equal"], res


def test_exception_examples():
    assert (2, 3, 1) in exception_count(1, 2, 3, 1).solutions
    assert (3, 2, 7) in exception_count(2, 1, 3, 1).solutions


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 64), st.integers(1, 64), st.sampled_from([1, -1, 2, 7]))
def test_exception_backends_agree(A, B, h):
    a = exceptions_by_factoring(A, B, 3, h)
    b = exceptions_by_residues(A, B, 3, h)
    assert a.solutions == b.solutions
    for x, y, z in a.solutions:
        assert x**3 + h == y**2 * z


def test_exception_brute():
    A, B = 20, 10
    brute = sorted((x, y, (x**3 + 1) // y**2) for x in range(A + 1, 2 * A + 1) for y in range(B + 1, 2 * B + 1)
                   if (x**3 + 1) % (y * y) == 0)
    assert list(exception_count(A, B, 3, 1).solutions) == brute
