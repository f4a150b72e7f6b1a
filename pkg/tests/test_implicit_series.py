import random
from fractions import Fraction

import mpmath
import pytest

from trident.forms import parse_form
from trident.implicit_series import (
    _CTX,
    approximants,
    build_series,
    local_coords,
    local_data,
    oriented,
)
from trident.patch_cover import Patch, compute_constants, good_squares

U, V, W = _CTX.gens()


def base_patch(i_frac, j_frac, M=1, M0=12):
    D = M * M0
    return Patch(int((i_frac + 1) * D), int((j_frac + 1) * D), M, M0, 1, 1)


def min_degree(p):
    return min((sum(map(int, e)) for e in p.to_dict()), default=10**9)


def test_local_data_example(cubic_minus):
    F1, F2, f = local_data(cubic_minus, base_patch(1, 0))
    assert (F1, F2) == (3, 0)
    assert f == U**3 + 3 * U**2 + V**3


def test_local_data_swapped_is_symmetric(cubic_minus):
    p = Patch(12, 24, 1, 12, 2, 1)
    Fo, po, swapped = oriented(cubic_minus, p)
    assert swapped
    F1, F2, f = local_data(Fo, po)
    assert (F1, F2) == (3, 0)
    assert f == U**3 + 3 * U**2 + V**3


def test_local_data_rejects_wrong_index(cubic_minus):
    with pytest.raises(ValueError):
        local_data(cubic_minus, Patch(12, 24, 1, 12, 2, 1))


def test_no_constant_term(cubic_minus):
    p = base_patch(Fraction(1, 2), Fraction(1, 3), M=6)
    lc = local_coords(cubic_minus, p, p.a, p.b)
    assert lc.w == 0 and lc.u == 0 and lc.v == 0


def test_base_case_formulas(cubic_minus):
    p = base_patch(1, 0)
    s1 = build_series(cubic_minus, p, 1)
    assert s1.X == (W - V**3) / 3
    assert s1.Y == -U - U**2 / 3
    s2 = build_series(cubic_minus, p, 2)
    X1 = s1.X
    assert s2.X == X1 * (1 - X1 - X1**2 / 3)


@pytest.mark.parametrize("s", range(1, 7))
def test_identity_on_base_patch(cubic_minus, s):
    ser = build_series(cubic_minus, base_patch(1, 0), s)
    assert ser.identity_holds()
    assert min_degree(ser.Y) >= s
    assert ser.X.to_dict().get((0, 0, 0), 0) == 0
    w = 3 * U + 3 * U**2 + U**3 + V**3
    assert ser.X.compose(U, V, w) + U * ser.Y.compose(U, V, w) == U


def test_coefficient_bound_grows_only_with_s(cubic_minus):
    consts = compute_constants(cubic_minus)
    patches = good_squares(cubic_minus, consts, 8)
    rng = random.Random(9)
    bounds = {}
    for p in rng.sample(patches, 20):
        Fo, po, _ = oriented(cubic_minus, p)
        for s in (1, 2, 3):
            ser = build_series(Fo, po, s)
            coeffs = [abs(Fraction(int(c.p), int(c.q))) for c in list(ser.X.coeffs()) + list(ser.Y.coeffs())]
            assert max(coeffs) <= ser.coeff_bound
            bounds.setdefault(s, []).append(ser.coeff_bound)
    # same order of magnitude across patches for a fixed s
    for s, bs in bounds.items():
        assert max(bs) / min(bs) < 10**6


def test_trivial_approximants(cubic_minus):
    consts = compute_constants(cubic_minus)
    p = good_squares(cubic_minus, consts, 4)[5]
    Fo, po, _ = oriented(cubic_minus, p)
    ser = build_series(Fo, po, 3)
    approx = {(a.e, a.f): a for a in approximants(ser, po, 1, 200, 2)}
    assert approx[(0, 0)].G == {(0, 0): 1} and approx[(0, 0)].err_bound == 0
    g01 = approx[(0, 1)]
    assert g01.err_bound == 0
    assert g01.evaluate(po.b + Fraction(1, 1000), 0) == po.b + Fraction(1, 1000)


def test_t1_approximant_against_newton(cubic_minus):
    consts = compute_constants(cubic_minus)
    patches = good_squares(cubic_minus, consts, 4)
    rng = random.Random(4)
    N, B = 1, 200
    eta = Fraction(N) / Fraction(B, 2) ** 3
    mpmath.mp.dps = 60
    checked = 0
    for p in rng.sample(patches, 8):
        Fo, po, _ = oriented(cubic_minus, p)
        ser = build_series(Fo, po, 4)
        g10 = next(a for a in approximants(ser, po, N, B, 2) if (a.e, a.f) == (1, 0))
        for _ in range(25):
            t2 = po.b + po.side * Fraction(rng.randint(0, 100), 100)
            delta = eta * Fraction(rng.randint(-100, 100), 100)
            f = lambda t: sum(c * t**a * mpmath.mpf(t2.numerator) ** b / t2.denominator**b
                              for (a, b, _), c in Fo.coeffs) - mpmath.mpf(delta.numerator) / delta.denominator
            try:
                t1 = mpmath.findroot(f, mpmath.mpf(po.a.numerator) / po.a.denominator)
            except (ValueError, ZeroDivisionError):
                continue
            if not (po.a <= Fraction(str(t1)) <= po.a + po.side):
                continue
            G = g10.evaluate(t2, delta)
            diff = abs(t1 - mpmath.mpf(G.numerator) / G.denominator)
            assert diff <= float(g10.err_bound) * (1 + 1e-9) + mpmath.mpf(10) ** -40
            checked += 1
    assert checked > 0
