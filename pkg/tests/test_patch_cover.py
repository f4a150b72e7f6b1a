import random
from fractions import Fraction

import pytest

from trident.aux_forms import choose_parameters
from trident.forms import eval_dehomogenized, gradient, parse_form
from trident.patch_cover import compute_constants, good_squares, interval_eval, patch_of_direction
from trident.pipeline import oracle_points


@pytest.fixture(scope="module")
def consts(cubic_minus):
    return compute_constants(cubic_minus)


def test_constants_cubic(consts):
    assert consts.lam == 3
    assert consts.M0 == 12


def test_constants_quartic():
    c = compute_constants(parse_form("x1^4+x2^4+x3^4"))
    assert c.lam == 4


def test_lambda_is_lower_bound(cubic_minus, consts):
    rng = random.Random(5)
    for _ in range(10_000):
        t1 = Fraction(rng.randint(-1000, 1000), 1000)
        t2 = Fraction(rng.randint(-1000, 1000), 1000)
        assert consts.lam <= max(abs(g) for g in gradient(cubic_minus, t1, t2)[:2]) or consts.lam <= abs(
            gradient(cubic_minus, t1, t2)[2]
        )


def test_positive_definite_has_no_patches():
    F = parse_form("x1^4+x2^4+x3^4")
    c = compute_constants(F)
    for M in (1, 10, 100):
        assert good_squares(F, c, M) == []


def test_superset_of_sampled_near_zeros(cubic_minus, consts):
    M = 10
    patches = good_squares(cubic_minus, consts, M)
    assert patches
    D = consts.M0 * M
    keys = {(p.i, p.j) for p in patches}
    eps = Fraction(1, D)
    rng = random.Random(1)
    hits = 0
    for _ in range(4000):
        t2 = Fraction(rng.randint(-10**6, 10**6), 10**6)
        # t1 on the arc t1^3 = 1 - t2^3, rounded to a nearby rational
        r = 1 - float(t2) ** 3
        t1 = Fraction(round((abs(r) ** (1 / 3)) * (1 if r >= 0 else -1) * 10**9), 10**9)
        if abs(t1) > 1 or abs(eval_dehomogenized(cubic_minus, t1, t2)) > eps:
            continue
        hits += 1
        i = min(int((t1 + 1) * D), 2 * D - 1)
        j = min(int((t2 + 1) * D), 2 * D - 1)
        assert (i, j) in keys
    assert hits > 1000
    # every returned square meets the curve within its tolerance
    for p in patches:
        lo, hi = interval_eval(cubic_minus, ((p.a, p.a + p.side), (p.b, p.b + p.side)))
        assert lo <= eps and hi >= -eps


def test_gradient_certificate(cubic_minus, consts):
    rng = random.Random(2)
    patches = good_squares(cubic_minus, consts, 16)
    for p in rng.sample(patches, 60):
        for _ in range(100):
            t1 = p.a + p.side * Fraction(rng.randint(0, 1000), 1000)
            t2 = p.b + p.side * Fraction(rng.randint(0, 1000), 1000)
            g = gradient(cubic_minus, t1, t2)[p.grad_index - 1]
            assert abs(g) >= consts.lam / 6
            assert (g > 0) == (p.grad_sign > 0)


def test_row_major_order(cubic_minus, consts):
    patches = good_squares(cubic_minus, consts, 16)
    assert [(p.j, p.i) for p in patches] == sorted((p.j, p.i) for p in patches)


@pytest.mark.parametrize("B,N", [(256, 1), (512, 2), (1024, 1)])
def test_coverage_of_oracle_directions(cubic_minus, consts, B, N):
    params = choose_parameters(B, N, 3, "theorem1", consts.M0)
    M = params.M
    assert M <= Fraction(B, 2) ** 3 / (N * consts.M0)
    patches = good_squares(cubic_minus, consts, M)
    for x in oracle_points(cubic_minus, N, B):
        if x[2] > B // 2 and x[2] >= max(abs(x[0]), abs(x[1])):
            t1, t2 = Fraction(x[0], x[2]), Fraction(x[1], x[2])
            assert patch_of_direction(patches, t1, t2), x
