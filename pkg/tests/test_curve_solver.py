import itertools
import math
import random

import pytest

from trident.curve_solver import (
    EQUATION,
    INEQUALITY,
    NoRationalPoint,
    Region,
    binary_equation,
    compose_param,
    detect_special,
    factor_aux,
    hilbert_symbol,
    parameterize,
    solve_binary,
    solve_on_component,
)
from trident.forms import TernaryForm, binary_resultant, parse_binary, parse_form


def kinds(text):
    return sorted(c.kind for c in factor_aux(parse_form(text)))


def test_factor_examples():
    comps = factor_aux(parse_form("x1^2-x3^2"))
    assert [c.kind for c in comps] == ["line", "line"]
    assert {c.form.as_dict()[(0, 0, 1)] for c in comps} == {1, -1}
    pair = factor_aux(parse_form("x1^2+x2^2"))
    assert [c.kind for c in pair] == ["conjugate-line-pair"]
    assert pair[0].point == (0, 0, 1)
    assert kinds("x1*x2-x3^2") == ["conic"]


def test_parameterize_examples():
    conic = factor_aux(parse_form("x1*x2-x3^2"))[0]
    p = parameterize(conic)
    assert [str(f) for f in p.f] == ["u^2", "v^2", "u*v"]
    assert p.R == 1
    line = factor_aux(parse_form("x2-x3"))[0]
    q = parameterize(line)
    assert [str(f) for f in q.f] == ["u", "v", "v"]


def test_no_rational_point_certificate():
    comp = factor_aux(parse_form("x1^2+x2^2-3*x3^2"))[0]
    res = parameterize(comp)
    assert isinstance(res, NoRationalPoint) and not res
    assert 3 in res.places
    # residue check mod 9: no primitive solution
    assert not any(
        (a * a + b * b - 3 * c * c) % 9 == 0 and (a % 3 or b % 3 or c % 3)
        for a in range(9) for b in range(9) for c in range(9)
    )
    assert solve_on_component(comp, parse_form("x1^3+x2^3-x3^3"), 1, Region(30)) == []


@pytest.mark.parametrize("a,b", [(2, 3), (-1, -1), (5, 7), (3, 12), (-6, 10)])
def test_hilbert_product_formula(a, b):
    places = {2, "inf"} | {p for p in range(3, 50) if all(p % q for q in range(2, p)) and (a * b) % p == 0}
    prod = 1
    for p in places:
        prod *= hilbert_symbol(a, b, p)
    assert prod == 1


def test_parameterization_covers_conic_points():
    comp = factor_aux(parse_form("x1*x2-x3^2"))[0]
    p = parameterize(comp)
    for x in [(4, 9, 6), (1, 1, 1), (2, 8, 4), (-3, -12, 6)]:
        g = math.gcd(*x)
        found = False
        for u in range(-10, 11):
            for v in range(-10, 11):
                if math.gcd(u, v) != 1:
                    continue
                y = p(u, v)
                for nu in p.nus:
                    for lam in range(1, 20):
                        if all(lam * yi == nu * xi for yi, xi in zip(y, x)) or all(-lam * yi == nu * xi for yi, xi in zip(y, x)):
                            found = True
        assert found, x


def test_pell_example():
    sols = solve_binary(binary_equation(parse_binary("u^2-2*v^2"), 1), (20, 20))
    assert set(sols) == {(1, 0), (-1, 0), (3, 2), (3, -2), (-3, 2), (-3, -2), (17, 12), (17, -12), (-17, 12), (-17, -12)}


def test_thue_example_matches_scan():
    eq = binary_equation(parse_binary("u^3+2*v^3"), 3)
    assert eq.kind == "thue"
    sols = solve_binary(eq, (100, 100))
    scan = [(u, v) for u in range(-100, 101) for v in range(-100, 101) if u**3 + 2 * v**3 == 3]
    assert sorted(sols) == sorted(scan)
    assert (1, 1) in sols


def test_zero_rhs_rejected():
    with pytest.raises(ValueError):
        binary_equation(parse_binary("u^2-v^2"), 0)


@pytest.mark.parametrize("text,rhs", [("u^2-v^2", 15), ("u*v", 12), ("u^2+u*v-3*v^2", -3), ("2*u^3-v^3", 1),
                                      ("u^4-5*v^4", 11), ("u^2*v-v^3", 6)])
def test_binary_vs_scan(text, rhs):
    G = parse_binary(text)
    sols = solve_binary(binary_equation(G, rhs), (60, 60))
    scan = [(u, v) for u in range(-60, 61) for v in range(-60, 61) if G(u, v) == rhs]
    assert sorted(sols) == sorted(scan)


@pytest.mark.parametrize("k", [3, 4, 5])
def test_special_line(k):
    F = parse_form(f"x1^{k}+x2^{k}-x3^{k}")
    comp = factor_aux(parse_form("x2-x3"))[0]
    cert = detect_special(comp, parameterize(comp), F)
    assert cert is not None and cert.exponent == k and cert.verify(F)


def test_special_conic():
    F = parse_form("x1^2*x2-x1*x3^2+x2^3")
    comp = factor_aux(parse_form("x1*x2-x3^2"))[0]
    p = parameterize(comp)
    G = compose_param(F, p.f)
    assert str(G) == "v^6"
    cert = detect_special(comp, p, F)
    assert cert is not None and cert.exponent == 6 and cert.verify(F)


def test_not_special():
    F = parse_form("x1^3+x2^3-x3^3")
    comp = factor_aux(parse_form("x1-x2"))[0]
    assert detect_special(comp, parameterize(comp), F) is None


def test_line_points_and_family_point():
    F = parse_form("x1^3+x2^3-x3^3")
    comp = factor_aux(parse_form("x2-x3"))[0]
    pts = solve_on_component(comp, F, 1, Region(12))
    assert sorted(pts) == sorted((1, t, t) for t in range(-12, 13))
    conic = factor_aux(parse_form("36*x1*x2+36*x1*x3-7*x3^2"))[0]
    assert (7, -5, 6) in solve_on_component(conic, F, 2, Region(10))


def _brute(comp, F, N, B, mode):
    r = range(-B, B + 1)
    out = []
    for x in itertools.product(r, r, r):
        if comp.form(x) == 0:
            v = F(x)
            if (v == N) if mode == EQUATION else abs(v) <= N:
                out.append(x)
    return sorted(out)


@pytest.mark.parametrize("method", ["auto", "param"])
def test_completeness_random_components(method):
    rng = random.Random(1)
    done = 0
    while done < 50:
        F = TernaryForm(3, {e: rng.randint(-2, 2) or 1 for e in [(3, 0, 0), (0, 3, 0), (0, 0, 3), (1, 1, 1), (2, 1, 0)]})
        p = [rng.randint(-3, 3) for _ in range(3)]
        if p[2] == 0:
            continue
        if rng.random() < 0.5:
            q = [rng.randint(-3, 3) for _ in range(3)]
            a = [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]]
            if not any(a):
                continue
            A = TernaryForm(1, {(1, 0, 0): a[0], (0, 1, 0): a[1], (0, 0, 1): a[2]})
        else:
            cs = {e: rng.randint(-3, 3) for e in [(2, 0, 0), (1, 1, 0), (0, 2, 0), (1, 0, 1), (0, 1, 1)]}
            val = sum(c * p[0] ** e[0] * p[1] ** e[1] * p[2] ** e[2] for e, c in cs.items())
            cs = {e: c * p[2] ** 2 for e, c in cs.items()}
            cs[(0, 0, 2)] = -val
            try:
                A = TernaryForm(2, cs)
            except ValueError:
                continue
        N = abs(F(p)) or 1
        mode = rng.choice([EQUATION, INEQUALITY])
        if method == "param" and mode == INEQUALITY:
            N = min(N, 6)
        for comp in factor_aux(A):
            got = solve_on_component(comp, F, N, Region(6), mode, method=method)
            assert sorted(got) == _brute(comp, F, N, 6, mode)
        done += 1


def test_resultant_of_parameterization_divisibility():
    comp = factor_aux(parse_form("x1^2+x1*x2-2*x3^2"))[0]
    p = parameterize(comp)
    if p:
        r = binary_resultant(p.f[0], p.f[1])
        assert r % p.R == 0 or p.R == 0
