import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from trident.aux_forms import ParameterRangeError
from trident.cli import main
from trident.config import SolverConfig, parse_config
from trident.curve_solver import EQUATION, INEQUALITY
from trident.forms import parse_form
from trident.pipeline import (
    FAMILIES,
    SpecialComponent,
    brute_force,
    classify,
    families_for,
    oracle_points,
    solve_all,
    value_symmetries,
)


def naive(F, N, B, mode=EQUATION):
    r = range(-B, B + 1)
    return {x for x in itertools.product(r, r, r) if (F(x) == N if mode == EQUATION else abs(F(x)) <= N)}


# -- oracle -------------------------------------------------------------------


def test_oracle_examples(cubic_minus):
    pts = set(oracle_points(cubic_minus, 1, 12))
    assert {(9, 10, 12), (10, 9, 12)} <= pts
    assert all((1, t, t) in pts and (t, 1, t) in pts for t in range(-12, 13))
    assert {(7, -5, 6), (-5, 7, 6)} <= set(oracle_points(cubic_minus, 2, 7))
    assert brute_force(cubic_minus, 1, 0) == []


@pytest.mark.parametrize("text", ["x1^3+x2^3-x3^3", "x1^3-x1*x2*x3+2*x2^3+x3^3", "x1^2*x2-x1*x3^2+x2^3", "2*x1^4-x2^4+x3^4+x1*x2*x3^2"])
@pytest.mark.parametrize("mode", [EQUATION, INEQUALITY])
def test_oracle_matches_naive(text, mode):
    F = parse_form(text)
    for N in (1, 2, 5):
        assert set(oracle_points(F, N, 9, mode)) == naive(F, N, 9, mode)


def test_oracle_ceiling(cubic_minus):
    with pytest.raises(ValueError):
        oracle_points(cubic_minus, 1, 10**6, ceiling=1000)


# -- classification -----------------------------------------------------------


def test_family_identity():
    for fam in FAMILIES:
        assert fam.identity_holds()


def test_classify_examples(cubic_minus):
    assert classify((1, 5, 5), cubic_minus, 1) == "special"
    assert classify((9, 10, 12), cubic_minus, 1) == "sporadic"
    fams = families_for(cubic_minus, 2)
    assert classify((7, -5, 6), cubic_minus, 2, families=fams) == "parametric(3)"


def test_classify_precedence(cubic_minus):
    line = SpecialComponent(parse_form("x2-x3"), 1)
    # (1, t, t) is special by its first term and lies on the line as well
    assert classify((1, 4, 4), cubic_minus, 1, [line]) == "special"
    F = parse_form("x1^2*x2-x1*x3^2+x2^3")
    assert classify((0, 1, 5), F, 1, [SpecialComponent(parse_form("x1"), 1)]) == "parametric(1)"


def test_families_transport(cubic_plus):
    fams = families_for(cubic_plus, 2)
    assert fams
    for f in fams:
        assert f.identity_holds()
    # N = 16 = 2 * 2^3 via scaling
    assert all(f.identity_holds() for f in families_for(cubic_plus, 16))


# -- pipeline -------------------------------------------------------------------


@pytest.mark.parametrize("N", [1, 2, 3])
def test_search_equals_oracle_small(cubic_minus, N):
    rep = solve_all(cubic_minus, N, 400)
    assert rep.points == set(oracle_points(cubic_minus, N, 400))
    assert not rep.degraded


def test_search_other_forms_small_shells():
    cfg = SolverConfig(B_min=48)
    for text, N, B, ineq in [("x1^3-x1*x2*x3+2*x2^3+x3^3", 5, 100, False), ("x1^3+x2^3-x3^3", 3, 100, True)]:
        F = parse_form(text)
        rep = solve_all(F, N, B, inequality=ineq, config=cfg)
        assert rep.points == set(oracle_points(F, N, B, INEQUALITY if ineq else EQUATION))


def test_box_of_one(cubic_minus):
    for N in (1, 2):
        rep = solve_all(cubic_minus, N, 1)
        assert all(max(abs(c) for c in x) <= 1 for x in rep.points)
        assert rep.points == naive(cubic_minus, N, 1)


def test_family_points_parametric(cubic_minus):
    rep = solve_all(cubic_minus, 2, 600)
    cls = {s.x: s.clazz for s in rep.solutions}
    for t in range(-5, 6):
        x = (6 * t**3 + 1, -6 * t**3 + 1, 6 * t**2)
        if max(map(abs, x)) <= 600:
            assert cls[x] == "parametric(3)"


def test_symmetry_closure(cubic_plus):
    rep = solve_all(cubic_plus, 1, 300)
    pts = rep.points
    for s in value_symmetries(cubic_plus):
        assert {s(x) for x in pts} == pts


def test_deterministic_classes(cubic_minus):
    a = solve_all(cubic_minus, 1, 300)
    b = solve_all(cubic_minus, 1, 300)
    assert [(s.x, s.clazz) for s in a.solutions] == [(s.x, s.clazz) for s in b.solutions]


def test_N_count_monotone(cubic_minus):
    counts = [solve_all(cubic_minus, 1, B).N_count for B in (100, 200, 300)]
    assert counts == sorted(counts)
    rep = solve_all(cubic_minus, 2, 300)
    by_d = []
    for d in (0, 1, 2, 3):
        rep.d = d
        by_d.append(rep.N_count)
    assert by_d == sorted(by_d, reverse=True)


def test_verify_mode(cubic_minus):
    rep = solve_all(cubic_minus, 1, 600, mode="verify")
    assert rep.points == set(oracle_points(cubic_minus, 1, 600))


def test_range_error(cubic_minus):
    with pytest.raises(ParameterRangeError):
        solve_all(cubic_minus, 10**6, 300)


def test_rejects_low_degree_and_singular():
    with pytest.raises(ValueError):
        solve_all(parse_form("x1^2+x2^2-x3^2"), 1, 10)
    with pytest.raises(ValueError):
        solve_all(parse_form("x2^2*x3-x1^3"), 1, 10)


# -- config and CLI -----------------------------------------------------------


def test_config_parsing():
    cfg = parse_config("c = 1/4\n# comment\noracle_ceiling=500\nseries_order = none\n")
    assert cfg.c == parse_config("c=0.25").c
    assert cfg.oracle_ceiling == 500 and cfg.series_order is None
    with pytest.raises(ValueError):
        parse_config("bogus = 1")


def test_cli_solve_and_oracle(tmp_path, capsys):
    out = tmp_path / "sol.jsonl"
    rep = tmp_path / "rep.json"
    code = main(["solve", "--form", "x1^3+x2^3-x3^3", "--N", "2", "--B", "300", "--out", str(out), "--report", str(rep)])
    assert code == 0
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert {tuple(r["x"]) for r in rows} == set(oracle_points(parse_form("x1^3+x2^3-x3^3"), 2, 300))
    assert all(r["value"] == 2 and "class" in r for r in rows)
    assert json.loads(rep.read_text())["degraded"] is False
    out2 = tmp_path / "o.jsonl"
    assert main(["oracle", "--form", "x1^3+x2^3-x3^3", "--N", "2", "--B", "300", "--out", str(out2)]) == 0
    assert len(out2.read_text().splitlines()) == len(rows)


def test_cli_range_exit_code(capsys):
    assert main(["solve", "--form", "x1^3+x2^3-x3^3", "--N", "1000000", "--B", "300"]) == 2


def test_cli_degraded_exit_code(tmp_path):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("fallback_budget = 0\nB_min = 16\nrefine_depth = 0\n")
    code = main(["--config", str(cfg), "solve", "--form", "x1^3-x1*x2*x3+2*x2^3+x3^3", "--N", "1", "--B", "40",
                 "--out", str(tmp_path / "s.jsonl")])
    assert code == 3


def test_cli_other_commands(tmp_path, capsys):
    assert main(["patches", "--form", "x1^3+x2^3-x3^3", "--M", "8"]) == 0
    first = json.loads(capsys.readouterr().out.splitlines()[0])
    assert first["M0"] == 12 and first["count"] > 0
    assert main(["curve", "--binary", "u^3+2*v^3", "--rhs", "3", "--bound", "50"]) == 0
    assert {"u": 1, "v": 1} in [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert main(["curve", "--form", "x1^3+x2^3-x3^3", "--aux", "x2-x3", "--N", "1", "--B", "5"]) == 0
    row = json.loads(capsys.readouterr().out.splitlines()[0])
    assert len(row["points"]) == 11
    assert main(["series", "--form", "x1^3+x2^3-x3^3", "--M", "4", "--s", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["identity"] is True
    assert main(["kfree", "--X", "1000", "--P", "100", "--out", str(tmp_path / "k.json")]) == 0
    data = json.loads((tmp_path / "k.json").read_text())
    assert data["density"]["factors"]
    assert main(["kfree", "--exceptions", "4,4"]) == 0
    assert main(["auxforms", "--form", "x1^3+x2^3-x3^3", "--B", "2000", "--limit", "3"]) == 0
