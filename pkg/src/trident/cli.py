"""Command line interface: ``trident <command> ...``; output is JSON (lines)."""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from fractions import Fraction

from .aux_forms import ParameterRangeError, choose_parameters, fit_lattice_all, lattice_scale
from .config import load_config
from .curve_solver import (
    EQUATION,
    INEQUALITY,
    Region,
    binary_equation,
    factor_aux,
    parameterize,
    solve_binary,
    solve_on_component,
)
from .forms import parse_binary, parse_form
from .implicit_series import build_series, jet_approximants, jet_budget, oriented
from .kfree import CeilingError, census, density, exception_count, mobius_crosscheck
from .patch_cover import compute_constants, good_squares
from .pipeline import OracleCeilingError, benchmark, oracle_points, solve_all

EXIT_OK, EXIT_RANGE, EXIT_DEGRADED = 0, 2, 3


@contextmanager
def _sink(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _emit(fh, obj):
    fh.write(json.dumps(obj, default=str) + "\n")


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


# ---------------------------------------------------------------------------


def cmd_solve(args, cfg) -> int:
    F = parse_form(args.form)
    rep = solve_all(F, args.N, args.B, mode=args.mode, inequality=args.ineq, config=cfg,
                    theorem=args.theorem, h=args.h, d=args.d)
    with _sink(args.out) as fh:
        for s in rep.solutions:
            _emit(fh, s.to_json())
    report = rep.to_json()
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(report, fh, indent=1, default=str)
    else:
        print(json.dumps(report, default=str), file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return EXIT_DEGRADED if rep.degraded else EXIT_OK


def cmd_oracle(args, cfg) -> int:
    F = parse_form(args.form)
    mode = INEQUALITY if args.ineq else EQUATION
    pts = oracle_points(F, args.N, args.B, mode, cfg.oracle_ceiling)
    with _sink(args.out) as fh:
        for x in pts:
            _emit(fh, {"x": list(x), "value": F(x)})
    return EXIT_OK


def cmd_bench(args, cfg) -> int:
    out = benchmark(args.form, args.N, _ints(args.grid), config=cfg, oracle=not args.no_oracle,
                    shells=args.shells, plot=args.plot)
    with _sink(args.out) as fh:
        json.dump(out, fh, indent=1, default=str)
        fh.write("\n")
    return EXIT_DEGRADED if out["degraded"] else EXIT_OK


def cmd_patches(args, cfg) -> int:
    F = parse_form(args.form)
    consts = compute_constants(F)
    if args.M is None:
        M = choose_parameters(args.B, args.N, F.degree, "theorem1", consts.M0, cfg.c, cfg.c_prime).M
    else:
        M = args.M
    patches = good_squares(F, consts, M, cfg.halo)
    with _sink(args.out) as fh:
        _emit(fh, {"lambda": str(consts.lam), "M0": consts.M0, "M": M, "count": len(patches),
                   "ratio": len(patches) / M})
        if args.list:
            for p in patches:
                _emit(fh, {"i": p.i, "j": p.j, "a": str(p.a), "b": str(p.b), "side": str(p.side),
                           "grad_index": p.grad_index, "grad_sign": p.grad_sign})
    return EXIT_OK


def cmd_auxforms(args, cfg) -> int:
    F = parse_form(args.form)
    consts = compute_constants(F)
    params = choose_parameters(args.B, args.N, F.degree, "theorem1", consts.M0, cfg.c, cfg.c_prime)
    budget = jet_budget(F, consts.lam, params.D, args.N, args.B, params.h, cfg.series_order,
                        cfg.series_extra, cfg.halo)
    S = lattice_scale(args.B, params.h)[2]
    patches = good_squares(F, consts, params.M, cfg.halo)
    if args.limit:
        patches = patches[: args.limit]
    with _sink(args.out) as fh:
        for p in patches:
            row = {"patch": [p.M, p.i, p.j], "forms": [], "empty": False}
            if budget is not None and p.grad_index:
                Fo, po, sw = oriented(F, p)
                approx, info = jet_approximants(Fo, po, budget, scale=S)
                if info.ok:
                    fit = fit_lattice_all(p, approx, params, swapped=sw, B_level=args.B, columns=budget.columns)
                    row["empty"] = fit.empty
                    row["forms"] = [str(a.form) for a in fit.forms]
                else:
                    row["reason"] = info.reason
            _emit(fh, row)
    return EXIT_OK


def cmd_curve(args, cfg) -> int:
    with _sink(args.out) as fh:
        if args.binary:
            G = parse_binary(args.binary)
            sols = solve_binary(binary_equation(G, args.rhs), (args.bound, args.bound))
            for u, v in sols:
                _emit(fh, {"u": u, "v": v})
            return EXIT_OK
        F = parse_form(args.form)
        A = parse_form(args.aux)
        mode = INEQUALITY if args.ineq else EQUATION
        for comp in factor_aux(A):
            param = parameterize(comp, cfg.height_bound) if comp.kind != "conjugate-line-pair" else None
            info = {"component": str(comp.form), "kind": comp.kind}
            if param is not None and not param:
                info["no_rational_point"] = list(getattr(param, "places", ()))
            pts = solve_on_component(comp, F, args.N, Region(args.B), mode, param=param,
                                     height_bound=cfg.height_bound)
            info["points"] = [list(x) for x in pts]
            _emit(fh, info)
    return EXIT_OK


def cmd_series(args, cfg) -> int:
    F = parse_form(args.form)
    consts = compute_constants(F)
    patches = good_squares(F, consts, args.M, cfg.halo)
    if not patches:
        print("no patches", file=sys.stderr)
        return EXIT_OK
    p = patches[args.index % len(patches)]
    Fo, po, _ = oriented(F, p)
    ser = build_series(Fo, po, args.s)
    with _sink(args.out) as fh:
        _emit(fh, {"patch": [p.M, p.i, p.j], "s": args.s, "X": ser.X_text(), "Y": ser.Y_text(),
                   "identity": ser.identity_holds(), "coeff_bound": str(ser.coeff_bound)})
    return EXIT_OK


def cmd_kfree(args, cfg) -> int:
    out = {}
    if args.exceptions:
        A, Bp = _ints(args.exceptions)
        res = exception_count(A, Bp, args.k, args.h, ceiling=cfg.exception_ceiling)
        out["exceptions"] = {"A": A, "B": Bp, "count": res.count, "solutions": [list(s) for s in res.solutions]}
    else:
        d = density(args.k, args.h, args.P)
        out["density"] = d.to_json()
        out["census"] = [r.to_json() for r in census(args.k, args.h, args.X, P=args.P, ceiling=cfg.census_ceiling)]
        if args.crosscheck:
            out["crosscheck"] = mobius_crosscheck(args.k, args.h, min(args.X, 10**5))
    with _sink(args.out) as fh:
        json.dump(out, fh, indent=1, default=str)
        fh.write("\n")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="trident", description=__doc__)
    ap.add_argument("--config", help="key=value configuration file")
    sub = ap.add_subparsers(dest="command", required=True)

    def form_args(p, need_B=True):
        p.add_argument("--form", required=True)
        p.add_argument("--N", type=int, default=1)
        if need_B:
            p.add_argument("--B", type=int, required=True)
        p.add_argument("--out")

    p = sub.add_parser("solve", help="all solutions in a box")
    form_args(p)
    p.add_argument("--mode", choices=("search", "verify"), default="search")
    p.add_argument("--theorem", type=int, choices=(1, 2), default=1)
    p.add_argument("--h", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--ineq", action="store_true")
    p.add_argument("--report")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="brute-force solutions")
    form_args(p)
    p.add_argument("--ineq", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="scaling table")
    form_args(p, need_B=False)
    p.add_argument("--grid", required=True, help="comma separated B values")
    p.add_argument("--shells", type=int)
    p.add_argument("--no-oracle", action="store_true")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("patches", help="good squares of the covering")
    form_args(p, need_B=False)
    p.add_argument("--B", type=int, default=1024)
    p.add_argument("--M", type=int)
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_patches)

    p = sub.add_parser("auxforms", help="certified auxiliary forms per patch")
    form_args(p)
    p.add_argument("--limit", type=int)
    p.set_defaults(func=cmd_auxforms)

    p = sub.add_parser("curve", help="integer points on an auxiliary curve, or a binary form equation")
    p.add_argument("--form")
    p.add_argument("--aux")
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--B", type=int, default=100)
    p.add_argument("--ineq", action="store_true")
    p.add_argument("--binary")
    p.add_argument("--rhs", type=int)
    p.add_argument("--bound", type=int, default=100)
    p.add_argument("--out")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("series", help="implicit-function series of a patch")
    p.add_argument("--form", required=True)
    p.add_argument("--M", type=int, default=16)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--s", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("kfree", help="density and census of (k-1)-free values")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--h", type=int, default=1)
    p.add_argument("--X", type=int, default=10**5)
    p.add_argument("--P", type=int, default=10_000)
    p.add_argument("--crosscheck", action="store_true")
    p.add_argument("--exceptions", help="A,B box for x^k + h = y^(k-1) z")
    p.add_argument("--out")
    p.set_defaults(func=cmd_kfree)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = load_config(args.config)
    try:
        return args.func(args, cfg)
    except ParameterRangeError as exc:
        print(json.dumps({"error": "parameter range", "condition": exc.condition, "detail": str(exc)}), file=sys.stderr)
        return EXIT_RANGE
    except (OracleCeilingError, CeilingError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
