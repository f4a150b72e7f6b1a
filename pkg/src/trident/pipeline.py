"""End-to-end solver for F(x) = N (or |F(x)| <= N) in a box.

Solutions are split by which coordinate has the largest modulus; charts
related by a signed permutation preserving |F| are solved once.  Each chart
is cut into dyadic shells B'/2 < x3 <= B'.  In every shell the good squares
of the (x1/x3, x2/x3) plane are processed independently: a lattice
certificate gives conics through all solutions of the patch, and the curve
solver lists their points.  Patches without a certificate are enumerated
directly.  The small core box is handled by the brute-force oracle.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import flint
import numpy as np

from .aux_forms import (
    NO_POINTS,
    RANK_FULL,
    AuxForm,
    ParameterRangeError,
    choose_parameters,
    fit_lattice_all,
    fit_nullspace,
    lattice_scale,
)
from .config import SolverConfig
from .curve_solver import (
    EQUATION,
    INEQUALITY,
    SIGNED,
    CurveComponent,
    Region,
    SpecialCertificate,
    detect_special,
    factor_aux,
    intersect_forms,
    parameterize,
    solve_on_component,
    _multiples,
)
from .forms import TernaryForm, assert_nonsingular, exact_root, iroot, parse_form
from .implicit_series import jet_approximants, jet_budget, oriented
from .patch_cover import Patch, cells_containing, compute_constants, good_squares, interval_eval

Triple = tuple[int, int, int]


class OracleCeilingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Solution:
    x: Triple
    value: int
    clazz: str
    provenance: dict

    def to_json(self) -> dict:
        return {"x": list(self.x), "value": self.value, "class": self.clazz, "provenance": self.provenance}


@dataclass
class SolveReport:
    form: str
    N: int
    B: int
    mode: str
    value_mode: str
    solutions: list[Solution]
    d: int
    patch_count: int = 0
    aux_count: int = 0
    fallback_count: int = 0
    empty_count: int = 0
    enumerated_components: int = 0
    enumerated_cells: int = 0
    excluded_cells: int = 0
    degraded: bool = False
    complete: bool = True
    timings: dict = field(default_factory=dict)
    levels: list = field(default_factory=list)
    specials: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def points(self) -> set[Triple]:
        return {s.x for s in self.solutions}

    @property
    def counts(self) -> dict:
        return dict(sorted(Counter(s.clazz for s in self.solutions).items()))

    @property
    def N_count(self) -> int:
        """Solutions outside S_d (special ones count as degree-1 parametric)."""
        return sum(1 for s in self.solutions if _class_degree(s.clazz) > self.d)

    def to_json(self, with_solutions: bool = False) -> dict:
        out = {
            "form": self.form,
            "N": self.N,
            "B": self.B,
            "mode": self.mode,
            "value_mode": self.value_mode,
            "solution_count": len(self.solutions),
            "counts": self.counts,
            "d": self.d,
            "N_count": self.N_count,
            "patch_count": self.patch_count,
            "aux_count": self.aux_count,
            "fallback_count": self.fallback_count,
            "empty_count": self.empty_count,
            "enumerated_components": self.enumerated_components,
            "enumerated_cells": self.enumerated_cells,
            "excluded_cells": self.excluded_cells,
            "degraded": self.degraded,
            "complete": self.complete,
            "timings": {k: round(v, 4) for k, v in self.timings.items()},
            "levels": self.levels,
            "specials": self.specials,
            "notes": self.notes,
        }
        if with_solutions:
            out["solutions"] = [s.to_json() for s in self.solutions]
        return out


def _class_degree(clazz: str) -> float:
    if clazz == "special":
        return 1
    if clazz.startswith("parametric("):
        return int(clazz[len("parametric("):-1])
    return math.inf


# ---------------------------------------------------------------------------
# Value conditions
# ---------------------------------------------------------------------------


def _targets(N: int, mode: str) -> list[int]:
    if mode == EQUATION:
        return [N]
    if mode == SIGNED:
        return [N, -N]
    return list(range(-N, N + 1))


def _ok(val: int, N: int, mode: str) -> bool:
    if mode == EQUATION:
        return val == N
    if mode == SIGNED:
        return abs(val) == N
    return abs(val) <= N


# ---------------------------------------------------------------------------
# Oracle
# ---------------------------------------------------------------------------


def _pure_position(F: TernaryForm) -> int | None:
    """Index p such that x_p occurs only in the monomial c x_p^k."""
    k = F.degree
    for p in range(3):
        if all(e[p] in (0, k) for e, _ in F.coeffs) and F[tuple(k if i == p else 0 for i in range(3))]:
            return p
    return None


def _fits_int64(F: TernaryForm, B: int, extra: int = 0) -> bool:
    bound = sum(abs(c) for _, c in F.coeffs) * B**F.degree + extra
    return bound < 2**62


def _eval_grid(F: TernaryForm, X1, X2, X3):
    out = np.zeros(np.broadcast(X1, X2, X3).shape, dtype=X1.dtype if hasattr(X1, "dtype") else object)
    for e, c in F.coeffs:
        out = out + c * X1 ** e[0] * X2 ** e[1] * X3 ** e[2]
    return out


def brute_force(F: TernaryForm, N: int, B: int, mode: str = EQUATION, ceiling: int = 20_000) -> list[Solution]:
    """All x with max |x_i| <= B and F(x) = N (or the chosen condition), exhaustively."""
    return [Solution(x, F(x), "unclassified", {"source": "oracle"}) for x in oracle_points(F, N, B, mode, ceiling)]


def oracle_points(F: TernaryForm, N: int, B: int, mode: str = EQUATION, ceiling: int = 20_000) -> list[Triple]:
    if B > ceiling:
        raise OracleCeilingError(f"B={B} exceeds the oracle ceiling {ceiling}")
    if B < 0:
        return []
    p = _pure_position(F)
    if p is not None and _fits_int64(F, B, 2 * N):
        pts = _oracle_root(F, N, B, mode, p)
    else:
        pts = _oracle_cube(F, N, B, mode)
    return sorted(pts)


def _oracle_cube(F, N, B, mode) -> list[Triple]:
    dtype = np.int64 if _fits_int64(F, B, N) else object
    r = np.arange(-B, B + 1).astype(dtype)
    X2, X3 = np.meshgrid(r, r, indexing="ij")
    out = []
    for x1 in range(-B, B + 1):
        val = _eval_grid(F, np.asarray(x1, dtype=dtype), X2, X3)
        if mode == EQUATION:
            mask = val == N
        elif mode == SIGNED:
            mask = (val == N) | (val == -N)
        else:
            mask = (val <= N) & (val >= -N)
        for i, j in zip(*np.nonzero(mask)):
            out.append((x1, int(r[i]), int(r[j])))
    return out


def _oracle_root(F, N, B, mode, p) -> list[Triple]:
    """Exact k-th root solve for the pure coordinate, vectorized over one other."""
    k = F.degree
    c = F[tuple(k if i == p else 0 for i in range(3))]
    others = [i for i in range(3) if i != p]
    rest = TernaryForm(k, {e: v for e, v in F.coeffs if e[p] == 0}) if len(F.coeffs) > 1 else None
    r = np.arange(-B, B + 1, dtype=np.int64)
    targets = _targets(N, mode)
    out = []
    if mode == INEQUALITY:
        span = 2 * iroot(2 * N, k)[0] + 3
    else:
        span = 1
    for a in range(-B, B + 1):
        if rest is None:
            R = np.zeros_like(r)
        else:
            xs = [None, None, None]
            xs[others[0]] = np.int64(a)
            xs[others[1]] = r
            xs[p] = np.int64(0)
            R = _eval_grid(rest, *[np.asarray(x, dtype=np.int64) for x in xs])
            R = np.broadcast_to(R, r.shape)
        centres = [0] if mode == INEQUALITY else targets
        for t in centres:
            q = t - R  # want c x^k = q (or |c x^k + R| <= N)
            if mode != INEQUALITY:
                ok = q % c == 0
                qq = np.where(ok, q // c, 0)
            else:
                ok = np.ones(r.shape, dtype=bool)
                qq = q / c
            root = np.sign(qq) * np.round(np.abs(qq).astype(np.float64) ** (1.0 / k))
            root = root.astype(np.int64)
            for off in range(-span, span + 1):
                cand = root + off
                for sgn in ((1, -1) if k % 2 == 0 else (1,)):
                    x = sgn * cand
                    inbox = np.abs(x) <= B
                    val = c * x**k + R
                    if mode == EQUATION:
                        hit = val == N
                    elif mode == SIGNED:
                        hit = (val == N) | (val == -N)
                    else:
                        hit = np.abs(val) <= N
                    hit &= inbox & ok
                    for idx in np.nonzero(hit)[0]:
                        pt = [0, 0, 0]
                        pt[others[0]] = a
                        pt[others[1]] = int(r[idx])
                        pt[p] = int(x[idx])
                        out.append(tuple(pt))
    res = sorted(set(out))
    return [x for x in res if _ok(F(x), N, mode)]


# ---------------------------------------------------------------------------
# Symmetry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SignedPerm:
    """y -> x with x[perm[j]] = signs[j] * y[j]."""

    perm: tuple[int, int, int]
    signs: tuple[int, int, int]

    def __call__(self, y: Sequence[int]) -> Triple:
        x = [0, 0, 0]
        for j in range(3):
            x[self.perm[j]] = self.signs[j] * y[j]
        return tuple(x)

    def inverse(self) -> "SignedPerm":
        perm = [0, 0, 0]
        signs = [0, 0, 0]
        for j in range(3):
            perm[self.perm[j]] = j
            signs[self.perm[j]] = self.signs[j]
        return SignedPerm(tuple(perm), tuple(signs))


def _negate(F: TernaryForm) -> TernaryForm:
    return TernaryForm(F.degree, {e: -c for e, c in F.coeffs})


def symmetry_group(F: TernaryForm) -> list[tuple[SignedPerm, int]]:
    """Signed permutations s with F(s(y)) = eps F(y), eps = +-1."""
    out = []
    neg = _negate(F)
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            G = F.signed_permute(perm, signs)
            if G == F:
                out.append((SignedPerm(perm, signs), 1))
            elif G == neg:
                out.append((SignedPerm(perm, signs), -1))
    return out


def value_symmetries(F: TernaryForm) -> list[SignedPerm]:
    """Signed permutations fixing F itself (eps = +1)."""
    return [s for s, eps in symmetry_group(F) if eps == 1]


def chart_representatives(F: TernaryForm) -> list[int]:
    group = symmetry_group(F)
    seen: set[int] = set()
    reps = []
    for p in (2, 0, 1):
        if p in seen:
            continue
        reps.append(p)
        seen |= {s.perm[p] for s, _ in group}
    return reps


def chart_map(p: int) -> SignedPerm:
    """Chart coordinates y (y3 = x_p) to x."""
    others = [i for i in range(3) if i != p]
    return SignedPerm((others[0], others[1], p), (1, 1, 1))


def form_in_chart(F: TernaryForm, p: int) -> TernaryForm:
    cm = chart_map(p)
    return F.signed_permute(cm.perm, cm.signs)


def form_from_chart(A: TernaryForm, p: int) -> TernaryForm:
    inv = chart_map(p).inverse()
    return A.signed_permute(inv.perm, inv.signs)


# ---------------------------------------------------------------------------
# Parametric family registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Family:
    """A polynomial parameterization t -> x with F(x(t)) = N identically."""

    name: str
    form: TernaryForm
    N: int
    polys: tuple  # three fmpz_poly in t
    degree: int

    def identity_holds(self) -> bool:
        t = flint.fmpz_poly([0, 1])
        val = flint.fmpz_poly([0])
        for e, c in self.form.coeffs:
            val += c * self.polys[0] ** e[0] * self.polys[1] ** e[1] * self.polys[2] ** e[2]
        return val == flint.fmpz_poly([self.N])

    def parameter_of(self, x: Sequence[int]) -> int | None:
        """Integer t with x(t) = x, if any."""
        for i, p in enumerate(self.polys):
            if p.degree() >= 1:
                for t, _ in (p - x[i]).roots():
                    t = int(t)
                    if all(int(q(t)) == x[j] for j, q in enumerate(self.polys)):
                        return t
                return None
        return None


def _poly(coeffs):
    return flint.fmpz_poly(coeffs)


FAMILIES = (
    Family(
        "cubic family for 2",
        parse_form("x1^3+x2^3-x3^3"),
        2,
        (_poly([1, 0, 0, 6]), _poly([1, 0, 0, -6]), _poly([0, 0, 6])),
        3,
    ),
)


def families_for(F: TernaryForm, N: int, registry: Iterable[Family] = FAMILIES) -> list[Family]:
    """Registry families transported to F by signed permutations and scaling."""
    out = []
    k = F.degree
    for fam in registry:
        if fam.form.degree != k or N % fam.N:
            continue
        mu = exact_root(N // fam.N, k)
        if mu is None:
            continue
        for perm in itertools.permutations(range(3)):
            for signs in itertools.product((1, -1), repeat=3):
                if fam.form.signed_permute(perm, signs) != F:
                    continue
                # F(y) = fam.form(x) with x[perm[j]] = signs[j] y[j]
                polys = tuple(mu * signs[j] * fam.polys[perm[j]] for j in range(3))
                out.append(Family(fam.name, F, N, polys, fam.degree))
    uniq = {}
    for f in out:
        uniq.setdefault(tuple(tuple(int(c) for c in p.coeffs()) for p in f.polys), f)
    return list(uniq.values())


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpecialComponent:
    form: TernaryForm  # in x coordinates
    degree: int
    certificate: SpecialCertificate | None = None


def classify(x: Sequence[int], F: TernaryForm, N: int, specials: Sequence[SpecialComponent] = (),
             families: Sequence[Family] = ()) -> str:
    """special > parametric(d) > sporadic."""
    diag = F.diagonal_coefficients()
    k = F.degree
    if diag is not None and any(c * xi**k == N for c, xi in zip(diag, x)):
        return "special"
    best = None
    for sc in specials:
        if sc.form(x) == 0:
            best = sc.degree if best is None else min(best, sc.degree)
    for fam in families:
        if fam.parameter_of(x) is not None:
            best = fam.degree if best is None else min(best, fam.degree)
    return f"parametric({best})" if best is not None else "sporadic"


# ---------------------------------------------------------------------------
# Patch processing
# ---------------------------------------------------------------------------


def enumerate_region(F: TernaryForm, N: int, region: Region, mode: str) -> list[Triple]:
    """Direct enumeration of a patch region (x3 shell, x1/x3 and x2/x3 intervals)."""
    lo, hi = region.shell
    out = []
    dtype = np.int64 if _fits_int64(F, hi, N) else object
    X1s, X2s, X3s = [], [], []
    for x3 in range(lo + 1, hi + 1):
        a1 = math.ceil(region.t1[0] * x3)
        b1 = math.floor(region.t1[1] * x3)
        a2 = math.ceil(region.t2[0] * x3)
        b2 = math.floor(region.t2[1] * x3)
        if a1 > b1 or a2 > b2:
            continue
        g1, g2 = np.meshgrid(np.arange(a1, b1 + 1), np.arange(a2, b2 + 1), indexing="ij")
        X1s.append(g1.ravel())
        X2s.append(g2.ravel())
        X3s.append(np.full(g1.size, x3))
    if not X1s:
        return []
    X1 = np.concatenate(X1s).astype(dtype)
    X2 = np.concatenate(X2s).astype(dtype)
    X3 = np.concatenate(X3s).astype(dtype)
    val = _eval_grid(F, X1, X2, X3)
    if mode == EQUATION:
        mask = val == N
    elif mode == SIGNED:
        mask = (val == N) | (val == -N)
    else:
        mask = (val <= N) & (val >= -N)
    for i in np.nonzero(mask)[0]:
        x = (int(X1[i]), int(X2[i]), int(X3[i]))
        if region.contains(x):
            out.append(x)
    return out


def _patch_region(patch: Patch, lo: int, hi: int) -> Region:
    return Region(hi, (lo, hi), (patch.a, patch.a + patch.side), (patch.b, patch.b + patch.side))


@dataclass
class _Stats:
    patches: int = 0
    aux: int = 0
    fallback: int = 0
    empty: int = 0
    enumerated_components: int = 0
    enumerated_cells: int = 0
    excluded: int = 0
    forms_hist: Counter = field(default_factory=Counter)
    timings: Counter = field(default_factory=Counter)


class _Run:
    """State shared across the charts and shells of one solve."""

    def __init__(self, F, N, B, config, value_mode, chart_mode, theorem, h):
        self.F, self.N, self.B = F, N, B
        self.config = config
        self.value_mode = value_mode
        self.chart_mode = chart_mode
        self.theorem = theorem
        self.h = h
        self.stats = _Stats()
        self.specials: dict[TernaryForm, SpecialComponent] = {}
        self.found: dict[Triple, dict] = {}
        self.levels: list[dict] = []
        self.uncovered = 0

    def add(self, y: Triple, chart: int, prov: dict):
        x = chart_map(chart)(y)
        if x not in self.found:
            self.found[x] = prov

    def note_component(self, comp: CurveComponent, param, Fp: TernaryForm, chart: int):
        if param is None or not param:
            return
        cert = detect_special(comp, param, Fp)
        if cert is not None:
            form = form_from_chart(comp.form, chart)
            if form not in self.specials:
                self.specials[form] = SpecialComponent(form, param.degree, cert)

    def solve_components(self, comps, Fp, region, chart, prov) -> list[Triple]:
        pts = []
        for comp in comps:
            param = None
            if comp.kind == "line":
                param = parameterize(comp, self.config.height_bound)
            got = solve_on_component(comp, Fp, self.N, region, self.chart_mode, param=param,
                                     height_bound=self.config.height_bound)
            if got and comp.kind != "conjugate-line-pair":
                # special components only matter if they carry solutions
                if param is None:
                    param = parameterize(comp, self.config.height_bound)
                self.note_component(comp, param, Fp, chart)
            for y in got:
                self.add(y, chart, dict(prov, component=str(comp.form)))
            pts += got
        return pts


def children(patch: Patch) -> list[Patch]:
    """The four quarter cells of a patch, on the grid of twice the resolution."""
    return [Patch(2 * patch.i + a, 2 * patch.j + b, 2 * patch.M, patch.M0, patch.grad_index,
                  patch.grad_sign, patch.halo) for a in (0, 1) for b in (0, 1)]


def cell_excluded(F: TernaryForm, patch: Patch, eta: Fraction) -> bool:
    """True if |F(t1, t2, 1)| > eta on the whole closed cell (no solution direction)."""
    lo, hi = interval_eval(F, ((patch.a, patch.a + patch.side), (patch.b, patch.b + patch.side)))
    return lo > eta or hi < -eta


class _Level:
    """Per-shell data: parameters, lattice scale and jet budgets by refinement depth."""

    def __init__(self, run, Fp, consts, params, lo, hi):
        self.run, self.Fp, self.consts, self.params = run, Fp, consts, params
        self.lo, self.hi = lo, hi
        self.S = lattice_scale(hi, params.h)[2]
        self.eta = Fraction(run.N, max(lo, 1) ** Fp.degree)
        self._budgets = {}

    def budget(self, depth: int):
        if depth not in self._budgets:
            cfg = self.run.config
            self._budgets[depth] = jet_budget(self.Fp, self.consts.lam, self.params.D * 2**depth, self.run.N,
                                              self.hi, self.params.h, cfg.series_order, cfg.series_extra,
                                              cfg.halo)
        return self._budgets[depth]


def _certify(run: _Run, lvl: _Level, patch: Patch, depth: int):
    """Lattice certificate for one cell, or None."""
    st = run.stats
    budget = lvl.budget(depth)
    if patch.grad_index == 0 or budget is None:
        return None
    t0 = time.perf_counter()
    Fo, po, sw = oriented(lvl.Fp, patch)
    approx, info = jet_approximants(Fo, po, budget, scale=lvl.S)
    t1 = time.perf_counter()
    st.timings["series"] += t1 - t0
    fit = None
    if info.ok:
        fit = fit_lattice_all(patch, approx, lvl.params, swapped=sw, B_level=lvl.hi, columns=budget.columns)
    st.timings["lattice"] += time.perf_counter() - t1
    return fit if fit is not None and fit.vectors else None


def _search_cell(run: _Run, lvl: _Level, chart: int, patch: Patch, depth: int) -> int:
    """Solve one cell; returns the number of cells that had to be enumerated."""
    st = run.stats
    Fp = lvl.Fp
    if depth > 0 and cell_excluded(Fp, patch, lvl.eta):
        st.excluded += 1
        return 0
    fit = _certify(run, lvl, patch, depth)
    region = _patch_region(patch, lvl.lo, lvl.hi)
    prov = {"chart": chart, "shell": [lvl.lo, lvl.hi], "patch": [patch.M, patch.i, patch.j]}
    st.forms_hist[0 if fit is None else len(fit.vectors)] += 1
    t0 = time.perf_counter()
    if fit is not None and fit.empty:
        st.aux += 1
        st.empty += 1
        return 0
    forms = fit.forms if fit is not None else []
    if forms and run.h <= 2:
        st.aux += 1
        tag = dict(prov, aux=str(forms[0].form))
        if len(forms) >= 2:
            inter = intersect_forms(forms[0], forms[1])
            for p in inter.points:
                for y in _multiples(p, Fp, run.N, run.chart_mode, region):
                    run.add(y, chart, dict(tag, point=list(p)))
            run.solve_components(inter.components, Fp, region, chart, tag)
        else:
            run.solve_components(factor_aux(forms[0]), Fp, region, chart, tag)
        st.timings["curves"] += time.perf_counter() - t0
        return 0
    if forms:
        # auxiliary curves of degree > 2: bounded enumeration inside the cell
        st.aux += 1
        st.enumerated_components += 1
        for y in enumerate_region(Fp, run.N, region, run.chart_mode):
            run.add(y, chart, dict(prov, source="enumerated component"))
        st.timings["enumeration"] += time.perf_counter() - t0
        return 0
    if depth < run.config.refine_depth and patch.grad_index != 0:
        return sum(_search_cell(run, lvl, chart, c, depth + 1) for c in children(patch))
    st.enumerated_cells += 1
    for y in enumerate_region(Fp, run.N, region, run.chart_mode):
        run.add(y, chart, dict(prov, source="fallback enumeration"))
    st.timings["enumeration"] += time.perf_counter() - t0
    return 1


def _process_patch_search(run: _Run, lvl: _Level, chart: int, patch: Patch):
    if _search_cell(run, lvl, chart, patch, 0):
        run.stats.fallback += 1


def _process_patch_verify(run: _Run, Fp, chart, patch, pts, lo, hi):
    st = run.stats
    region = _patch_region(patch, lo, hi)
    prov = {"chart": chart, "shell": [lo, hi], "patch": [patch.M, patch.i, patch.j]}
    t0 = time.perf_counter()
    res = fit_nullspace(pts, run.h, patch)
    if res is NO_POINTS:
        st.empty += 1
        st.aux += 1
        return
    if res is RANK_FULL or run.h > 2:
        st.fallback += 1 if res is RANK_FULL else 0
        st.enumerated_components += 0 if res is RANK_FULL else 1
        for y in enumerate_region(Fp, run.N, region, run.chart_mode):
            run.add(y, chart, dict(prov, source="fallback enumeration"))
        return
    st.aux += 1
    run.solve_components(factor_aux(res), Fp, region, chart, dict(prov, aux=str(res.form)))
    st.timings["curves"] += time.perf_counter() - t0


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------


def solve_all(F: TernaryForm | str, N: int, B: int, mode: str = "search", inequality: bool = False,
              config: SolverConfig | None = None, theorem: int = 1, h: int | None = None,
              d: int | None = None, shells: int | None = None,
              progress: Callable[[str], None] | None = None) -> SolveReport:
    """Every x with max |x_i| <= B and F(x) = N (|F(x)| <= N with ``inequality``).

    ``mode`` is "search" (lattice certificates with enumeration fallback) or
    "verify" (aux forms fitted through oracle points).  ``shells`` limits
    the number of dyadic shells processed per chart; the result is then
    marked incomplete and the core box is skipped.
    """
    if isinstance(F, str):
        F = parse_form(F)
    config = config or SolverConfig()
    k = F.degree
    if k < 3:
        raise ValueError("forms of degree at least 3 are required")
    if N < 1:
        raise ValueError("N must be positive")
    if mode not in ("search", "verify"):
        raise ValueError(f"unknown mode {mode!r}")
    if not assert_nonsingular(F):
        raise ValueError("F must be nonsingular")
    value_mode = INEQUALITY if inequality else EQUATION
    chart_mode = INEQUALITY if inequality else SIGNED
    tmode = "theorem1" if theorem == 1 else "theorem2"
    t_start = time.perf_counter()
    d = k if d is None else d

    charts = chart_representatives(F)
    chart_forms = {p: form_in_chart(F, p) for p in charts}
    consts = {p: compute_constants(chart_forms[p]) for p in charts}
    M0 = max(c.M0 for c in consts.values())
    top = choose_parameters(B, N, k, tmode, M0, config.c, config.c_prime, h) if B > config.B_min else None
    hh = top.h if top is not None else (2 if theorem == 1 else (h or (k - 1) // 2))
    run = _Run(F, N, B, config, value_mode, chart_mode, theorem, hh)

    oracle_abs = None
    if mode == "verify":
        oracle_abs = oracle_points(F, N, B, chart_mode, config.oracle_ceiling)

    core = B
    for p in charts:
        Fp = chart_forms[p]
        C = consts[p]
        hi = B
        count = 0
        while hi > config.B_min and (shells is None or count < shells):
            lo = hi // 2
            try:
                params = choose_parameters(hi, N, k, tmode, C.M0, config.c, config.c_prime, h)
            except ParameterRangeError:
                if hi == B:
                    raise
                break
            t0 = time.perf_counter()
            patches = good_squares(Fp, C, params.M, config.halo)
            run.stats.timings["cover"] += time.perf_counter() - t0
            before = (run.stats.patches, run.stats.aux, run.stats.fallback, run.stats.empty)
            run.stats.patches += len(patches)
            if mode == "search":
                lvl = _Level(run, Fp, C, params, lo, hi)
                for patch in patches:
                    _process_patch_search(run, lvl, p, patch)
            else:
                by_patch = _assign_points(oracle_abs, p, lo, hi, params.M, C.M0)
                keys = {pt.key(): pt for pt in patches}
                uncovered = [y for key, ys in by_patch.items() if key not in keys for y in ys]
                for y in uncovered:
                    run.add(y, p, {"source": "uncovered direction", "shell": [lo, hi]})
                if uncovered:
                    run.uncovered += len(uncovered)
                for key, patch in keys.items():
                    _process_patch_verify(run, Fp, p, patch, by_patch.get(key, []), lo, hi)
            after = (run.stats.patches, run.stats.aux, run.stats.fallback, run.stats.empty)
            run.levels.append({
                "chart": p, "B_level": hi, "M": params.M, "D": params.D,
                "patches": after[0] - before[0], "aux_forms": after[1] - before[1],
                "fallbacks": after[2] - before[2], "empty": after[3] - before[3],
            })
            if progress:
                progress(f"chart {p} shell ({lo}, {hi}]: {len(patches)} patches")
            hi = lo
            count += 1
        core = min(core, hi)

    complete = shells is None
    solutions: dict[Triple, dict] = {}
    group = symmetry_group(F)
    for x, prov in run.found.items():
        for s, _ in group:
            z = s(x)
            if max(map(abs, z)) <= B and _ok(F(z), N, value_mode) and z not in solutions:
                solutions[z] = prov if z == x else dict(prov, symmetry=[list(s.perm), list(s.signs)])
    if complete:
        t0 = time.perf_counter()
        for x in oracle_points(F, N, core, value_mode, max(config.oracle_ceiling, core)):
            solutions.setdefault(x, {"source": "core box", "B_core": core})
        run.stats.timings["core"] += time.perf_counter() - t0

    specials = list(run.specials.values())
    fams = families_for(F, N)
    sols = []
    for x in sorted(solutions):
        val = F(x)
        assert _ok(val, N, value_mode) and max(map(abs, x)) <= B
        sols.append(Solution(x, val, classify(x, F, N, specials, fams), solutions[x]))

    st = run.stats
    rep = SolveReport(str(F), N, B, mode, value_mode, sols, d, st.patches, st.aux, st.fallback, st.empty,
                      st.enumerated_components, st.enumerated_cells, st.excluded, complete=complete)
    rep.degraded = st.patches > 0 and st.fallback > config.fallback_budget * st.patches
    rep.timings = dict(st.timings)
    rep.timings["total"] = time.perf_counter() - t_start
    rep.levels = run.levels
    rep.specials = [{"form": str(s.form), "degree": s.degree} for s in specials]
    rep.notes.append(f"charts {charts}, core box {core}, forms per patch {dict(sorted(st.forms_hist.items()))}")
    if run.uncovered:
        rep.notes.append(f"{run.uncovered} oracle points fell outside every patch")
    if st.enumerated_components:
        rep.notes.append("auxiliary curves of degree > 2 were enumerated inside their patches")
    if mode == "verify":
        oracle = set(oracle_points(F, N, B, value_mode, config.oracle_ceiling))
        rep.notes.append("verified against oracle" if oracle == rep.points else "MISMATCH with oracle")
    return rep


def _assign_points(points, chart: int, lo: int, hi: int, M: int, M0: int) -> dict:
    """Oracle points in chart coordinates grouped by the patch keys of their direction."""
    inv = chart_map(chart).inverse()
    D = M * M0
    out: dict = {}
    for x in points:
        y = inv(x)
        if not (lo < y[2] <= hi and abs(y[0]) <= y[2] and abs(y[1]) <= y[2]):
            continue
        for i, j in cells_containing(D, Fraction(y[0], y[2]), Fraction(y[1], y[2])):
            out.setdefault((M, i, j), []).append(y)
    return out


# ---------------------------------------------------------------------------
# Benchmark
# ---------------------------------------------------------------------------


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    xs = np.log(np.asarray(xs, dtype=float))
    ys = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(xs, ys, 1)[0])


def benchmark(F: TernaryForm | str, N: int, grid: Sequence[int], config: SolverConfig | None = None,
              oracle: bool = True, shells: int | None = None, plot: str | None = None) -> dict:
    """Scaling table over a grid of B values with fitted log-log slopes."""
    if isinstance(F, str):
        F = parse_form(F)
    config = config or SolverConfig()
    rows = []
    for B in grid:
        rep = solve_all(F, N, B, config=config, shells=shells)
        row = {
            "B": B, "patches": rep.patch_count, "aux_forms": rep.aux_count,
            "fallbacks": rep.fallback_count, "time": rep.timings["total"],
            "solutions": len(rep.solutions), "degraded": rep.degraded,
        }
        if oracle and B <= config.oracle_ceiling and rep.complete:
            t0 = time.perf_counter()
            ref = set(oracle_points(F, N, B, EQUATION, config.oracle_ceiling))
            row["oracle_time"] = time.perf_counter() - t0
            row["equal_to_oracle"] = ref == rep.points
        rows.append(row)
    out = {"form": str(F), "N": N, "rows": rows}
    Bs = [r["B"] for r in rows]
    if len(rows) >= 2:
        out["slope_patches"] = loglog_slope(Bs, [r["patches"] for r in rows])
        out["slope_aux_forms"] = loglog_slope(Bs, [max(r["aux_forms"], 1) for r in rows])
        if all("oracle_time" in r for r in rows):
            out["slope_oracle_time"] = loglog_slope(Bs, [r["oracle_time"] for r in rows])
    out["degraded"] = any(r["degraded"] for r in rows)
    if plot:
        _plot(rows, plot)
    return out


def _plot(rows, path):
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:  # plotting is optional
        return
    Bs = [r["B"] for r in rows]
    plt.figure(figsize=(5, 4))
    plt.loglog(Bs, [r["patches"] for r in rows], "o-", label="patches")
    plt.loglog(Bs, [r["aux_forms"] for r in rows], "s-", label="aux forms")
    plt.xlabel("B")
    plt.legend()
    plt.tight_layout()
    plt.savefig(path)
