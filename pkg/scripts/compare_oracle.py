"""Search pipeline against brute force on a grid of (form, N, B)."""

import argparse
import itertools
import json
import time
from collections import Counter

from trident.forms import parse_form
from trident.pipeline import oracle_points, solve_all


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--forms", default="x1^3+x2^3-x3^3;x1^3+x2^3+x3^3", help="semicolon separated")
    ap.add_argument("--N", default="1,2,3")
    ap.add_argument("--B", default="500,2000")
    args = ap.parse_args()
    forms = args.forms.split(";")
    Ns = [int(n) for n in args.N.split(",")]
    Bs = [int(b) for b in args.B.split(",")]
    bad = 0
    for text, N, B in itertools.product(forms, Ns, Bs):
        F = parse_form(text)
        t0 = time.perf_counter()
        rep = solve_all(F, N, B)
        t1 = time.perf_counter()
        ref = set(oracle_points(F, N, B))
        t2 = time.perf_counter()
        same = ref == rep.points
        bad += not same
        print(json.dumps({
            "form": text, "N": N, "B": B, "solutions": len(rep.points), "oracle": len(ref),
            "equal": same, "classes": dict(Counter(s.clazz for s in rep.solutions)), "fallbacks": rep.fallback_count,
            "degraded": rep.degraded, "search_s": round(t1 - t0, 2), "oracle_s": round(t2 - t1, 2),
        }))
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
