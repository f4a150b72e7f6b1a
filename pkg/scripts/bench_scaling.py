"""Auxiliary-form count and run time across a dyadic grid of box sizes.

    python3 scripts/bench_scaling.py --grid 1024,2048,4096 --shells 1
"""

import argparse
import json

from trident.pipeline import benchmark


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--form", default="x1^3+x2^3-x3^3")
    ap.add_argument("--N", type=int, default=1)
    ap.add_argument("--grid", default=",".join(str(2**j) for j in range(10, 17)))
    ap.add_argument("--shells", type=int, default=1, help="dyadic shells per run (default: top shell only)")
    ap.add_argument("--oracle", action="store_true", help="also time the brute-force oracle")
    ap.add_argument("--plot", help="write a log-log plot to this path")
    args = ap.parse_args()
    grid = [int(b) for b in args.grid.split(",")]
    out = benchmark(args.form, args.N, grid, oracle=args.oracle, shells=args.shells, plot=args.plot)
    for row in out["rows"]:
        print(json.dumps(row))
    print(json.dumps({k: v for k, v in out.items() if k != "rows"}))


if __name__ == "__main__":
    main()
