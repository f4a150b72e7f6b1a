"""Census of primes p with p^k + h free of (k-1)-th powers, against c * Li(X)."""

import argparse
import json

from trident.kfree import census, density, mobius_crosscheck


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--h", type=int, default=1)
    ap.add_argument("--X", type=int, default=10**6)
    ap.add_argument("--P", type=int, default=10_000)
    ap.add_argument("--crosscheck", type=int, default=10**5, help="X for the Moebius cross-check (0 to skip)")
    args = ap.parse_args()
    d = density(args.k, args.h, args.P)
    print(json.dumps(d.to_json()))
    checkpoints = [10**j for j in range(3, 8) if 10**j <= args.X] or [args.X]
    for row in census(args.k, args.h, args.X, checkpoints=checkpoints, P=args.P):
        print(json.dumps(row.to_json()))
    if args.crosscheck:
        print(json.dumps(mobius_crosscheck(args.k, args.h, args.crosscheck)))


if __name__ == "__main__":
    main()
