"""Growth of solutions of x^k + h = y^(k-1) z over dyadic boxes A = B."""

import argparse
import json

import numpy as np

from trident.kfree import exception_count


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--h", type=int, default=1)
    ap.add_argument("--max-exp", type=int, default=10)
    args = ap.parse_args()
    sizes, counts = [], []
    for j in range(2, args.max_exp + 1):
        A = 2**j
        res = exception_count(A, A, args.k, args.h)
        sizes.append(A)
        counts.append(res.count)
        print(json.dumps({"A": A, "B": A, "count": res.count}))
    usable = [(a, c) for a, c in zip(sizes, counts) if c > 0]
    if len(usable) >= 2:
        x, y = np.log([u[0] for u in usable]), np.log([u[1] for u in usable])
        print(json.dumps({"loglog_slope": float(np.polyfit(x, y, 1)[0])}))


if __name__ == "__main__":
    main()
