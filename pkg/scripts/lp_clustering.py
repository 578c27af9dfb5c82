"""Unsuccessful-search cost of linear probing, Robin Hood and Slick as the
load approaches 1.

    python scripts/lp_clustering.py --n 200000 --eps 0.2 0.1 0.05 0.02
"""

import argparse

from slick import SlickConfig, SlickTable
from slick.baselines import LinearProbingTable, RobinHoodTable
from slick.testkit import iter_keys


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.02])
    ap.add_argument("--queries", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    keys = list(iter_keys(args.n, args.seed))
    misses = list(iter_keys(args.queries, args.seed + 1000))
    print("eps,lp_miss,lp_miss_times_eps2,knuth_miss,rh_miss,slick_miss,slick_max_probes,slick_bumped")
    for eps in args.eps:
        m = round(args.n / (1 - eps))
        row = [eps]
        for cls in (LinearProbingTable, RobinHoodTable):
            t = cls(m, hash_seed=args.seed)
            for k in keys:
                t.insert(k)
            for k in misses:
                t.find(k)
            row.append(t.counters.mean_miss_probes)
            if cls is LinearProbingTable:
                row += [row[-1] * eps * eps, (1 + 1 / eps ** 2) / 2]
        s = SlickTable(SlickConfig.for_load(args.n, 1 - eps))
        for k in keys:
            s.insert(k, None)
        for k in misses:
            s.find(k)
        c = s.counters
        row += [c.find_probes / c.finds, c.max_find_probes, len(s.backyard)]
        print(",".join(f"{x:.4f}" if isinstance(x, float) else str(x) for x in row))


if __name__ == "__main__":
    main()
