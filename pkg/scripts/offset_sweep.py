"""Empty cells and bumped elements of greedy and optimal builds over a grid
of maximum offsets and loads.

    python scripts/offset_sweep.py --n 50000 --B 8 --ohat 1 2 4 8 --load 0.95 1.0 1.02 1.05
"""

import argparse
import itertools

from slick import SlickConfig
from slick.build import greedy_build, optimal_build
from slick.testkit import iter_keys


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=50_000)
    ap.add_argument("--B", type=int, default=8)
    ap.add_argument("--ohat", type=int, nargs="+", default=[1, 2, 4, 8])
    ap.add_argument("--load", type=float, nargs="+", default=[0.95, 1.0, 1.02, 1.05])
    ap.add_argument("--seeds", type=int, default=3)
    args = ap.parse_args()

    print("ohat,load,builder,mean_empty_fraction,mean_bumped_fraction")
    for ohat, load in itertools.product(args.ohat, args.load):
        acc = {"greedy": [0.0, 0.0], "optimal": [0.0, 0.0]}
        for seed in range(args.seeds):
            cfg = SlickConfig.for_load(args.n, load, B=args.B, ohat=ohat,
                                       hash_seed=seed, threshold_seed=seed + 1)
            elems = [(k, None) for k in iter_keys(args.n, seed)]
            for name, build in (("greedy", greedy_build), ("optimal", optimal_build)):
                s = build(elems, cfg).stats()
                acc[name][0] += s.empty_cells / s.m
                acc[name][1] += s.bumped_count / s.n
        for name, (empty, bumped) in acc.items():
            print(f"{ohat},{load},{name},{empty / args.seeds:.5f},{bumped / args.seeds:.5f}")


if __name__ == "__main__":
    main()
