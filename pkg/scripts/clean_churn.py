"""Backyard growth under churn at a fixed live-set size, and what periodic
cleaning recovers compared with rebuilding from scratch.

    python scripts/clean_churn.py --m 32768 --live 0.9 --rounds 10
"""

import argparse

from slick import SlickConfig, SlickTable
from slick.build import greedy_build
from slick.testkit import Op, WorkloadSpec, generate_workload


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--m", type=int, default=1 << 15)
    ap.add_argument("--live", type=float, default=0.9, help="live-set size as a fraction of m")
    ap.add_argument("--rounds", type=int, default=10)
    ap.add_argument("--ops-per-round", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = SlickConfig(m=args.m, hash_seed=args.seed, threshold_seed=args.seed + 1)
    table = SlickTable(cfg)
    target = int(args.live * args.m)
    spec = WorkloadSpec(args.rounds * args.ops_per_round, churn=True, live_target=target,
                        insert_weight=0.5, find_weight=0, delete_weight=0.5, seed=args.seed)
    workload = generate_workload(spec)
    live = {}
    print("round,backyard_before,backyard_after_clean,fresh_greedy_backyard,empty_cells")
    step = 0
    for r in range(args.rounds + 1):
        stop = target + r * args.ops_per_round
        while step < min(stop, len(workload)):
            op, k = workload[step]
            if op is Op.INSERT:
                table.insert(k, None)
                live[k] = None
            else:
                table.delete(k)
                del live[k]
            step += 1
        before = len(table.backyard)
        after = table.backyard_clean().still_bumped
        fresh = len(greedy_build(list(live.items()), cfg).backyard)
        print(f"{r},{before},{after},{fresh},{table.stats().empty_cells}")


if __name__ == "__main__":
    main()
