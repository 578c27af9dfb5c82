"""Benchmark driver: Slick vs linear probing / Robin Hood, CSV on stdout.

Every numeric flag accepts several values; the cartesian product of all
values is run, each point ``--reps`` times with seeds ``seed, seed+1, ...``.
Re-running a row with ``--reps 1 --seed <row seed>`` reproduces it.

Exit status: 0 ok, 1 usage error, 2 divergence found under ``--audit``.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import math
import sys
import time
from dataclasses import dataclass

from .baselines import LinearProbingTable, ProbeCounters, RobinHoodTable, TableFull
from .build import greedy_build
from .config import SlickConfig
from .hashing import mix64
from .table import SlickTable
from .testkit import (
    Op,
    WorkloadSpec,
    differential_run,
    generate_workload,
    iter_keys,
    universe_for_load,
    value_for,
)

STRUCTURES = ("slick", "slick-luckoo", "lp", "rh")
WORKLOADS = ("build", "insert", "mixed", "churn")

COLUMNS = [
    "structure", "workload", "n_target", "n", "m", "load", "B", "Bhat", "ohat",
    "that", "shat", "rep", "seed", "ops", "empty_cells", "bumped_count",
    "bumped_fraction", "mean_probes_find_success", "mean_probes_find_fail",
    "max_probes_find", "mean_slide_blocks", "bluster_count", "max_bluster_len",
    "insert_failures", "divergences",
    "build_ns_per_element", "insert_ns", "find_ns", "delete_ns",
]
TIMING_COLUMNS = [c for c in COLUMNS if c.endswith("_ns") or c.endswith("_ns_per_element")]

PROBE_SAMPLE = 10_000


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Point:
    structure: str
    workload: str
    n: int
    load: float
    B: int
    Bhat: int | None
    ohat: int | None
    that: int | None
    shat: float | None
    ops: int | None
    rep: int
    seed: int
    audit: bool = False


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _shat(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("shat must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="slick-bench", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--structure", nargs="+", choices=STRUCTURES, default=["slick"])
    p.add_argument("--workload", nargs="+", choices=WORKLOADS, default=["build"])
    p.add_argument("--n", nargs="+", type=int, default=[100_000],
                   help="elements (build/insert) or live-set size (mixed/churn)")
    p.add_argument("--load", nargs="+", type=float, default=[0.95],
                   help="n/m; m = round(n/load) rounded to a multiple of B")
    p.add_argument("--B", nargs="+", type=int, default=[8])
    p.add_argument("--Bhat", nargs="+", type=int, default=[None])
    p.add_argument("--ohat", nargs="+", type=int, default=[None])
    p.add_argument("--that", nargs="+", type=int, default=[None])
    p.add_argument("--shat", nargs="+", type=_shat, default=[None],
                   help="max blocks slid per attempt; 'inf' for unbounded")
    p.add_argument("--ops", type=int, default=None,
                   help="operations for mixed/churn workloads (default: n)")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--csv", default=None, help="write CSV here instead of stdout")
    p.add_argument("--audit", action="store_true",
                   help="check every operation against a reference map")
    p.add_argument("--keys", default=None, metavar="FILE",
                   help="build/insert these keys instead of random ones: one integer "
                        "per line (decimal or 0x-hex), optionally followed by ',value'; "
                        "--n is then the number of keys read")
    return p


def read_keys(path: str) -> list[tuple[int, str | None]]:
    """Parse a ``key[,value]`` text file; blank lines and ``#`` comments are skipped."""
    out = []
    seen = set()
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key_text, _, value = line.partition(",")
            try:
                key = int(key_text.strip(), 0)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: not an integer key: {key_text!r}") from None
            if not 0 <= key < 1 << 64:
                raise UsageError(f"{path}:{lineno}: key outside 0..2**64-1")
            if key not in seen:
                seen.add(key)
                out.append((key, value.strip() or None))
    return out


def expand(args, given_keys=None) -> list[Point]:
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    ns = args.n
    if given_keys is not None:
        if set(args.workload) - {"build", "insert"}:
            raise UsageError("--keys only applies to the build and insert workloads")
        ns = [len(given_keys)]
    points = []
    for s, w, n, load, B, Bhat, ohat, that, shat in itertools.product(
            args.structure, args.workload, ns, args.load, args.B,
            args.Bhat, args.ohat, args.that, args.shat):
        for rep in range(args.reps):
            points.append(Point(s, w, n, load, B, Bhat, ohat, that, shat,
                                args.ops, rep, args.seed + rep, args.audit))
    return points


def make_config(p: Point) -> SlickConfig:
    luckoo = p.structure == "slick-luckoo"
    Bhat, ohat = p.Bhat, p.ohat
    if luckoo:
        Bhat = 2 * p.B if Bhat is None else Bhat
        ohat = p.B if ohat is None else ohat
    try:
        return SlickConfig.for_load(
            p.n, p.load, B=p.B, Bhat=Bhat, ohat=ohat, that=p.that, shat=p.shat,
            luckoo=luckoo, hash_seed=mix64(p.seed), threshold_seed=mix64(p.seed + 1))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return f"{x:.6f}"
    return str(x)


def run_point(p: Point, given_keys=None) -> dict:
    if p.n < 1:
        raise UsageError("--n must be >= 1")
    cfg = make_config(p)
    is_slick = p.structure.startswith("slick")
    if is_slick:
        table = SlickTable(cfg)
    else:
        if p.load >= 1 or p.n >= cfg.m:
            raise UsageError(f"{p.structure} needs load < 1 (got n={p.n}, m={cfg.m})")
        cls = LinearProbingTable if p.structure == "lp" else RobinHoodTable
        table = cls(cfg.m, hash_seed=mix64(p.seed))

    timing = {"build_ns_per_element": 0.0, "insert_ns": 0.0, "find_ns": 0.0, "delete_ns": 0.0}
    ops = p.ops if p.ops is not None else p.n
    row_ops = 0
    failures = 0
    divergences = 0
    live: list[int]

    if p.workload in ("build", "insert"):
        if given_keys is None:
            pairs = [(k, value_for(k)) for k in iter_keys(p.n, p.seed)]
        else:
            pairs = [(k, value_for(k) if v is None else v) for k, v in given_keys]
        keys = [k for k, _ in pairs]
        row_ops = p.n
        t0 = time.perf_counter_ns()
        if p.workload == "build" and is_slick:
            table = greedy_build(pairs, cfg)
        else:
            for k, v in pairs:
                try:
                    table.insert(k, v)
                except TableFull:
                    failures += 1
        dt = (time.perf_counter_ns() - t0) / p.n
        timing["build_ns_per_element"] = dt
        if p.workload == "insert":
            timing["insert_ns"] = dt
        live = keys
    else:
        if p.workload == "mixed":
            spec = WorkloadSpec(op_count=ops, universe=universe_for_load(cfg.m, p.n / cfg.m),
                                prefill=p.n, seed=p.seed)
        else:
            spec = WorkloadSpec(op_count=ops, churn=True, live_target=p.n,
                                insert_weight=0.5, find_weight=0.0, delete_weight=0.5,
                                seed=p.seed)
        workload = generate_workload(spec)
        row_ops = len(workload)
        if p.audit:
            guarded = _Guarded(table)
            divergences = len(differential_run(guarded, workload))
            failures, per_op = guarded.failures, {}
        else:
            failures, per_op = _replay(table, workload)
        timing["insert_ns"] = per_op.get(Op.INSERT, 0.0)
        timing["delete_ns"] = per_op.get(Op.DELETE, 0.0)
        live = [k for k, _ in table.items()]

    # probe statistics on a fixed sample of hits and misses
    if is_slick:
        c = table.counters
        inserts = c.inserts
        mean_slide = c.slide_blocks / inserts if inserts else 0.0
        c.finds = c.find_probes = c.find_hits = c.find_hit_probes = c.max_find_probes = 0
    else:
        table.counters = ProbeCounters()
        mean_slide = 0.0

    hits = sorted(live)[:: max(1, len(live) // PROBE_SAMPLE)][:PROBE_SAMPLE]
    misses = list(iter_keys(PROBE_SAMPLE, p.seed ^ 0x5A5A5A))
    t0 = time.perf_counter_ns()
    for k in hits:
        table.find(k)
    for k in misses:
        table.find(k)
    nq = len(hits) + len(misses)
    timing["find_ns"] = (time.perf_counter_ns() - t0) / nq if nq else 0.0

    if is_slick:
        c = table.counters
        s = table.stats()
        hit_mean = c.find_hit_probes / c.find_hits if c.find_hits else 0.0
        misses_n = c.finds - c.find_hits
        miss_mean = (c.find_probes - c.find_hit_probes) / misses_n if misses_n else 0.0
        n_live, m = s.n, s.m
        empty, bumped = s.empty_cells, s.bumped_count
        max_probes = c.max_find_probes
        blusters, longest = s.bluster_count, s.max_bluster_len
    else:
        c = table.counters
        hit_mean, miss_mean = c.mean_hit_probes, c.mean_miss_probes
        n_live, m = table.n, table.m
        empty, bumped = m - n_live, 0
        max_probes = 0  # not tracked per query for the baselines
        blusters = longest = 0

    row = {
        "structure": p.structure, "workload": p.workload, "n_target": p.n,
        "n": n_live, "m": m, "load": n_live / m, "B": cfg.B, "Bhat": cfg.Bhat,
        "ohat": cfg.ohat, "that": cfg.that, "shat": cfg.shat, "rep": p.rep,
        "seed": p.seed, "ops": row_ops, "empty_cells": empty,
        "bumped_count": bumped,
        "bumped_fraction": bumped / n_live if n_live else 0.0,
        "mean_probes_find_success": hit_mean, "mean_probes_find_fail": miss_mean,
        "max_probes_find": max_probes, "mean_slide_blocks": mean_slide,
        "bluster_count": blusters, "max_bluster_len": longest,
        "insert_failures": failures, "divergences": divergences,
    }
    row.update(timing)
    return row


class _Guarded:
    """Table proxy that counts ``TableFull`` instead of raising it."""

    def __init__(self, table) -> None:
        self.table = table
        self.failures = 0
        self.find = table.find
        self.delete = table.delete

    def insert(self, key, value):
        try:
            return self.table.insert(key, value)
        except TableFull:
            self.failures += 1

    def __len__(self) -> int:
        return len(self.table)


def _replay(table, workload) -> tuple[int, dict]:
    totals = {Op.INSERT: 0, Op.FIND: 0, Op.DELETE: 0}
    counts = {Op.INSERT: 0, Op.FIND: 0, Op.DELETE: 0}
    failures = 0
    clock = time.perf_counter_ns
    ins, fnd, dele = table.insert, table.find, table.delete
    for op, key in workload:
        t0 = clock()
        if op is Op.INSERT:
            try:
                ins(key, value_for(key))
            except TableFull:
                failures += 1
        elif op is Op.DELETE:
            dele(key)
        else:
            fnd(key)
        totals[op] += clock() - t0
        counts[op] += 1
    return failures, {op: totals[op] / counts[op] for op in totals if counts[op]}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        given_keys = read_keys(args.keys) if args.keys else None
        points = expand(args, given_keys)
        rows = [run_point(p, given_keys) for p in points]
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"slick-bench: error: {exc}", file=sys.stderr)
        return 1

    out = open(args.csv, "w", newline="", encoding="utf-8") if args.csv else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in COLUMNS])
    finally:
        if args.csv:
            out.close()
    return 2 if any(r["divergences"] for r in rows) else 0


if __name__ == "__main__":
    sys.exit(main())
