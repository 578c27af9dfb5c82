"""Offline construction of a Slick table from a known element set."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .backyard import Element
from .config import SlickConfig
from .hashing import Hasher
from .table import SlickTable


class _Sorted:
    """Elements sorted by (block, threshold) with per-block bounds."""

    def __init__(self, elements: Sequence, hasher, num_blocks: int) -> None:
        keys = [e[0] for e in elements]
        values = [e[1] for e in elements]
        if keys:
            blocks = np.asarray(hasher.block_of_array(keys))
            ds = np.asarray(hasher.threshold_of_array(keys))
            order = np.lexsort((ds, blocks))
            self.keys = [keys[j] for j in order]
            self.values = [values[j] for j in order]
            self.ds = ds[order].tolist()
            self.bounds = np.searchsorted(blocks[order], np.arange(num_blocks + 1)).tolist()
        else:
            self.keys, self.values, self.ds = [], [], []
            self.bounds = [0] * (num_blocks + 1)
        self.bounds[num_blocks] = len(self.keys)


def sort_by_block_threshold(elements: Iterable, hasher) -> list[Element]:
    """Stable sort of ``(key, value)`` pairs by ``(block_of, threshold_of)``."""
    elements = list(elements)
    s = _Sorted(elements, hasher, hasher.num_blocks)
    return [Element(k, v) for k, v in zip(s.keys, s.values)]


def _max_survivors(cfg: SlickConfig, i: int, o: int) -> int:
    """Largest block size allowed at block ``i`` with incoming offset ``o``."""
    cap = min(cfg.Bhat, cfg.m - cfg.B * i - o, cfg.B + cfg.ohat - o)
    if cfg.luckoo:
        cap = min(cap, 2 * cfg.B - o)
    return cap


def _assemble(cfg: SlickConfig, hasher, srt: _Sorted,
              plan: list[tuple[int, int, int]], backyard=None) -> SlickTable:
    """Write blocks given per-block ``(offset, threshold, first survivor)``."""
    table = SlickTable(cfg, hasher=hasher, backyard=backyard)
    st = table.state
    B = cfg.B
    bumped: list = []
    for i, (o, t, front) in enumerate(plan):
        lo, hi = srt.bounds[i], srt.bounds[i + 1]
        s = hi - front
        st.off[i] = o
        st.gap[i] = max(0, B - o - s)
        st.thr[i] = t
        base = B * i + o
        st.keys[base:base + s] = srt.keys[front:hi]
        st.values[base:base + s] = srt.values[front:hi]
        bumped.extend(zip(srt.keys[lo:front], srt.values[lo:front]))
    nb = cfg.num_blocks
    st.off[nb] = st.gap[nb] = st.thr[nb] = 0
    for key, value in bumped:
        table.backyard.insert(key, value)
    table.n = len(srt.keys)
    return table


def greedy_build(elements: Sequence, config: SlickConfig, hasher=None,
                 backyard=None) -> SlickTable:
    """Single left-to-right pass bumping the fewest elements per block.

    Each block keeps as many of its highest-threshold elements as the size,
    table-end and next-offset limits allow; elements tied with the last
    bumped one are bumped too. ``table.counters.build_work`` counts element
    and block steps after sorting.
    """
    cfg = config
    hasher = hasher if hasher is not None else Hasher.from_config(cfg)
    srt = _Sorted(elements, hasher, cfg.num_blocks)
    B = cfg.B
    ds, bounds = srt.ds, srt.bounds
    plan = []
    work = 0
    o = 0
    for i in range(cfg.num_blocks):
        lo, hi = bounds[i], bounds[i + 1]
        t = 0
        front = lo
        excess = (hi - lo) - _max_survivors(cfg, i, o)
        if excess > 0:
            front += excess
            t = ds[front - 1] + 1
        while front < hi and ds[front] < t:
            front += 1
        s = hi - front
        plan.append((o, t, front))
        work += 1 + (hi - lo)
        o = max(0, o + s - B)
    table = _assemble(cfg, hasher, srt, plan, backyard)
    table.counters.build_work = work
    return table


def optimal_build(elements: Sequence, config: SlickConfig, hasher=None,
                  backyard=None) -> SlickTable:
    """Placement with the minimum number of bumped elements.

    Dynamic program over blocks with the incoming offset (``0..ohat``) as
    state. A block may only bump a prefix of its threshold-sorted elements
    that ends at a change of threshold value, since a threshold cannot
    separate equal values.
    """
    cfg = config
    hasher = hasher if hasher is not None else Hasher.from_config(cfg)
    srt = _Sorted(elements, hasher, cfg.num_blocks)
    B, ohat, nb = cfg.B, cfg.ohat, cfg.num_blocks
    ds, bounds = srt.ds, srt.bounds
    inf = float("inf")

    cost = [0] + [inf] * ohat
    parents: list[list] = []
    for i in range(nb):
        lo, hi = bounds[i], bounds[i + 1]
        size = hi - lo
        cuts = [0] + [k - lo for k in range(lo + 1, hi) if ds[k] != ds[k - 1]]
        if size:
            cuts.append(size)
        new = [inf] * (ohat + 1)
        parent: list = [None] * (ohat + 1)
        for o in range(ohat + 1):
            base = cost[o]
            if base == inf:
                continue
            cap = _max_survivors(cfg, i, o)
            for c in cuts:
                s = size - c
                if s > cap:
                    continue
                o2 = max(0, o + s - B)
                if base + c < new[o2]:
                    new[o2] = base + c
                    parent[o2] = (o, c)
        cost = new
        parents.append(parent)

    best = min(range(ohat + 1), key=lambda o: cost[o])
    if cost[best] == inf:
        raise RuntimeError("no feasible placement")
    plan = [None] * nb
    o2 = best
    for i in range(nb - 1, -1, -1):
        o, c = parents[i][o2]
        lo = bounds[i]
        t = ds[lo + c - 1] + 1 if c else 0
        plan[i] = (o, t, lo + c)
        o2 = o
    return _assemble(cfg, hasher, srt, plan, backyard)


def bumped_count(table: SlickTable) -> int:
    return len(table.backyard)
