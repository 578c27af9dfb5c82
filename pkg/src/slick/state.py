"""Flat slot array plus per-block metadata, and the block geometry on top.

Metadata is kept as three parallel lists (offsets, gaps, thresholds) of
length ``m/B + 1``; the last entry is the sentinel ``(0, 0, 0)``. Cells
outside every block range hold stale data and are never read.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .config import SlickConfig


class MetaData(NamedTuple):
    o: int
    g: int
    t: int


@dataclass
class TableState:
    config: SlickConfig
    keys: list
    values: list
    off: list[int]
    gap: list[int]
    thr: list[int]

    @classmethod
    def fresh(cls, config: SlickConfig) -> "TableState":
        nb = config.num_blocks
        return cls(
            config=config,
            keys=[0] * config.m,
            values=[None] * config.m,
            off=[0] * (nb + 1),
            gap=[config.B] * nb + [0],
            thr=[0] * (nb + 1),
        )

    @property
    def num_blocks(self) -> int:
        return self.config.num_blocks

    def meta(self, i: int) -> MetaData:
        return MetaData(self.off[i], self.gap[i], self.thr[i])

    def block_start(self, i: int) -> int:
        assert 0 <= i < self.config.num_blocks, i
        return self.config.B * i + self.off[i]

    def block_end(self, i: int) -> int:
        """Last slot of block ``i``; ``block_start(i) - 1`` when empty."""
        assert 0 <= i < self.config.num_blocks, i
        B = self.config.B
        return B * i + B + self.off[i + 1] - self.gap[i] - 1

    def block_size(self, i: int) -> int:
        return self.config.B + self.off[i + 1] - self.off[i] - self.gap[i]

    def block_range(self, i: int) -> range:
        return range(self.block_start(i), self.block_end(i) + 1)

    def block_items(self, i: int) -> list[tuple]:
        r = self.block_range(i)
        return list(zip(self.keys[r.start:r.stop], self.values[r.start:r.stop]))

    def occupied(self) -> int:
        return sum(self.block_size(i) for i in range(self.num_blocks))

    def empty_cells(self) -> int:
        return self.config.m - self.occupied()


def validate_state(state: TableState) -> list[str]:
    """Check the structural invariants; return one message per violation."""
    cfg = state.config
    B, nb, m = cfg.B, cfg.num_blocks, cfg.m
    problems: list[str] = []

    for name, arr in (("off", state.off), ("gap", state.gap), ("thr", state.thr)):
        if len(arr) != nb + 1:
            problems.append(f"{name} has length {len(arr)}, expected {nb + 1}")
    if problems:
        return problems
    if len(state.keys) != m or len(state.values) != m:
        problems.append(f"slot arrays have length {len(state.keys)}/{len(state.values)}, expected {m}")
    if state.meta(nb) != (0, 0, 0):
        problems.append(f"sentinel is {tuple(state.meta(nb))}, expected (0, 0, 0)")

    total = 0
    for i in range(nb):
        o, g, t = state.off[i], state.gap[i], state.thr[i]
        if not 0 <= o <= cfg.ohat:
            problems.append(f"offset bound: block {i} has o={o} outside 0..{cfg.ohat}")
        if not 0 <= t <= cfg.that:
            problems.append(f"threshold bound: block {i} has t={t} outside 0..{cfg.that}")
        if not 0 <= g <= cfg.max_gap:
            problems.append(f"gap bound: block {i} has g={g} outside 0..{cfg.max_gap}")
        size = state.block_size(i)
        if not 0 <= size <= cfg.Bhat:
            problems.append(f"size bound: block {i} has size {size} outside 0..{cfg.Bhat}")
        if cfg.luckoo and o + size > 2 * B:
            problems.append(f"luckoo bound: block {i} has o+size={o + size} > {2 * B}")
        end = state.block_end(i)
        if end + g + 1 != B * (i + 1) + state.off[i + 1]:
            problems.append(f"geometry: block {i} end {end} + gap {g} + 1 != next start")
        total += max(size, 0)

    if nb and state.block_start(0) < 0:
        problems.append("geometry: first block starts before slot 0")
    if nb and state.block_end(nb - 1) > m - 1:
        problems.append(f"geometry: last block ends at {state.block_end(nb - 1)} > {m - 1}")
    empty = m - total
    free = sum(state.gap[:nb]) + (state.off[0] if nb else 0)
    if empty != free:
        problems.append(f"conservation: m - sum(sizes) = {empty} but gaps account for {free}")
    return problems
