"""Linear probing and Robin Hood hashing with the same key hashing as Slick.

Both use a circular table, an explicit empty marker per slot and
backward-shift deletion (no tombstones).
"""

from __future__ import annotations

from dataclasses import dataclass

from .backyard import Element
from .config import DEFAULT_HASH_SEED as DEFAULT_SEED
from .hashing import Hasher


class TableFull(Exception):
    pass


_EMPTY = object()


@dataclass
class ProbeCounters:
    inserts: int = 0
    insert_probes: int = 0
    hits: int = 0
    hit_probes: int = 0
    misses: int = 0
    miss_probes: int = 0
    last_probes: int = 0

    @property
    def mean_hit_probes(self) -> float:
        return self.hit_probes / self.hits if self.hits else 0.0

    @property
    def mean_miss_probes(self) -> float:
        return self.miss_probes / self.misses if self.misses else 0.0


class LinearProbingTable:
    kind = "lp"

    def __init__(self, m: int, hash_seed: int = DEFAULT_SEED) -> None:
        if m < 1:
            raise ValueError(f"m must be positive, got {m}")
        self.m = m
        self.hasher = Hasher(m, 1, hash_seed, 0)
        self.keys: list = [_EMPTY] * m
        self.values: list = [None] * m
        self.homes: list[int] = [0] * m
        self.n = 0
        self.counters = ProbeCounters()

    def __len__(self) -> int:
        return self.n

    def _home(self, key) -> int:
        return self.hasher.block_of(key)

    def _record(self, hit: bool, probes: int) -> None:
        c = self.counters
        c.last_probes = probes
        if hit:
            c.hits += 1
            c.hit_probes += probes
        else:
            c.misses += 1
            c.miss_probes += probes

    def _locate(self, key) -> tuple[int, int]:
        """Return ``(slot or -1, probes)``."""
        keys, m = self.keys, self.m
        j = self._home(key)
        probes = 1
        while True:
            k = keys[j]
            if k is _EMPTY:
                return -1, probes
            if k == key:
                return j, probes
            if probes == m:
                return -1, probes
            j += 1
            if j == m:
                j = 0
            probes += 1

    def find(self, key) -> Element | None:
        j, probes = self._locate(key)
        self._record(j >= 0, probes)
        return Element(key, self.values[j]) if j >= 0 else None

    def insert(self, key, value=None) -> bool:
        """Add ``key``; returns False if it was already present."""
        keys, m = self.keys, self.m
        home = self._home(key)
        j = home
        probes = 1
        while True:
            k = keys[j]
            if k is _EMPTY:
                break
            if k == key:
                return False
            if probes == m:
                raise TableFull(f"all {m} slots occupied")
            j += 1
            if j == m:
                j = 0
            probes += 1
        keys[j] = key
        self.values[j] = value
        self.homes[j] = home
        self.n += 1
        self.counters.inserts += 1
        self.counters.insert_probes += probes
        return True

    def delete(self, key) -> bool:
        j, _ = self._locate(key)
        if j < 0:
            return False
        self._backward_shift(j)
        self.n -= 1
        return True

    def _backward_shift(self, hole: int) -> None:
        keys, values, homes, m = self.keys, self.values, self.homes, self.m
        k = hole
        while True:
            k = (k + 1) % m
            if keys[k] is _EMPTY or k == hole:
                break
            # the element at k may fill the hole unless its home lies in (hole, k]
            if (k - homes[k]) % m < (k - hole) % m:
                continue
            keys[hole], values[hole], homes[hole] = keys[k], values[k], homes[k]
            hole = k
        keys[hole] = _EMPTY
        values[hole] = None

    def displacement(self, j: int) -> int:
        return (j - self.homes[j]) % self.m

    def items(self):
        for k, v in zip(self.keys, self.values):
            if k is not _EMPTY:
                yield k, v


class RobinHoodTable(LinearProbingTable):
    """Linear probing that keeps each run ordered by home slot.

    An insert takes the slot of any element closer to its home than the
    one being carried; a miss stops as soon as the probe distance exceeds
    the displacement of the slot's occupant.
    """

    kind = "rh"

    def _locate(self, key) -> tuple[int, int]:
        keys, homes, m = self.keys, self.homes, self.m
        j = self._home(key)
        dist = 0
        while True:
            k = keys[j]
            if k is _EMPTY:
                return -1, dist + 1
            if k == key:
                return j, dist + 1
            if (j - homes[j]) % m < dist or dist + 1 == m:
                return -1, dist + 1
            j += 1
            if j == m:
                j = 0
            dist += 1

    def insert(self, key, value=None) -> bool:
        j, probes = self._locate(key)
        if j >= 0:
            return False
        if self.n == self.m:
            raise TableFull(f"all {self.m} slots occupied")
        keys, values, homes, m = self.keys, self.values, self.homes, self.m
        home = self._home(key)
        j = home
        dist = 0
        probes = 1
        while keys[j] is not _EMPTY:
            d = (j - homes[j]) % m
            if d < dist:
                keys[j], key = key, keys[j]
                values[j], value = value, values[j]
                homes[j], home = home, homes[j]
                dist = d
            j += 1
            if j == m:
                j = 0
            dist += 1
            probes += 1
        keys[j], values[j], homes[j] = key, value, home
        self.n += 1
        self.counters.inserts += 1
        self.counters.insert_probes += probes
        return True

    def _backward_shift(self, hole: int) -> None:
        keys, values, homes, m = self.keys, self.values, self.homes, self.m
        k = (hole + 1) % m
        while k != hole and keys[k] is not _EMPTY and homes[k] != k:
            keys[hole], values[hole], homes[hole] = keys[k], values[k], homes[k]
            hole = k
            k = (k + 1) % m
        keys[hole] = _EMPTY
        values[hole] = None

    def ordering_violations(self) -> list[int]:
        """Slots breaking the Robin Hood order (displacement may grow by at most
        one from one occupied slot to the next, and only after an occupied slot)."""
        bad = []
        keys, m = self.keys, self.m
        for j in range(m):
            if keys[j] is _EMPTY:
                continue
            d = self.displacement(j)
            prev = (j - 1) % m
            if d > 0 and (keys[prev] is _EMPTY or d > self.displacement(prev) + 1):
                bad.append(j)
        return bad
