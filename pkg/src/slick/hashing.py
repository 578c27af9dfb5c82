"""Seeded hash functions mapping keys to blocks and threshold values.

Both functions are a 64-bit splitmix finalizer applied to ``key ^ seed'``
(with distinct derived seeds), followed by a multiply-shift reduction of
the top 32 bits into the target range.
"""

from __future__ import annotations

from typing import Hashable, Mapping

import numpy as np

MASK64 = (1 << 64) - 1
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

# role constants keep block and threshold seeds apart even if the user
# passes the same value for both
_BLOCK_ROLE = 0x9E3779B97F4A7C15
_THRESHOLD_ROLE = 0xD1B54A32D192ED03


def mix64(x: int) -> int:
    """Bijective 64-bit mixer (splitmix64 finalizer)."""
    x &= MASK64
    x ^= x >> 30
    x = (x * _M1) & MASK64
    x ^= x >> 27
    x = (x * _M2) & MASK64
    return x ^ (x >> 31)


def mix64_array(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint64).copy()
    with np.errstate(over="ignore"):
        x ^= x >> np.uint64(30)
        x *= np.uint64(_M1)
        x ^= x >> np.uint64(27)
        x *= np.uint64(_M2)
        x ^= x >> np.uint64(31)
    return x


def derive_seed(seed: int, role: int) -> int:
    return mix64(seed ^ role)


def reduce_range(h: int, r: int) -> int:
    """Map a 64-bit hash to ``0..r-1`` by fixed-point scaling."""
    return ((h >> 32) * r) >> 32


class Hasher:
    """Block hash ``block_of`` and threshold hash ``threshold_of``.

    Keys are 64-bit integers; larger or negative ints are reduced mod 2**64.
    """

    def __init__(self, num_blocks: int, that: int,
                 hash_seed: int = 0, threshold_seed: int = 1) -> None:
        if num_blocks < 1 or num_blocks >= 1 << 32:
            raise ValueError(f"num_blocks out of range: {num_blocks}")
        if that < 1 or that >= 1 << 32:
            raise ValueError(f"that out of range: {that}")
        self.num_blocks = num_blocks
        self.that = that
        self.hash_seed = hash_seed
        self.threshold_seed = threshold_seed
        self._bs = derive_seed(hash_seed, _BLOCK_ROLE)
        self._ts = derive_seed(threshold_seed, _THRESHOLD_ROLE)

    @classmethod
    def from_config(cls, config) -> "Hasher":
        return cls(config.num_blocks, config.that,
                   config.hash_seed, config.threshold_seed)

    def block_of(self, key: int) -> int:
        return ((mix64(key ^ self._bs) >> 32) * self.num_blocks) >> 32

    def threshold_of(self, key: int) -> int:
        return ((mix64(key ^ self._ts) >> 32) * self.that) >> 32

    def locate(self, key: int) -> tuple[int, int]:
        """``(block_of(key), threshold_of(key))`` in one call."""
        # inlined mix64: this is the hot path of every table operation
        x = (key ^ self._bs) & MASK64
        x ^= x >> 30
        x = (x * _M1) & MASK64
        x ^= x >> 27
        x = (x * _M2) & MASK64
        x ^= x >> 31
        y = (key ^ self._ts) & MASK64
        y ^= y >> 30
        y = (y * _M1) & MASK64
        y ^= y >> 27
        y = (y * _M2) & MASK64
        y ^= y >> 31
        return ((x >> 32) * self.num_blocks) >> 32, ((y >> 32) * self.that) >> 32

    def block_of_array(self, keys) -> np.ndarray:
        return _reduce_array(mix64_array(_as_u64(keys) ^ np.uint64(self._bs)),
                             self.num_blocks)

    def threshold_of_array(self, keys) -> np.ndarray:
        return _reduce_array(mix64_array(_as_u64(keys) ^ np.uint64(self._ts)),
                             self.that)


class ExplicitHasher:
    """Hasher backed by a fixed table ``key -> (block, threshold)``.

    Used to reproduce hand-constructed layouts in tests and examples.
    """

    def __init__(self, table: Mapping[Hashable, tuple[int, int]],
                 num_blocks: int, that: int) -> None:
        self.table = dict(table)
        self.num_blocks = num_blocks
        self.that = that
        for key, (b, d) in self.table.items():
            if not (0 <= b < num_blocks and 0 <= d < that):
                raise ValueError(f"entry for {key!r} out of range: {(b, d)}")

    def block_of(self, key) -> int:
        return self.table[key][0]

    def threshold_of(self, key) -> int:
        return self.table[key][1]

    def locate(self, key) -> tuple[int, int]:
        return self.table[key]

    def block_of_array(self, keys) -> np.ndarray:
        return np.array([self.table[k][0] for k in keys], dtype=np.int64)

    def threshold_of_array(self, keys) -> np.ndarray:
        return np.array([self.table[k][1] for k in keys], dtype=np.int64)


def _as_u64(keys) -> np.ndarray:
    if isinstance(keys, np.ndarray) and keys.dtype != object:
        if keys.dtype == np.uint64:
            return keys
        return keys.astype(np.int64).view(np.uint64)
    keys = list(keys)
    # build from masked Python ints; np.asarray would go through float64 for
    # lists mixing values above and below 2**63
    return np.fromiter((k & MASK64 for k in keys), dtype=np.uint64, count=len(keys))


def _reduce_array(h: np.ndarray, r: int) -> np.ndarray:
    return ((h >> np.uint64(32)) * np.uint64(r) >> np.uint64(32)).astype(np.int64)
