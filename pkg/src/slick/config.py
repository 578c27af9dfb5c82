"""Tuning parameters for a Slick table."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

DEFAULT_B = 8
DEFAULT_HASH_SEED = 0x5EED_0000_0000_0001
DEFAULT_THRESHOLD_SEED = 0x5EED_0000_0000_0002


@dataclass(frozen=True)
class SlickConfig:
    """All parameters of a Slick table.

    ``m`` is rounded up to a multiple of ``B``. ``Bhat``, ``ohat`` and
    ``that`` default to ``2B``, ``B`` and ``B``; ``shat`` defaults to
    ``Bhat`` and may be ``math.inf`` for unbounded sliding.
    """

    m: int
    B: int = DEFAULT_B
    Bhat: int | None = None
    ohat: int | None = None
    that: int | None = None
    shat: int | float | None = None
    luckoo: bool = False
    hash_seed: int = DEFAULT_HASH_SEED
    threshold_seed: int = DEFAULT_THRESHOLD_SEED
    num_blocks: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        B = self.B
        if not isinstance(B, int) or B < 1:
            raise ValueError(f"B must be a positive integer, got {B!r}")
        if self.m < 1:
            raise ValueError(f"m must be positive, got {self.m}")
        m = -(-self.m // B) * B
        Bhat = 2 * B if self.Bhat is None else self.Bhat
        ohat = B if self.ohat is None else self.ohat
        that = B if self.that is None else self.that
        shat = Bhat if self.shat is None else self.shat

        if Bhat < B:
            raise ValueError(f"Bhat={Bhat} must be >= B={B}")
        if ohat < 0:
            raise ValueError(f"ohat must be >= 0, got {ohat}")
        if that < 1:
            raise ValueError(f"that must be >= 1, got {that}")
        if shat < 0 or (isinstance(shat, float) and not math.isinf(shat)):
            raise ValueError(f"shat must be a non-negative integer or inf, got {shat}")
        if self.luckoo and (ohat != B or Bhat != 2 * B):
            raise ValueError("luckoo mode requires ohat == B and Bhat == 2B")

        for name, value in (("m", m), ("Bhat", Bhat), ("ohat", ohat),
                            ("that", that), ("shat", shat)):
            object.__setattr__(self, name, value)
        object.__setattr__(self, "num_blocks", m // B)

    @classmethod
    def for_load(cls, n: int, load: float, **kwargs) -> "SlickConfig":
        """Size the table so that ``n / m`` is about ``load``."""
        if load <= 0:
            raise ValueError(f"load must be positive, got {load}")
        B = kwargs.get("B", DEFAULT_B)
        if not isinstance(B, int) or B < 1:
            raise ValueError(f"B must be a positive integer, got {B!r}")
        m = max(B, round(n / load / B) * B)
        return cls(m=m, **kwargs)

    @property
    def max_gap(self) -> int:
        return self.B + self.ohat
