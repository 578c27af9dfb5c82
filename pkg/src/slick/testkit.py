"""Ground truth for testing: workload generation, a reference model, a
differential runner and an exhaustive minimum-bump oracle."""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .config import SlickConfig
from .hashing import MASK64, mix64

VALUE_TAG = 0xA5A5_5A5A_0F0F_F0F0


def value_for(key: int) -> int:
    """Payload that certifies its own key, so slot mix-ups are caught."""
    return (key ^ VALUE_TAG) & MASK64


class Op(enum.Enum):
    INSERT = "insert"
    FIND = "find"
    DELETE = "delete"


class KeyDistribution(enum.Enum):
    UNIFORM = "uniform"
    ZIPF = "zipf"
    SEQUENTIAL = "sequential"


@dataclass(frozen=True)
class WorkloadSpec:
    """Parameters of a generated operation sequence.

    Keys are drawn as ranks in ``0..universe-1`` (Zipf ranks start at the
    most frequent key) and scrambled into 64-bit keys, except for the
    sequential distribution which uses the ranks themselves. ``prefill``
    distinct random keys are inserted before the ``op_count`` mixed
    operations (not counted in ``op_count``). In churn mode
    the table is first filled with ``live_target`` fresh keys, then each
    step inserts a fresh key and deletes the oldest live one.
    """

    op_count: int
    insert_weight: float = 0.4
    find_weight: float = 0.4
    delete_weight: float = 0.2
    distribution: KeyDistribution = KeyDistribution.UNIFORM
    zipf_s: float = 1.1
    universe: int = 1 << 16
    seed: int = 0
    churn: bool = False
    live_target: int = 0
    prefill: int = 0

    def __post_init__(self) -> None:
        w = (self.insert_weight, self.find_weight, self.delete_weight)
        if min(w) < 0 or sum(w) == 0:
            raise ValueError(f"op weights must be non-negative and not all zero: {w}")
        if self.universe < 1:
            raise ValueError("universe must be positive")
        if self.op_count < 0:
            raise ValueError("op_count must be non-negative")
        if not 0 <= self.prefill <= self.universe:
            raise ValueError("prefill must be in 0..universe")


def universe_for_load(m: int, load: float, insert_weight: float = 0.4,
                      delete_weight: float = 0.2) -> int:
    """Universe size whose steady state under uniform keys holds ``load*m`` keys.

    A key is present with probability ``ins / (ins + del)`` at equilibrium.
    """
    return max(1, round(load * m * (insert_weight + delete_weight) / insert_weight))


def zipf_probabilities(universe: int, s: float) -> np.ndarray:
    w = np.arange(1, universe + 1, dtype=float) ** -s
    return w / w.sum()


def _scramble(rank: int, salt: int) -> int:
    return mix64(rank ^ salt)


def generate_workload(spec: WorkloadSpec) -> list[tuple[Op, int]]:
    """Deterministic operation list for ``spec``."""
    rng = np.random.default_rng(spec.seed)
    salt = mix64(spec.seed ^ 0xC0FFEE)
    if spec.churn:
        return _churn(spec, rng, salt)
    n = spec.op_count
    prefix: list[tuple[Op, int]] = []
    if spec.prefill:
        ranks = rng.choice(spec.universe, size=spec.prefill, replace=False).tolist()
        keys = ranks if spec.distribution is KeyDistribution.SEQUENTIAL else (
            [_scramble(r, salt) for r in ranks])
        prefix = [(Op.INSERT, k) for k in keys]
    if n == 0:
        return prefix
    w = np.array([spec.insert_weight, spec.find_weight, spec.delete_weight], dtype=float)
    kinds = rng.choice(3, size=n, p=w / w.sum())
    if spec.distribution is KeyDistribution.UNIFORM:
        ranks = rng.integers(0, spec.universe, size=n)
    elif spec.distribution is KeyDistribution.ZIPF:
        cdf = np.cumsum(zipf_probabilities(spec.universe, spec.zipf_s))
        ranks = np.minimum(np.searchsorted(cdf, rng.random(n), side="right"), spec.universe - 1)
    else:
        ranks = np.arange(n) % spec.universe
    ops = (Op.INSERT, Op.FIND, Op.DELETE)
    if spec.distribution is KeyDistribution.SEQUENTIAL:
        return prefix + [(ops[k], int(r)) for k, r in zip(kinds.tolist(), ranks.tolist())]
    return prefix + [(ops[k], _scramble(r, salt)) for k, r in zip(kinds.tolist(), ranks.tolist())]


def _churn(spec: WorkloadSpec, rng, salt: int) -> list[tuple[Op, int]]:
    fresh = itertools.count()
    live: deque[int] = deque()
    out: list[tuple[Op, int]] = []
    for _ in range(spec.live_target):
        k = _scramble(next(fresh), salt)
        live.append(k)
        out.append((Op.INSERT, k))
    find_p = spec.find_weight / (spec.insert_weight + spec.find_weight + spec.delete_weight)
    done = 0
    while done < spec.op_count:
        if find_p and live and rng.random() < find_p:
            out.append((Op.FIND, live[int(rng.integers(len(live)))]))
            done += 1
            continue
        k = _scramble(next(fresh), salt)
        live.append(k)
        out.append((Op.INSERT, k))
        done += 1
        if done < spec.op_count and len(live) > spec.live_target:
            out.append((Op.DELETE, live.popleft()))
            done += 1
    return out


class ReferenceModel(dict):
    """Exact set semantics mirroring what a table should contain.

    Insert never overwrites, matching the tables under test.
    """

    def insert(self, key, value) -> bool:
        if key in self:
            return False
        self[key] = value
        return True

    def delete(self, key) -> bool:
        return self.pop(key, _MISSING) is not _MISSING


_MISSING = object()


@dataclass
class Divergence:
    step: int
    op: str
    key: int
    expected: object
    actual: object


@dataclass
class DivergenceReport:
    divergences: list[Divergence] = field(default_factory=list)
    ops: int = 0
    audits: int = 0
    limit: int = 20
    truncated: bool = False

    def add(self, *args) -> None:
        if len(self.divergences) < self.limit:
            self.divergences.append(Divergence(*args))
        else:
            self.truncated = True

    def __bool__(self) -> bool:
        return bool(self.divergences)

    def __len__(self) -> int:
        return len(self.divergences)


def differential_run(table, workload: Sequence[tuple[Op, int]], *,
                     model: ReferenceModel | None = None,
                     audit_every: int = 1 << 16,
                     on_step=None) -> DivergenceReport:
    """Drive ``table`` and a reference model with the same operations.

    Every find is compared; every ``audit_every`` operations (and once at
    the end) all model keys are looked up and the element count compared.
    ``on_step(step, table)`` runs after each operation when given.
    """
    model = ReferenceModel() if model is None else model
    report = DivergenceReport()
    for step, (op, key) in enumerate(workload, 1):
        if op is Op.INSERT:
            value = value_for(key)
            table.insert(key, value)
            model.insert(key, value)
        elif op is Op.DELETE:
            table.delete(key)
            model.delete(key)
        else:
            got = table.find(key)
            want = model.get(key, _MISSING)
            got_v = _MISSING if got is None else got[1]
            if got_v != want:
                report.add(step, op.value, key, _show(want), _show(got_v))
        if on_step is not None:
            on_step(step, table)
        if audit_every and step % audit_every == 0:
            _audit(table, model, step, report)
    report.ops = len(workload)
    _audit(table, model, len(workload), report)
    return report


def _audit(table, model: ReferenceModel, step: int, report: DivergenceReport) -> None:
    report.audits += 1
    for key, want in model.items():
        got = table.find(key)
        if got is None or got[1] != want:
            report.add(step, "audit", key, want, None if got is None else got[1])
    if len(table) != len(model):
        report.add(step, "count", -1, len(model), len(table))


def _show(v):
    return None if v is _MISSING else v


# -- exhaustive minimum bumps -------------------------------------------------

class LimitExceeded(Exception):
    pass


@dataclass(frozen=True)
class ExhaustiveLimits:
    max_blocks: int = 4
    max_elements: int = 12
    max_that: int = 3


def exhaustive_min_bumps(keys: Sequence, config: SlickConfig, hasher,
                         limits: ExhaustiveLimits = ExhaustiveLimits()) -> int:
    """Minimum bumps over every threshold vector and every offset assignment.

    A placement is valid when offsets lie in ``0..ohat``, block sizes in
    ``0..Bhat``, consecutive blocks do not overlap, the last block ends
    inside the table and, in luckoo mode, ``o + size <= 2B``.
    """
    nb, B = config.num_blocks, config.B
    if nb > limits.max_blocks or len(keys) > limits.max_elements or config.that > limits.max_that:
        raise LimitExceeded(f"nb={nb}, n={len(keys)}, that={config.that} exceed {limits}")
    per_block: list[list[int]] = [[] for _ in range(nb)]
    for k in keys:
        per_block[hasher.block_of(k)].append(hasher.threshold_of(k))

    candidates = []
    for tv in itertools.product(range(config.that + 1), repeat=nb):
        sizes = [sum(d >= t for d in per_block[i]) for i, t in enumerate(tv)]
        candidates.append((len(keys) - sum(sizes), sizes))
    candidates.sort(key=lambda c: c[0])
    for bumps, sizes in candidates:
        if _placeable(sizes, config):
            return bumps
    raise AssertionError("bumping everything must be placeable")


def _placeable(sizes: list[int], cfg: SlickConfig) -> bool:
    if max(sizes, default=0) > cfg.Bhat:
        return False
    B, nb = cfg.B, cfg.num_blocks
    for offs in itertools.product(range(cfg.ohat + 1), repeat=nb):
        ok = True
        for i in range(nb):
            start = B * i + offs[i]
            end = start + sizes[i]
            limit = B * (i + 1) + offs[i + 1] if i + 1 < nb else cfg.m
            if end > limit or (cfg.luckoo and offs[i] + sizes[i] > 2 * B):
                ok = False
                break
        if ok:
            return True
    return False


def iter_keys(n: int, seed: int = 0) -> Iterator[int]:
    """``n`` distinct pseudo-random 64-bit keys."""
    salt = mix64(seed ^ 0xBADC0DE)
    return (mix64(i ^ salt) for i in range(n))
