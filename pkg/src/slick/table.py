"""Dynamic Slick hash table: find, insert with sliding and bumping, delete,
backyard cleaning and statistics."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .backyard import Backyard, Element
from .config import SlickConfig
from .hashing import Hasher
from .state import TableState, validate_state


class InsertOutcome(enum.Enum):
    PLACED = "placed"
    BUMPED = "bumped"
    ALREADY_PRESENT = "already_present"


class DeleteOutcome(enum.Enum):
    REMOVED = "removed"
    NOT_PRESENT = "not_present"


@dataclass(frozen=True)
class CleanReport:
    reinserted: int
    still_bumped: int


@dataclass(frozen=True)
class MetricsSnapshot:
    n: int
    m: int
    empty_cells: int
    bumped_count: int
    load: float
    max_offset: int
    bluster_count: int
    max_bluster_len: int


@dataclass
class Counters:
    """Instrumentation; cheap integer bumps on the hot paths."""

    finds: int = 0
    find_probes: int = 0
    find_hits: int = 0
    find_hit_probes: int = 0
    max_find_probes: int = 0
    inserts: int = 0
    slide_blocks: int = 0
    left_slides: int = 0
    right_slides: int = 0
    bump_events: int = 0
    # slots scanned plus blocks slid by the most expensive insert so far
    max_insert_touch: int = 0
    # element and block steps of an offline build, set by the builders
    build_work: int = 0


class SlickTable:
    """Hash table storing most elements in sliding blocks of a flat array.

    Keys are 64-bit integers (any hashable accepted by the hasher works).
    Elements whose threshold hash is below their block's threshold live in
    the backyard.
    """

    def __init__(self, config: SlickConfig, hasher=None, backyard=None) -> None:
        self.config = config
        self.state = TableState.fresh(config)
        self.hasher = hasher if hasher is not None else Hasher.from_config(config)
        self.backyard = backyard if backyard is not None else Backyard()
        self.n = 0
        self.counters = Counters()
        # left slides cannot succeed until some element has left the table
        self._removed_any = False
        self._B = config.B
        self._Bhat = config.Bhat
        self._ohat = config.ohat
        self._shat = config.shat
        self._nb = config.num_blocks
        self._luckoo = config.luckoo

    # -- queries ---------------------------------------------------------

    def find(self, key) -> Element | None:
        i, d = self.hasher.locate(key)
        st = self.state
        c = self.counters
        c.finds += 1
        if d < st.thr[i]:
            return self.backyard.find(key)
        B = self._B
        start = B * i + st.off[i]
        stop = B * i + B + st.off[i + 1] - st.gap[i]
        try:
            j = st.keys.index(key, start, stop)
        except ValueError:
            probes = stop - start
            c.find_probes += probes
            if probes > c.max_find_probes:
                c.max_find_probes = probes
            assert probes <= self._Bhat, (probes, self._Bhat)
            return None
        probes = j - start + 1
        c.find_probes += probes
        c.find_hits += 1
        c.find_hit_probes += probes
        if probes > c.max_find_probes:
            c.max_find_probes = probes
        return Element(key, st.values[j])

    def __contains__(self, key) -> bool:
        return self.find(key) is not None

    def __len__(self) -> int:
        """Element count recomputed from metadata and backyard."""
        return self.state.occupied() + len(self.backyard)

    def items(self):
        st = self.state
        for i in range(self._nb):
            yield from st.block_items(i)
        for e in self.backyard:
            yield tuple(e)

    # -- insertion -------------------------------------------------------

    def insert(self, key, value=None) -> InsertOutcome:
        i, d = self.hasher.locate(key)
        st = self.state
        self.counters.inserts += 1
        if d < st.thr[i]:
            if self.backyard.insert(key, value):
                self.n += 1
                return InsertOutcome.BUMPED
            return InsertOutcome.ALREADY_PRESENT

        B = self._B
        off, gap, keys = st.off, st.gap, st.keys
        start = B * i + off[i]
        stop = B * i + B + off[i + 1] - gap[i]
        try:
            keys.index(key, start, stop)
            return InsertOutcome.ALREADY_PRESENT
        except ValueError:
            pass

        size = stop - start
        c = self.counters
        slid_before = c.slide_blocks
        if size >= self._Bhat or not self._make_room(i, size):
            bumped = self._bump(i, d, start, stop)
            touch = 2 * size + c.slide_blocks - slid_before
            if touch > c.max_insert_touch:
                c.max_insert_touch = touch
            if bumped:
                self.backyard.insert(key, value)
                self.n += 1
                return InsertOutcome.BUMPED
        else:
            touch = size + 1 + c.slide_blocks - slid_before
            if touch > c.max_insert_touch:
                c.max_insert_touch = touch

        gap[i] -= 1
        pos = B * i + B + off[i + 1] - gap[i] - 1
        keys[pos] = key
        st.values[pos] = value
        self.n += 1
        return InsertOutcome.PLACED

    def _make_room(self, i: int, size: int) -> bool:
        """Ensure block ``i`` has a free cell behind it, sliding if needed."""
        st = self.state
        if st.gap[i] > 0:
            return not self._luckoo or st.off[i] + size < 2 * self._B
        if self._removed_any and self.slide_gap_from_left(i):
            return True
        if self._luckoo and st.off[i] + size >= 2 * self._B:
            return False
        return self.slide_gap_from_right(i)

    def _bump(self, i: int, d_new: int, start: int, stop: int) -> bool:
        """Raise block ``i``'s threshold just enough to evict something.

        Returns True iff the element being inserted (threshold ``d_new``) is
        itself bumped.
        """
        st = self.state
        keys, values = st.keys, st.values
        thr_of = self.hasher.threshold_of
        ds = [thr_of(k) for k in keys[start:stop]]
        t_new = 1 + min(d_new, min(ds, default=d_new))
        st.thr[i] = t_new
        self.counters.bump_events += 1
        self._removed_any = True

        j, end = start, stop - 1
        by_insert = self.backyard.insert
        while j <= end:
            if ds[j - start] < t_new:
                by_insert(keys[j], values[j])
                keys[j] = keys[end]
                values[j] = values[end]
                ds[j - start] = ds[end - start]
                end -= 1
                st.gap[i] += 1
            else:
                j += 1
        return d_new < t_new

    def slide_gap_from_right(self, i0: int) -> bool:
        """Move a free cell from the nearest right block with a gap to ``i0``.

        Blocks ``i0+1 ..`` up to the one owning the gap each slide one cell to
        the right by copying their first element behind their last. Fails without side
        effects if a block on the way is at maximum offset, the table end is
        reached, or more than ``shat`` blocks would slide.
        """
        st = self.state
        off, gap, keys, values = st.off, st.gap, st.keys, st.values
        B, nb, ohat, shat = self._B, self._nb, self._ohat, self._shat
        luckoo = self._luckoo
        i = i0
        while gap[i] == 0:
            k = i + 1
            if k >= nb or off[k] >= ohat or k - i0 > shat:
                return False
            if luckoo and off[k] + 1 + (B + off[k + 1] - off[k] - gap[k]) > 2 * B:
                return False
            i = k
        gap[i] -= 1
        self.counters.slide_blocks += i - i0
        self.counters.right_slides += 1
        while i > i0:
            # with gap[i] already decremented the end formula points at the
            # freed cell behind the block
            s = B * i + off[i]
            e = B * i + B + off[i + 1] - gap[i] - 1
            keys[e] = keys[s]
            values[e] = values[s]
            off[i] += 1
            i -= 1
        gap[i0] += 1
        return True

    def slide_gap_from_left(self, i0: int) -> bool:
        """Mirror of :meth:`slide_gap_from_right`: blocks slide left by moving
        their last element in front of their first."""
        st = self.state
        off, gap, keys, values = st.off, st.gap, st.keys, st.values
        B, shat = self._B, self._shat
        i = i0
        while True:
            if off[i] == 0:
                return False
            j = i - 1
            if j < 0 or i0 - j > shat:
                return False
            if gap[j] > 0:
                break
            i = j
        gap[j] -= 1
        self.counters.slide_blocks += i0 - j
        self.counters.left_slides += 1
        for k in range(j + 1, i0 + 1):
            s = B * k + off[k]
            e = B * k + B + off[k + 1] - gap[k] - 1
            keys[s - 1] = keys[e]
            values[s - 1] = values[e]
            off[k] -= 1
        gap[i0] = 1
        return True

    # -- deletion --------------------------------------------------------

    def delete(self, key) -> DeleteOutcome:
        i, d = self.hasher.locate(key)
        st = self.state
        if d < st.thr[i]:
            if self.backyard.delete(key):
                self.n -= 1
                return DeleteOutcome.REMOVED
            return DeleteOutcome.NOT_PRESENT
        if self._remove_from_block(i, key):
            self.n -= 1
            return DeleteOutcome.REMOVED
        return DeleteOutcome.NOT_PRESENT

    def _remove_from_block(self, i: int, key) -> bool:
        st = self.state
        B = self._B
        start = B * i + st.off[i]
        end = B * i + B + st.off[i + 1] - st.gap[i] - 1
        try:
            j = st.keys.index(key, start, end + 1)
        except ValueError:
            return False
        st.keys[j] = st.keys[end]
        st.values[j] = st.values[end]
        st.gap[i] += 1
        self._removed_any = True
        return True

    # -- backyard cleaning -----------------------------------------------

    def backyard_clean(self) -> CleanReport:
        """Move backyard elements back into the table and reset thresholds.

        Bumped elements of each block are reinserted in descending threshold
        order. When one does not fit, the block's threshold is set just above
        it and it, its lower-threshold siblings and any already reinserted
        sibling of equal threshold go back to the backyard. Elements that
        were in the table before cleaning are never evicted.
        """
        st = self.state
        groups: dict[int, list] = {}
        for key, value in self.backyard.drain():
            i, d = self.hasher.locate(key)
            groups.setdefault(i, []).append((d, key, value))
        for i in range(self._nb):
            st.thr[i] = 0

        reinserted = 0
        B = self._B
        for i in sorted(groups):
            group = sorted(groups[i], key=lambda x: x[0], reverse=True)
            placed: list = []
            for idx, (d, key, value) in enumerate(group):
                size = st.block_size(i)
                if size < self._Bhat and self._make_room(i, size):
                    st.gap[i] -= 1
                    pos = B * i + B + st.off[i + 1] - st.gap[i] - 1
                    st.keys[pos] = key
                    st.values[pos] = value
                    placed.append((d, key, value))
                    continue
                st.thr[i] = d + 1
                # siblings of equal threshold already placed must go back too
                for pd, pkey, pvalue in placed:
                    if pd == d:
                        self._remove_from_block(i, pkey)
                        self.backyard.insert(pkey, pvalue)
                placed = [p for p in placed if p[0] != d]
                for _, rkey, rvalue in group[idx:]:
                    self.backyard.insert(rkey, rvalue)
                break
            reinserted += len(placed)
        return CleanReport(reinserted=reinserted, still_bumped=len(self.backyard))

    # -- reporting -------------------------------------------------------

    def stats(self) -> MetricsSnapshot:
        st = self.state
        cfg = self.config
        nb = self._nb
        empty = st.empty_cells()
        bumped = len(self.backyard)
        # occupied cells = n - bumped = m - empty
        assert bumped - empty == self.n - cfg.m, (bumped, empty, self.n, cfg.m)
        count, longest = bluster_stats(st.off[:nb], st.gap[:nb], cfg.ohat)
        return MetricsSnapshot(
            n=self.n,
            m=cfg.m,
            empty_cells=empty,
            bumped_count=bumped,
            load=self.n / cfg.m,
            max_offset=max(st.off[:nb], default=0),
            bluster_count=count,
            max_bluster_len=longest,
        )

    def validate(self) -> list[str]:
        """Structural invariants plus membership checks over all elements."""
        problems = validate_state(self.state)
        if problems:
            return problems
        st = self.state
        seen: set = set()
        for i in range(self._nb):
            for key, _ in st.block_items(i):
                b, d = self.hasher.locate(key)
                if b != i:
                    problems.append(f"membership: key {key!r} in block {i} hashes to {b}")
                elif d < st.thr[i]:
                    problems.append(f"bumped-iff: key {key!r} in block {i} has delta {d} < t={st.thr[i]}")
                if key in seen:
                    problems.append(f"uniqueness: key {key!r} stored twice")
                seen.add(key)
        for key, _ in self.backyard:
            b, d = self.hasher.locate(key)
            if d >= st.thr[b]:
                problems.append(f"bumped-iff: backyard key {key!r} has delta {d} >= t={st.thr[b]}")
            if key in seen:
                problems.append(f"uniqueness: key {key!r} in table and backyard")
            seen.add(key)
        if len(seen) != self.n:
            problems.append(f"count: {len(seen)} distinct keys stored but n={self.n}")
        return problems


def bluster_stats(off: list[int], gap: list[int], ohat: int) -> tuple[int, int]:
    """Count maximal blocked clusters and the longest one (in blocks).

    A bluster runs from a block with offset 0 to a later block with offset
    ``ohat`` with no gap anywhere before its last block; an insert into any
    block before the last can slide neither left nor right.
    """
    nb = len(off)
    count = longest = 0
    i = 0
    while i < nb:
        if gap[i] != 0:
            i += 1
            continue
        r0 = i
        while i < nb and gap[i] == 0:
            i += 1
        r1 = i - 1  # gap-free run r0..r1; a bluster may end at r1 + 1
        first_zero = next((k for k in range(r0, r1 + 1) if off[k] == 0), None)
        if first_zero is None:
            continue
        last_full = next((k for k in range(min(r1 + 1, nb - 1), first_zero, -1)
                          if off[k] == ohat), None)
        if last_full is None:
            continue
        count += 1
        longest = max(longest, last_full - first_zero + 1)
    return count, longest
