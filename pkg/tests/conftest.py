import pytest
from hypothesis import settings

from slick import ExplicitHasher, SlickConfig, SlickTable

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []
# session-wide tallies for the find-probe bound and the conservation identity
TALLY = {"tables": 0, "finds": 0, "worst_probe_ratio": 0.0, "snapshots": 0}


def snapshot(table):
    """``table.stats()`` plus an explicit check of the conservation identity."""
    s = table.stats()
    assert s.bumped_count - s.empty_cells == s.n - s.m
    return s


def explicit_table(layout, *, B, Bhat, ohat, that, m, luckoo=False, shat=None):
    """Table whose hash values are given by ``layout: key -> (block, delta)``."""
    cfg = SlickConfig(m=m, B=B, Bhat=Bhat, ohat=ohat, that=that, luckoo=luckoo, shat=shat)
    return SlickTable(cfg, hasher=ExplicitHasher(layout, cfg.num_blocks, cfg.that))


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    name = request.node.name

    def record(ok: bool, detail: str):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        return ok

    yield record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
    if TALLY["tables"]:
        terminalreporter.section("session-wide bounds")
        terminalreporter.write_line(
            f"{TALLY['tables']} Slick tables, {TALLY['finds']} finds, worst max_find_probes/Bhat = "
            f"{TALLY['worst_probe_ratio']:.3f}; {TALLY['snapshots']} stats snapshots, all conserving")


@pytest.fixture(autouse=True)
def enforce_global_bounds(monkeypatch):
    """Every SlickTable built in any test must keep finds within Bhat slots,
    and every stats snapshot must satisfy the conservation identity."""
    # keep only the small counter objects so large tables can be freed
    seen: list = []
    init, stats = SlickTable.__init__, SlickTable.stats

    def tracking_init(self, *args, **kwargs):
        init(self, *args, **kwargs)
        seen.append((self.counters, self.config.Bhat))

    def checked_stats(self):
        s = stats(self)
        assert s.bumped_count - s.empty_cells == s.n - s.m
        TALLY["snapshots"] += 1
        return s

    monkeypatch.setattr(SlickTable, "__init__", tracking_init)
    monkeypatch.setattr(SlickTable, "stats", checked_stats)
    yield
    for counters, Bhat in seen:
        TALLY["tables"] += 1
        TALLY["finds"] += counters.finds
        TALLY["worst_probe_ratio"] = max(TALLY["worst_probe_ratio"], counters.max_find_probes / Bhat)
        assert counters.max_find_probes <= Bhat
