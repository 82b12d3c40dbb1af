import functools

import pytest

from relaysel.geometry import ALL_POLICIES, NetworkLayout
from relaysel.metrics import ChannelSpec
from relaysel.montecarlo import run_trials
from relaysel.spatialprocess import PppSpec

MC_TRIALS = 100_000
MC_SEED = 20190101
WINDOW = 10.0


@functools.lru_cache(maxsize=None)
def _trials(lam, d, n, seed):
    return run_trials(NetworkLayout(d), PppSpec(lam, WINDOW), ChannelSpec(),
                      ALL_POLICIES, n, seed)


@pytest.fixture(scope="session")
def mc():
    """``mc(lam, d)`` -> cached TrialSet of 10^5 topologies at the default seed."""
    def get(lam=1.0, d=1.0, n=MC_TRIALS, seed=MC_SEED):
        return _trials(float(lam), float(d), int(n), int(seed))
    return get


_ACCEPTANCE = []


@pytest.fixture(scope="session")
def criterion_log():
    def record(number, title, passed, detail):
        _ACCEPTANCE.append((number, title, bool(passed), detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(
            f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}: {detail}")
