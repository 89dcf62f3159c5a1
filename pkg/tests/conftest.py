import pytest

from ftiss.pde import DisturbanceSpec, InitSpec, SimConfig, simulate
from ftiss.certificate import PDEParams

_ACCEPTANCE_LINES = []


def paper_config(A1, A2=0.0, **kw):
    dist = DisturbanceSpec("paper-sine", A2=A2) if A2 else DisturbanceSpec()
    return SimConfig(params=PDEParams(2.0, 0.6), init=InitSpec(A1=A1), dist=dist, **kw)


@pytest.fixture(scope="session")
def paper_runs():
    """Recorded-every-step paper runs keyed by ``(A1, A2)``; t_end = 6."""
    cache = {}

    def get(A1, A2=0.0):
        key = (A1, A2)
        if key not in cache:
            cache[key] = simulate(paper_config(A1, A2, record_every=1))
        return cache[key]

    return get


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
