import numpy as np
import pytest
from hypothesis import settings

from infmod.instances import path_graph, two_route_space
from infmod.space import Space

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture
def abc():
    return path_graph()


@pytest.fixture
def square():
    return Space.from_edges(list("abcd"), [("a", "b", 1), ("b", "c", 1), ("c", "d", 1), ("d", "a", 1)])


@pytest.fixture
def two_route():
    """(space, curves, certificate) with a length-1 route through a null strip
    and a length-3 detour."""
    return two_route_space(1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance verdict; the lines are repeated in the run summary."""
    def record(number, name, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {name}" + (f" ({detail})" if detail else "")
        _CRITERIA.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
