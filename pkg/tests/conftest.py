import pytest
from hypothesis import settings

from ladderfl import Params

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def report_line(request):
    """Record one summary line; printed immediately and again after the run."""

    def record(line: str) -> None:
        print(line)
        request.config.stash[_LINES].append(line)

    return record


@pytest.fixture
def strong() -> Params:
    return Params(omega=40.0)
