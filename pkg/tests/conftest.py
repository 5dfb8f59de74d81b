from contextlib import contextmanager

import pytest

_RESULTS: dict[str, bool] = {}


@pytest.fixture
def acceptance():
    """Record one acceptance criterion's outcome for the terminal summary."""

    @contextmanager
    def criterion(name):
        _RESULTS[name] = False
        yield
        _RESULTS[name] = True

    return criterion


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_RESULTS, key=lambda s: int(s.split(".")[0])):
        terminalreporter.write_line(f"{'PASS' if _RESULTS[name] else 'FAIL'}  {name}")
