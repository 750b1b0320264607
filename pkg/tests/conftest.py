import numpy as np
import pytest

_ACCEPTANCE = {}


class AcceptanceLog:
    """Collects one verdict line per acceptance criterion for the terminal summary."""

    def record(self, number, title, passed, detail=""):
        _ACCEPTANCE[number] = (title, bool(passed), detail)
        return bool(passed)


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceLog()


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed, detail = _ACCEPTANCE[number]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{verdict}] criterion {number:2d}: {title} -- {detail}")
