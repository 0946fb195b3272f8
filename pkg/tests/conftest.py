"""Shared fixtures: the acceptance-criterion recorder and its summary table."""

import pytest


class CriterionLog:
    """Collects one (name, measured, limit, verdict) row per criterion."""

    def __init__(self):
        self.rows = {}

    def record(self, num, name, measured, limit, passed):
        self.rows[num] = (name, measured, limit, bool(passed))


_LOG = CriterionLog()


@pytest.fixture(scope="session")
def criteria():
    return _LOG


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _LOG.rows:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_LOG.rows):
        name, measured, limit, passed = _LOG.rows[num]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(
            f"criterion {num}: {name} — measured {measured} (limit {limit}) — {verdict}"
        )
