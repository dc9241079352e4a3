"""Shared pytest plumbing for the acceptance suite.

Acceptance tests record one (passed, detail) entry per criterion through the
``criterion`` fixture; the terminal-summary hook replays them as a single
block so every criterion shows exactly one PASS/FAIL line regardless of how
pytest interleaved the test output. A test that dies before recording still
gets a FAIL line via the makereport hook.
"""

import pytest

_RESULTS = {}


def _record(number, passed, detail):
    prev = _RESULTS.get(number)
    # keep an explicit result over a later bookkeeping overwrite
    if prev is not None and prev[1] != "no result recorded":
        return
    _RESULTS[number] = (bool(passed), str(detail))


@pytest.fixture
def criterion():
    """Recorder: criterion(number, passed, detail)."""
    return _record


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "criterion(number): acceptance criterion covered by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number = marker.args[0]
    if number in _RESULTS:
        return
    if report.failed:
        lines = report.longreprtext.strip().splitlines()
        _RESULTS[number] = (False, lines[-1][:160] if lines else "failed")
    elif report.passed:
        _RESULTS[number] = (True, "no result recorded")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        passed, detail = _RESULTS[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")
