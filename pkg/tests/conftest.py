"""Collects acceptance-criterion outcomes and prints one PASS/FAIL line for each."""

import pytest

_RESULTS: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    failed = report.failed or (report.when == "setup" and report.skipped)
    if report.when == "call" or failed:
        # any failing phase sticks
        if failed or _RESULTS.get(n, ("PASS",))[0] != "FAIL":
            _RESULTS[n] = ("FAIL" if failed else "PASS", title)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        status, title = _RESULTS[n]
        terminalreporter.write_line(f"{status} criterion {n}: {title}")
