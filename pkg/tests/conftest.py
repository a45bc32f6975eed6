import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# criterion number -> list of (test name, outcome, seconds)
_CRITERIA = defaultdict(list)
_TITLES = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    _TITLES[number] = title
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _CRITERIA[number].append((item.name, report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        parts = _CRITERIA[number]
        ok = all(outcome == "passed" for _, outcome, _ in parts)
        seconds = sum(d for _, _, d in parts)
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {_TITLES[number]}  ({seconds:.1f}s)"
        terminalreporter.write_line(line)
        if not ok:
            for name, outcome, _ in parts:
                if outcome != "passed":
                    terminalreporter.write_line(f"               {outcome}: {name}")
