import os
import re
import sys

sys.path.insert(0, os.path.dirname(__file__))

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")
_results: dict = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2).replace("_", " "))
    prev_verdict, prev_time = _results.get(key, ("PASS", 0.0))
    if report.failed:
        _results[key] = ("FAIL", prev_time + report.duration)
    elif report.when == "call":
        _results[key] = (prev_verdict, prev_time + report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), (verdict, seconds) in sorted(_results.items()):
        terminalreporter.write_line(f"criterion {num:2d} {verdict}  {title} ({seconds:.1f}s)")
