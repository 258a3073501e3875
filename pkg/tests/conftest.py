"""Per-criterion PASS/FAIL summary for the acceptance suite."""

import pytest

_results: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    # carry the marker into the report so results can be grouped by criterion
    outcome = yield
    m = item.get_closest_marker("criterion")
    if m is not None:
        outcome.get_result().criterion = tuple(m.args)


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    n, title = marker
    entry = _results.setdefault(n, {"title": title, "failed": [], "ran": False})
    if report.when == "call":
        entry["ran"] = True
    if report.failed:
        entry["ran"] = True
        entry["failed"].append(report.nodeid.split("::")[-1])


def pytest_terminal_summary(terminalreporter):
    ran = {n: e for n, e in sorted(_results.items()) if e["ran"]}
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for n, e in ran.items():
        line = f"criterion {n}: {'FAIL' if e['failed'] else 'PASS'}  {e['title']}"
        if e["failed"]:
            line += f"  (failed: {', '.join(e['failed'])})"
        terminalreporter.write_line(line)
