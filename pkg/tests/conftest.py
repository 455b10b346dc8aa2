"""Per-criterion reporting for the acceptance suite: one printed
pass/fail line per criterion at the end of the run."""

_RESULTS = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" in report.nodeid and name.startswith("test_c"):
        _RESULTS[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(_RESULTS):
        outcome = _RESULTS[name].upper()
        label = name.replace("test_", "", 1)
        terminalreporter.write_line(f"{label}: {outcome}")
