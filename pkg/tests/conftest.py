_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties.append(("criterion", (m.args[0], m.args[1])))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _criteria[report.nodeid] = (crit, report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    tags = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}
    for (num, text), outcome in sorted(_criteria.values(), key=lambda v: v[0][0]):
        terminalreporter.write_line(f"[{tags.get(outcome, outcome.upper())}] {num:>2}. {text}")
