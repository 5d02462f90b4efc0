import pytest

_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or (rep.when != "call" and rep.passed):
        return
    n = marker.args[0]
    detail = "; ".join(v for k, v in item.user_properties if k == "detail")
    ok, prev = rep.passed, _RESULTS.get(n, (True, []))
    _RESULTS[n] = (prev[0] and ok, prev[1] + ([detail] if detail else []))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        ok, details = _RESULTS[n]
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}"
        if details:
            line += "  (" + " | ".join(details) + ")"
        terminalreporter.write_line(line)


@pytest.fixture
def detail(record_property):
    """Attach a one-line measurement summary to the acceptance report."""
    return lambda text: record_property("detail", text)
