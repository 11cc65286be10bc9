import pytest

# criterion number -> [title, passed, notes]
_ACCEPTANCE: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.fixture
def note(request):
    """Attach a measurement to the acceptance summary line of this test."""
    marker = request.node.get_closest_marker("criterion")
    number, title = marker.args
    entry = _ACCEPTANCE.setdefault(number, [title, True, []])
    return entry[2].append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.skipped:
        return
    if report.when == "call" or report.failed:
        number, title = marker.args
        entry = _ACCEPTANCE.setdefault(number, [title, True, []])
        entry[1] = entry[1] and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed, notes = _ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] {number:2d}. {title}"
        if notes:
            line += "  (" + "; ".join(notes) + ")"
        terminalreporter.write_line(line)
