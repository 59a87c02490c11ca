import pytest

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    name = dict(report.user_properties).get("criterion")
    if name is None:
        return
    detail = dict(report.user_properties).get("detail", "")
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        prev = _CRITERIA.get(name)
        if prev is None or prev[0] == "PASS":
            _CRITERIA[name] = (status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda s: int(s[1:])):
        status, detail = _CRITERIA[name]
        terminalreporter.write_line(f"{name}: {status}  {detail}")


@pytest.fixture
def criterion(request, record_property):
    """Tag the test with a criterion name; call the returned function with a detail string."""
    marker = request.node.get_closest_marker("criterion")
    record_property("criterion", marker.args[0])

    def detail(text):
        record_property("detail", text)
        print(f"{marker.args[0]}: {text}")

    return detail
