import numpy as np
import pytest

_CRITERIA = []


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture
def criterion(request):
    """Record a named acceptance line; PASS unless the test body fails."""
    entry = {"name": request.node.name, "detail": "", "passed": False}

    def report(label, detail):
        entry["name"], entry["detail"] = label, detail

    yield report
    rep = getattr(request.node, "rep_call", None)
    entry["passed"] = bool(rep and rep.passed)
    _CRITERIA.append(entry)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for e in _CRITERIA:
        status = "PASS" if e["passed"] else "FAIL"
        terminalreporter.write_line(f"{status}  {e['name']}: {e['detail']}")
