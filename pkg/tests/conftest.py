import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

_criteria = {}


@pytest.fixture
def criterion(request):
    """Record a named acceptance criterion; its outcome is printed at the end of the run."""

    def record(label):
        _criteria[request.node.nodeid] = label

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.nodeid in _criteria and rep.when == "call":
        item.config._criterion_results = getattr(item.config, "_criterion_results", [])
        item.config._criterion_results.append((_criteria[item.nodeid], rep.passed, rep.duration))


def pytest_terminal_summary(terminalreporter, config):
    results = getattr(config, "_criterion_results", [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, secs in results:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  ({secs:.1f} s)")
