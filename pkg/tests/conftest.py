import numpy as np
import pytest

from mslab import BlaschkeProduct, RationalFn, extremal_from_span, make_nearly_space


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion this test decides")
    config._criteria = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when not in ("setup", "call"):
        return
    n, title = marker.args
    store = item.config._criteria
    entry = store.setdefault(n, {"title": title, "passed": True, "tests": 0})
    if call.when == "call":
        entry["tests"] += 1
    if call.excinfo is not None:
        entry["passed"] = False


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = getattr(config, "_criteria", {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(store):
        e = store[n]
        status = "PASS" if e["passed"] and e["tests"] else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status}  {e['title']} ({e['tests']} checks)")


@pytest.fixture(scope="session")
def exm_theta():
    return BlaschkeProduct([0.0, 0.5])


@pytest.fixture(scope="session")
def exm_span():
    return [RationalFn([1, 1]), RationalFn([0, 1, 1])]


@pytest.fixture(scope="session")
def exm_ns(exm_theta, exm_span):
    h, _ = extremal_from_span(exm_span)
    return make_nearly_space(h, exm_theta)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
