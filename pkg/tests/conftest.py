import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracle import NaiveTower  # noqa: E402
from qfgl.gf import make_tower  # noqa: E402

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    number, title = mark.args
    status = "PASS" if rep.passed and rep.when == "call" else "FAIL"
    prev = _CRITERIA.get(number)
    if prev is None or status == "FAIL":
        _CRITERIA[number] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title}")


@pytest.fixture(scope="session")
def f9():
    return make_tower(3, 1, 2)


@pytest.fixture(scope="session")
def f27():
    return make_tower(3, 1, 3)


@pytest.fixture(scope="session")
def f81():
    return make_tower(3, 1, 4)


@pytest.fixture(scope="session")
def f25():
    return make_tower(5, 1, 2)


@pytest.fixture(scope="session")
def f4():
    return make_tower(2, 1, 2)


def naive(ctx):
    return NaiveTower(ctx.p, ctx.m, ctx.n, ctx.g, ctx.h)
