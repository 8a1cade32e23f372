import numpy as np
import pytest

from dacopt.metric import auto_gaussian_pmf, uniform_pmf
from dacopt.model import Basis

TABLE1 = {
    9: (1, 2, 4, 8, 16, 32, 35, 77, 80),
    10: (1, 2, 4, 8, 16, 17, 32, 33, 70, 72),
    11: (1, 2, 4, 8, 8, 16, 17, 32, 33, 66, 70),
    12: (1, 2, 4, 7, 8, 15, 15, 23, 25, 30, 61, 64),
    13: (1, 2, 4, 6, 8, 9, 12, 16, 17, 25, 32, 61, 66),
}


@pytest.fixture(scope="session")
def gauss8():
    return auto_gaussian_pmf(8)


@pytest.fixture(scope="session")
def uniform8():
    return uniform_pmf(8)


@pytest.fixture(scope="session")
def basis13():
    return Basis(TABLE1[13], 8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one PASS/FAIL line per acceptance criterion, printed after the run
_ACCEPTANCE = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when not in ("setup", "call"):
        return
    key = marker.args[0]
    failed = call.excinfo is not None and not call.excinfo.errisinstance(pytest.skip.Exception)
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    if call.when == "setup" and not failed:
        return
    _ACCEPTANCE[key] = ("FAIL" if failed else "PASS", marker.args[1], detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: int(k.removeprefix("AC"))):
        status, title, detail = _ACCEPTANCE[key]
        terminalreporter.write_line(f"{status} {key} {title}" + (f" [{detail}]" if detail else ""))
