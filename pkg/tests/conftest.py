import pytest

from tfmodlab.exactfield import Poly, theta7

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def T():
    return theta7()


@pytest.fixture(scope="session")
def th(T):
    return T.theta


@pytest.fixture(scope="session")
def X(T):
    return Poly.x(T)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
