import numpy as np
import pytest

from hmmq.renewal import build_sns_A, build_sns_B, build_sns_C

# (criterion, passed, detail) lines collected by test_acceptance.py
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


@pytest.fixture(scope="session")
def sns_a():
    return build_sns_A(0.5)


@pytest.fixture(scope="session")
def sns_b():
    return build_sns_B(0.5)


@pytest.fixture(scope="session")
def sns_c():
    return build_sns_C(0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
