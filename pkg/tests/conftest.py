import numpy as np
import pytest

from nlsist.scattering import Potential, scatter


@pytest.fixture(scope="session")
def sech1_data():
    return scatter(Potential.sech(1.0))


@pytest.fixture(scope="session")
def sech2_data():
    return scatter(Potential.sech(2.0))


@pytest.fixture(scope="session")
def weak_sech_data():
    return scatter(Potential.sech(0.3))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE = []


@pytest.fixture
def acceptance(capsys):
    """record(n, title, ok, detail, seconds) prints and stores one pass/fail line."""

    def record(n, title, ok, detail, seconds):
        line = f"[acceptance {n}] {'PASS' if ok else 'FAIL'}  {title}: {detail} ({seconds:.2f} s)"
        _ACCEPTANCE.append((n, line))
        with capsys.disabled():
            print("\n" + line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
