import numpy as np
import pytest

from toric_negativity.groundstate import flux_basis, psi0
from toric_negativity.lattice import build_torus

# criterion number -> (ok, detail), filled by test_acceptance.py
CRITERIA = {}


def record(number, ok, detail=""):
    CRITERIA[number] = (bool(ok), detail)


def column(lat, *xs):
    """All edges leaving the vertices of the given columns (a vertical annulus)."""
    return sorted(e for x in xs for y in range(lat.Ly) for e in (lat.h(x, y), lat.v(x, y)))


@pytest.fixture(scope="session")
def t42():
    return build_torus(4, 2)


@pytest.fixture(scope="session")
def t33():
    return build_torus(3, 3)


@pytest.fixture(scope="session")
def t43():
    return build_torus(4, 3)


@pytest.fixture(scope="session")
def basis42(t42):
    return flux_basis(t42)


@pytest.fixture(scope="session")
def basis33(t33):
    return flux_basis(t33)


@pytest.fixture(scope="session")
def basis43(t43):
    return flux_basis(t43)


@pytest.fixture(scope="session")
def psi0_42(t42):
    return psi0(t42)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        ok, detail = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
