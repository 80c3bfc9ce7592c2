import numpy as np
import pytest

from ars3d import ThetaForm
from ars3d.config import DEFAULT_SEED

FAMILIES = [
    ThetaForm.jordan(),
    ThetaForm.diagonal(1.0),
    ThetaForm.diagonal(-1.0),
    ThetaForm.diagonal(0.3),
    ThetaForm.rotation(0.7),
]

# wider sweep for cheap tests: every family plus interior and boundary gammas
ALL_THETAS = FAMILIES + [
    ThetaForm.diagonal(0.0),
    ThetaForm.diagonal(-0.4),
    ThetaForm.rotation(0.0),
    ThetaForm.rotation(-1.3),
]

_ACCEPTANCE = {}


@pytest.fixture
def rng():
    return np.random.default_rng(DEFAULT_SEED)


@pytest.fixture(params=FAMILIES, ids=str)
def theta(request):
    return request.param


@pytest.fixture(params=ALL_THETAS, ids=str)
def any_theta(request):
    return request.param


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(number, title, passed, detail=""):
        line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}"
        if detail:
            line += f" ({detail})"
        _ACCEPTANCE[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
