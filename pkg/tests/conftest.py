import numpy as np
import pytest

from snwit.symmetric_measurement import build_nm_povm

# d=3, k=2, M=2, N=8, x=1.5: the worked isotropic example
WORKED = dict(d=3, N=8, M=2, x=1.5, k=2)

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def worked_povm():
    # x = d/M has no positive realization at d=3, M=2; the trace conditions still hold
    return build_nm_povm(WORKED["d"], WORKED["N"], WORKED["M"], WORKED["x"], require_positive=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
