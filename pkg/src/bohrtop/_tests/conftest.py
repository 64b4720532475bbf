import numpy as np
import pytest

from bohrtop.cstar import ContextPoset, HermObs, MatrixAlg, bloch_context, trivial_context
from bohrtop.state import DensityState


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def m2():
    return MatrixAlg.full(2)


@pytest.fixture
def sigma_z():
    return HermObs.diag([1, -1])


@pytest.fixture
def sigma_x(m2):
    return HermObs(m2, [[0, 1], [1, 0]])


@pytest.fixture
def c_z():
    return bloch_context(0, 0, 1, name="C_z")


@pytest.fixture
def c_x():
    return bloch_context(1, 0, 0, name="C_x")


@pytest.fixture
def qubit_z(c_z):
    return ContextPoset([c_z])


@pytest.fixture
def qubit_zx(c_z, c_x):
    return ContextPoset([c_z, c_x])


@pytest.fixture
def qubit_trivial(m2):
    return ContextPoset([trivial_context(m2)])


@pytest.fixture
def ket0():
    return DensityState.pure([1, 0])
