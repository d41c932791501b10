import numpy as np
import pytest

from scrambletop import floquet as fl
from scrambletop.spin import make_spin


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260808)


@pytest.fixture(scope="session")
def sys32():
    return make_spin(3 / 2)


@pytest.fixture(scope="session")
def sys72():
    return make_spin(7 / 2)


@pytest.fixture(scope="session")
def sys412():
    return make_spin(41 / 2)


@pytest.fixture(scope="session")
def params32():
    return fl.QuantumParams(j=3 / 2)


@pytest.fixture(scope="session")
def params72():
    return fl.QuantumParams(j=7 / 2)


@pytest.fixture(scope="session")
def params412():
    return fl.QuantumParams(j=41 / 2)


@pytest.fixture(scope="session")
def flo32(params32, sys32):
    return fl.floquet_operator(params32, sys32)


@pytest.fixture(scope="session")
def flo72(params72, sys72):
    return fl.floquet_operator(params72, sys72)


@pytest.fixture(scope="session")
def flo412(params412, sys412):
    return fl.floquet_operator(params412, sys412)


def random_hermitian(rng, d, scale=1.0):
    m = rng.normal(size=(d, d), scale=scale) + 1j * rng.normal(size=(d, d), scale=scale)
    return (m + m.conj().T) / 2


def random_unitary(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)
