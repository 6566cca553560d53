import numpy as np
import pytest

from qgbounds.circuit import CircuitSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def spec2q():
    """The default two-qubit, two-layer circuit, noiseless."""
    return CircuitSpec(n_qubits=2, n_layers=2, noise_rate=0.0)


@pytest.fixture
def spec2q_noisy():
    return CircuitSpec(n_qubits=2, n_layers=2, noise_rate=0.05)


@pytest.fixture
def spec1q():
    """Single qubit, single layer: model <Z> = cos(beta) at x = 0."""
    return CircuitSpec(n_qubits=1, n_layers=1, noise_rate=0.0)


def random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real
