import numpy as np
import pytest

from condgate.hamiltonian import SystemParams


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def random_params(rng):
    """A generic dissipative parameter set with all four drives on."""
    rabi = tuple(tuple(rng.uniform(-0.4, 0.4) + 0j for _ in range(2)) for _ in range(2))
    return SystemParams(g=1.0, kappa=rng.uniform(0.1, 1.0),
                        gamma=rng.uniform(0.01, 0.3), rabi=rabi, n_max=3)


def random_rabi(rng, scale=0.5, complex_phases=False):
    amps = rng.uniform(-scale, scale, size=(2, 2))
    if complex_phases:
        amps = amps * np.exp(1j * rng.uniform(0, 2 * np.pi, size=(2, 2)))
    return tuple(tuple(complex(x) for x in row) for row in amps)
