import numpy as np
import pytest

from spintomo.coherent_assistant import JCParams
from spintomo.oracle import JCOracle
from spintomo.spin_assistant import optimal_scheme


def random_bloch(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Bloch vectors drawn uniformly from the unit ball."""
    n = 1 if size is None else size
    vecs = rng.normal(size=(n, 3))
    vecs /= np.linalg.norm(vecs, axis=1)[:, None]
    vecs *= rng.uniform(size=n)[:, None] ** (1 / 3)
    return vecs[0] if size is None else vecs


@pytest.fixture(scope="session")
def opt_scheme():
    return optimal_scheme()


@pytest.fixture(scope="session")
def jc_params():
    """Reference model configuration: gamma = omega = 0.1, one mean photon."""
    return JCParams.auto(0.1, 0.1, 1.0)


@pytest.fixture(scope="session")
def jc_oracle(jc_params):
    return JCOracle(jc_params)
