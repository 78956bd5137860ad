import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import sojourn_ruin as sr

settings.register_profile(
    "ci",
    max_examples=60,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def model_1d():
    """Unit one-dimensional model: mu = alpha = sigma = 1."""
    return sr.make_model(mu=[1.0], alpha=[1.0], sigma=[[1.0]])


@pytest.fixture(scope="session")
def model_1d_skew():
    """One-dimensional model with mu = 2, alpha = 0.5."""
    return sr.make_model(mu=[2.0], alpha=[0.5], sigma=[[1.0]])


@pytest.fixture(scope="session")
def model_2d_iid():
    """Two independent unit components, equal drifts."""
    return sr.make_model(mu=[1.0, 1.0], alpha=[1.0, 1.0], sigma=np.eye(2))


@pytest.fixture(scope="session")
def model_2d_corr():
    """Correlated pair with distinct drifts; lands in the interior regime."""
    return sr.make_model(
        mu=[1.0, 0.5], alpha=[1.0, 0.5], sigma=[[1.0, 0.3], [0.3, 1.0]]
    )


def random_pd_matrix(rng: np.random.Generator, d: int, unit_diag: bool = False):
    """Random positive definite matrix, optionally rescaled to unit diagonal."""
    a = rng.normal(size=(d, d))
    m = a @ a.T + 0.3 * np.eye(d)
    if unit_diag:
        s = np.sqrt(np.diag(m))
        m = m / np.outer(s, s)
    return m


def random_bound(rng: np.random.Generator, d: int):
    """Random bound vector with at least one strictly positive component."""
    b = rng.normal(size=d)
    if not (b > 0).any():
        j = int(rng.integers(d))
        b[j] = abs(b[j]) + 0.1
    return b
