import numpy as np
import pytest

from gsens.data import Dataset
from gsens.simulation import calibrate_linear, calibrate_logistic, generate_linear, generate_logistic


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False,
        help="Kjør Monte Carlo-testene med m = 1000 replikasjoner",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="krever --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def make_linear_data(n=500, seed=0, psi=1.0, alpha=0.3, covariate=False):
    """Kontinuerlig Y, binær X og Z, med et direkte Z-ledd av størrelse alpha"""
    rng = np.random.default_rng(seed)
    z = rng.binomial(1, 0.5, n).astype(float)
    u = rng.standard_normal(n)
    x = (rng.standard_normal(n) + 1.2 * z + 0.5 * u > 0.6).astype(float)
    y = 0.5 + psi * x + alpha * z + u + rng.standard_normal(n)
    l = rng.standard_normal(n) if covariate else None
    return Dataset(y=y, x=x, z=z, l=l)


@pytest.fixture
def linear_data():
    return make_linear_data()


@pytest.fixture
def linear_config():
    return calibrate_linear(psi=1.5, alpha_star=0.5)


@pytest.fixture
def logistic_config():
    return calibrate_logistic(psi=0.0, alpha_star=0.0, p_y=0.3)


@pytest.fixture
def logistic_data(logistic_config):
    return generate_logistic(logistic_config, n=2000, seed=11)


@pytest.fixture
def calibrated_linear_data(linear_config):
    return generate_linear(linear_config, n=1000, seed=5)
