"""
Fixtures compartidas y opción --runslow para los experimentos largos
"""
import numpy as np
import pytest

from models.entities import ConsensusWeights, TrainingConfig
from services.data_service import make_synthetic


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="Ejecuta los experimentos de extremo a extremo")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="requiere --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_dataset():
    return make_synthetic(n=24, k_true=3, view_dims=[5, 4], noise_sigma=0.05, seed=1)


@pytest.fixture
def tiny_config():
    return TrainingConfig(
        epochs=2,
        batch_size=8,
        d_out=4,
        hidden_widths=[8, 8],
        weights=ConsensusWeights(),
        seed=3,
        kmeans_restarts=2,
    )


def random_stochastic(rng, n, k):
    """Filas aleatorias sobre el símplex"""
    raw = rng.uniform(0.05, 1.0, size=(n, k))
    return raw / raw.sum(axis=1, keepdims=True)
