import numpy as np
import pytest

from pypolya import datasets, gibbs
from pypolya.dist_core import NigParams
from pypolya.gibbs import ModelConfig, PosteriorDraw


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture
def galaxies():
    return datasets.galaxies()


@pytest.fixture(scope='session')
def galaxies_posterior():
    """Retained draws and their model from one moderately long galaxies chain."""
    model = ModelConfig(iterations=200, burnin=200, thin=2, seed=11)
    return gibbs.run_chain(datasets.galaxies(), model), model


@pytest.fixture
def g0():
    return NigParams(mu=20.0, tau=2.0, s=2.0, S=1.0)


@pytest.fixture
def quick_model():
    """Short chain for smoke-level tests."""
    return ModelConfig(iterations=10, burnin=20, thin=1, seed=3)


def _make_draw(means, variances, mu=20.0, tau=2.0, alpha=1.0) -> PosteriorDraw:
    means = np.array(means, dtype=float)
    variances = np.array(variances, dtype=float)
    k = np.unique(np.column_stack([means, variances]), axis=0).shape[0]
    return PosteriorDraw(means, variances, mu, tau, alpha, k)


@pytest.fixture
def tied_draw():
    # 82 observations spread over three distinct components
    means = [10.0] * 7 + [20.0] * 70 + [33.0] * 5
    variances = [0.5] * 7 + [1.5] * 70 + [0.8] * 5
    return _make_draw(means, variances)


@pytest.fixture
def values_file(tmp_path):
    path = tmp_path / 'values.txt'
    path.write_text('# velocities\n9.172\n\n19.5  # inline comment\n20.1\n23.7\n')
    return path


@pytest.fixture
def make_draw():
    return _make_draw
