"""Shared fixtures for the pyconformal test suite."""

import numpy as np
import pytest

from pyconformal.models import WeightedSample


@pytest.fixture(autouse=True)
def restore_default_config():
    """Snapshot pyconformal.config.default_config so importlib.reload tests
    don't leak state into other tests."""
    import pyconformal.config as cfg_mod

    snapshot = cfg_mod.default_config
    yield
    cfg_mod.default_config = snapshot


@pytest.fixture(autouse=True)
def quiet_diagnostics(monkeypatch):
    """Silence stderr diagnostics and forget which ones were printed."""
    from pyconformal.utils import reset_diagnostics

    monkeypatch.setenv("CONFORMAL_NO_DIAG", "1")
    reset_diagnostics()
    yield
    reset_diagnostics()


@pytest.fixture
def rng():
    """Seeded generator for randomized property tests."""
    return np.random.default_rng(20240607)


@pytest.fixture
def two_point_train():
    """Training sample {(1, 1), (2, 2)}."""
    return WeightedSample([1.0, 2.0], [1.0, 2.0])


@pytest.fixture
def three_point_sample():
    """Sample {(1, 1), (2, 3), (3, 2)} with unit weights."""
    return WeightedSample([1.0, 2.0, 3.0], [1.0, 3.0, 2.0])


def random_sample(rng, n, ties=False, weighted=False):
    """Small random sample; ties rounds covariates and outcomes to create repeats."""
    x = rng.uniform(0, 10, n)
    y = x + rng.normal(0, 2, n)
    if ties:
        x = np.round(x / 2.0)
        y = np.round(y)
    w = rng.uniform(0.5, 2.0, n) if weighted else None
    return WeightedSample(x, y, w)


@pytest.fixture
def sample_factory(rng):
    """Return a factory for random small samples bound to the seeded generator."""
    def make(n, ties=False, weighted=False):
        return random_sample(rng, n, ties=ties, weighted=weighted)
    return make
