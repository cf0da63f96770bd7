#!/usr/bin/env python3
"""
pyconformal Simulation

Data generators for the isotonic and less-isotonic simulation models and
the CRPS of the ideal forecaster.

Isotonic model:       X ~ U(0, 10), Y | X ~ Gamma(shape=sqrt(X), scale=min(max(X, 1), 6))
Less-isotonic model:  X ~ U(0, 10), Y | X ~ Normal(2X + 5 sin X, sd=X/5)
"""

from typing import Any, Dict, Tuple, Union

import numpy as np
from scipy import integrate, stats

from .exceptions import ConformalConfigError
from .models import WeightedSample

# Versioned identifier of the seed -> sample map, recorded in sample metadata
GENERATOR_ID = 'numpy.PCG64/1'
COVARIATE_RANGE = (0.0, 10.0)

SeedLike = Union[int, np.random.Generator]


def make_rng(seed: SeedLike) -> np.random.Generator:
    """PCG64 generator for an integer seed; generators pass through"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(int(seed)))


def isotonic_parameters(x: Union[float, np.ndarray]) -> Tuple[Any, Any]:
    """Gamma shape and scale of the isotonic model at covariate x"""
    x = np.asarray(x, dtype=float)
    shape = np.sqrt(x)
    scale = np.minimum(np.maximum(x, 1.0), 6.0)
    if shape.ndim == 0:
        return float(shape), float(scale)
    return shape, scale


def less_isotonic_parameters(x: Union[float, np.ndarray]) -> Tuple[Any, Any]:
    """Normal mean and standard deviation of the less-isotonic model at covariate x"""
    x = np.asarray(x, dtype=float)
    mean = 2.0 * x + 5.0 * np.sin(x)
    sd = x / 5.0
    if mean.ndim == 0:
        return float(mean), float(sd)
    return mean, sd


def _covariates(n: int, rng: np.random.Generator) -> np.ndarray:
    if n < 1:
        raise ConformalConfigError(f"sample size must be at least 1, got {n}")
    return rng.uniform(COVARIATE_RANGE[0], COVARIATE_RANGE[1], size=n)


def gen_isotonic(n: int, seed: SeedLike) -> WeightedSample:
    """Draw n points from the isotonic Gamma model"""
    rng = make_rng(seed)
    x = _covariates(n, rng)
    shape, scale = isotonic_parameters(x)
    # numpy's gamma sampler handles shape < 1 without rejection artifacts
    y = rng.gamma(shape, scale)
    return WeightedSample(x, y)


def gen_less_isotonic(n: int, seed: SeedLike) -> WeightedSample:
    """Draw n points from the less-isotonic Normal model; sd 0 gives exactly the mean"""
    rng = make_rng(seed)
    x = _covariates(n, rng)
    mean, sd = less_isotonic_parameters(x)
    y = mean + sd * rng.standard_normal(n)
    return WeightedSample(x, y)


GENERATORS = {
    'isotonic': gen_isotonic,
    'less_isotonic': gen_less_isotonic,
}


def true_cdf_isotonic(x: float):
    """Frozen scipy Gamma distribution of Y given X = x in the isotonic model"""
    shape, scale = isotonic_parameters(x)
    return stats.gamma(a=shape, scale=scale)


def true_cdf_less_isotonic(x: float):
    """Frozen scipy Normal distribution of Y given X = x in the less-isotonic model"""
    mean, sd = less_isotonic_parameters(x)
    return stats.norm(loc=mean, scale=sd)


def crps_continuous(distribution, y: float) -> float:
    """CRPS of a continuous scipy distribution by adaptive quadrature"""
    lower = float(distribution.support()[0])
    below = 0.0
    if y > lower:
        below, _ = integrate.quad(lambda z: distribution.cdf(z) ** 2, lower, y, limit=200)
    above, _ = integrate.quad(lambda z: distribution.sf(z) ** 2, y, np.inf, limit=200)
    return float(below + above)


def ideal_crps_isotonic(test: WeightedSample) -> float:
    """Mean CRPS of the true conditional Gamma CDFs at the realized outcomes"""
    scores = []
    for x, y, _ in test.points:
        if x <= 0:
            # Degenerate shape 0: a point mass at 0
            scores.append(abs(y))
            continue
        scores.append(crps_continuous(true_cdf_isotonic(x), y))
    return float(np.mean(scores))


class SimConfig:
    """Simulation model, sample sizes and seed"""

    def __init__(self, model: str = 'isotonic', n_train: int = 2000, n_test: int = 5000, seed: int = 1):
        if model not in GENERATORS:
            raise ConformalConfigError(f"model must be one of {sorted(GENERATORS)}")
        if n_train < 1 or n_test < 1:
            raise ConformalConfigError("sample sizes must be at least 1")
        self.model = model
        self.n_train = int(n_train)
        self.n_test = int(n_test)
        self.seed = int(seed)

    def generate(self) -> Tuple[WeightedSample, WeightedSample]:
        """Training and test samples drawn from one seeded stream, training first"""
        rng = make_rng(self.seed)
        generator = GENERATORS[self.model]
        return generator(self.n_train, rng), generator(self.n_test, rng)

    def metadata(self, role: str, n: int) -> Dict[str, Any]:
        """Sidecar metadata of a generated sample"""
        return {
            'model': self.model,
            'role': role,
            'n': int(n),
            'seed': self.seed,
            'generator': GENERATOR_ID,
        }

    def __repr__(self) -> str:
        return (f"SimConfig(model={self.model!r}, n_train={self.n_train}, "
                f"n_test={self.n_test}, seed={self.seed})")
