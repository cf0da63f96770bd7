#!/usr/bin/env python3
"""
Predictive CDF Models for pyconformal

Right-continuous step CDFs given by jump points and cumulative
probabilities, with exact left limits.
"""

from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from ..exceptions import ConformalDataError
from ..utils import TOL
from .base import ArrayLike, StepFunction


class StepCDF(StepFunction):
    """
    Step CDF with strictly increasing cumulative probabilities ending at 1

    Example:
        cdf = StepCDF([1.0, 2.0, 3.0], [1/3, 2/3, 1.0])
        cdf.evaluate(2.0)          # 2/3
        cdf.evaluate(2.0, 'left')  # 1/3
    """

    def __init__(self, jumps: Sequence[float], cum: Sequence[float]):
        cum_array = np.asarray(cum, dtype=float).reshape(-1)
        if cum_array.size == 0:
            raise ConformalDataError("a CDF needs at least one jump")
        if abs(cum_array[-1] - 1.0) > 1e-9:
            raise ConformalDataError(f"CDF must end at 1, got {cum_array[-1]!r}")
        if cum_array[0] <= 0 or np.any(np.diff(cum_array) <= 0):
            raise ConformalDataError("cumulative probabilities must be positive and strictly increasing")
        cum_array = cum_array.copy()
        cum_array[-1] = 1.0
        super().__init__(jumps, cum_array, initial=0.0)

    @classmethod
    def point_mass(cls, y: float) -> 'StepCDF':
        """Degenerate CDF at y"""
        return cls([y], [1.0])

    @classmethod
    def from_atoms(cls, values: Sequence[float], weights: Optional[Sequence[float]] = None) -> 'StepCDF':
        """Weighted empirical CDF of the given values; zero-weight atoms are dropped"""
        values_array = np.asarray(values, dtype=float).reshape(-1)
        if values_array.size == 0:
            raise ConformalDataError("an empirical CDF needs at least one value")
        weights_array = (np.ones(values_array.size) if weights is None
                         else np.asarray(weights, dtype=float).reshape(-1))
        if weights_array.size != values_array.size:
            raise ConformalDataError("values and weights differ in length")
        if np.any(weights_array < 0) or weights_array.sum() <= 0:
            raise ConformalDataError("weights must be nonnegative with positive total")

        atoms, inverse = np.unique(values_array, return_inverse=True)
        mass = np.bincount(inverse.reshape(-1), weights=weights_array, minlength=atoms.size)
        keep = mass > 0
        atoms, mass = atoms[keep], mass[keep]
        cum = np.cumsum(mass) / mass.sum()
        cum[-1] = 1.0
        # Float accumulation can repeat a level when a mass is tiny
        strict = np.concatenate(([True], np.diff(cum) > 0))
        return cls(atoms[strict], cum[strict])

    @classmethod
    def from_step(cls, step: StepFunction) -> 'StepCDF':
        """Convert a step function with limits 0 and 1 into a CDF"""
        if step.initial > TOL or step.terminal < 1 - TOL:
            raise ConformalDataError("step function does not have the limits of a CDF")
        return cls(step.jumps, step.levels)

    @property
    def cum(self) -> np.ndarray:
        """Cumulative probabilities at the jump points"""
        return self.levels

    @property
    def masses(self) -> np.ndarray:
        """Probability mass of each jump"""
        return np.diff(np.concatenate(([0.0], self.levels)))

    def quantile(self, alpha: ArrayLike) -> Union[float, np.ndarray]:
        """Generalised inverse inf{y : F(y) >= alpha} for alpha in (0, 1]"""
        alphas = np.asarray(alpha, dtype=float)
        if np.any(alphas <= 0) or np.any(alphas > 1):
            raise ValueError("alpha must lie in (0, 1]")
        index = np.searchsorted(self.levels, alphas - TOL, side='left')
        index = np.minimum(index, self.jumps.size - 1)
        result = self.jumps[index]
        if result.ndim == 0:
            return float(result)
        return result

    def mean(self) -> float:
        """Expectation of the distribution"""
        return float(np.dot(self.jumps, self.masses))

    def to_dict(self) -> Dict[str, Any]:
        """Serialize as ``{jumps, cum}``"""
        return {'jumps': self.jumps.tolist(), 'cum': self.levels.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'StepCDF':
        """Rebuild from ``to_dict`` output"""
        try:
            return cls(data['jumps'], data['cum'])
        except KeyError as e:
            raise ConformalDataError(f"serialized CDF is missing field {e}")


def cdf_eval(cdf: StepCDF, y: ArrayLike, side: str = 'right') -> Union[float, np.ndarray]:
    """Exact F(y) (side='right') or left limit F(y-) (side='left')"""
    return cdf.evaluate(y, side)
