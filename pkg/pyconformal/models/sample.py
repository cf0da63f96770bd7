#!/usr/bin/env python3
"""
Weighted Sample Models for pyconformal

A finite measure on covariate/outcome pairs, given as weighted points.
"""

from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import ConformalDataError
from ..utils import as_float_array, as_weight_array


class WeightedSample:
    """Covariate/outcome/weight triples with positive total weight"""

    def __init__(self,
                 covariates: Sequence[float],
                 outcomes: Sequence[float],
                 weights: Optional[Sequence[float]] = None):
        covariates_array = as_float_array(covariates, 'covariates')
        outcomes_array = as_float_array(outcomes, 'outcomes')
        if covariates_array.size != outcomes_array.size:
            raise ConformalDataError(
                f"covariates and outcomes differ in length "
                f"({covariates_array.size} != {outcomes_array.size})")
        weights_array = as_weight_array(weights, covariates_array.size)
        if weights_array.sum() <= 0:
            raise ConformalDataError("total weight must be positive")

        for array in (covariates_array, outcomes_array, weights_array):
            array.setflags(write=False)
        self._covariates = covariates_array
        self._outcomes = outcomes_array
        self._weights = weights_array

    @classmethod
    def from_points(cls, points: Sequence[Tuple[float, ...]]) -> 'WeightedSample':
        """Build from (x, y) or (x, y, weight) tuples"""
        if len(points) == 0:
            raise ConformalDataError("a sample needs at least one point")
        xs = [point[0] for point in points]
        ys = [point[1] for point in points]
        ws = [point[2] if len(point) > 2 else 1.0 for point in points]
        return cls(xs, ys, ws)

    @property
    def covariates(self) -> np.ndarray:
        """Covariate values"""
        return self._covariates

    @property
    def outcomes(self) -> np.ndarray:
        """Outcome values"""
        return self._outcomes

    @property
    def weights(self) -> np.ndarray:
        """Point weights"""
        return self._weights

    @property
    def total_weight(self) -> float:
        """Sum of the point weights"""
        return float(self._weights.sum())

    @property
    def outcome_range(self) -> Tuple[float, float]:
        """Smallest and largest outcome"""
        return float(self._outcomes.min()), float(self._outcomes.max())

    @property
    def points(self) -> Iterator[Tuple[float, float, float]]:
        """Iterate over (x, y, weight) triples"""
        for x, y, w in zip(self._covariates, self._outcomes, self._weights):
            yield float(x), float(y), float(w)

    def __len__(self) -> int:
        return int(self._covariates.size)

    def __repr__(self) -> str:
        return f"WeightedSample(n={len(self)}, total_weight={self.total_weight:g})"

    def augmented(self, x: float, y: float, weight: float = 1.0) -> 'WeightedSample':
        """Return a copy with one more point appended last"""
        return WeightedSample(
            np.append(self._covariates, x),
            np.append(self._outcomes, y),
            np.append(self._weights, weight),
        )

    def subset(self, indices: Sequence[int]) -> 'WeightedSample':
        """Return the sample restricted to the given point indices"""
        index = np.asarray(indices, dtype=int)
        return WeightedSample(self._covariates[index], self._outcomes[index], self._weights[index])

    def with_outcomes(self, outcomes: Sequence[float]) -> 'WeightedSample':
        """Return the sample with the outcomes replaced"""
        return WeightedSample(self._covariates, outcomes, self._weights)
