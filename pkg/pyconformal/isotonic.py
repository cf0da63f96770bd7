#!/usr/bin/env python3
"""
pyconformal Isotonic Regression

Weighted pool-adjacent-violators projection and isotonic distributional
regression (IDR) on a totally ordered real covariate.
"""

from typing import Optional, Sequence

import numpy as np
from scipy.optimize import isotonic_regression

from .exceptions import ConformalDataError
from .models import StepCDF, WeightedSample
from .utils import TOL, as_float_array, as_weight_array

DIRECTIONS = ('increasing', 'decreasing')


def pava(values: Sequence[float], weights: Optional[Sequence[float]] = None,
         direction: str = 'increasing') -> np.ndarray:
    """
    Weighted least-squares projection onto the monotone cone

    Args:
        values: Values to project
        weights: Positive weights (unit weights if None)
        direction: 'increasing' or 'decreasing'

    Returns:
        Fitted values; each level set carries the weighted mean of its members
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    y = as_float_array(values, 'values')
    w = as_weight_array(weights, y.size, positive=True)
    result = isotonic_regression(y, weights=w, increasing=direction == 'increasing')
    return np.asarray(result.x, dtype=float)


def weighted_empirical_cdf(outcomes: Sequence[float], weights: Optional[Sequence[float]] = None) -> StepCDF:
    """Covariate-free forecast: the weighted empirical CDF of the outcomes"""
    return StepCDF.from_atoms(outcomes, weights)


class IdrFit:
    """
    Fitted isotonic distributional regression

    ``cdf_matrix[g, t]`` is the fitted CDF value at group covariate
    ``groups[g]`` and threshold ``thresholds[t]``. Rows are CDF value
    sequences; columns are nonincreasing in the covariate.
    """

    def __init__(self,
                 groups: np.ndarray,
                 group_weights: np.ndarray,
                 thresholds: np.ndarray,
                 cdf_matrix: np.ndarray,
                 indicator_means: np.ndarray):
        self.groups = groups
        self.group_weights = group_weights
        self.thresholds = thresholds
        self.cdf_matrix = cdf_matrix
        self.indicator_means = indicator_means
        for array in (groups, group_weights, thresholds, cdf_matrix, indicator_means):
            array.setflags(write=False)

    @property
    def n_groups(self) -> int:
        return int(self.groups.size)

    def group_index(self, x: float) -> int:
        """Index of the group with covariate exactly x"""
        index = int(np.searchsorted(self.groups, x))
        if index >= self.groups.size or self.groups[index] != x:
            raise ConformalDataError(f"covariate {x!r} is not among the fitted covariates")
        return index

    def cdf_at(self, x: float) -> StepCDF:
        """Shortcut for ``idr_cdf_at(self, x)``"""
        return idr_cdf_at(self, x)

    def row_cdf(self, index: int) -> StepCDF:
        """CDF of the group at the given row index"""
        row = np.maximum.accumulate(self.cdf_matrix[index])
        row[-1] = 1.0
        previous = np.concatenate(([0.0], row[:-1]))
        keep = row > previous + TOL
        return StepCDF(self.thresholds[keep], row[keep])

    def __repr__(self) -> str:
        return f"IdrFit(groups={self.groups.size}, thresholds={self.thresholds.size})"


def idr_fit(sample: WeightedSample) -> IdrFit:
    """
    Fit IDR to a weighted sample

    Tied covariates are pooled into one group; for every distinct outcome
    threshold t the group means of 1{y <= t} are projected onto the
    nonincreasing cone with the pooled group weights.
    """
    if sample is None or len(sample) == 0:
        raise ConformalDataError("cannot fit IDR to an empty sample")
    positive = sample.weights > 0
    covariates = sample.covariates[positive]
    outcomes = sample.outcomes[positive]
    weights = sample.weights[positive]

    groups, group_of = np.unique(covariates, return_inverse=True)
    thresholds, threshold_of = np.unique(outcomes, return_inverse=True)
    group_of = group_of.reshape(-1)
    threshold_of = threshold_of.reshape(-1)

    mass = np.zeros((groups.size, thresholds.size))
    np.add.at(mass, (group_of, threshold_of), weights)
    group_weights = mass.sum(axis=1)
    indicator_means = np.cumsum(mass, axis=1) / group_weights[:, None]
    indicator_means[:, -1] = 1.0

    if groups.size == 1:
        cdf_matrix = indicator_means.copy()
    else:
        cdf_matrix = np.empty_like(indicator_means)
        for t in range(thresholds.size):
            column = indicator_means[:, t]
            if column[0] == column[-1] and np.all(column == column[0]):
                cdf_matrix[:, t] = column
                continue
            cdf_matrix[:, t] = isotonic_regression(column, weights=group_weights, increasing=False).x

    cdf_matrix = np.clip(cdf_matrix, 0.0, 1.0)
    cdf_matrix[cdf_matrix > 1.0 - TOL] = 1.0
    return IdrFit(groups, group_weights, thresholds, cdf_matrix, indicator_means)


def idr_cdf_at(fit: IdrFit, x: float) -> StepCDF:
    """Fitted CDF at a covariate value that is one of the fitted group covariates"""
    return fit.row_cdf(fit.group_index(x))
