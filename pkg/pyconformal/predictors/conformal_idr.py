#!/usr/bin/env python3
"""
pyconformal Conformal IDR

Conformal isotonic distributional regression. The band at a new covariate
is computed from two IDR fits: the training sample augmented with the new
covariate and an outcome below every training outcome gives the upper
bound, an outcome above every training outcome gives the lower bound.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..exceptions import ConformalDataError
from ..isotonic import idr_fit
from ..models import (
    PredictiveBand,
    Prediction,
    StepFunction,
    WeightedSample,
    crisp_cdf,
)

DEFAULT_CUTOFF = 1.0


def _check_inputs(train: WeightedSample, x_new: float, cutoff: float) -> None:
    if train is None or len(train) == 0:
        raise ConformalDataError("conformal IDR needs a nonempty training sample")
    if not np.isfinite(x_new):
        raise ConformalDataError(f"test covariate must be finite, got {x_new!r}")
    if not cutoff > 0:
        raise ValueError("support cutoff C must be positive")


def _augmented_cdf(train: WeightedSample, x_new: float, y_new: float, weight: float):
    fit = idr_fit(train.augmented(x_new, y_new, weight))
    return fit.cdf_at(x_new)


def cidr_band(train: WeightedSample, x_new: float, C: float = DEFAULT_CUTOFF,
              weight: float = 1.0) -> PredictiveBand:
    """
    Conformal IDR band at x_new

    Args:
        train: Training (or calibration) sample
        x_new: Test covariate
        C: Support cutoff; the pseudo-outcomes are min y - C and max y + C
        weight: Weight of the augmented test point

    Returns:
        PredictiveBand over the training outcome range
    """
    _check_inputs(train, x_new, C)
    y_min, y_max = train.outcome_range
    upper = _augmented_cdf(train, x_new, y_min - C, weight)
    lower = _augmented_cdf(train, x_new, y_max + C, weight)
    return PredictiveBand(
        StepFunction(lower.jumps, lower.levels),
        StepFunction(upper.jumps, upper.levels),
        (y_min, y_max),
    )


def cidr_band_bruteforce(train: WeightedSample, x_new: float, y_grid: Sequence[float],
                         weight: float = 1.0) -> PredictiveBand:
    """
    Pointwise inf/sup of the IDR CDF at x_new over augmentations y' in y_grid

    One IDR fit per grid value; meant as a reference for ``cidr_band``.
    """
    grid = np.asarray(y_grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ConformalDataError("brute-force band needs a nonempty outcome grid")
    if train is None or len(train) == 0:
        raise ConformalDataError("conformal IDR needs a nonempty training sample")

    cdfs = [_augmented_cdf(train, x_new, y_prime, weight) for y_prime in grid]
    points = np.union1d(train.outcomes, grid)
    values = np.vstack([cdf(points) for cdf in cdfs])
    lower = StepFunction.from_values(points, values.min(axis=0))
    upper = StepFunction.from_values(points, values.max(axis=0))
    return PredictiveBand(lower, upper, train.outcome_range)


def cidr_predict(train: WeightedSample, x_new: float, C: float = DEFAULT_CUTOFF,
                 crisp: str = 'minimax') -> Prediction:
    """Band at x_new with its crisp CDF, thickness and traffic-light class"""
    band = cidr_band(train, x_new, C)
    return Prediction.from_band(band, crisp_cdf(band, crisp, C))


def insertion_key(groups: np.ndarray, x: float) -> Tuple[int, bool]:
    """Rank of x among the sorted distinct training covariates and whether it ties one"""
    position = int(np.searchsorted(groups, x, side='left'))
    tied = position < groups.size and groups[position] == x
    return position, bool(tied)


def cidr_predict_many(train: WeightedSample, xs_new: Sequence[float], C: float = DEFAULT_CUTOFF,
                      crisp: str = 'minimax', workers: int = 1) -> List[Prediction]:
    """
    Predictions for many test covariates, in input order

    The band depends on x_new only through its insertion rank among the
    training covariates, so one band is computed per distinct rank.
    """
    xs = np.asarray(xs_new, dtype=float).reshape(-1)
    groups = np.unique(train.covariates)
    keys = [insertion_key(groups, x) for x in xs]

    representatives: Dict[Tuple[int, bool], float] = {}
    for key, x in zip(keys, xs):
        representatives.setdefault(key, float(x))
    unique_keys = list(representatives)

    def predict(key: Tuple[int, bool]) -> Prediction:
        return cidr_predict(train, representatives[key], C, crisp)

    if workers > 1 and len(unique_keys) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            predictions = list(pool.map(predict, unique_keys))
    else:
        predictions = [predict(key) for key in unique_keys]

    by_key = dict(zip(unique_keys, predictions))
    return [by_key[key] for key in keys]
