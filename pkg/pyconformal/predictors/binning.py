#!/usr/bin/env python3
"""
pyconformal Conformal Binning

Auto-calibrated conformal binning: bins are built from the covariate
(1-D k-means or level sets of an isotonic mean regression), calibration
outcomes are collected per bin, and the band of a test covariate is the
covariate-free conformal band of its bin.
"""

from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.optimize import isotonic_regression
from sklearn.cluster import KMeans
from sklearn.model_selection import KFold

from ..exceptions import ConformalDataError, EmptyBinError
from ..models import (
    FLAG_EMPTY_BIN_FALLBACK,
    PredictiveBand,
    Prediction,
    StepCDF,
    WeightedSample,
    band_from_counts,
)
from ..utils import TOL, as_float_array, emit_diagnostic

BIN_METHODS = ('kmeans', 'isomean')


class BinModel:
    """
    Partition of the real line into k bins

    kmeans bins are given by sorted centers (nearest center wins, ties go to
    the smaller center); isomean bins by sorted cut points (a covariate equal
    to a cut point belongs to the lower bin).
    """

    def __init__(self, method: str, centers: Optional[Sequence[float]] = None,
                 boundaries: Optional[Sequence[float]] = None, objective: Optional[float] = None):
        if method not in BIN_METHODS:
            raise ValueError(f"method must be one of {BIN_METHODS}")
        self.method = method
        self.objective = objective
        if method == 'kmeans':
            if centers is None or len(centers) == 0:
                raise ValueError("kmeans bins need at least one center")
            self.centers = np.asarray(centers, dtype=float)
            if np.any(np.diff(self.centers) <= 0):
                raise ValueError("centers must be strictly increasing")
            self.boundaries = (self.centers[:-1] + self.centers[1:]) / 2.0
        else:
            self.centers = None
            self.boundaries = np.asarray(boundaries if boundaries is not None else [], dtype=float)
            if np.any(np.diff(self.boundaries) <= 0):
                raise ValueError("boundaries must be strictly increasing")

    @property
    def k(self) -> int:
        """Number of bins"""
        return int(self.boundaries.size + 1)

    def assign(self, xs: Sequence[float]) -> np.ndarray:
        """Bin index of each covariate"""
        return np.searchsorted(self.boundaries, np.asarray(xs, dtype=float), side='left')

    def populated_bins(self, xs: Sequence[float]) -> np.ndarray:
        """Sorted indices of the bins that hold at least one of the covariates"""
        return np.unique(self.assign(xs))

    def __repr__(self) -> str:
        if self.method == 'kmeans':
            return f"BinModel(method='kmeans', centers={self.centers.tolist()})"
        return f"BinModel(method='isomean', boundaries={self.boundaries.tolist()})"

    def to_dict(self) -> Dict[str, object]:
        return {
            'method': self.method,
            'k': self.k,
            'centers': None if self.centers is None else self.centers.tolist(),
            'boundaries': self.boundaries.tolist(),
            'objective': self.objective,
        }


def kmeans_objective(xs: Sequence[float], centers: Sequence[float]) -> float:
    """Within-cluster sum of squared distances to the nearest center"""
    points = np.asarray(xs, dtype=float)
    model = BinModel('kmeans', centers=np.sort(np.asarray(centers, dtype=float)))
    return float(np.sum((points - model.centers[model.assign(points)]) ** 2))


def kmeans_1d(xs: Sequence[float], k: int, restarts: int = 10, seed: int = 0) -> BinModel:
    """
    Seeded 1-D k-means with k-means++ starts and Lloyd iterations

    Args:
        xs: Covariates
        k: Number of bins, at most the number of distinct covariates
        restarts: Number of k-means++ restarts; the lowest objective wins
        seed: Random seed

    Returns:
        BinModel with sorted centers
    """
    points = as_float_array(xs, 'covariates')
    distinct = np.unique(points)
    if k < 1:
        raise ValueError("k must be positive")
    if restarts < 1:
        raise ValueError("restarts must be positive")
    if k > distinct.size:
        raise ConformalDataError(
            f"k={k} exceeds the number of distinct covariates ({distinct.size})")

    if k == distinct.size:
        centers = distinct
    else:
        estimator = KMeans(n_clusters=k, init='k-means++', n_init=restarts, max_iter=300,
                           tol=0.0, random_state=seed, algorithm='lloyd')
        estimator.fit(points.reshape(-1, 1))
        centers = np.unique(estimator.cluster_centers_.reshape(-1))
    return BinModel('kmeans', centers=centers, objective=kmeans_objective(points, centers))


def isomean_bins(estimation: WeightedSample) -> BinModel:
    """
    Bins from the level sets of an increasing isotonic mean regression

    Tied covariates are pooled first; cut points are the midpoints between
    the extreme covariates of adjacent level sets.
    """
    if estimation is None or len(estimation) == 0:
        raise ConformalDataError("isotonic binning needs a nonempty sample")
    positive = estimation.weights > 0
    covariates = estimation.covariates[positive]
    groups, group_of = np.unique(covariates, return_inverse=True)
    group_of = group_of.reshape(-1)
    weights = np.bincount(group_of, weights=estimation.weights[positive], minlength=groups.size)
    sums = np.bincount(group_of, weights=(estimation.weights * estimation.outcomes)[positive],
                       minlength=groups.size)
    if groups.size == 1:
        return BinModel('isomean', boundaries=[])

    fitted = isotonic_regression(sums / weights, weights=weights, increasing=True).x
    scale = max(1.0, float(np.max(np.abs(fitted))))
    breaks = np.flatnonzero(np.diff(fitted) > TOL * scale)
    boundaries = (groups[breaks] + groups[breaks + 1]) / 2.0
    return BinModel('isomean', boundaries=boundaries)


def assign_bin(model: BinModel, x: float) -> int:
    """Bin index of a single covariate"""
    return int(model.assign([x])[0])


def nearest_populated_bin(model: BinModel, index: int, populated: Sequence[int]) -> int:
    """Closest populated bin by index distance, ties to the lower bin"""
    candidates = np.asarray(populated, dtype=int)
    if candidates.size == 0:
        raise EmptyBinError("no bin holds calibration outcomes")
    distance = np.abs(candidates - index)
    return int(candidates[np.argmin(distance)])


def cb_band(bin_outcomes: Sequence[float]) -> PredictiveBand:
    """Conformal band of a bin with b outcomes: #/(b+1) below, (#+1)/(b+1) above"""
    outcomes = np.asarray(bin_outcomes, dtype=float).reshape(-1)
    if outcomes.size == 0:
        raise EmptyBinError("the bin holds no calibration outcomes")
    return band_from_counts(outcomes, outcomes.size + 1.0)


def cb_crisp(bin_outcomes: Sequence[float]) -> StepCDF:
    """Empirical CDF of the bin outcomes"""
    outcomes = np.asarray(bin_outcomes, dtype=float).reshape(-1)
    if outcomes.size == 0:
        raise EmptyBinError("the bin holds no calibration outcomes")
    return StepCDF.from_atoms(outcomes)


def binning_procedure(model: BinModel, sample: WeightedSample) -> Dict[int, StepCDF]:
    """Per-bin weighted empirical CDFs: the forecast issued to every point of a bin"""
    bins = model.assign(sample.covariates)
    forecasts = {}
    for index in np.unique(bins):
        members = bins == index
        if sample.weights[members].sum() > 0:
            forecasts[int(index)] = StepCDF.from_atoms(sample.outcomes[members], sample.weights[members])
    return forecasts


class ConformalBinning:
    """
    Conformal binning predictor: a bin model filled with calibration outcomes

    Example:
        model = kmeans_1d(estimation.covariates, k=10, seed=1)
        predictor = ConformalBinning(model, calibration)
        prediction = predictor.predict(4.2)
    """

    def __init__(self, model: BinModel, calibration: WeightedSample):
        self.model = model
        bins = model.assign(calibration.covariates)
        self.bin_outcomes: Dict[int, np.ndarray] = {
            int(index): np.sort(calibration.outcomes[bins == index]) for index in np.unique(bins)
        }
        self.populated = np.array(sorted(self.bin_outcomes), dtype=int)

    def outcomes_for(self, x: float, fallback: bool = False):
        """Calibration outcomes of the bin of x and the bin actually used"""
        index = assign_bin(self.model, x)
        if index in self.bin_outcomes:
            return self.bin_outcomes[index], index, False
        if not fallback:
            raise EmptyBinError(f"covariate {x:g} falls in bin {index}, which holds no calibration outcomes")
        used = nearest_populated_bin(self.model, index, self.populated)
        emit_diagnostic(f"empty bin {index}; falling back to nearest populated bin {used}")
        return self.bin_outcomes[used], used, True

    def predict(self, x: float, fallback: bool = False) -> Prediction:
        """Band, empirical crisp CDF, thickness and class for one covariate"""
        outcomes, _, fell_back = self.outcomes_for(x, fallback)
        flags = [FLAG_EMPTY_BIN_FALLBACK] if fell_back else []
        return Prediction.from_band(cb_band(outcomes), cb_crisp(outcomes), flags)

    def predict_many(self, xs: Sequence[float], fallback: bool = False) -> List[Prediction]:
        """Predictions in input order; one computation per bin"""
        cache: Dict[int, Prediction] = {}
        predictions = []
        for x, index in zip(np.asarray(xs, dtype=float), self.model.assign(xs)):
            key = int(index)
            if key not in cache:
                cache[key] = self.predict(float(x), fallback)
            predictions.append(cache[key])
        return predictions


def select_k_cv(xs: Sequence[float], ys: Sequence[float], candidates: Sequence[int],
                folds: int = 5, seed: int = 0, restarts: int = 10) -> int:
    """
    Choose the number of k-means bins by cross-validated mean CRPS

    Each candidate is scored by the mean CRPS of the bin empirical CDF on
    held-out folds (empty bins fall back to the nearest populated bin).
    Ties go to the smaller k.
    """
    from ..evaluation import crps

    points = as_float_array(xs, 'covariates')
    outcomes = as_float_array(ys, 'outcomes')
    if points.size != outcomes.size:
        raise ConformalDataError("covariates and outcomes differ in length")
    if folds < 2 or points.size < folds:
        raise ConformalDataError(f"cannot run {folds}-fold cross-validation on {points.size} points")

    splitter = KFold(n_splits=folds, shuffle=True, random_state=seed)
    splits = list(splitter.split(points))
    scores: Dict[int, float] = {}
    for k in sorted(set(int(candidate) for candidate in candidates)):
        total, count = 0.0, 0
        for train_index, test_index in splits:
            if k > np.unique(points[train_index]).size:
                break
            model = kmeans_1d(points[train_index], k, restarts, seed)
            bins = model.assign(points[train_index])
            populated = np.unique(bins)
            crisp = {int(index): StepCDF.from_atoms(outcomes[train_index][bins == index])
                     for index in populated}
            for index, y in zip(model.assign(points[test_index]), outcomes[test_index]):
                index = int(index)
                if index not in crisp:
                    index = nearest_populated_bin(model, index, populated)
                total += crps(crisp[index], float(y))
                count += 1
        else:
            scores[k] = total / count
    if not scores:
        raise ConformalDataError("no candidate k is feasible for cross-validation")
    return min(scores, key=lambda k: (scores[k], k))
