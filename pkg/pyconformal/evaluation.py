#!/usr/bin/env python3
"""
pyconformal Evaluation

Scoring and calibration diagnostics for step-CDF forecasts: exact CRPS,
randomized PIT, p-p curves with consistency bands, CORP reliability curves,
thickness summaries and in-sample calibration checks.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy import stats
from scipy.optimize import isotonic_regression

from .exceptions import ConformalAlignmentError, ConformalDataError
from .isotonic import IdrFit
from .models import EpistemicClass, StepCDF, StepFunction, WeightedSample, epistemic_class
from .predictors.binning import BinModel, binning_procedure
from .utils import TOL

RELIABILITY_QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)
HISTOGRAM_BINS = 10


def crps(cdf: StepFunction, y: float) -> float:
    """
    Continuous ranked probability score of a step CDF at outcome y

    The integrand (F(z) - 1{z >= y})**2 is constant between consecutive
    points of the jump set augmented with y and vanishes outside them.
    """
    points = np.union1d(cdf.jumps, [float(y)])
    if points.size < 2:
        return 0.0
    left = points[:-1]
    values = cdf.evaluate(left)
    indicator = (left >= y).astype(float)
    return float(np.sum((values - indicator) ** 2 * np.diff(points)))


def pit(cdf: StepFunction, y: float, v: float) -> float:
    """Randomized PIT F(y-) + v (F(y) - F(y-))"""
    if not 0.0 <= v <= 1.0:
        raise ConformalDataError(f"randomization draw must lie in [0, 1], got {v!r}")
    left = cdf.evaluate(y, 'left')
    return float(left + v * (cdf.evaluate(y, 'right') - left))


def default_pp_grid(size: int = 99) -> np.ndarray:
    """Equally spaced levels j/(size + 1), j = 1..size"""
    return np.arange(1, size + 1) / (size + 1.0)


class PPCurve:
    """ECDF of PIT values on a grid of levels with a consistency band around the diagonal"""

    def __init__(self, alpha: np.ndarray, ecdf: np.ndarray, band_lo: np.ndarray,
                 band_hi: np.ndarray, band_level: float, band_type: str):
        self.alpha = alpha
        self.ecdf = ecdf
        self.band_lo = band_lo
        self.band_hi = band_hi
        self.band_level = band_level
        self.band_type = band_type

    @property
    def inside(self) -> np.ndarray:
        """Whether the ECDF lies inside the band at each level"""
        return (self.ecdf >= self.band_lo - TOL) & (self.ecdf <= self.band_hi + TOL)

    @property
    def coverage(self) -> float:
        """Share of grid levels at which the ECDF lies inside the band"""
        return float(np.mean(self.inside))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'alpha': self.alpha,
            'ecdf': self.ecdf,
            'band_lo': self.band_lo,
            'band_hi': self.band_hi,
        })


def pp_curve(pits: Sequence[float], grid: Optional[Sequence[float]] = None,
             band_level: float = 0.9, band_type: str = 'pointwise') -> PPCurve:
    """
    p-p curve of PIT values with a consistency band

    Args:
        pits: PIT values in [0, 1]
        grid: Levels in (0, 1); defaults to 0.01, ..., 0.99
        band_level: Coverage level of the band
        band_type: 'pointwise' for Binomial(m, alpha)/m quantiles, 'ks' for a
            simultaneous Kolmogorov-Smirnov band

    Returns:
        PPCurve
    """
    values = np.asarray(pits, dtype=float).reshape(-1)
    if values.size == 0:
        raise ConformalDataError("p-p curve needs at least one PIT value")
    if np.any(values < 0) or np.any(values > 1):
        raise ConformalDataError("PIT values must lie in [0, 1]")
    if not 0 < band_level < 1:
        raise ValueError("band_level must lie in (0, 1)")
    alpha = default_pp_grid() if grid is None else np.asarray(grid, dtype=float)

    m = values.size
    ecdf = np.searchsorted(np.sort(values), alpha, side='right') / m
    if band_type == 'pointwise':
        band_lo = stats.binom.ppf((1 - band_level) / 2, m, alpha) / m
        band_hi = stats.binom.ppf((1 + band_level) / 2, m, alpha) / m
    elif band_type == 'ks':
        radius = stats.kstwo.ppf(band_level, m)
        band_lo = np.clip(alpha - radius, 0.0, 1.0)
        band_hi = np.clip(alpha + radius, 0.0, 1.0)
    else:
        raise ValueError("band_type must be 'pointwise' or 'ks'")
    return PPCurve(alpha, ecdf, band_lo, band_hi, band_level, band_type)


def ks_uniformity_pvalue(pits: Sequence[float]) -> float:
    """Kolmogorov-Smirnov p-value of PIT values against the standard uniform"""
    return float(stats.kstest(np.asarray(pits, dtype=float), 'uniform').pvalue)


class ReliabilityCurve:
    """CORP reliability curve: recalibrated event frequency per distinct forecast probability"""

    def __init__(self, forecast: np.ndarray, frequency: np.ndarray, weight: np.ndarray):
        self.forecast = forecast
        self.frequency = frequency
        self.weight = weight

    @property
    def deviation(self) -> float:
        """Largest absolute distance from the diagonal"""
        return reliability_deviation(self)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'forecast_prob': self.forecast, 'frequency': self.frequency})


def corp_reliability(forecast_probs: Sequence[float], events: Sequence[float],
                     weights: Optional[Sequence[float]] = None) -> ReliabilityCurve:
    """
    Increasing isotonic regression of binary events on forecast probabilities

    Tied forecast probabilities are pooled before the projection.
    """
    probs = np.asarray(forecast_probs, dtype=float).reshape(-1)
    outcomes = np.asarray(events, dtype=float).reshape(-1)
    if probs.size != outcomes.size:
        raise ConformalAlignmentError(
            f"forecast probabilities ({probs.size}) and events ({outcomes.size}) differ in length")
    if probs.size == 0:
        raise ConformalDataError("reliability curve needs at least one forecast")
    w = np.ones(probs.size) if weights is None else np.asarray(weights, dtype=float)

    forecast, inverse = np.unique(probs, return_inverse=True)
    inverse = inverse.reshape(-1)
    pooled_weight = np.bincount(inverse, weights=w, minlength=forecast.size)
    pooled_mean = np.bincount(inverse, weights=w * outcomes, minlength=forecast.size) / pooled_weight
    frequency = isotonic_regression(pooled_mean, weights=pooled_weight, increasing=True).x
    return ReliabilityCurve(forecast, np.clip(frequency, 0.0, 1.0), pooled_weight)


def reliability_deviation(curve: ReliabilityCurve) -> float:
    """Max absolute deviation of a CORP curve from the diagonal"""
    return float(np.max(np.abs(curve.frequency - curve.forecast)))


def reliability_thresholds(outcomes: Sequence[float],
                           quantiles: Sequence[float] = RELIABILITY_QUANTILES) -> np.ndarray:
    """Thresholds at percentiles of the observed outcomes"""
    return np.quantile(np.asarray(outcomes, dtype=float), quantiles)


def threshold_reliability(cdfs: Sequence[StepFunction], outcomes: Sequence[float],
                          quantiles: Sequence[float] = RELIABILITY_QUANTILES) -> List[Dict[str, Any]]:
    """CORP curves of the events {Y <= t} against F(t) at outcome-percentile thresholds"""
    ys = np.asarray(outcomes, dtype=float)
    if len(cdfs) != ys.size:
        raise ConformalAlignmentError(f"{len(cdfs)} forecasts but {ys.size} outcomes")
    results = []
    for quantile, threshold in zip(quantiles, reliability_thresholds(ys, quantiles)):
        probs = np.array([cdf.evaluate(threshold) for cdf in cdfs])
        curve = corp_reliability(probs, (ys <= threshold).astype(float))
        results.append({'quantile': float(quantile), 'threshold': float(threshold), 'curve': curve})
    return results


def insample_autocal_check(bin_model: BinModel, sample: WeightedSample,
                           forecasts: Optional[Dict[int, StepCDF]] = None) -> float:
    """
    Max discrepancy between per-bin forecasts and per-bin weighted empirical CDFs

    Args:
        bin_model: Bins of the procedure
        sample: In-sample data
        forecasts: Forecast CDF per bin index (the binning procedure if None)

    Returns:
        Largest absolute CDF difference over all bins; 0 for an auto-calibrated procedure
    """
    if forecasts is None:
        forecasts = binning_procedure(bin_model, sample)
    bins = bin_model.assign(sample.covariates)
    discrepancy = 0.0
    for index in np.unique(bins):
        members = bins == index
        if sample.weights[members].sum() <= 0:
            continue
        if int(index) not in forecasts:
            raise ConformalDataError(f"sample points fall in bin {int(index)} without a forecast")
        forecast = forecasts[int(index)]
        empirical = StepCDF.from_atoms(sample.outcomes[members], sample.weights[members])
        points = np.union1d(forecast.jumps, empirical.jumps)
        discrepancy = max(discrepancy, float(np.max(np.abs(forecast(points) - empirical(points)))))
    return discrepancy


def insample_isocal_check(fit: IdrFit, sample: WeightedSample) -> float:
    """
    Max deviation between fitted values and weighted indicator means on level sets

    For every threshold each maximal run of equal fitted values (a level set
    of the fitted column) must carry the weighted mean of the indicators of
    its groups. Returns 0 for a correct IDR fit.
    """
    positive = sample.weights > 0
    groups, group_of = np.unique(sample.covariates[positive], return_inverse=True)
    thresholds, threshold_of = np.unique(sample.outcomes[positive], return_inverse=True)
    if (groups.size != fit.groups.size or thresholds.size != fit.thresholds.size
            or np.any(groups != fit.groups) or np.any(thresholds != fit.thresholds)):
        raise ConformalDataError("IDR fit was not produced from this sample")

    mass = np.zeros((groups.size, thresholds.size))
    np.add.at(mass, (group_of.reshape(-1), threshold_of.reshape(-1)), sample.weights[positive])
    weights = mass.sum(axis=1)
    indicators = np.cumsum(mass, axis=1) / weights[:, None]

    discrepancy = 0.0
    for t in range(thresholds.size):
        column = fit.cdf_matrix[:, t]
        starts = np.concatenate(([0], np.flatnonzero(np.abs(np.diff(column)) > 1e-10) + 1))
        block = np.repeat(np.arange(starts.size), np.diff(np.append(starts, column.size)))
        block_weight = np.bincount(block, weights=weights)
        block_mean = np.bincount(block, weights=weights * indicators[:, t]) / block_weight
        discrepancy = max(discrepancy, float(np.max(np.abs(block_mean[block] - column))))
    return discrepancy


def pit_inequality_gap(cdfs: Sequence[StepFunction], outcomes: Sequence[float],
                       weights: Optional[Sequence[float]] = None,
                       alphas: Optional[Sequence[float]] = None) -> float:
    """
    Largest violation of P(F(Y) < a) <= a <= P(F(Y-) <= a) under the sample measure

    Returns 0 when the forecasts are probabilistically calibrated in sample
    at every level in ``alphas`` (default j/m for a sample of size m).
    """
    ys = np.asarray(outcomes, dtype=float)
    if len(cdfs) != ys.size:
        raise ConformalAlignmentError(f"{len(cdfs)} forecasts but {ys.size} outcomes")
    w = np.ones(ys.size) if weights is None else np.asarray(weights, dtype=float)
    w = w / w.sum()
    levels = np.arange(1, ys.size + 1) / ys.size if alphas is None else np.asarray(alphas, dtype=float)

    right = np.array([cdf.evaluate(y) for cdf, y in zip(cdfs, ys)])
    left = np.array([cdf.evaluate(y, 'left') for cdf, y in zip(cdfs, ys)])
    gap = 0.0
    for alpha in levels:
        below = np.sum(w[right < alpha - TOL])
        at_most = np.sum(w[left <= alpha + TOL])
        gap = max(gap, below - alpha, alpha - at_most)
    return float(max(gap, 0.0))


def thickness_histogram(thickness: Sequence[float], bins: int = HISTOGRAM_BINS) -> pd.DataFrame:
    """Counts of thickness values in equal-width bins on [0, 1]"""
    counts, edges = np.histogram(np.clip(np.asarray(thickness, dtype=float), 0.0, 1.0),
                                 bins=bins, range=(0.0, 1.0))
    return pd.DataFrame({'bin_lo': edges[:-1], 'bin_hi': edges[1:], 'count': counts})


class MethodSummary:
    """Evaluation results of one predictive system"""

    def __init__(self,
                 method: str,
                 crps_values: np.ndarray,
                 pits: np.ndarray,
                 pp: PPCurve,
                 reliability: List[Dict[str, Any]],
                 thickness: np.ndarray,
                 traffic_light: Dict[str, int],
                 flagged: int = 0):
        self.method = method
        self.crps_values = crps_values
        self.pits = pits
        self.pp = pp
        self.reliability = reliability
        self.thickness = thickness
        self.traffic_light = traffic_light
        self.flagged = flagged

    @property
    def n(self) -> int:
        return int(self.crps_values.size)

    @property
    def mean_crps(self) -> float:
        return float(np.mean(self.crps_values))

    @property
    def mean_thickness(self) -> float:
        return float(np.mean(self.thickness))

    @property
    def max_thickness(self) -> float:
        return float(np.max(self.thickness))

    @property
    def mean_reliability_deviation(self) -> float:
        """Max CORP deviation from the diagonal, averaged over thresholds"""
        return float(np.mean([entry['curve'].deviation for entry in self.reliability]))

    def summary_row(self) -> Dict[str, Any]:
        row = {
            'method': self.method,
            'n': self.n,
            'mean_crps': self.mean_crps,
            'mean_thickness': self.mean_thickness,
            'max_thickness': self.max_thickness,
            'pp_coverage': self.pp.coverage,
            'ks_pvalue': ks_uniformity_pvalue(self.pits),
            'mean_reliability_deviation': self.mean_reliability_deviation,
            'flagged': self.flagged,
        }
        for tag in EpistemicClass:
            row[tag.value] = self.traffic_light.get(tag.value, 0)
        return row

    def to_dict(self) -> Dict[str, Any]:
        data = self.summary_row()
        data['pit'] = self.pits.tolist()
        data['pp_curve'] = self.pp.to_frame().to_dict(orient='list')
        data['band_level'] = self.pp.band_level
        data['band_type'] = self.pp.band_type
        data['reliability'] = [
            {
                'quantile': entry['quantile'],
                'threshold': entry['threshold'],
                'forecast_prob': entry['curve'].forecast.tolist(),
                'frequency': entry['curve'].frequency.tolist(),
                'deviation': entry['curve'].deviation,
            }
            for entry in self.reliability
        ]
        data['thickness_histogram'] = thickness_histogram(self.thickness)['count'].tolist()
        return data


class ForecastEvaluator:
    """
    Streaming accumulator of (crisp CDF, outcome, thickness) records for one method

    One uniform randomization draw is taken per record, in record order, from
    a generator seeded with ``pit_seed``.

    Example:
        evaluator = ForecastEvaluator('cidr', thresholds, pit_seed=12345)
        for prediction, y in zip(predictions, outcomes):
            evaluator.add(prediction.cdf, y, prediction.thickness)
        summary = evaluator.summary()
    """

    def __init__(self, method: str, thresholds: Sequence[float],
                 quantiles: Sequence[float] = RELIABILITY_QUANTILES,
                 pit_seed: int = 12345, pp_grid: Optional[Sequence[float]] = None,
                 band_level: float = 0.9, band_type: str = 'pointwise'):
        self.method = method
        self.thresholds = np.asarray(thresholds, dtype=float)
        self.quantiles = list(quantiles)
        if self.thresholds.size != len(self.quantiles):
            raise ValueError("thresholds and quantiles differ in length")
        self.pp_grid = default_pp_grid() if pp_grid is None else np.asarray(pp_grid, dtype=float)
        self.band_level = band_level
        self.band_type = band_type
        self._rng = np.random.Generator(np.random.PCG64(pit_seed))
        self._crps: List[float] = []
        self._pits: List[float] = []
        self._probs: List[np.ndarray] = []
        self._events: List[np.ndarray] = []
        self._thickness: List[float] = []
        self._classes: Dict[str, int] = {tag.value: 0 for tag in EpistemicClass}
        self._flagged = 0

    def add(self, cdf: StepFunction, y: float, thickness: float,
            epistemic: Optional[EpistemicClass] = None, flagged: bool = False) -> None:
        """Score one record"""
        self._crps.append(crps(cdf, y))
        self._pits.append(pit(cdf, y, float(self._rng.uniform())))
        self._probs.append(np.asarray(cdf.evaluate(self.thresholds), dtype=float))
        self._events.append((y <= self.thresholds).astype(float))
        self._thickness.append(float(thickness))
        tag = epistemic if epistemic is not None else epistemic_class(thickness)
        self._classes[tag.value] += 1
        self._flagged += int(flagged)

    def __len__(self) -> int:
        return len(self._crps)

    def summary(self) -> MethodSummary:
        """Aggregate the records added so far"""
        if not self._crps:
            raise ConformalDataError(f"no records were evaluated for method {self.method!r}")
        probs = np.vstack(self._probs)
        events = np.vstack(self._events)
        reliability = [
            {
                'quantile': float(quantile),
                'threshold': float(threshold),
                'curve': corp_reliability(probs[:, j], events[:, j]),
            }
            for j, (quantile, threshold) in enumerate(zip(self.quantiles, self.thresholds))
        ]
        pits = np.asarray(self._pits)
        return MethodSummary(
            method=self.method,
            crps_values=np.asarray(self._crps),
            pits=pits,
            pp=pp_curve(pits, self.pp_grid, self.band_level, self.band_type),
            reliability=reliability,
            thickness=np.asarray(self._thickness),
            traffic_light=dict(self._classes),
            flagged=self._flagged,
        )


class EvalReport:
    """Per-method evaluation summaries plus run metadata"""

    def __init__(self, summaries: Dict[str, MethodSummary], metadata: Optional[Dict[str, Any]] = None):
        self.summaries = summaries
        self.metadata = dict(metadata or {})

    def mean_crps(self, method: str) -> float:
        return self.summaries[method].mean_crps

    def to_dict(self) -> Dict[str, Any]:
        return {
            'metadata': self.metadata,
            'methods': {name: summary.to_dict() for name, summary in self.summaries.items()},
        }

    def to_json(self) -> str:
        """Deterministic JSON rendering"""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def summary_frame(self) -> pd.DataFrame:
        return pd.DataFrame([summary.summary_row() for summary in self.summaries.values()])

    def write(self, directory: Union[str, Path]) -> List[Path]:
        """Write report.json and the CSV plot tables into a directory"""
        target = Path(directory)
        target.mkdir(parents=True, exist_ok=True)
        report_path = target / 'report.json'
        report_path.write_text(self.to_json() + '\n', encoding='utf-8')
        return [report_path] + self.write_tables(target)

    def write_tables(self, directory: Union[str, Path]) -> List[Path]:
        """Write crps_summary, pp_curve, reliability and thickness_histogram CSV tables"""
        target = Path(directory)
        target.mkdir(parents=True, exist_ok=True)
        pp_frames, reliability_frames, histogram_frames = [], [], []
        for name, summary in self.summaries.items():
            pp_frames.append(summary.pp.to_frame().assign(method=name))
            for entry in summary.reliability:
                reliability_frames.append(entry['curve'].to_frame().assign(
                    method=name, quantile=entry['quantile'], threshold=entry['threshold']))
            histogram_frames.append(thickness_histogram(summary.thickness).assign(method=name))

        tables = {
            'crps_summary.csv': self.summary_frame(),
            'pp_curve.csv': pd.concat(pp_frames, ignore_index=True)[
                ['method', 'alpha', 'ecdf', 'band_lo', 'band_hi']],
            'reliability.csv': pd.concat(reliability_frames, ignore_index=True)[
                ['method', 'quantile', 'threshold', 'forecast_prob', 'frequency']],
            'thickness_histogram.csv': pd.concat(histogram_frames, ignore_index=True)[
                ['method', 'bin_lo', 'bin_hi', 'count']],
        }
        paths = []
        for filename, frame in tables.items():
            path = target / filename
            frame.to_csv(path, index=False, lineterminator='\n')
            paths.append(path)
        return paths
