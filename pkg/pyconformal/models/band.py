#!/usr/bin/env python3
"""
Predictive Band Models for pyconformal

A predictive band is a pair of nondecreasing step functions bracketing the
candidate predictive CDFs. This module also extracts crisp CDFs from bands
and measures band thickness.
"""

from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from ..exceptions import ConformalDataError, ConformalNumericError, CrispCutoffError
from ..utils import TOL
from .base import StepFunction
from .cdf import StepCDF


class PredictiveBand:
    """
    Lower and upper bound of a predictive system at one covariate value

    ``support`` is the outcome range the band was computed from; crisp CDFs
    live on that range widened by the support cutoff C.
    """

    def __init__(self, lower: StepFunction, upper: StepFunction, support: Tuple[float, float]):
        y_min, y_max = float(support[0]), float(support[1])
        if not (np.isfinite(y_min) and np.isfinite(y_max)) or y_min > y_max:
            raise ConformalDataError(f"invalid band support {support!r}")
        self.lower = lower
        self.upper = upper
        self.support = (y_min, y_max)

        grid = self.breakpoints
        if lower.initial > upper.initial + TOL or np.any(lower(grid) > upper(grid) + TOL):
            raise ConformalNumericError("lower bound exceeds upper bound")

    @property
    def breakpoints(self) -> np.ndarray:
        """Merged jump points of both bounds"""
        return np.union1d(self.lower.jumps, self.upper.jumps)

    @property
    def has_valid_limits(self) -> bool:
        """True when the lower bound starts at 0 and the upper bound ends at 1"""
        return self.lower.initial <= TOL and self.upper.terminal >= 1 - TOL

    def widened(self, cutoff: float) -> Tuple[float, float]:
        """Support interval widened by the cutoff on both sides"""
        return self.support[0] - cutoff, self.support[1] + cutoff

    def contains(self, cdf: StepFunction, cutoff: float = 1.0) -> bool:
        """Check lower <= F <= upper on the widened support interval"""
        lo, hi = self.widened(cutoff)
        grid = np.union1d(self.breakpoints, cdf.jumps)
        grid = np.concatenate(([lo], grid[(grid > lo) & (grid <= hi)]))
        values = cdf(grid)
        return bool(np.all(self.lower(grid) <= values + TOL) and np.all(values <= self.upper(grid) + TOL))

    def thickness(self) -> float:
        """Shortcut for ``band_thickness(self)``"""
        return band_thickness(self)

    def __repr__(self) -> str:
        return f"PredictiveBand(lower={self.lower!r}, upper={self.upper!r}, support={self.support})"

    def to_dict(self) -> Dict[str, Any]:
        """Serialize both bounds and the support interval"""
        return {
            'lower': self.lower.to_dict(),
            'upper': self.upper.to_dict(),
            'support': list(self.support),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PredictiveBand':
        """Rebuild from ``to_dict`` output"""
        try:
            return cls(StepFunction.from_dict(data['lower']),
                       StepFunction.from_dict(data['upper']),
                       tuple(data['support']))
        except KeyError as e:
            raise ConformalDataError(f"serialized band is missing field {e}")


def band_thickness(band: PredictiveBand) -> float:
    """
    Largest gap between the bounds, ignoring the breakpoints themselves

    The gap is constant on each open interval between merged breakpoints, so
    one evaluation per interval (plus the two unbounded end intervals) is exact.
    """
    grid = band.breakpoints
    if grid.size == 0:
        return float(np.clip(band.upper.initial - band.lower.initial, 0.0, 1.0))
    midpoints = np.concatenate(([grid[0] - 1.0], (grid[:-1] + grid[1:]) / 2.0, [grid[-1] + 1.0]))
    gap = np.max(band.upper(midpoints) - band.lower(midpoints))
    return float(np.clip(gap, 0.0, 1.0))


def _crisp(band: PredictiveBand, support_cutoff: float,
           combine: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> StepCDF:
    if support_cutoff <= 0:
        raise CrispCutoffError("support cutoff must be positive")
    lo, hi = band.widened(support_cutoff)
    grid = band.breakpoints
    slack = TOL * max(1.0, abs(lo), abs(hi))
    if grid.size and (grid[0] < lo - slack or grid[-1] > hi + slack):
        raise CrispCutoffError(
            f"band breakpoints [{grid[0]:g}, {grid[-1]:g}] extend beyond the widened "
            f"interval [{lo:g}, {hi:g}]; increase the support cutoff")

    inner = grid[(grid > lo) & (grid < hi)]
    points = np.concatenate(([lo], inner, [hi]))
    values = np.clip(combine(band.lower(points), band.upper(points)), 0.0, 1.0)
    values[-1] = 1.0
    values = np.maximum.accumulate(values)

    # End at the first point where the value reaches 1
    done = np.flatnonzero(values >= 1.0 - TOL)[0]
    points, values = points[:done + 1], values[:done + 1]
    values[-1] = 1.0
    previous = np.concatenate(([0.0], values[:-1]))
    keep = values > previous + TOL
    return StepCDF(points[keep], values[keep])


def crisp_midpoint(band: PredictiveBand, support_cutoff: float = 1.0) -> StepCDF:
    """Crisp CDF halfway between the bounds on the widened support interval"""
    return _crisp(band, support_cutoff, lambda lower, upper: (lower + upper) / 2.0)


def crisp_minimax(band: PredictiveBand, support_cutoff: float = 1.0) -> StepCDF:
    """Crisp CDF minimising the worst-case CRPS over the band: u - u**2/2 + l**2/2"""
    return _crisp(band, support_cutoff, lambda lower, upper: upper - upper ** 2 / 2.0 + lower ** 2 / 2.0)


CRISP_RULES: Dict[str, Callable[[PredictiveBand, float], StepCDF]] = {
    'midpoint': crisp_midpoint,
    'minimax': crisp_minimax,
}


def crisp_cdf(band: PredictiveBand, rule: str, support_cutoff: float = 1.0) -> StepCDF:
    """Dispatch to a crisp rule by name"""
    try:
        extract = CRISP_RULES[rule]
    except KeyError:
        raise ValueError(f"unknown crisp rule {rule!r}; choose from {sorted(CRISP_RULES)}")
    return extract(band, support_cutoff)


def band_from_counts(critical: np.ndarray, denominator: float,
                     support: Optional[Tuple[float, float]] = None) -> PredictiveBand:
    """
    Band #{c <= y}/d below and (#{c <= y} + 1)/d above for sorted finite values

    This is the covariate-free conformal band of a bag of values, shared by
    conformal binning and tests.
    """
    values = np.sort(np.asarray(critical, dtype=float))
    atoms, counts = np.unique(values, return_counts=True)
    cumulative = np.cumsum(counts)
    lower = StepFunction(atoms, cumulative / denominator, 0.0)
    upper = StepFunction(atoms, np.minimum((cumulative + 1) / denominator, 1.0), 1.0 / denominator)
    if support is None:
        support = (float(atoms[0]), float(atoms[-1]))
    return PredictiveBand(lower, upper, support)
