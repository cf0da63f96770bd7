#!/usr/bin/env python3
"""
pyconformal Core Models

Weighted samples, step CDFs, predictive bands and epistemic classes.
"""

from .base import StepFunction
from .sample import WeightedSample
from .cdf import StepCDF, cdf_eval
from .band import (
    PredictiveBand,
    band_thickness,
    crisp_midpoint,
    crisp_minimax,
    crisp_cdf,
    band_from_counts,
)
from .epistemic import EpistemicClass, epistemic_class
from .record import Prediction, PredictionRecord, FLAG_EMPTY_BIN_FALLBACK, FLAG_INVALID_LIMITS

__all__ = [
    'StepFunction',
    'WeightedSample',
    'StepCDF',
    'cdf_eval',
    'PredictiveBand',
    'band_thickness',
    'crisp_midpoint',
    'crisp_minimax',
    'crisp_cdf',
    'band_from_counts',
    'EpistemicClass',
    'epistemic_class',
    'Prediction',
    'PredictionRecord',
    'FLAG_EMPTY_BIN_FALLBACK',
    'FLAG_INVALID_LIMITS',
]
