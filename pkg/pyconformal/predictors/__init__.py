#!/usr/bin/env python3
"""
pyconformal Predictive Systems

Conformal IDR, conformal binning and the Least Squares Prediction Machine.
"""

from .conformal_idr import (
    cidr_band,
    cidr_band_bruteforce,
    cidr_predict,
    cidr_predict_many,
)
from .binning import (
    BinModel,
    ConformalBinning,
    kmeans_1d,
    kmeans_objective,
    isomean_bins,
    assign_bin,
    nearest_populated_bin,
    cb_band,
    cb_crisp,
    binning_procedure,
    select_k_cv,
)
from .lspm import (
    LinearFit,
    design_matrix,
    wls_fit,
    lspm_critical_values,
    lspm_band,
    lspm_score,
    g0_score,
    cm_numeric_values,
    cm_numeric_band,
    residual_procedure,
    split_lspm_critical_values,
    lspm_predict,
)

__all__ = [
    # Conformal IDR
    'cidr_band',
    'cidr_band_bruteforce',
    'cidr_predict',
    'cidr_predict_many',

    # Conformal binning
    'BinModel',
    'ConformalBinning',
    'kmeans_1d',
    'kmeans_objective',
    'isomean_bins',
    'assign_bin',
    'nearest_populated_bin',
    'cb_band',
    'cb_crisp',
    'binning_procedure',
    'select_k_cv',

    # LSPM
    'LinearFit',
    'design_matrix',
    'wls_fit',
    'lspm_critical_values',
    'lspm_band',
    'lspm_score',
    'g0_score',
    'cm_numeric_values',
    'cm_numeric_band',
    'residual_procedure',
    'split_lspm_critical_values',
    'lspm_predict',
]
