#!/usr/bin/env python3
"""
pyconformal

Conformal predictive systems for real-valued outcomes: conformal isotonic
distributional regression (IDR), conformal binning and the Least Squares
Prediction Machine (LSPM), with crisp CDF extraction, thickness-based
epistemic uncertainty and calibration diagnostics (CRPS, PIT, CORP).

Usage Examples:

Conformal IDR at one test covariate:
    from pyconformal import WeightedSample, cidr_predict
    train = WeightedSample([1.0, 2.0], [1.0, 2.0])
    cdf, thickness, epistemic = cidr_predict(train, 1.5, C=1.0, crisp='minimax')

Whole workflow with the main client:
    from pyconformal import ConformalClient, ConformalConfig, SimConfig
    train, test = SimConfig('isotonic', n_train=500, n_test=1000, seed=1).generate()
    client = ConformalClient(ConformalConfig(methods=['cidr', 'cb', 'lspm']), verbose=True)
    client.fit(train)
    report = client.evaluate(client.predict(test.covariates), test)
    print(report.summary_frame())

File-based convenience functions:
    from pyconformal import fit_predict, run_experiment
    records_path = fit_predict('train.csv', 'test.csv', 'out')
    table = run_experiment()

Configuration:
    from pyconformal import ConformalConfig
    config = ConformalConfig(methods=['cb'], k='cv', cv_folds=5)
    config = ConformalConfig.from_json('experiment.json', seed=7)
"""

# Main client (recommended for most users)
from .client import ConformalClient, fit_predict, evaluate_files, run_experiment

# Core models
from .models import (
    StepFunction,
    WeightedSample,
    StepCDF,
    cdf_eval,
    PredictiveBand,
    band_thickness,
    crisp_midpoint,
    crisp_minimax,
    crisp_cdf,
    EpistemicClass,
    epistemic_class,
    Prediction,
    PredictionRecord,
)

# Isotonic regression
from .isotonic import IdrFit, pava, idr_fit, idr_cdf_at, weighted_empirical_cdf

# Predictive systems
from .predictors import (
    cidr_band,
    cidr_band_bruteforce,
    cidr_predict,
    cidr_predict_many,
    BinModel,
    ConformalBinning,
    kmeans_1d,
    isomean_bins,
    assign_bin,
    cb_band,
    cb_crisp,
    binning_procedure,
    select_k_cv,
    LinearFit,
    wls_fit,
    lspm_critical_values,
    lspm_band,
    lspm_predict,
    cm_numeric_band,
    residual_procedure,
)

# Evaluation
from .evaluation import (
    EvalReport,
    ForecastEvaluator,
    crps,
    pit,
    pp_curve,
    corp_reliability,
    insample_autocal_check,
    insample_isocal_check,
    pit_inequality_gap,
)

# Simulation
from .simulation import SimConfig, gen_isotonic, gen_less_isotonic, ideal_crps_isotonic

# Configuration and exceptions
from .config import ConformalConfig
from .exceptions import (
    ConformalError,
    ConformalConfigError,
    ConformalDataError,
    ConformalSchemaError,
    ConformalAlignmentError,
    EmptyBinError,
    ConformalNumericError,
    RankDeficientDesignError,
    LeverageOneError,
    NonMonotoneConformityError,
    CrispCutoffError,
)

# Version info
from ._version import __version__
__description__ = "Conformal predictive systems with calibration diagnostics"

# Main exports (what users get with "from pyconformal import *")
__all__ = [
    # Main client (recommended)
    'ConformalClient',
    'fit_predict',
    'evaluate_files',
    'run_experiment',

    # Core models
    'StepFunction',
    'WeightedSample',
    'StepCDF',
    'cdf_eval',
    'PredictiveBand',
    'band_thickness',
    'crisp_midpoint',
    'crisp_minimax',
    'crisp_cdf',
    'EpistemicClass',
    'epistemic_class',
    'Prediction',
    'PredictionRecord',

    # Isotonic regression
    'IdrFit',
    'pava',
    'idr_fit',
    'idr_cdf_at',
    'weighted_empirical_cdf',

    # Predictive systems
    'cidr_band',
    'cidr_band_bruteforce',
    'cidr_predict',
    'cidr_predict_many',
    'BinModel',
    'ConformalBinning',
    'kmeans_1d',
    'isomean_bins',
    'assign_bin',
    'cb_band',
    'cb_crisp',
    'binning_procedure',
    'select_k_cv',
    'LinearFit',
    'wls_fit',
    'lspm_critical_values',
    'lspm_band',
    'lspm_predict',
    'cm_numeric_band',
    'residual_procedure',

    # Evaluation
    'EvalReport',
    'ForecastEvaluator',
    'crps',
    'pit',
    'pp_curve',
    'corp_reliability',
    'insample_autocal_check',
    'insample_isocal_check',
    'pit_inequality_gap',

    # Simulation
    'SimConfig',
    'gen_isotonic',
    'gen_less_isotonic',
    'ideal_crps_isotonic',

    # Configuration
    'ConformalConfig',

    # Exceptions
    'ConformalError',
    'ConformalConfigError',
    'ConformalDataError',
    'ConformalSchemaError',
    'ConformalAlignmentError',
    'EmptyBinError',
    'ConformalNumericError',
    'RankDeficientDesignError',
    'LeverageOneError',
    'NonMonotoneConformityError',
    'CrispCutoffError',
]
