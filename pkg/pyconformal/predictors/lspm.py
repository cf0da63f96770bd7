#!/usr/bin/env python3
"""
pyconformal Least Squares Prediction Machine

Conformity-measure conformal predictive systems. The studentized LSPM is
solved in closed form: leverages depend only on the covariates, so every
conformity score of the augmented regression is affine in the hypothesized
test outcome and each training point contributes one critical value.
A numeric grid evaluation hosts arbitrary conformity measures.
"""

from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import solve_triangular

from ..exceptions import (
    ConformalDataError,
    ConformalNumericError,
    LeverageOneError,
    NonMonotoneConformityError,
    RankDeficientDesignError,
)
from ..models import (
    PredictiveBand,
    Prediction,
    StepCDF,
    StepFunction,
    WeightedSample,
    crisp_midpoint,
)
from ..utils import TOL, as_weight_array, emit_diagnostic

TrainData = Union[WeightedSample, Tuple[Sequence, Sequence[float]]]

# Maps augmented covariates and outcomes (test point last) to one score per point
ScoreFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


class LinearFit:
    """Weighted least-squares fit with its hat matrix diagonal and test column"""

    def __init__(self, coefficients: np.ndarray, hat_diagonal: np.ndarray,
                 cross_leverage: np.ndarray, fitted: np.ndarray, rank: int):
        self.coefficients = coefficients
        self.hat_diagonal = hat_diagonal
        self.cross_leverage = cross_leverage
        self.fitted = fitted
        self.rank = rank

    @property
    def residuals_scale(self) -> np.ndarray:
        """sqrt(1 - h) per point"""
        return np.sqrt(np.clip(1.0 - self.hat_diagonal, 0.0, None))

    def predict(self, design: np.ndarray) -> np.ndarray:
        return np.asarray(design, dtype=float) @ self.coefficients

    def __repr__(self) -> str:
        return f"LinearFit(coefficients={self.coefficients.tolist()}, rank={self.rank})"


def _as_matrix(covariates: Sequence) -> np.ndarray:
    x = np.asarray(covariates, dtype=float)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if x.ndim != 2:
        raise ConformalDataError("covariates must be scalars or vectors")
    return x


def varying_columns(covariates: Sequence) -> np.ndarray:
    """Mask of covariate columns that are not constant"""
    x = _as_matrix(covariates)
    if x.shape[0] == 0:
        return np.ones(x.shape[1], dtype=bool)
    return np.ptp(x, axis=0) > 0


def design_matrix(covariates: Sequence, columns: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Prepend an intercept column to scalar or vector covariates

    Constant covariate columns duplicate the intercept and are dropped
    unless an explicit column mask is given.
    """
    x = _as_matrix(covariates)
    if columns is None:
        columns = varying_columns(x)
    return np.hstack([np.ones((x.shape[0], 1)), x[:, columns]])


def wls_fit(design: np.ndarray, y: Sequence[float], weights: Optional[Sequence[float]] = None) -> LinearFit:
    """
    Weighted least squares through a QR factorisation of sqrt(W) X

    The hat matrix is H = X (X'WX)^-1 X'W; ``cross_leverage`` is its last
    column, the leverage of the last row (the test point) on every fitted value.
    """
    X = np.asarray(design, dtype=float)
    if X.ndim != 2:
        raise ConformalDataError("design must be a matrix")
    rows, columns = X.shape
    outcomes = np.asarray(y, dtype=float).reshape(-1)
    if outcomes.size != rows:
        raise ConformalDataError(f"design has {rows} rows but y has {outcomes.size} entries")
    w = as_weight_array(weights, rows, positive=True)
    if rows < columns:
        raise RankDeficientDesignError(f"design has fewer rows ({rows}) than columns ({columns})")

    root = np.sqrt(w)
    Q, R = np.linalg.qr(root[:, None] * X)
    diagonal = np.abs(np.diag(R))
    if diagonal.min() <= 1e-10 * max(1.0, diagonal.max()):
        raise RankDeficientDesignError("design matrix does not have full column rank")

    coefficients = solve_triangular(R, Q.T @ (root * outcomes))
    hat_diagonal = np.sum(Q ** 2, axis=1)
    cross_leverage = (Q @ Q[-1]) * np.sqrt(w[-1] / w)
    return LinearFit(coefficients, hat_diagonal, cross_leverage, X @ coefficients, columns)


def _split_train(train: TrainData) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(train, WeightedSample):
        return train.covariates, train.outcomes
    covariates, outcomes = train
    x = np.asarray(covariates, dtype=float)
    y = np.asarray(outcomes, dtype=float).reshape(-1)
    if x.shape[0] != y.size or y.size == 0:
        raise ConformalDataError("training covariates and outcomes must be nonempty and aligned")
    return x, y


def _augment(x: np.ndarray, x_new) -> np.ndarray:
    if x.ndim == 2:
        row = np.asarray(x_new, dtype=float).reshape(1, x.shape[1])
    else:
        row = np.asarray([x_new], dtype=float).reshape(1)
    return np.concatenate([x, row])


def lspm_critical_values(train: TrainData, x_new) -> np.ndarray:
    """
    Sorted critical values of the studentized LSPM at x_new

    For training index i the gap between the test score and score i is
    a_i + b_i y in the hypothesized outcome y; the critical value is -a_i/b_i.
    A gap that does not grow with y gives -inf when it stays nonnegative as
    y grows without bound and +inf otherwise.
    """
    x, y = _split_train(train)
    n = y.size
    design = design_matrix(_augment(x, x_new))
    fit = wls_fit(design, np.append(y, 0.0))

    h = fit.hat_diagonal
    if np.any(1.0 - h <= TOL):
        raise LeverageOneError("a point has leverage one; studentized scores are undefined")

    residuals = np.append(y, 0.0) - fit.fitted
    scale = np.sqrt(1.0 - h)
    a = residuals[-1] / scale[-1] - residuals[:n] / scale[:n]
    b = scale[-1] + fit.cross_leverage[:n] / scale[:n]

    critical = np.empty(n)
    growing = b > TOL
    critical[growing] = -a[growing] / b[growing]
    flat = np.abs(b) <= TOL
    critical[flat & (a >= 0)] = -np.inf
    critical[flat & (a < 0)] = np.inf
    critical[b < -TOL] = np.inf
    return np.sort(critical)


def lspm_band(critical_values: Sequence[float], n: Optional[int] = None) -> PredictiveBand:
    """
    CM band from sorted critical values

    The upper bound is (#{C <= y} + 1)/(n + 1). The lower bound is stored
    right-continuous as #{C <= y}/(n + 1); its left limit is the strict
    count #{C < y}/(n + 1). Values at -inf raise the lower bound's initial
    level and values at +inf keep the upper bound below 1.
    """
    values = np.sort(np.asarray(critical_values, dtype=float).reshape(-1))
    n = values.size if n is None else int(n)
    if values.size != n or n == 0:
        raise ConformalDataError("critical values must hold n >= 1 entries")
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        raise ConformalNumericError("all critical values are infinite")
    below = int(np.sum(values == -np.inf))

    atoms, counts = np.unique(finite, return_counts=True)
    cumulative = below + np.cumsum(counts)
    denominator = n + 1.0
    lower = StepFunction(atoms, cumulative / denominator, below / denominator)
    upper = StepFunction(atoms, (cumulative + 1) / denominator, (below + 1) / denominator)
    return PredictiveBand(lower, upper, (float(atoms[0]), float(atoms[-1])))


def lspm_score(covariates: np.ndarray, outcomes: np.ndarray) -> np.ndarray:
    """Studentized residuals of the unit-weight least-squares fit on [1, x]"""
    fit = wls_fit(design_matrix(covariates), outcomes)
    if np.any(1.0 - fit.hat_diagonal <= TOL):
        raise LeverageOneError("a point has leverage one; studentized scores are undefined")
    return (np.asarray(outcomes, dtype=float) - fit.fitted) / fit.residuals_scale


def g0_score(covariates: np.ndarray, outcomes: np.ndarray) -> np.ndarray:
    """Covariate-free conformity measure: the outcome itself"""
    return np.asarray(outcomes, dtype=float)


def cm_numeric_values(score_fn: ScoreFn, train: TrainData, x_new,
                      y_grid: Sequence[float]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    G and G- of a conformity measure on a sorted outcome grid

    Returns:
        (grid, G, G_minus) with G = (#{s_i <= s_0} + 1)/(n + 1) and
        G_minus = #{s_i < s_0}/(n + 1), s_0 being the test score
    """
    x, y = _split_train(train)
    n = y.size
    grid = np.unique(np.asarray(y_grid, dtype=float))
    if grid.size == 0:
        raise ConformalDataError("outcome grid must not be empty")
    augmented_x = _augment(x, x_new)

    upper = np.empty(grid.size)
    lower = np.empty(grid.size)
    for j, candidate in enumerate(grid):
        scores = np.asarray(score_fn(augmented_x, np.append(y, candidate)), dtype=float)
        test_score = scores[-1]
        slack = 1e-9 * max(1.0, abs(test_score))
        upper[j] = (np.sum(scores[:n] <= test_score + slack) + 1) / (n + 1.0)
        lower[j] = np.sum(scores[:n] < test_score - slack) / (n + 1.0)

    if np.any(np.diff(upper) < -TOL) or np.any(np.diff(lower) < -TOL):
        raise NonMonotoneConformityError(
            "conformity measure yields a decreasing predictive CDF along the outcome grid")
    return grid, upper, lower


def cm_numeric_band(score_fn: ScoreFn, train: TrainData, x_new,
                    y_grid: Sequence[float]) -> PredictiveBand:
    """
    Full conformal band of an arbitrary conformity measure, refitting per grid point

    Both bounds are right-continuous and constant between grid points. The
    upper bound equals G at each grid point. The lower bound equals
    G - 1/(n+1) there, so that G- is its left limit on a dense grid.
    """
    grid, upper, lower = cm_numeric_values(score_fn, train, x_new, y_grid)
    step = 1.0 / (_split_train(train)[1].size + 1.0)
    return PredictiveBand(
        StepFunction.from_values(grid, upper - step, float(lower[0])),
        StepFunction.from_values(grid, upper, float(upper[0])),
        (float(grid[0]), float(grid[-1])),
    )


def residual_procedure(sample: WeightedSample, fitted: Sequence[float]) -> List[StepCDF]:
    """
    In-sample forecasts from the weighted empirical distribution of residuals

    The CDF at point k is y -> sum_j w_j 1{fitted_k + e_j <= y} with
    normalized weights and residuals e_j = y_j - fitted_j.
    """
    predictions = np.asarray(fitted, dtype=float).reshape(-1)
    if predictions.size != len(sample):
        raise ConformalDataError(
            f"fitted values ({predictions.size}) do not align with the sample ({len(sample)})")
    residuals = sample.outcomes - predictions
    return [StepCDF.from_atoms(value + residuals, sample.weights) for value in predictions]


def split_lspm_critical_values(estimation: TrainData, calibration: TrainData, x_new) -> np.ndarray:
    """Split-mode critical values: prediction at x_new plus calibration residuals of a fit on the estimation set"""
    x_est, y_est = _split_train(estimation)
    x_cal, y_cal = _split_train(calibration)
    columns = varying_columns(x_est)
    fit = wls_fit(design_matrix(x_est, columns), y_est)
    prediction = (design_matrix(_augment(x_est[:0], x_new), columns) @ fit.coefficients)[0]
    residuals = y_cal - design_matrix(x_cal, columns) @ fit.coefficients
    return np.sort(prediction + residuals)


def lspm_predict(train: TrainData, x_new, C: float = 1.0) -> Prediction:
    """Band, midpoint crisp CDF, thickness and class of the full LSPM at x_new"""
    critical = lspm_critical_values(train, x_new)
    if not np.all(np.isfinite(critical)):
        emit_diagnostic("LSPM produced infinite critical values; the band does not reach 0 and 1")
    band = lspm_band(critical)
    return Prediction.from_band(band, crisp_midpoint(band, C))
