#!/usr/bin/env python3
"""
pyconformal Main Client

Orchestration facade: fits the configured predictive systems on a training
sample, predicts test covariates, evaluates forecasts and runs the
simulation study. All numerics are delegated to the predictor and
evaluation modules.
"""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ._version import __version__
from .config import ConformalConfig, default_config
from .evaluation import EvalReport, ForecastEvaluator, MethodSummary, default_pp_grid, reliability_thresholds
from .exceptions import ConformalAlignmentError, ConformalConfigError, ConformalError
from .io import read_records, read_sample, write_json, write_records, write_sample
from .models import Prediction, PredictionRecord, WeightedSample, crisp_midpoint
from .predictors import (
    ConformalBinning,
    cidr_predict_many,
    isomean_bins,
    kmeans_1d,
    lspm_band,
    lspm_predict,
    select_k_cv,
    split_lspm_critical_values,
)
from .simulation import GENERATOR_ID, SimConfig, ideal_crps_isotonic

PathLike = Union[str, Path]


class ConformalClient:
    """
    Main pyconformal Client

    Example:
        client = ConformalClient(ConformalConfig(methods=['cidr', 'cb']), verbose=True)
        client.fit(train)
        predictions = client.predict(test.covariates)
        report = client.evaluate(predictions, test)
    """

    def __init__(self, config: Optional[ConformalConfig] = None, verbose: bool = False):
        """
        Initialize the client

        Args:
            config: Configuration object (uses default if None)
            verbose: Enable verbose logging output
        """
        self.config = config or default_config
        self.verbose = verbose

        # These will be set by fit()
        self._train: Optional[WeightedSample] = None
        self._estimation: Optional[WeightedSample] = None
        self._calibration: Optional[WeightedSample] = None
        self._binning: Optional[ConformalBinning] = None
        self._k: Optional[int] = None

    def _log(self, message: str):
        """Log message if verbose mode is enabled"""
        if self.verbose:
            print(message)

    @property
    def is_fitted(self) -> bool:
        return self._train is not None

    @property
    def selected_k(self) -> Optional[int]:
        """Number of k-means bins in use (after cross-validation when k='cv')"""
        return self._k

    @property
    def binning(self) -> Optional[ConformalBinning]:
        """Fitted conformal binning predictor, if 'cb' is configured"""
        return self._binning

    def _split(self, train: WeightedSample) -> None:
        n = len(train)
        order = np.random.Generator(np.random.PCG64(self.config.seed)).permutation(n)
        n_estimation = int(round(self.config.estimation_fraction * n))
        n_calibration = int(round(self.config.calibration_fraction * n))
        if n_estimation < 1 or n_calibration < 1 or n_estimation + n_calibration > n:
            raise ConformalConfigError(
                f"split fractions leave an empty estimation or calibration set for n={n}")
        self._estimation = train.subset(np.sort(order[:n_estimation]))
        self._calibration = train.subset(np.sort(order[n_estimation:n_estimation + n_calibration]))

    def _fit_binning(self) -> None:
        config = self.config
        bin_source = self._estimation
        if config.bin_method == 'isomean':
            model = isomean_bins(bin_source)
            self._k = model.k
        else:
            k = config.k
            if k == 'cv':
                k = select_k_cv(bin_source.covariates, bin_source.outcomes, config.cv_candidates,
                                config.cv_folds, config.seed, config.kmeans_restarts)
                self._log(f"   🔢 Cross-validation selected k={k}")
            distinct = np.unique(bin_source.covariates).size
            if k > distinct:
                raise ConformalConfigError(
                    f"k={k} exceeds the number of distinct covariates ({distinct})")
            model = kmeans_1d(bin_source.covariates, k, config.kmeans_restarts, config.seed)
            self._k = model.k
        self._binning = ConformalBinning(model, self._calibration)

    def fit(self, train: WeightedSample) -> 'ConformalClient':
        """
        Prepare the configured predictive systems

        In full conformal mode every system uses the whole training sample
        (binning builds its bins from the training covariates). In split
        mode a seeded permutation divides the sample into estimation and
        calibration parts.
        """
        self._log(f"🔄 Fitting {', '.join(self.config.methods)} on {len(train)} training points...")
        self._train = train
        if self.config.full_conformal:
            self._estimation = train
            self._calibration = train
        else:
            self._split(train)
            self._log(f"   ✂️ Split into {len(self._estimation)} estimation / "
                      f"{len(self._calibration)} calibration points")
        if 'cb' in self.config.methods:
            self._fit_binning()
        self._log("✅ Fit complete")
        return self

    def _ensure_fitted(self):
        if not self.is_fitted:
            raise ConformalError("client is not fitted; call fit() first")

    def _map(self, function, items: Sequence[Any]) -> List[Any]:
        """Apply a function to items on the worker pool, keeping input order"""
        if self.config.workers > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                return list(pool.map(function, items))
        return [function(item) for item in items]

    def predict_method(self, method: str, xs: Sequence[float]) -> List[Prediction]:
        """Predictions of one method for test covariates, in input order"""
        self._ensure_fitted()
        config = self.config
        covariates = [float(x) for x in np.asarray(xs, dtype=float).reshape(-1)]
        self._log(f"🔄 Predicting {len(covariates)} test points with {method}...")

        if method == 'cidr':
            predictions = cidr_predict_many(self._calibration, covariates, config.cutoff,
                                            config.crisp, config.workers)
        elif method == 'cb':
            if self._binning is None:
                self._fit_binning()
            predictions = self._binning.predict_many(covariates, fallback=True)
        elif method == 'lspm':
            if config.full_conformal:
                predictions = self._map(lambda x: lspm_predict(self._train, x, config.cutoff), covariates)
            else:
                def split_predict(x: float) -> Prediction:
                    band = lspm_band(split_lspm_critical_values(self._estimation, self._calibration, x))
                    return Prediction.from_band(band, crisp_midpoint(band, config.cutoff))
                predictions = self._map(split_predict, covariates)
        else:
            raise ConformalConfigError(f"unknown method {method!r}")

        flagged = sum(1 for prediction in predictions if prediction.flags)
        if flagged:
            self._log(f"⚠️ {flagged} {method} predictions carry flags")
        self._log(f"✅ {method}: {len(predictions)} predictions")
        return predictions

    def predict(self, xs: Sequence[float]) -> Dict[str, List[Prediction]]:
        """Predictions of every configured method"""
        return {method: self.predict_method(method, xs) for method in self.config.methods}

    def predict_records(self, test: WeightedSample) -> List[PredictionRecord]:
        """Prediction records for every method and test row"""
        records = []
        for method in self.config.methods:
            predictions = self.predict_method(method, test.covariates)
            records.extend(PredictionRecord(method, row, x, prediction)
                           for row, (x, prediction) in enumerate(zip(test.covariates, predictions)))
        return records

    def _evaluator(self, method: str, outcomes: np.ndarray) -> ForecastEvaluator:
        return ForecastEvaluator(
            method,
            reliability_thresholds(outcomes),
            pit_seed=self.config.pit_seed,
            pp_grid=default_pp_grid(self.config.pp_grid_size),
            band_level=self.config.band_level,
            band_type=self.config.band_type,
        )

    def evaluate_method(self, method: str, predictions: Sequence[Prediction],
                        test: WeightedSample) -> MethodSummary:
        """Score one method's predictions against the test outcomes, in row order"""
        if len(predictions) != len(test):
            raise ConformalAlignmentError(
                f"{method}: {len(predictions)} predictions for {len(test)} test outcomes")
        evaluator = self._evaluator(method, test.outcomes)
        for prediction, y in zip(predictions, test.outcomes):
            evaluator.add(prediction.cdf, float(y), prediction.thickness,
                          prediction.epistemic, bool(prediction.flags))
        return evaluator.summary()

    def evaluate(self, predictions: Dict[str, Sequence[Prediction]], test: WeightedSample,
                 metadata: Optional[Dict[str, Any]] = None) -> EvalReport:
        """Evaluation report over all methods"""
        summaries = {method: self.evaluate_method(method, items, test)
                     for method, items in predictions.items()}
        return EvalReport(summaries, metadata)

    def evaluate_records(self, records: Sequence[PredictionRecord], test: WeightedSample,
                         metadata: Optional[Dict[str, Any]] = None) -> EvalReport:
        """Align records with test rows per method and evaluate"""
        by_method: Dict[str, Dict[int, PredictionRecord]] = {}
        for record in records:
            rows = by_method.setdefault(record.method, {})
            if record.row in rows:
                raise ConformalAlignmentError(f"duplicate record for method {record.method!r}, row {record.row}")
            rows[record.row] = record
        if not by_method:
            raise ConformalAlignmentError("no prediction records to evaluate")

        aligned = {}
        for method in sorted(by_method):
            rows = by_method[method]
            for row in range(len(test)):
                if row not in rows:
                    raise ConformalAlignmentError(f"method {method!r} has no record for test row {row}")
                expected = float(test.covariates[row])
                if not np.isclose(rows[row].x, expected, rtol=1e-12, atol=0.0):
                    raise ConformalAlignmentError(
                        f"method {method!r} record for test row {row} has covariate {rows[row].x!r}, "
                        f"but the test sample has {expected!r}")
            extra = sorted(row for row in rows if row >= len(test) or row < 0)
            if extra:
                raise ConformalAlignmentError(
                    f"method {method!r} has a record for row {extra[0]} without a test outcome")
            aligned[method] = [rows[row].prediction for row in range(len(test))]
        return self.evaluate(aligned, test, metadata)

    def metadata(self, **extra: Any) -> Dict[str, Any]:
        """Run metadata: configuration, seeds and library version"""
        data = {
            'config': self.config.to_dict(),
            'version': __version__,
            'generator': GENERATOR_ID,
            'seed': self.config.seed,
            'pit_seed': self.config.pit_seed,
        }
        if self._k is not None:
            data['k'] = self._k
        data.update(extra)
        return data

    def simulate(self, output_dir: Optional[PathLike] = None) -> Dict[str, Path]:
        """Generate training and test samples and write them with metadata sidecars"""
        sim = SimConfig(self.config.model, self.config.n_train, self.config.n_test, self.config.seed)
        target = Path(output_dir or self.config.output_dir)
        self._log(f"🔄 Simulating {sim!r}...")
        train, test = sim.generate()
        paths = {
            'train': write_sample(train, target / 'train.csv', sim.metadata('train', len(train))),
            'test': write_sample(test, target / 'test.csv', sim.metadata('test', len(test))),
        }
        self._log(f"✅ Samples written to {target}")
        return paths

    def run_bundle(self, train: WeightedSample, test: WeightedSample, directory: PathLike,
                   **metadata: Any) -> EvalReport:
        """Fit, predict and evaluate every method, streaming one method at a time, and write the report"""
        self.fit(train)
        summaries = {}
        for method in self.config.methods:
            predictions = self.predict_method(method, test.covariates)
            summaries[method] = self.evaluate_method(method, predictions, test)
            del predictions
        report = EvalReport(summaries, self.metadata(**metadata))
        report.write(directory)
        write_json(Path(directory) / 'config.json', self.metadata(**metadata))
        return report

    def run_experiment(self, output_dir: Optional[PathLike] = None,
                       models: Sequence[str] = ('isotonic', 'less_isotonic')) -> pd.DataFrame:
        """
        Simulation study over models and training sizes

        Writes one bundle directory per (model, n) and a comparison table.

        Returns:
            Comparison table with one row per (model, n, method)
        """
        target = Path(output_dir or self.config.output_dir)
        rows = []
        for model in models:
            for n in self.config.sizes:
                sim = SimConfig(model, n, self.config.n_test, self.config.seed)
                self._log(f"🚀 Bundle {model} n={n}")
                train, test = sim.generate()
                extra: Dict[str, Any] = {'model': model, 'n_train': n, 'n_test': len(test)}
                if model == 'isotonic':
                    extra['ideal_crps'] = ideal_crps_isotonic(test)
                report = self.run_bundle(train, test, target / f"{model}_n{n}", **extra)
                for summary in report.summaries.values():
                    row = {'model': model, 'n_train': n}
                    row.update(summary.summary_row())
                    row['ideal_crps'] = extra.get('ideal_crps', float('nan'))
                    rows.append(row)
        table = pd.DataFrame(rows)
        target.mkdir(parents=True, exist_ok=True)
        table.to_csv(target / 'comparison.csv', index=False, lineterminator='\n')
        self._log(f"✅ Experiment complete: {len(rows)} rows in {target / 'comparison.csv'}")
        return table


def fit_predict(train_file: PathLike, test_file: PathLike, output_dir: Optional[PathLike] = None,
                config: Optional[ConformalConfig] = None, verbose: bool = False) -> Path:
    """
    Convenience function: predict every test row with every configured method

    Returns:
        Path of the written predictions.jsonl file
    """
    client = ConformalClient(config, verbose)
    train = read_sample(train_file)
    test = read_sample(test_file)
    client.fit(train)
    records = client.predict_records(test)
    target = Path(output_dir or client.config.output_dir)
    write_json(target / 'predictions.meta.json', client.metadata(train_file=str(train_file),
                                                                 test_file=str(test_file)))
    return write_records(records, target / 'predictions.jsonl')


def evaluate_files(records_file: PathLike, test_file: PathLike, output_dir: Optional[PathLike] = None,
                   config: Optional[ConformalConfig] = None, verbose: bool = False) -> EvalReport:
    """Convenience function: evaluate a predictions.jsonl file against test outcomes and write the report"""
    client = ConformalClient(config, verbose)
    records = read_records(records_file)
    test = read_sample(test_file)
    report = client.evaluate_records(records, test, client.metadata(records_file=str(records_file),
                                                                     test_file=str(test_file)))
    report.write(output_dir or client.config.output_dir)
    return report


def run_experiment(config: Optional[ConformalConfig] = None, output_dir: Optional[PathLike] = None,
                   verbose: bool = False) -> pd.DataFrame:
    """Convenience function: run the full simulation study"""
    client = ConformalClient(config, verbose)
    return client.run_experiment(output_dir)

