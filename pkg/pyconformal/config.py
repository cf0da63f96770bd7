#!/usr/bin/env python3
"""
pyconformal Configuration

Experiment configuration for the pyconformal library. Every field can be
passed explicitly, read from a JSON config file, or taken from a
``CONFORMAL_*`` environment variable, in that order of precedence.
"""

import json
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from .exceptions import ConformalConfigError

# Optional: Load .env file if python-dotenv is available.
try:  # pragma: no cover
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:  # pragma: no cover
    # python-dotenv not installed, environment variables must be set manually
    pass


METHODS = ('cidr', 'cb', 'lspm')
MODELS = ('isotonic', 'less_isotonic')
CRISP_RULES = ('midpoint', 'minimax')
BIN_METHODS = ('kmeans', 'isomean')
BAND_TYPES = ('pointwise', 'ks')

# Sample-size grid of the supplementary simulation study
DEFAULT_SIZES = (100, 500, 1000, 2000)


def _env_int(name: str, default: str) -> int:
    try:
        return int(os.getenv(name, default))
    except ValueError:
        raise ConformalConfigError(f"{name} must be a valid integer")


def _env_float(name: str, default: str) -> float:
    try:
        return float(os.getenv(name, default))
    except ValueError:
        raise ConformalConfigError(f"{name} must be a valid number")


def _env_bool(name: str, default: str) -> bool:
    value = os.getenv(name, default).strip().lower()
    if value in ('1', 'true', 'yes', 'on'):
        return True
    if value in ('0', 'false', 'no', 'off'):
        return False
    raise ConformalConfigError(f"{name} must be a boolean (true/false)")


def _env_list(name: str, default: str) -> List[str]:
    return [item.strip() for item in os.getenv(name, default).split(',') if item.strip()]


class ConformalConfig:
    """Configuration class for pyconformal experiments"""

    def __init__(self,
                 methods: Optional[Sequence[str]] = None,
                 model: Optional[str] = None,
                 train_file: Optional[str] = None,
                 test_file: Optional[str] = None,
                 n_train: Optional[int] = None,
                 n_test: Optional[int] = None,
                 sizes: Optional[Sequence[int]] = None,
                 seed: Optional[int] = None,
                 pit_seed: Optional[int] = None,
                 full_conformal: Optional[bool] = None,
                 estimation_fraction: Optional[float] = None,
                 calibration_fraction: Optional[float] = None,
                 k: Optional[Union[int, str]] = None,
                 cv_folds: Optional[int] = None,
                 cv_candidates: Optional[Sequence[int]] = None,
                 kmeans_restarts: Optional[int] = None,
                 bin_method: Optional[str] = None,
                 cutoff: Optional[float] = None,
                 crisp: Optional[str] = None,
                 band_level: Optional[float] = None,
                 band_type: Optional[str] = None,
                 pp_grid_size: Optional[int] = None,
                 workers: Optional[int] = None,
                 output_dir: Optional[str] = None):
        """
        Initialize pyconformal configuration

        Args:
            methods: Predictive systems to run (default from env CONFORMAL_METHODS)
            model: Simulation model, isotonic or less_isotonic (env CONFORMAL_MODEL)
            train_file: CSV file with training data instead of simulation
            test_file: CSV file with test data instead of simulation
            n_train: Training sample size (env CONFORMAL_N_TRAIN)
            n_test: Test sample size (env CONFORMAL_N_TEST)
            sizes: Training sizes swept by the experiment command (env CONFORMAL_SIZES)
            seed: Simulation seed (env CONFORMAL_SEED)
            pit_seed: Seed of the PIT randomization draws (env CONFORMAL_PIT_SEED)
            full_conformal: Full conformal mode instead of a split (env CONFORMAL_FULL)
            estimation_fraction: Estimation share of the training data in split mode
            calibration_fraction: Calibration share of the training data in split mode
            k: Number of bins for conformal binning, or "cv" (env CONFORMAL_K)
            cv_folds: Folds of the k cross-validation (env CONFORMAL_CV_FOLDS)
            cv_candidates: Candidate k values for cross-validation
            kmeans_restarts: k-means restarts (env CONFORMAL_KMEANS_RESTARTS)
            bin_method: kmeans or isomean binning (env CONFORMAL_BIN_METHOD)
            cutoff: Support cutoff C (env CONFORMAL_CUTOFF)
            crisp: Crisp rule for conformal IDR, midpoint or minimax (env CONFORMAL_CRISP)
            band_level: Level of the PIT consistency band (env CONFORMAL_BAND_LEVEL)
            band_type: pointwise or ks consistency band (env CONFORMAL_BAND_TYPE)
            pp_grid_size: Number of p-p grid points (env CONFORMAL_PP_GRID)
            workers: Worker threads for per-test-point computations (env CONFORMAL_WORKERS,
                defaults to the CPU count)
            output_dir: Output directory (env CONFORMAL_OUTPUT_DIR)
        """
        self.methods = list(methods) if methods is not None else _env_list(
            'CONFORMAL_METHODS', ','.join(METHODS))
        self.model = model or os.getenv('CONFORMAL_MODEL', 'isotonic')
        self.train_file = train_file
        self.test_file = test_file

        self.n_train = n_train if n_train is not None else _env_int('CONFORMAL_N_TRAIN', '2000')
        self.n_test = n_test if n_test is not None else _env_int('CONFORMAL_N_TEST', '5000')

        if sizes is not None:
            self.sizes = [int(size) for size in sizes]
        else:
            try:
                self.sizes = [int(size) for size in _env_list(
                    'CONFORMAL_SIZES', ','.join(str(size) for size in DEFAULT_SIZES))]
            except ValueError:
                raise ConformalConfigError("CONFORMAL_SIZES must be a comma separated list of integers")

        self.seed = seed if seed is not None else _env_int('CONFORMAL_SEED', '1')
        self.pit_seed = pit_seed if pit_seed is not None else _env_int('CONFORMAL_PIT_SEED', '12345')
        self.full_conformal = (full_conformal if full_conformal is not None
                               else _env_bool('CONFORMAL_FULL', 'true'))
        self.estimation_fraction = (estimation_fraction if estimation_fraction is not None
                                    else _env_float('CONFORMAL_ESTIMATION_FRACTION', '0.5'))
        self.calibration_fraction = (calibration_fraction if calibration_fraction is not None
                                     else _env_float('CONFORMAL_CALIBRATION_FRACTION', '0.5'))

        raw_k = k if k is not None else os.getenv('CONFORMAL_K', '10')
        if isinstance(raw_k, str) and raw_k.strip().lower() == 'cv':
            self.k: Union[int, str] = 'cv'
        else:
            try:
                self.k = int(raw_k)
            except (TypeError, ValueError):
                raise ConformalConfigError("CONFORMAL_K must be an integer or 'cv'")

        self.cv_folds = cv_folds if cv_folds is not None else _env_int('CONFORMAL_CV_FOLDS', '5')
        self.cv_candidates = (list(cv_candidates) if cv_candidates is not None
                              else [2, 3, 5, 8, 10, 15, 20, 30])
        self.kmeans_restarts = (kmeans_restarts if kmeans_restarts is not None
                                else _env_int('CONFORMAL_KMEANS_RESTARTS', '10'))
        self.bin_method = bin_method or os.getenv('CONFORMAL_BIN_METHOD', 'kmeans')
        self.cutoff = cutoff if cutoff is not None else _env_float('CONFORMAL_CUTOFF', '1.0')
        self.crisp = crisp or os.getenv('CONFORMAL_CRISP', 'minimax')
        self.band_level = band_level if band_level is not None else _env_float('CONFORMAL_BAND_LEVEL', '0.9')
        self.band_type = band_type or os.getenv('CONFORMAL_BAND_TYPE', 'pointwise')
        self.pp_grid_size = pp_grid_size if pp_grid_size is not None else _env_int('CONFORMAL_PP_GRID', '99')
        self.workers = workers if workers is not None else _env_int('CONFORMAL_WORKERS', str(os.cpu_count() or 1))
        self.output_dir = output_dir or os.getenv('CONFORMAL_OUTPUT_DIR', 'conformal_output')

        # Validate required configuration
        self._validate()

    def _validate(self):
        """Validate configuration values"""
        if not self.methods:
            raise ConformalConfigError("at least one method is required")
        unknown = [method for method in self.methods if method not in METHODS]
        if unknown:
            raise ConformalConfigError(f"unknown methods {unknown}; choose from {list(METHODS)}")
        if self.model not in MODELS:
            raise ConformalConfigError(f"model must be one of {list(MODELS)}")
        if self.n_train < 1:
            raise ConformalConfigError("n_train must be positive")
        if self.n_test < 1:
            raise ConformalConfigError("n_test must be positive")
        if not self.sizes or any(size < 1 for size in self.sizes):
            raise ConformalConfigError("sizes must be positive")
        if not 0 < self.estimation_fraction < 1:
            raise ConformalConfigError("estimation_fraction must lie in (0, 1)")
        if not 0 < self.calibration_fraction < 1:
            raise ConformalConfigError("calibration_fraction must lie in (0, 1)")
        if self.estimation_fraction + self.calibration_fraction > 1 + 1e-12:
            raise ConformalConfigError("estimation_fraction + calibration_fraction must not exceed 1")
        if self.k != 'cv' and self.k < 1:
            raise ConformalConfigError("k must be positive")
        if self.cv_folds < 2:
            raise ConformalConfigError("cv_folds must be at least 2")
        if not self.cv_candidates or any(int(candidate) < 1 for candidate in self.cv_candidates):
            raise ConformalConfigError("cv_candidates must be positive integers")
        if self.kmeans_restarts < 1:
            raise ConformalConfigError("kmeans_restarts must be positive")
        if self.bin_method not in BIN_METHODS:
            raise ConformalConfigError(f"bin_method must be one of {list(BIN_METHODS)}")
        if self.cutoff <= 0:
            raise ConformalConfigError("cutoff must be positive")
        if self.crisp not in CRISP_RULES:
            raise ConformalConfigError(f"crisp must be one of {list(CRISP_RULES)}")
        if not 0 < self.band_level < 1:
            raise ConformalConfigError("band_level must lie in (0, 1)")
        if self.band_type not in BAND_TYPES:
            raise ConformalConfigError(f"band_type must be one of {list(BAND_TYPES)}")
        if self.pp_grid_size < 1:
            raise ConformalConfigError("pp_grid_size must be positive")
        if self.workers < 1:
            raise ConformalConfigError("workers must be positive")
        for path in (self.train_file, self.test_file):
            if path is not None and not Path(path).is_file():
                raise ConformalConfigError(f"referenced file does not exist: {path}")

    @classmethod
    def from_json(cls, path: Union[str, Path], **overrides: Any) -> 'ConformalConfig':
        """
        Load configuration from a JSON file

        Args:
            path: JSON file holding a flat object of configuration fields
            **overrides: Field values that win over the file (None values are ignored)

        Returns:
            ConformalConfig instance
        """
        try:
            with open(path, 'r', encoding='utf-8') as handle:
                data = json.load(handle)
        except OSError as e:
            raise ConformalConfigError(f"cannot read config file {path}: {e}")
        except json.JSONDecodeError as e:
            raise ConformalConfigError(f"config file {path} is not valid JSON: {e}")
        if not isinstance(data, dict):
            raise ConformalConfigError(f"config file {path} must contain a JSON object")

        merged = dict(data)
        merged.update({key: value for key, value in overrides.items() if value is not None})
        try:
            return cls(**merged)
        except TypeError as e:
            raise ConformalConfigError(f"unknown configuration field: {e}")

    def replace(self, **changes: Any) -> 'ConformalConfig':
        """Return a copy with some fields changed"""
        data = self.to_dict()
        data.update(changes)
        return ConformalConfig(**data)

    def to_dict(self) -> Dict[str, Any]:
        """Serialize the configuration for experiment bundles"""
        return {
            'methods': list(self.methods),
            'model': self.model,
            'train_file': self.train_file,
            'test_file': self.test_file,
            'n_train': self.n_train,
            'n_test': self.n_test,
            'sizes': list(self.sizes),
            'seed': self.seed,
            'pit_seed': self.pit_seed,
            'full_conformal': self.full_conformal,
            'estimation_fraction': self.estimation_fraction,
            'calibration_fraction': self.calibration_fraction,
            'k': self.k,
            'cv_folds': self.cv_folds,
            'cv_candidates': list(self.cv_candidates),
            'kmeans_restarts': self.kmeans_restarts,
            'bin_method': self.bin_method,
            'cutoff': self.cutoff,
            'crisp': self.crisp,
            'band_level': self.band_level,
            'band_type': self.band_type,
            'pp_grid_size': self.pp_grid_size,
            'workers': self.workers,
            'output_dir': self.output_dir,
        }


# Default configuration instance
default_config = ConformalConfig()
