#!/usr/bin/env python3
"""
pyconformal Command Line Interface

Subcommands:
    simulate      write simulated train/test samples with metadata sidecars
    fit-predict   predict every test row with every configured method
    evaluate      score prediction records against test outcomes
    experiment    run the simulation study over models and training sizes

Exit codes: 0 success, 2 usage or configuration error, 3 data error,
4 numeric failure.
"""

import argparse
import sys
from typing import Any, Dict, List, Optional

from ._version import __version__
from .client import ConformalClient, evaluate_files, fit_predict
from .config import BAND_TYPES, BIN_METHODS, CRISP_RULES, MODELS, ConformalConfig
from .exceptions import ConformalConfigError, ConformalDataError, ConformalError, ConformalNumericError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _csv_list(text: str) -> List[str]:
    return [item.strip() for item in text.split(',') if item.strip()]


def _csv_ints(text: str) -> List[int]:
    try:
        return [int(item) for item in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _k_value(text: str):
    if text.strip().lower() == 'cv':
        return 'cv'
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"k must be an integer or 'cv', got {text!r}")


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    """Flags for every configuration field; unset flags leave file/env/default values alone"""
    group = parser.add_argument_group('configuration')
    group.add_argument('--config', dest='config_file', help='JSON configuration file')
    group.add_argument('--methods', type=_csv_list, help='comma separated subset of cidr,cb,lspm')
    group.add_argument('--model', choices=MODELS, help='simulation model')
    group.add_argument('--train', dest='train_file', help='training CSV (x,y[,weight])')
    group.add_argument('--test', dest='test_file', help='test CSV (x,y[,weight])')
    group.add_argument('--n-train', type=int, help='training sample size')
    group.add_argument('--n-test', type=int, help='test sample size')
    group.add_argument('--sizes', type=_csv_ints, help='training sizes of the experiment')
    group.add_argument('--seed', type=int, help='simulation and split seed')
    group.add_argument('--pit-seed', type=int, help='seed of the PIT randomization')
    mode = group.add_mutually_exclusive_group()
    mode.add_argument('--full', dest='full_conformal', action='store_const', const=True,
                      help='full conformal mode')
    mode.add_argument('--split', dest='full_conformal', action='store_const', const=False,
                      help='split conformal mode')
    group.add_argument('--estimation-fraction', type=float, help='estimation share in split mode')
    group.add_argument('--calibration-fraction', type=float, help='calibration share in split mode')
    group.add_argument('-k', dest='k', type=_k_value, help="number of bins or 'cv'")
    group.add_argument('--cv-folds', type=int, help='folds of the k cross-validation')
    group.add_argument('--cv-candidates', type=_csv_ints, help='candidate k values')
    group.add_argument('--kmeans-restarts', type=int, help='k-means restarts')
    group.add_argument('--bin-method', choices=BIN_METHODS, help='binning method')
    group.add_argument('--cutoff', type=float, help='support cutoff C')
    group.add_argument('--crisp', choices=CRISP_RULES, help='crisp rule for conformal IDR')
    group.add_argument('--band-level', type=float, help='PIT consistency band level')
    group.add_argument('--band-type', choices=BAND_TYPES, help='PIT consistency band type')
    group.add_argument('--pp-grid-size', type=int, help='number of p-p grid levels')
    group.add_argument('--workers', type=int, help='worker threads')
    group.add_argument('--output-dir', help='output directory (env CONFORMAL_OUTPUT_DIR)')
    parser.add_argument('-v', '--verbose', action='store_true', help='print progress')


CONFIG_FIELDS = (
    'methods', 'model', 'train_file', 'test_file', 'n_train', 'n_test', 'sizes', 'seed',
    'pit_seed', 'full_conformal', 'estimation_fraction', 'calibration_fraction', 'k',
    'cv_folds', 'cv_candidates', 'kmeans_restarts', 'bin_method', 'cutoff', 'crisp',
    'band_level', 'band_type', 'pp_grid_size', 'workers', 'output_dir',
)


def build_config(args: argparse.Namespace) -> ConformalConfig:
    """Merge flags over the config file over environment variables over defaults"""
    overrides: Dict[str, Any] = {
        field: getattr(args, field) for field in CONFIG_FIELDS if getattr(args, field, None) is not None
    }
    if getattr(args, 'config_file', None):
        return ConformalConfig.from_json(args.config_file, **overrides)
    return ConformalConfig(**overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='pyconformal',
        description='Conformal IDR, conformal binning and LSPM predictive systems',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', required=True)

    simulate = subparsers.add_parser('simulate', help='write simulated train/test samples')
    _add_config_arguments(simulate)

    predict = subparsers.add_parser('fit-predict', help='predict test rows with every method')
    _add_config_arguments(predict)

    evaluate = subparsers.add_parser('evaluate', help='score prediction records')
    evaluate.add_argument('--records', required=True, help='predictions.jsonl from fit-predict')
    _add_config_arguments(evaluate)

    experiment = subparsers.add_parser('experiment', help='run the simulation study')
    _add_config_arguments(experiment)
    return parser


def cmd_simulate(config: ConformalConfig, verbose: bool = False) -> int:
    paths = ConformalClient(config, verbose).simulate()
    for role, path in paths.items():
        print(f"{role}: {path}")
    return EXIT_OK


def cmd_fit_predict(config: ConformalConfig, verbose: bool = False) -> int:
    if not config.train_file or not config.test_file:
        raise ConformalConfigError("fit-predict needs --train and --test files")
    path = fit_predict(config.train_file, config.test_file, config=config, verbose=verbose)
    print(f"records: {path}")
    return EXIT_OK


def cmd_evaluate(config: ConformalConfig, records: str, verbose: bool = False) -> int:
    if not config.test_file:
        raise ConformalConfigError("evaluate needs a --test file with outcomes")
    report = evaluate_files(records, config.test_file, config=config, verbose=verbose)
    print(report.summary_frame().to_string(index=False))
    return EXIT_OK


def cmd_experiment(config: ConformalConfig, verbose: bool = False) -> int:
    table = ConformalClient(config, verbose).run_experiment()
    print(table[['model', 'n_train', 'method', 'mean_crps', 'mean_thickness', 'pp_coverage']]
          .to_string(index=False))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """CLI entry point; returns the process exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = build_config(args)
        if args.command == 'simulate':
            return cmd_simulate(config, args.verbose)
        if args.command == 'fit-predict':
            return cmd_fit_predict(config, args.verbose)
        if args.command == 'evaluate':
            return cmd_evaluate(config, args.records, args.verbose)
        return cmd_experiment(config, args.verbose)
    except ConformalConfigError as e:
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ConformalDataError as e:
        print(f"❌ Data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except ConformalNumericError as e:
        print(f"❌ Numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ConformalError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == '__main__':  # pragma: no cover
    sys.exit(main())
