#!/usr/bin/env python3
"""
Configuration system tests - defaults, environment variables, JSON files and validation
"""

import json

import pytest
from pyconformal.config import ConformalConfig, DEFAULT_SIZES, default_config
from pyconformal.exceptions import ConformalConfigError


# Invalid field values with a fragment of the _validate message they trigger.
INVALID_FIELDS = [
    ({'methods': []}, "at least one method"),
    ({'methods': ['cidr', 'forest']}, "unknown methods"),
    ({'model': 'sinusoid'}, "model must be one of"),
    ({'n_train': 0}, "n_train must be positive"),
    ({'n_test': -1}, "n_test must be positive"),
    ({'sizes': [100, 0]}, "sizes must be positive"),
    ({'estimation_fraction': 1.0}, "estimation_fraction"),
    ({'calibration_fraction': 0.0}, "calibration_fraction"),
    ({'estimation_fraction': 0.7, 'calibration_fraction': 0.5}, "must not exceed 1"),
    ({'k': 0}, "k must be positive"),
    ({'cv_folds': 1}, "cv_folds"),
    ({'cv_candidates': [2, 0]}, "cv_candidates"),
    ({'kmeans_restarts': 0}, "kmeans_restarts"),
    ({'bin_method': 'quantile'}, "bin_method"),
    ({'cutoff': 0.0}, "cutoff must be positive"),
    ({'crisp': 'average'}, "crisp must be one of"),
    ({'band_level': 1.0}, "band_level"),
    ({'band_type': 'simultaneous'}, "band_type"),
    ({'pp_grid_size': 0}, "pp_grid_size"),
    ({'workers': 0}, "workers must be positive"),
]


@pytest.mark.parametrize("kwargs,message", INVALID_FIELDS)
def test_validate_rejects_invalid_field(kwargs, message):
    with pytest.raises(ConformalConfigError, match=message):
        ConformalConfig(**kwargs)


@pytest.mark.parametrize("env_var,value", [
    ("CONFORMAL_N_TRAIN", "many"),
    ("CONFORMAL_SEED", "1.5"),
    ("CONFORMAL_CUTOFF", "wide"),
    ("CONFORMAL_FULL", "maybe"),
    ("CONFORMAL_SIZES", "100,lots"),
    ("CONFORMAL_K", "several"),
])
def test_invalid_env_var_raises_config_error(monkeypatch, env_var, value):
    monkeypatch.setenv(env_var, value)
    with pytest.raises(ConformalConfigError, match=env_var):
        ConformalConfig()


def test_missing_data_file_rejected(tmp_path):
    with pytest.raises(ConformalConfigError, match="does not exist"):
        ConformalConfig(train_file=str(tmp_path / 'absent.csv'))


def test_dotenv_import_success_path():
    """Reloading config with dotenv installed exercises the load_dotenv() success branch."""
    import importlib
    import sys

    sys.modules.pop("pyconformal.config", None)
    cfg_mod = importlib.import_module("pyconformal.config")
    assert cfg_mod.default_config is not None


def test_dotenv_import_failure_does_not_break_module(monkeypatch):
    """If python-dotenv is not installed, config import must still work."""
    import builtins
    import importlib
    import sys

    real_import = builtins.__import__

    def fake_import(name, globals=None, locals=None, fromlist=(), level=0):
        if name == "dotenv":
            raise ImportError("simulated missing python-dotenv")
        return real_import(name, globals, locals, fromlist, level)

    monkeypatch.setattr(builtins, "__import__", fake_import)
    sys.modules.pop("pyconformal.config", None)
    sys.modules.pop("dotenv", None)
    cfg_mod = importlib.import_module("pyconformal.config")
    assert cfg_mod.default_config is not None
    # Restore module for downstream tests.
    monkeypatch.undo()
    sys.modules.pop("pyconformal.config", None)
    importlib.import_module("pyconformal.config")


class TestConfiguration:
    """Test configuration system functionality"""

    def test_default_config_loading(self):
        assert default_config is not None
        assert default_config.methods == ['cidr', 'cb', 'lspm']
        assert default_config.cutoff > 0
        assert default_config.workers >= 1

    def test_defaults(self):
        config = ConformalConfig()
        assert config.model == 'isotonic'
        assert config.n_train == 2000
        assert config.n_test == 5000
        assert config.sizes == list(DEFAULT_SIZES)
        assert config.full_conformal is True
        assert config.k == 10
        assert config.crisp == 'minimax'
        assert config.band_type == 'pointwise'
        assert config.band_level == 0.9
        assert config.output_dir == 'conformal_output'

    @pytest.mark.parametrize("cpus,expected", [(6, 6), (None, 1)])
    def test_workers_default_to_cpu_count(self, monkeypatch, cpus, expected):
        monkeypatch.delenv('CONFORMAL_WORKERS', raising=False)
        monkeypatch.setattr('os.cpu_count', lambda: cpus)
        assert ConformalConfig().workers == expected

    def test_custom_config_creation(self):
        config = ConformalConfig(methods=['lspm'], seed=42, cutoff=2.5, full_conformal=False)
        assert config.methods == ['lspm']
        assert config.seed == 42
        assert config.cutoff == 2.5
        assert config.full_conformal is False

    def test_environment_variables(self, monkeypatch):
        monkeypatch.setenv("CONFORMAL_METHODS", "cb, lspm")
        monkeypatch.setenv("CONFORMAL_SIZES", "50,150")
        monkeypatch.setenv("CONFORMAL_FULL", "no")
        monkeypatch.setenv("CONFORMAL_K", "CV")
        monkeypatch.setenv("CONFORMAL_CUTOFF", "3.5")
        monkeypatch.setenv("CONFORMAL_BAND_TYPE", "ks")
        config = ConformalConfig()
        assert config.methods == ['cb', 'lspm']
        assert config.sizes == [50, 150]
        assert config.full_conformal is False
        assert config.k == 'cv'
        assert config.cutoff == 3.5
        assert config.band_type == 'ks'

    def test_arguments_override_environment(self, monkeypatch):
        monkeypatch.setenv("CONFORMAL_SEED", "77")
        monkeypatch.setenv("CONFORMAL_MODEL", "less_isotonic")
        config = ConformalConfig(seed=3, model='isotonic')
        assert config.seed == 3
        assert config.model == 'isotonic'

    def test_k_accepts_cv_string(self):
        assert ConformalConfig(k='cv').k == 'cv'
        assert ConformalConfig(k='7').k == 7

    def test_to_dict_round_trip(self):
        config = ConformalConfig(methods=['cb'], k='cv', sizes=[10, 20], pit_seed=9)
        assert ConformalConfig(**config.to_dict()).to_dict() == config.to_dict()
        assert json.loads(json.dumps(config.to_dict())) == config.to_dict()

    def test_replace(self):
        config = ConformalConfig(seed=1)
        changed = config.replace(seed=2, crisp='midpoint')
        assert (changed.seed, changed.crisp) == (2, 'midpoint')
        assert config.seed == 1
        with pytest.raises(ConformalConfigError):
            config.replace(workers=0)


class TestJsonConfig:
    """Test loading configuration from JSON files"""

    def write(self, tmp_path, data):
        path = tmp_path / 'config.json'
        path.write_text(data if isinstance(data, str) else json.dumps(data), encoding='utf-8')
        return path

    def test_from_json(self, tmp_path):
        path = self.write(tmp_path, {'methods': ['cidr'], 'seed': 8, 'crisp': 'midpoint'})
        config = ConformalConfig.from_json(path)
        assert config.methods == ['cidr']
        assert config.seed == 8
        assert config.crisp == 'midpoint'

    def test_overrides_win_and_none_is_ignored(self, tmp_path):
        path = self.write(tmp_path, {'seed': 8, 'cutoff': 2.0})
        config = ConformalConfig.from_json(path, seed=11, cutoff=None)
        assert config.seed == 11
        assert config.cutoff == 2.0

    def test_file_wins_over_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CONFORMAL_SEED", "77")
        assert ConformalConfig.from_json(self.write(tmp_path, {'seed': 8})).seed == 8

    @pytest.mark.parametrize("content,message", [
        ("{not json", "not valid JSON"),
        ("[1, 2]", "must contain a JSON object"),
        ('{"colour": "blue"}', "unknown configuration field"),
    ])
    def test_invalid_files(self, tmp_path, content, message):
        with pytest.raises(ConformalConfigError, match=message):
            ConformalConfig.from_json(self.write(tmp_path, content))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConformalConfigError, match="cannot read config file"):
            ConformalConfig.from_json(tmp_path / 'absent.json')
