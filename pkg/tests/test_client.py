#!/usr/bin/env python3
"""
Test client functionality - fitting, prediction, evaluation and file workflows
"""

import numpy as np
import pytest

from pyconformal import ConformalClient, ConformalConfig, fit_predict, evaluate_files, run_experiment
from pyconformal.exceptions import (
    ConformalAlignmentError,
    ConformalConfigError,
    ConformalError,
    LeverageOneError,
)
from pyconformal.io import read_json, read_records, write_sample
from pyconformal.models import EpistemicClass, PredictionRecord, StepFunction, WeightedSample
from pyconformal.simulation import SimConfig


def make_config(**overrides):
    settings = {
        'methods': ['cidr', 'cb', 'lspm'],
        'n_train': 40,
        'n_test': 15,
        'sizes': [30],
        'seed': 3,
        'k': 3,
        'kmeans_restarts': 2,
        'cutoff': 1.0,
        'crisp': 'minimax',
        'pp_grid_size': 19,
    }
    settings.update(overrides)
    return ConformalConfig(**settings)


@pytest.fixture
def simulated():
    return SimConfig('isotonic', n_train=40, n_test=15, seed=3).generate()


class TestClientFit:
    """Test fitting in full and split mode"""

    def test_initial_state(self):
        client = ConformalClient(make_config())
        assert not client.is_fitted
        assert client.selected_k is None
        with pytest.raises(ConformalError, match="not fitted"):
            client.predict([1.0])

    def test_full_mode_uses_whole_sample(self, simulated):
        train, _ = simulated
        client = ConformalClient(make_config()).fit(train)
        assert client.is_fitted
        assert client.selected_k == 3

    def test_split_mode_partitions_training_data(self, simulated):
        train, _ = simulated
        client = ConformalClient(make_config(full_conformal=False)).fit(train)
        estimation, calibration = client._estimation, client._calibration
        assert len(estimation) == 20
        assert len(calibration) == 20
        combined = np.sort(np.concatenate([estimation.covariates, calibration.covariates]))
        np.testing.assert_array_equal(combined, np.sort(train.covariates))

    def test_split_is_seeded(self, simulated):
        train, _ = simulated
        first = ConformalClient(make_config(full_conformal=False)).fit(train)
        second = ConformalClient(make_config(full_conformal=False)).fit(train)
        np.testing.assert_array_equal(first._calibration.outcomes, second._calibration.outcomes)

    def test_split_leaving_empty_part(self):
        client = ConformalClient(make_config(full_conformal=False))
        with pytest.raises(ConformalConfigError, match="empty estimation or calibration"):
            client.fit(WeightedSample([1.0], [1.0]))

    def test_too_many_bins(self, two_point_train):
        client = ConformalClient(make_config(methods=['cb'], k=3))
        with pytest.raises(ConformalConfigError, match="exceeds the number of distinct covariates"):
            client.fit(two_point_train)

    def test_cross_validated_k(self, simulated):
        train, _ = simulated
        client = ConformalClient(make_config(methods=['cb'], k='cv', cv_candidates=[2, 4], cv_folds=4))
        client.fit(train)
        assert client.selected_k in (2, 4)
        assert client.metadata()['k'] == client.selected_k

    def test_isomean_bins(self):
        client = ConformalClient(make_config(methods=['cb'], bin_method='isomean'))
        client.fit(WeightedSample([1.0, 2.0, 3.0], [1.0, 0.0, 2.0]))
        assert client.selected_k == 2

    def test_verbose_logging(self, capsys, two_point_train):
        ConformalClient(make_config(methods=['cidr']), verbose=True).fit(two_point_train)
        assert "✅ Fit complete" in capsys.readouterr().out
        ConformalClient(make_config(methods=['cidr'])).fit(two_point_train)
        assert capsys.readouterr().out == ""


class TestClientPredict:
    """Test predictions of each method"""

    def test_cidr_two_point_example(self, two_point_train):
        client = ConformalClient(make_config(methods=['cidr'])).fit(two_point_train)
        prediction = client.predict([1.5])['cidr'][0]
        assert prediction.thickness == pytest.approx(1.0)
        assert prediction.epistemic is EpistemicClass.HIGH
        assert prediction.band.upper == StepFunction([0.0, 1.0], [0.5, 1.0])
        assert prediction.band.lower == StepFunction([2.0, 3.0], [0.5, 1.0])

    def test_lspm_intercept_only(self):
        outcomes = [3.0, -1.0, 4.0, 1.5]
        client = ConformalClient(make_config(methods=['lspm'])).fit(WeightedSample([2.0] * 4, outcomes))
        prediction = client.predict_method('lspm', [2.0])[0]
        assert prediction.thickness == pytest.approx(0.2, abs=1e-12)
        assert prediction.band.upper(-1.0) == pytest.approx(0.4)

    def test_lspm_leverage_one(self):
        client = ConformalClient(make_config(methods=['lspm'])).fit(WeightedSample([0.0] * 3, [1.0, 2.0, 3.0]))
        with pytest.raises(LeverageOneError):
            client.predict_method('lspm', [5.0])

    def test_split_lspm(self, simulated):
        train, test = simulated
        client = ConformalClient(make_config(methods=['lspm'], full_conformal=False)).fit(train)
        predictions = client.predict_method('lspm', test.covariates)
        assert len(predictions) == len(test)
        for prediction in predictions:
            assert prediction.thickness == pytest.approx(1 / 21, abs=1e-12)
            assert prediction.band.contains(prediction.cdf, 1.0)

    def test_binning_thickness_per_bin(self, simulated):
        train, test = simulated
        client = ConformalClient(make_config(methods=['cb'])).fit(train)
        predictions = client.predict_method('cb', test.covariates)
        binning = client.binning
        for x, prediction in zip(test.covariates, predictions):
            size = binning.bin_outcomes[int(binning.model.assign([x])[0])].size
            assert prediction.thickness == pytest.approx(1.0 / (size + 1), abs=1e-12)

    def test_binning_not_fitted_without_cb(self, simulated):
        train, _ = simulated
        assert ConformalClient(make_config(methods=['lspm'])).fit(train).binning is None

    def test_every_method_in_input_order(self, simulated):
        train, test = simulated
        predictions = ConformalClient(make_config()).fit(train).predict(test.covariates)
        assert sorted(predictions) == ['cb', 'cidr', 'lspm']
        for items in predictions.values():
            assert len(items) == len(test)
            assert all(item.cdf.terminal == 1.0 for item in items)

    def test_workers_give_same_predictions(self, simulated):
        train, test = simulated
        serial = ConformalClient(make_config(methods=['cidr', 'lspm'], workers=1)).fit(train).predict(test.covariates)
        pooled = ConformalClient(make_config(methods=['cidr', 'lspm'], workers=3)).fit(train).predict(test.covariates)
        for method in ('cidr', 'lspm'):
            for a, b in zip(serial[method], pooled[method]):
                assert a.cdf == b.cdf

    def test_unknown_method(self, two_point_train):
        client = ConformalClient(make_config(methods=['cidr'])).fit(two_point_train)
        with pytest.raises(ConformalConfigError, match="unknown method"):
            client.predict_method('forest', [1.0])

    def test_records_cover_every_row(self, simulated):
        train, test = simulated
        client = ConformalClient(make_config(methods=['cb', 'lspm'])).fit(train)
        records = client.predict_records(test)
        assert len(records) == 2 * len(test)
        assert [r.row for r in records if r.method == 'cb'] == list(range(len(test)))
        assert records[0].x == test.covariates[0]


class TestClientEvaluate:
    """Test evaluation and record alignment"""

    def test_evaluate_all_methods(self, simulated):
        train, test = simulated
        client = ConformalClient(make_config()).fit(train)
        report = client.evaluate(client.predict(test.covariates), test, {'run': 1})
        assert sorted(report.summaries) == ['cb', 'cidr', 'lspm']
        assert report.metadata == {'run': 1}
        for summary in report.summaries.values():
            assert summary.n == len(test)
            assert summary.mean_crps > 0

    def test_prediction_count_mismatch(self, simulated):
        train, test = simulated
        client = ConformalClient(make_config(methods=['lspm'])).fit(train)
        predictions = client.predict_method('lspm', test.covariates[:-1])
        with pytest.raises(ConformalAlignmentError):
            client.evaluate_method('lspm', predictions, test)

    def test_records_match_direct_evaluation(self, simulated):
        train, test = simulated
        client = ConformalClient(make_config(methods=['lspm'])).fit(train)
        direct = client.evaluate(client.predict(test.covariates), test)
        shuffled = client.predict_records(test)[::-1]
        aligned = client.evaluate_records(shuffled, test)
        assert aligned.mean_crps('lspm') == pytest.approx(direct.mean_crps('lspm'), abs=1e-12)

    def _records(self, simulated, drop=None, duplicate=False, extra=False, moved=None):
        train, test = simulated
        client = ConformalClient(make_config(methods=['lspm'])).fit(train)
        records = client.predict_records(test)
        if drop is not None:
            records = [r for r in records if r.row != drop]
        if duplicate:
            records.append(records[0])
        if extra:
            records.append(PredictionRecord('lspm', len(test), 0.0, records[0].prediction))
        if moved is not None:
            record = records[moved]
            records[moved] = PredictionRecord('lspm', record.row, record.x + 0.5, record.prediction)
        return client, records, test

    @pytest.mark.parametrize("kwargs,message", [
        ({'drop': 4}, "no record for test row 4"),
        ({'duplicate': True}, "duplicate record"),
        ({'extra': True}, "without a test outcome"),
        ({'moved': 2}, "record for test row 2 has covariate"),
    ])
    def test_misaligned_records(self, simulated, kwargs, message):
        client, records, test = self._records(simulated, **kwargs)
        with pytest.raises(ConformalAlignmentError, match=message):
            client.evaluate_records(records, test)

    def test_no_records(self, simulated):
        _, test = simulated
        with pytest.raises(ConformalAlignmentError, match="no prediction records"):
            ConformalClient(make_config()).evaluate_records([], test)


class TestClientFiles:
    """Test simulation output and the file-based convenience functions"""

    def test_simulate_writes_samples_and_sidecars(self, tmp_path):
        client = ConformalClient(make_config(model='less_isotonic'))
        paths = client.simulate(tmp_path / 'sim')
        assert sorted(paths) == ['test', 'train']
        meta = read_json(tmp_path / 'sim' / 'test.json')
        assert meta['model'] == 'less_isotonic'
        assert meta['role'] == 'test'
        assert meta['n'] == 15

    def test_simulate_is_reproducible(self, tmp_path):
        first = ConformalClient(make_config()).simulate(tmp_path / 'a')
        second = ConformalClient(make_config()).simulate(tmp_path / 'b')
        for role in ('train', 'test'):
            assert first[role].read_bytes() == second[role].read_bytes()

    def test_fit_predict_then_evaluate(self, tmp_path, simulated):
        train, test = simulated
        train_file = write_sample(train, tmp_path / 'train.csv')
        test_file = write_sample(test, tmp_path / 'test.csv')
        config = make_config(methods=['cidr', 'lspm'])
        records_path = fit_predict(train_file, test_file, tmp_path / 'out', config=config)
        records = read_records(records_path)
        assert len(records) == 2 * len(test)
        meta = read_json(tmp_path / 'out' / 'predictions.meta.json')
        assert meta['seed'] == 3
        assert meta['train_file'] == str(train_file)

        report = evaluate_files(records_path, test_file, tmp_path / 'eval', config=config)
        assert sorted(report.summaries) == ['cidr', 'lspm']
        assert (tmp_path / 'eval' / 'report.json').is_file()
        assert (tmp_path / 'eval' / 'pp_curve.csv').is_file()

    def test_fit_predict_is_byte_identical(self, tmp_path, simulated):
        train, test = simulated
        train_file = write_sample(train, tmp_path / 'train.csv')
        test_file = write_sample(test, tmp_path / 'test.csv')
        first = fit_predict(train_file, test_file, tmp_path / 'a', config=make_config())
        second = fit_predict(train_file, test_file, tmp_path / 'b', config=make_config())
        assert first.read_bytes() == second.read_bytes()

    def test_run_experiment(self, tmp_path):
        table = run_experiment(make_config(n_test=20), tmp_path)
        assert len(table) == 2 * 3
        assert set(table['model']) == {'isotonic', 'less_isotonic'}
        assert (tmp_path / 'comparison.csv').is_file()
        assert (tmp_path / 'isotonic_n30' / 'report.json').is_file()
        assert (tmp_path / 'isotonic_n30' / 'config.json').is_file()
        isotonic = table[table['model'] == 'isotonic']
        assert np.all(np.isfinite(isotonic['ideal_crps']))
        assert np.all(np.isnan(table[table['model'] == 'less_isotonic']['ideal_crps']))
