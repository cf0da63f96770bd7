#!/usr/bin/env python3
"""
Input/output tests - sample CSV schema, metadata sidecars and prediction records
"""

import numpy as np
import pytest

from pyconformal.exceptions import ConformalDataError, ConformalSchemaError
from pyconformal.io import (
    read_json,
    read_records,
    read_sample,
    sidecar_path,
    write_records,
    write_sample,
)
from pyconformal.models import Prediction, PredictionRecord, WeightedSample
from pyconformal.predictors import cb_band, cb_crisp


def write_text(path, text):
    path.write_text(text, encoding='utf-8')
    return path


def make_record(method, row, outcomes):
    prediction = Prediction.from_band(cb_band(outcomes), cb_crisp(outcomes))
    return PredictionRecord(method, row, float(row) / 2.0, prediction)


class TestSampleFiles:
    """Test writing and reading sample CSV files"""

    def test_write_then_read(self, tmp_path, rng):
        sample = WeightedSample(rng.uniform(0, 10, 25), rng.normal(size=25), rng.uniform(0.5, 2.0, 25))
        path = write_sample(sample, tmp_path / 'data' / 'train.csv', metadata={'seed': 4, 'role': 'train'})
        loaded = read_sample(path)
        np.testing.assert_allclose(loaded.covariates, sample.covariates, rtol=1e-15)
        np.testing.assert_allclose(loaded.outcomes, sample.outcomes, rtol=1e-15)
        np.testing.assert_allclose(loaded.weights, sample.weights, rtol=1e-15)
        assert read_json(sidecar_path(path)) == {'role': 'train', 'seed': 4}

    def test_header_and_no_sidecar(self, tmp_path):
        path = write_sample(WeightedSample([1.0], [2.0]), tmp_path / 'one.csv')
        assert path.read_text(encoding='utf-8').splitlines()[0] == 'x,y,weight'
        assert not sidecar_path(path).exists()

    def test_rewrite_is_byte_identical(self, tmp_path, sample_factory):
        sample = sample_factory(30, weighted=True)
        first = write_sample(sample, tmp_path / 'a.csv', {'n': 30}).read_bytes()
        second = write_sample(sample, tmp_path / 'a.csv', {'n': 30}).read_bytes()
        assert first == second

    def test_weight_column_is_optional(self, tmp_path):
        sample = read_sample(write_text(tmp_path / 'plain.csv', "x,y\n1,2\n3,4.5\n"))
        assert sample.outcomes.tolist() == [2.0, 4.5]
        assert sample.weights.tolist() == [1.0, 1.0]

    def test_column_order_and_spacing(self, tmp_path):
        sample = read_sample(write_text(tmp_path / 'spaced.csv', "y, x\n2,1\n"))
        assert sample.covariates.tolist() == [1.0]
        assert sample.outcomes.tolist() == [2.0]

    @pytest.mark.parametrize("text,column", [
        ("x,weight\n1,1\n", 'y'),
        ("y\n1\n", 'x'),
        ("x,y,z\n1,2,3\n", 'z'),
    ])
    def test_column_errors(self, tmp_path, text, column):
        with pytest.raises(ConformalSchemaError) as excinfo:
            read_sample(write_text(tmp_path / 'bad.csv', text))
        assert excinfo.value.column == column
        assert f"column '{column}'" in str(excinfo.value)

    @pytest.mark.parametrize("text,column,row", [
        ("x,y\n1,2\n3,abc\n", 'y', 2),
        ("x,y\n1,\n", 'y', 1),
        ("x,y\n1,2\n2,3\nnan,4\n", 'x', 3),
        ("x,y,weight\n1,2,1\n2,3,inf\n", 'weight', 2),
    ])
    def test_value_errors_name_column_and_row(self, tmp_path, text, column, row):
        with pytest.raises(ConformalSchemaError) as excinfo:
            read_sample(write_text(tmp_path / 'bad.csv', text))
        assert (excinfo.value.column, excinfo.value.row) == (column, row)

    def test_negative_weight(self, tmp_path):
        with pytest.raises(ConformalSchemaError, match="negative weight") as excinfo:
            read_sample(write_text(tmp_path / 'neg.csv', "x,y,weight\n1,2,1\n2,3,-0.5\n"))
        assert excinfo.value.row == 2

    def test_header_only(self, tmp_path):
        with pytest.raises(ConformalSchemaError, match="no data rows"):
            read_sample(write_text(tmp_path / 'header.csv', "x,y\n"))

    def test_empty_file(self, tmp_path):
        with pytest.raises(ConformalSchemaError, match="header row is required"):
            read_sample(write_text(tmp_path / 'empty.csv', ""))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConformalDataError, match="not found") as excinfo:
            read_sample(tmp_path / 'absent.csv')
        assert not isinstance(excinfo.value, ConformalSchemaError)


class TestRecordFiles:
    """Test JSON Lines prediction records"""

    def test_write_then_read_in_method_row_order(self, tmp_path):
        records = [
            make_record('lspm', 1, [1.0, 2.0]),
            make_record('cb', 2, [0.0, 4.0, 5.0]),
            make_record('cb', 0, [3.0]),
        ]
        loaded = read_records(write_records(records, tmp_path / 'records.jsonl'))
        assert [(r.method, r.row) for r in loaded] == [('cb', 0), ('cb', 2), ('lspm', 1)]
        original = records[1].prediction
        restored = loaded[1].prediction
        assert restored.cdf == original.cdf
        assert restored.band.lower == original.band.lower
        assert restored.band.upper == original.band.upper
        assert restored.thickness == original.thickness
        assert restored.epistemic is original.epistemic
        assert loaded[1].x == 1.0

    def test_one_sorted_json_object_per_line(self, tmp_path):
        path = write_records([make_record('cidr', 0, [1.0])], tmp_path / 'one.jsonl')
        lines = path.read_text(encoding='utf-8').splitlines()
        assert len(lines) == 1
        assert lines[0].startswith('{"band": ')

    def test_blank_lines_skipped(self, tmp_path):
        path = write_records([make_record('cb', 0, [1.0])], tmp_path / 'r.jsonl')
        path.write_text(path.read_text(encoding='utf-8') + "\n\n", encoding='utf-8')
        assert len(read_records(path)) == 1

    def test_invalid_json_line(self, tmp_path):
        with pytest.raises(ConformalDataError, match="line 1"):
            read_records(write_text(tmp_path / 'bad.jsonl', "{not json\n"))

    def test_missing_field(self, tmp_path):
        with pytest.raises(ConformalDataError, match="missing field"):
            read_records(write_text(tmp_path / 'bad.jsonl', '{"method": "cb", "row": 0}\n'))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConformalDataError, match="not found"):
            read_records(tmp_path / 'absent.jsonl')
