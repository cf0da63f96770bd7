#!/usr/bin/env python3
"""
pyconformal Input/Output

CSV samples with JSON metadata sidecars, and JSON Lines prediction records.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .exceptions import ConformalConfigError, ConformalDataError, ConformalSchemaError
from .models import PredictionRecord, WeightedSample

PathLike = Union[str, Path]

REQUIRED_COLUMNS = ('x', 'y')
OPTIONAL_COLUMNS = ('weight',)


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        return float('nan')


def sidecar_path(path: PathLike) -> Path:
    """Metadata file next to a sample CSV"""
    return Path(path).with_suffix('.json')


def write_json(path: PathLike, data: Any) -> Path:
    """Write deterministic, key-sorted JSON"""
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(data, sort_keys=True, indent=2) + '\n', encoding='utf-8')
    except OSError as e:
        raise ConformalConfigError(f"cannot write {target}: {e}")
    return target


def read_json(path: PathLike) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding='utf-8'))
    except OSError as e:
        raise ConformalDataError(f"cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise ConformalDataError(f"{path} is not valid JSON: {e}")


def write_sample(sample: WeightedSample, path: PathLike,
                 metadata: Optional[Dict[str, Any]] = None) -> Path:
    """
    Write a sample as CSV with columns x, y, weight

    Args:
        sample: Sample to write
        path: CSV destination
        metadata: Written to the JSON sidecar when given

    Returns:
        Path of the CSV file
    """
    target = Path(path)
    frame = pd.DataFrame({'x': sample.covariates, 'y': sample.outcomes, 'weight': sample.weights})
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(target, index=False, lineterminator='\n', encoding='utf-8')
    except OSError as e:
        raise ConformalConfigError(f"cannot write {target}: {e}")
    if metadata is not None:
        write_json(sidecar_path(target), metadata)
    return target


def read_sample(path: PathLike) -> WeightedSample:
    """
    Read an x,y[,weight] CSV file into a WeightedSample

    Rows are numbered from 1 after the header in error messages.
    """
    source = Path(path)
    try:
        frame = pd.read_csv(source, dtype=str, keep_default_na=False, encoding='utf-8')
    except FileNotFoundError:
        raise ConformalDataError(f"data file not found: {source}")
    except pd.errors.EmptyDataError:
        raise ConformalSchemaError(f"{source} is empty; a header row is required")
    except (OSError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise ConformalSchemaError(f"cannot parse {source}: {e}")

    columns = [str(column).strip() for column in frame.columns]
    frame.columns = columns
    for column in REQUIRED_COLUMNS:
        if column not in columns:
            raise ConformalSchemaError(f"{source} lacks a required column", column=column)
    for column in columns:
        if column not in REQUIRED_COLUMNS + OPTIONAL_COLUMNS:
            raise ConformalSchemaError(f"{source} has an unexpected column", column=column)
    if frame.empty:
        raise ConformalSchemaError(f"{source} has no data rows")

    values = {}
    for column in columns:
        parsed = frame[column].map(_parse_float).to_numpy(dtype=float)
        bad = np.flatnonzero(~np.isfinite(parsed))
        if bad.size:
            raise ConformalSchemaError(f"{source} holds a missing or non-numeric value",
                                       column=column, row=int(bad[0]) + 1)
        values[column] = parsed
    weights = values.get('weight')
    if weights is not None:
        negative = np.flatnonzero(weights < 0)
        if negative.size:
            raise ConformalSchemaError(f"{source} holds a negative weight",
                                       column='weight', row=int(negative[0]) + 1)
    return WeightedSample(values['x'], values['y'], weights)


def write_records(records: Sequence[PredictionRecord], path: PathLike) -> Path:
    """Write prediction records as JSON Lines, ordered by method then row"""
    target = Path(path)
    ordered = sorted(records, key=lambda record: (record.method, record.row))
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, 'w', encoding='utf-8', newline='\n') as handle:
            for record in ordered:
                handle.write(json.dumps(record.to_dict(), sort_keys=True) + '\n')
    except OSError as e:
        raise ConformalConfigError(f"cannot write {target}: {e}")
    return target


def read_records(path: PathLike) -> List[PredictionRecord]:
    """Read JSON Lines prediction records"""
    source = Path(path)
    records = []
    try:
        with open(source, 'r', encoding='utf-8') as handle:
            for number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    records.append(PredictionRecord.from_dict(json.loads(line)))
                except json.JSONDecodeError as e:
                    raise ConformalDataError(f"{source} line {number} is not valid JSON: {e}")
    except FileNotFoundError:
        raise ConformalDataError(f"records file not found: {source}")
    return records
