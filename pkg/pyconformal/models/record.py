#!/usr/bin/env python3
"""
Prediction Record Models for pyconformal

The per-test-point output of a predictive system: band, crisp CDF,
thickness and traffic-light class.
"""

from typing import Any, Dict, Iterator, List, Optional

from ..exceptions import ConformalDataError
from .band import PredictiveBand, band_thickness
from .cdf import StepCDF
from .epistemic import EpistemicClass, epistemic_class

# Record flags
FLAG_EMPTY_BIN_FALLBACK = 'empty_bin_fallback'
FLAG_INVALID_LIMITS = 'invalid_limits'


class Prediction:
    """
    Forecast for one test point

    Unpacks as ``cdf, thickness, epistemic``.
    """

    def __init__(self,
                 band: PredictiveBand,
                 cdf: StepCDF,
                 thickness: float,
                 epistemic: EpistemicClass,
                 flags: Optional[List[str]] = None):
        self.band = band
        self.cdf = cdf
        self.thickness = float(thickness)
        self.epistemic = epistemic
        self.flags = list(flags or [])

    @classmethod
    def from_band(cls, band: PredictiveBand, cdf: StepCDF,
                  flags: Optional[List[str]] = None) -> 'Prediction':
        """Bundle a band and its crisp CDF with thickness and traffic-light class"""
        thickness = band_thickness(band)
        flags = list(flags or [])
        if not band.has_valid_limits:
            flags.append(FLAG_INVALID_LIMITS)
        return cls(band, cdf, thickness, epistemic_class(thickness), flags)

    def __iter__(self) -> Iterator[Any]:
        return iter((self.cdf, self.thickness, self.epistemic))

    def __repr__(self) -> str:
        return (f"Prediction(thickness={self.thickness:.4f}, epistemic={self.epistemic.value}, "
                f"flags={self.flags})")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'band': self.band.to_dict(),
            'cdf': self.cdf.to_dict(),
            'thickness': self.thickness,
            'epistemic': self.epistemic.value,
            'flags': list(self.flags),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Prediction':
        try:
            return cls(
                band=PredictiveBand.from_dict(data['band']),
                cdf=StepCDF.from_dict(data['cdf']),
                thickness=data['thickness'],
                epistemic=EpistemicClass(data['epistemic']),
                flags=data.get('flags'),
            )
        except (KeyError, ValueError) as e:
            raise ConformalDataError(f"malformed prediction record: {e}")


class PredictionRecord:
    """A prediction tagged with its method, test row and covariate"""

    def __init__(self, method: str, row: int, x: float, prediction: Prediction):
        self.method = method
        self.row = int(row)
        self.x = float(x)
        self.prediction = prediction

    def __repr__(self) -> str:
        return f"PredictionRecord(method={self.method!r}, row={self.row}, x={self.x:g})"

    def to_dict(self) -> Dict[str, Any]:
        data = {'method': self.method, 'row': self.row, 'x': self.x}
        data.update(self.prediction.to_dict())
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PredictionRecord':
        try:
            return cls(data['method'], data['row'], data['x'], Prediction.from_dict(data))
        except KeyError as e:
            raise ConformalDataError(f"prediction record is missing field {e}")
