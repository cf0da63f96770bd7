#!/usr/bin/env python3
"""
Base Models for pyconformal

Contains the right-continuous step function shared by predictive CDFs and
the lower/upper bounds of predictive bands.
"""

from typing import Any, Dict, Sequence, Union

import numpy as np

from ..exceptions import ConformalDataError
from ..utils import TOL

ArrayLike = Union[float, Sequence[float], np.ndarray]


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float)
    values.setflags(write=False)
    return values


class StepFunction:
    """
    Nondecreasing right-continuous step function with values in [0, 1]

    The function equals ``initial`` below the first jump point and
    ``levels[i]`` on ``[jumps[i], jumps[i + 1])``. The terminal level need
    not be 1 and the initial level need not be 0.
    """

    def __init__(self, jumps: Sequence[float], levels: Sequence[float], initial: float = 0.0):
        jumps_array = np.asarray(jumps, dtype=float).reshape(-1)
        levels_array = np.asarray(levels, dtype=float).reshape(-1)
        if jumps_array.shape != levels_array.shape:
            raise ConformalDataError("jumps and levels must have equal length")
        if not np.all(np.isfinite(jumps_array)):
            raise ConformalDataError("jump points must be finite")
        if np.any(np.diff(jumps_array) <= 0):
            raise ConformalDataError("jump points must be strictly increasing")
        chain = np.concatenate(([initial], levels_array))
        if np.any(chain < -TOL) or np.any(chain > 1 + TOL):
            raise ConformalDataError("step function levels must lie in [0, 1]")
        if np.any(np.diff(chain) < -TOL):
            raise ConformalDataError("step function levels must be nondecreasing")

        chain = np.clip(chain, 0.0, 1.0)
        self._initial = float(chain[0])
        self._jumps = _frozen(jumps_array)
        self._levels = _frozen(chain[1:])

    @classmethod
    def from_values(cls, points: Sequence[float], values: Sequence[float],
                    initial: float = 0.0) -> 'StepFunction':
        """Build from values at sorted points, dropping points where the value does not change"""
        jumps, levels = compress_steps(points, values, initial)
        return cls(jumps, levels, initial)

    @property
    def jumps(self) -> np.ndarray:
        """Jump points in increasing order"""
        return self._jumps

    @property
    def levels(self) -> np.ndarray:
        """Function values from each jump point on"""
        return self._levels

    @property
    def initial(self) -> float:
        """Value below the first jump point"""
        return self._initial

    @property
    def terminal(self) -> float:
        """Value from the last jump point on"""
        return float(self._levels[-1]) if self._levels.size else self._initial

    def evaluate(self, y: ArrayLike, side: str = 'right') -> Union[float, np.ndarray]:
        """
        Evaluate the function or its left limit

        Args:
            y: Point or array of points
            side: 'right' for F(y), 'left' for the left limit F(y-)

        Returns:
            Float for scalar input, array otherwise
        """
        if side not in ('right', 'left'):
            raise ValueError("side must be 'right' or 'left'")
        points = np.asarray(y, dtype=float)
        index = np.searchsorted(self._jumps, points, side=side)
        table = np.concatenate(([self._initial], self._levels))
        result = table[index]
        if result.ndim == 0:
            return float(result)
        return result

    def __call__(self, y: ArrayLike) -> Union[float, np.ndarray]:
        return self.evaluate(y)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return (self._jumps.shape == other._jumps.shape
                and np.allclose(self._jumps, other._jumps, rtol=0, atol=TOL)
                and np.allclose(self._levels, other._levels, rtol=0, atol=TOL)
                and abs(self._initial - other._initial) <= TOL)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (f"{type(self).__name__}(jumps={self._jumps.tolist()}, "
                f"levels={self._levels.tolist()}, initial={self._initial})")

    def to_dict(self) -> Dict[str, Any]:
        """Serialize to plain lists"""
        return {
            'jumps': self._jumps.tolist(),
            'levels': self._levels.tolist(),
            'initial': self._initial,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'StepFunction':
        """Rebuild from ``to_dict`` output"""
        return cls(data.get('jumps', []), data.get('levels', []), data.get('initial', 0.0))


def compress_steps(points: Sequence[float], values: Sequence[float], initial: float = 0.0):
    """Keep only the points where a nondecreasing value sequence increases"""
    points_array = np.asarray(points, dtype=float).reshape(-1)
    values_array = np.asarray(values, dtype=float).reshape(-1)
    if points_array.size == 0:
        return points_array, values_array
    previous = np.concatenate(([initial], values_array[:-1]))
    keep = values_array > previous + TOL
    return points_array[keep], values_array[keep]
