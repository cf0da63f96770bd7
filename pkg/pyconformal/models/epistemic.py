#!/usr/bin/env python3
"""
Epistemic Uncertainty Models for pyconformal

Traffic-light classification of band thickness.
"""

from enum import Enum

# Cut points; both ends of the middle interval belong to MEDIUM
LOW_CUT = 0.25
HIGH_CUT = 0.5


class EpistemicClass(str, Enum):
    """Traffic-light tag for the epistemic uncertainty of a forecast"""

    LOW = 'low'
    MEDIUM = 'medium'
    HIGH = 'high'

    @property
    def rank(self) -> int:
        return ('low', 'medium', 'high').index(self.value)


def epistemic_class(thickness: float) -> EpistemicClass:
    """Classify a band thickness: low below 0.25, high above 0.5, medium otherwise"""
    if thickness < LOW_CUT:
        return EpistemicClass.LOW
    if thickness > HIGH_CUT:
        return EpistemicClass.HIGH
    return EpistemicClass.MEDIUM
