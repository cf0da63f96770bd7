#!/usr/bin/env python3
"""
pyconformal Exceptions

Custom exception classes for the pyconformal library.
"""

from typing import Optional


class ConformalError(Exception):
    """Base exception for all pyconformal errors"""
    pass


class ConformalConfigError(ConformalError):
    """Raised when there's a configuration error"""
    pass


class ConformalDataError(ConformalError, ValueError):
    """Base exception for invalid input data"""
    pass


class ConformalSchemaError(ConformalDataError):
    """Raised when a CSV file violates the x,y[,weight] schema"""

    def __init__(self, message: str, column: Optional[str] = None, row: Optional[int] = None):
        location = []
        if column is not None:
            location.append(f"column '{column}'")
        if row is not None:
            location.append(f"row {row}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.column = column
        self.row = row


class ConformalAlignmentError(ConformalDataError):
    """Raised when prediction records and outcomes do not line up"""
    pass


class EmptyBinError(ConformalDataError):
    """Raised when a covariate falls in a bin without calibration outcomes"""
    pass


class ConformalNumericError(ConformalError, ValueError):
    """Base exception for numeric failures"""
    pass


class RankDeficientDesignError(ConformalNumericError):
    """Raised when a regression design matrix does not have full column rank"""
    pass


class LeverageOneError(ConformalNumericError):
    """Raised when a point has leverage one and cannot be studentized"""
    pass


class NonMonotoneConformityError(ConformalNumericError):
    """Raised when a conformity measure produces a decreasing predictive CDF"""
    pass


class CrispCutoffError(ConformalNumericError):
    """Raised when the support cutoff does not cover the band breakpoints"""
    pass
