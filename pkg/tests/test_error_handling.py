#!/usr/bin/env python3
"""
Error handling tests - exception hierarchy and error payloads
"""

import pytest
from pyconformal.exceptions import (
    ConformalError,
    ConformalConfigError,
    ConformalDataError,
    ConformalSchemaError,
    ConformalAlignmentError,
    EmptyBinError,
    ConformalNumericError,
    RankDeficientDesignError,
    LeverageOneError,
    NonMonotoneConformityError,
    CrispCutoffError,
)

DATA_ERRORS = [ConformalSchemaError, ConformalAlignmentError, EmptyBinError]
NUMERIC_ERRORS = [RankDeficientDesignError, LeverageOneError, NonMonotoneConformityError, CrispCutoffError]


class TestErrorHandling:
    """Test error handling and exception hierarchy"""

    def test_conformal_error_base(self):
        try:
            raise ConformalError("Test error")
        except ConformalError as e:
            assert str(e) == "Test error"

    def test_config_error_is_not_a_value_error(self):
        error = ConformalConfigError("Config error")
        assert isinstance(error, ConformalError)
        assert not isinstance(error, ValueError)

    @pytest.mark.parametrize("exc_class", DATA_ERRORS)
    def test_data_errors(self, exc_class):
        exception = exc_class("bad input")
        assert isinstance(exception, ConformalDataError)
        assert isinstance(exception, ConformalError)
        assert not isinstance(exception, ConformalNumericError)

    @pytest.mark.parametrize("exc_class", NUMERIC_ERRORS)
    def test_numeric_errors(self, exc_class):
        exception = exc_class("numeric failure")
        assert isinstance(exception, ConformalNumericError)
        assert isinstance(exception, ConformalError)
        assert not isinstance(exception, ConformalDataError)

    @pytest.mark.parametrize("exc_class", [ConformalDataError, ConformalNumericError] + DATA_ERRORS + NUMERIC_ERRORS)
    def test_caught_as_value_error(self, exc_class):
        with pytest.raises(ValueError):
            raise exc_class("invalid")

    def test_schema_error_location(self):
        error = ConformalSchemaError("non-numeric value", column='y', row=3)
        assert str(error) == "non-numeric value (column 'y', row 3)"
        assert (error.column, error.row) == ('y', 3)

    def test_schema_error_column_only(self):
        error = ConformalSchemaError("missing column", column='x')
        assert str(error) == "missing column (column 'x')"
        assert error.row is None

    def test_schema_error_without_location(self):
        error = ConformalSchemaError("file is empty")
        assert str(error) == "file is empty"
        assert error.column is None

    def test_exception_chaining(self):
        original_error = ZeroDivisionError("singular")
        try:
            try:
                raise original_error
            except ZeroDivisionError as e:
                raise RankDeficientDesignError("design is rank deficient") from e
        except ConformalNumericError as numeric_error:
            assert numeric_error.__cause__ is original_error
