"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so library code should raise
the most specific class that applies.
"""

from __future__ import annotations


class RidgebootError(Exception):
    """Base class for all errors raised by this package."""


class DataError(RidgebootError):
    """Malformed or inconsistent input data (files, shapes, values)."""


class NumericalError(RidgebootError):
    """Numerical failure: SVD non-convergence, rank-zero design, invalid ridge setup."""
