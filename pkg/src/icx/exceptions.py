"""Exception and warning types shared across the package."""

from __future__ import annotations


class IcxError(Exception):
    """Base class for all package-specific errors."""


class DegenerateSeriesError(IcxError):
    """A series carries no usable signal for estimation.

    Raised when a regressor sum of squares or a residual variance is
    exactly zero, so the estimator or the log in an information
    criterion is undefined.
    """


class PathOverflowError(IcxError):
    """A simulated path left the float64 range.

    Explosive recursions grow like ``rho**t`` and can overflow for
    large ``n``.  The error message names the first bad index.
    """


class QuadratureError(IcxError):
    """A bias integral failed to converge to the required accuracy."""


class ConfigError(IcxError):
    """An experiment configuration file could not be interpreted."""


class ExcessDegeneracyError(IcxError):
    """An experiment cell excluded more than one percent of its draws."""


class NonMonotoneTableError(IcxError):
    """A binding table is not strictly increasing.

    The inversion step requires strict monotonicity of the tabulated
    binding function; a violation means the table is corrupt or was
    built on a bad grid.
    """


class SaturationWarning(UserWarning):
    """An inversion input fell below the tabulated range and was clamped."""
