"""Exception types shared across the package."""


class PulseRcError(Exception):
    """Base class for every error this package raises on purpose."""


class ParameterError(PulseRcError, ValueError):
    """A parameter or input value is outside its valid domain."""


class DimensionError(PulseRcError, ValueError):
    """Array shapes or sequence lengths do not line up."""


class SingularSystemError(PulseRcError, ValueError):
    """The normal equations are singular; regularization would fix it."""


class DegenerateVarianceError(PulseRcError, ValueError):
    """A statistic that needs spread was asked of a constant sequence."""


class DivergenceError(PulseRcError, RuntimeError):
    """A generated benchmark sequence kept diverging across retries."""


class CsvParseError(PulseRcError, ValueError):
    """A data file could not be parsed as numeric columns."""


class SpecError(PulseRcError, ValueError):
    """An experiment spec is malformed or inconsistent."""
