"""Exception hierarchy shared by every aanet module."""


class AANetError(Exception):
    """Base class for all library errors."""


class DimensionError(AANetError, ValueError):
    """Tensor shapes are incompatible with the requested operation."""


class ArgumentError(AANetError, ValueError):
    """A scalar argument is out of its valid range."""


class ConfigError(AANetError, ValueError):
    """An architecture, placement or experiment configuration is invalid."""


class DataFormatError(AANetError, ValueError):
    """A data or artifact file is malformed or inconsistent."""


class DegenerateBaselineError(AANetError, ZeroDivisionError):
    """The reference error table sums to zero for a corruption."""


class NumericError(AANetError, ArithmeticError):
    """A non-finite value was produced."""
