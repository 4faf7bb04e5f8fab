"""Exception hierarchy and CLI exit codes."""


class ZenodecError(Exception):
    """Base class for package errors."""


class ConfigurationError(ZenodecError):
    """Invalid parameters, incompatible lattices, unknown recipe/field."""

    exit_code = 2


class NumericalError(ZenodecError):
    """Numerical failure: instability, negative mass, and the like."""

    exit_code = 3


class DepletedStateError(NumericalError):
    """State norm fell below the usable floor."""


class ConvergenceError(NumericalError):
    """Iteration failed to reach its convergence criterion."""
