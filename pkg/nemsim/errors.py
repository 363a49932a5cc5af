"""Exception hierarchy shared by all nemsim layers."""


class NemsimError(Exception):
    """Base class for every error raised by nemsim."""


class InvalidDimensionError(NemsimError, ValueError):
    """A Hilbert-space dimension is too small or otherwise unusable."""


class DimensionMismatchError(NemsimError, ValueError):
    """Operator and layout dimensions disagree."""


class NumericInputError(NemsimError, ValueError):
    """Input contains NaN or infinite entries."""


class DomainError(NemsimError, ValueError):
    """A closed-form expression is evaluated on a resonant denominator."""


class CalibrationError(NemsimError, ValueError):
    """A calibration search found no root in its bracket."""


class ConvergenceError(NemsimError, ValueError):
    """A truncated computation did not converge at the largest cutoff."""


class ScheduleError(NemsimError, ValueError):
    """A pulse schedule cannot be built from the requested gate."""


class CompileError(NemsimError, ValueError):
    """A spin term cannot be compiled into native gates."""


class IntegrationError(NemsimError, RuntimeError):
    """Time integration lost trace or produced non-finite states."""


class EigendecompositionError(NemsimError, RuntimeError):
    """Diagonalization of a Hamiltonian or Liouvillian failed."""


class FitError(NemsimError, RuntimeError):
    """An exponential fit could not extract a decay time."""


class ConfigError(NemsimError, ValueError):
    """Experiment configuration error with a source position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(self.__str__())

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"line {self.line}, column {self.column or 1}: {self.message}"


class UnknownExperimentError(ConfigError):
    """Experiment name is not in the registry."""

    def __init__(self, name: str, known: list[str], line: int | None = None, column: int | None = None):
        self.name = name
        self.known = known
        super().__init__(
            f"unknown experiment '{name}' (available: {', '.join(known)})", line, column
        )
