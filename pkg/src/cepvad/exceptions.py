"""Exception hierarchy.

Each error class carries the process exit code the CLI maps it to.
"""


class CepvadError(Exception):
    exit_code = 3


class ConfigurationError(CepvadError, ValueError):
    exit_code = 2


class DataError(CepvadError, ValueError):
    exit_code = 3


class FormatError(DataError):
    """A file on disk does not match the expected format."""


class EmptyInputError(DataError):
    pass


class DegenerateSignalError(CepvadError, ValueError):
    """Signal has (near-)zero variance and cannot be normalized."""

    exit_code = 4


class DegenerateSplitError(CepvadError, ValueError):
    """One side of an SNR split holds no frames."""

    exit_code = 4

    def __init__(self, message, n_high=0, n_low=0):
        super().__init__(message)
        self.n_high = n_high
        self.n_low = n_low


class FitError(CepvadError, ValueError):
    exit_code = 4


class OptimizationError(CepvadError, RuntimeError):
    exit_code = 4
