"""Exception types shared across the package."""


class PeselError(Exception):
    """Base class for all errors raised by this package."""


class IngestError(PeselError):
    """Input data cannot be loaded (ragged rows, empty file, bad shape)."""


class ParseError(IngestError):
    """A cell in the input could not be parsed as a finite real number."""


class DomainError(PeselError):
    """An argument is outside the range an operation is defined on."""


class DegenerateDataError(PeselError):
    """The data carries no usable signal (e.g. centered matrix is zero)."""


class DegenerateSignalError(PeselError):
    """A signal matrix cannot be standardized (constant column)."""


class SpikeBelowNoiseError(PeselError):
    """Requested rank has an eigenvalue at or below the residual noise level,
    so the heterogeneous ML loading matrix does not exist for that rank."""


class ConfigError(PeselError):
    """A benchmark configuration file violates the documented schema."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid benchmark config: " + "; ".join(self.problems))


class ConvergenceWarning(UserWarning):
    """An iterative routine stopped at its iteration bound before reaching
    its tolerance."""
