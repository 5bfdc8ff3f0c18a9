class SturmRandError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SturmRandError, ValueError):
    """A point or interval lies outside the working interval."""


class IntegrationError(SturmRandError):
    """The Prüfer integrator could not advance (step-size underflow)."""

    def __init__(self, position, message=None):
        self.position = float(position)
        super().__init__(message or f"step size underflow at x = {self.position!r}")


class SearchBoundError(SturmRandError):
    """No energy bracket was found within the configured search bound."""


class DegenerateEigenfunctionError(SturmRandError, ValueError):
    """Boundary data (u, u') = (0, 0) cannot define a boundary angle."""


class InvalidBumpError(SturmRandError):
    """The coupling bump does not make the terminal angle strictly monotone."""


class EmptyExperimentError(SturmRandError, ValueError):
    """Statistics were requested over zero trial records."""


class ModelSchemaError(SturmRandError, ValueError):
    """A model document does not match the schema.

    ``field`` names the offending entry, e.g. ``bumps[2].support``.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
