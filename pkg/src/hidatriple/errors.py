"""Exception hierarchy shared by every module."""


class HidaTripleError(Exception):
    """Base class for all library errors."""


class DomainError(HidaTripleError, ValueError):
    """An input lies outside the domain of the operation (e.g. a non-unit)."""


class PrecisionError(HidaTripleError):
    """Not enough p-adic (or q-adic) precision to certify a result.

    ``loss`` records the number of digits the operation would have consumed.
    """

    def __init__(self, message: str, loss: int | None = None, suggestion: int | None = None):
        super().__init__(message)
        self.loss = loss
        self.suggestion = suggestion


class ConfigError(HidaTripleError, ValueError):
    """Inconsistent configuration or unsupported option."""


class HypothesisViolation(HidaTripleError):
    """A computable standing hypothesis failed; ``name`` identifies it."""

    def __init__(self, name: str, message: str):
        super().__init__(f"Hypothesis ({name}) violated: {message}")
        self.name = name


class AmbiguityError(HidaTripleError):
    """A choice (e.g. of a Hecke root) is not determined by the data."""


class HenselError(HidaTripleError):
    """Hensel lifting impossible: the residual root is not simple."""


class IterationError(HidaTripleError):
    """An iterative limit failed to stabilise within its budget."""


class SlopeNotIsolatedError(HidaTripleError):
    """The Newton polygon has no vertex isolating the requested slope."""


class DataError(HidaTripleError, ValueError):
    """Supplied tables are incomplete or inconsistent."""


class DegeneracyError(HidaTripleError):
    """An eigen-decomposition is not semisimple / multiplicity-free at precision."""


class NormalizationError(HidaTripleError):
    """Half-integral p-power exponents failed to cancel."""


class ExtensionNeeded(HidaTripleError):
    """A square root requires a quadratic extension that is not configured."""
