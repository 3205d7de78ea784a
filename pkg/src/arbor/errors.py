"""Exception hierarchy shared by all arbor modules.

Errors are grouped by how a batch front end should react: bad input,
violated mathematical precondition, or an exhausted resource budget.
"""


class ArborError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ArborError):
    """Malformed problem description (schema violation, bad literal)."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class PreconditionError(ArborError):
    """An operation was invoked outside its mathematical domain."""


class DegenerateMapError(PreconditionError):
    """Numerator and denominator share a projective root."""


class PoweringMapError(PreconditionError):
    """The map is projectively a powering map; portraits are undefined."""


class BadReductionError(PreconditionError):
    """The map does not have good reduction at the given prime."""


class WildRegimeError(PreconditionError):
    """Positive height at the prime; the tame machinery does not apply."""


class RamifiedBasePrimeError(PreconditionError):
    """The rational prime divides disc(min_poly); manual analysis required."""


class ResourceCapError(ArborError):
    """A configured effort cap (precision, depth, degree, budget) was hit."""


class PrecisionError(ResourceCapError):
    """p-adic precision cap exceeded; carries the best bound obtained."""

    def __init__(self, message, lower_bound=None):
        self.lower_bound = lower_bound
        super().__init__(message)
