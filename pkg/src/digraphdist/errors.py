"""Exception types shared across the toolkit."""


class ParameterError(ValueError):
    """An argument is outside its admissible range (bad probability, vertex id, ...)."""


class DomainError(ValueError):
    """The requested quantity is undefined for these parameters (e.g. subcritical base)."""


class CapacityError(RuntimeError):
    """A simulation would overflow 64-bit integer counts; raised before any sampling."""


class NumericalError(RuntimeError):
    """An iterative numerical routine failed to reach its tolerance."""


class IngestionError(RuntimeError):
    """Edge-list input is missing or malformed; message names the offending line."""
