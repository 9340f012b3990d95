"""Exception hierarchy shared by all modules."""


class ShiftSpecError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ShiftSpecError, ValueError):
    """An index or support lies outside the domain of a weight or space."""


class UnsupportedNormError(ShiftSpecError, NotImplementedError):
    """The requested quantity is not available for this norm family."""


class HypothesisViolation(ShiftSpecError):
    """Inputs fall outside the setting in which a prediction holds
    (for example both shift directions unbounded)."""


class PreconditionError(ShiftSpecError, ValueError):
    """A documented precondition of an operation is not met."""


class PoleError(ShiftSpecError, ZeroDivisionError):
    """A Laurent symbol with negative powers was evaluated at zero."""


class ConfigError(ShiftSpecError, ValueError):
    """Invalid experiment configuration or region description."""
