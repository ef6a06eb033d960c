"""Exception types shared across the library."""


class IfslabError(Exception):
    """Base class for all library errors."""


class BackendError(IfslabError):
    """An operation was invoked on a numeric backend it does not support."""


class NormalizationError(IfslabError):
    """A probability measure was required but total mass is not 1."""


class ResolutionError(IfslabError):
    """A dyadic level argument exceeds the stored resolution or is disordered."""


class BudgetExceededError(IfslabError):
    """An enumeration would exceed the configured atom/word budget."""


class EmptyRestrictionError(IfslabError):
    """Conditioning on a zero-mass set."""


class DegenerateError(IfslabError):
    """Degenerate input (e.g. zero total variance in a CLT comparison)."""


class UncertainZeroError(IfslabError):
    """A sign could not be certified on the requested backend.

    Unreachable on the exact backends (Fraction / algebraic), which always
    decide signs; kept so callers can handle the contract uniformly.
    """


class HypothesisViolationError(IfslabError):
    """A certified precondition failed; carries a witness point/interval."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InconclusiveError(IfslabError):
    """Subdivision hit its depth limit before certifying either way."""


class UnsupportedError(IfslabError):
    """Operation undefined for this input class (e.g. sdim_set of a
    contract-on-average system)."""


class ConfigError(IfslabError):
    """Malformed scenario / family configuration."""
