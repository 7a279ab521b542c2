"""Exception types shared across the library."""


class DomainError(ValueError):
    """Raised when an operation is evaluated outside its mathematical domain,
    e.g. a radius with too little mass for the delta schedule to be defined."""


class AtomBudgetError(ValueError):
    """Raised when a requested measure would exceed the 10^6 atom budget."""


class ConfigError(ValueError):
    """Raised for malformed or incomplete run configurations."""
