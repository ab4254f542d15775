"""Exception hierarchy shared by all loewner modules."""


class LoewnerError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LoewnerError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(LoewnerError):
    """A stated hypothesis of an operation failed a numerical check."""


class ConfigError(LoewnerError, ValueError):
    """Malformed or unknown configuration input."""


class NumericalError(LoewnerError, RuntimeError):
    """A computation could not be completed to the requested accuracy."""


class ReconstructionError(NumericalError):
    """A reconstructed solution pair failed its defining residual check."""
