"""Exception types shared across the package."""


class DeltaSieveError(Exception):
    """Base class for every error raised by deltasieve."""


class DomainError(DeltaSieveError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigurationError(DeltaSieveError, ValueError):
    """Inconsistent series, dial or criterion configuration."""


class NoClosedFormError(DeltaSieveError, LookupError):
    """No registered steady-state form matches the query."""


class UnsupportedDeltaError(DeltaSieveError, ValueError):
    """The requested Δ (usually an odd one) is not covered by the procedure."""


class SteppingError(DeltaSieveError, ArithmeticError):
    """The neighbour-stepping relations do not hold at this row."""


class CodecError(DeltaSieveError, ValueError):
    """A message cannot be converted to or from an integer."""


class MessageTooLargeError(DeltaSieveError, ValueError):
    """Encoded message integer is not below the steady-state p."""


class InvalidKeyError(DeltaSieveError, ValueError):
    """Ciphertext and private key do not describe a point on the sum series."""
