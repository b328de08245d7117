"""Exception hierarchy."""


class BaerMLError(Exception):
    """Base class for library errors."""


class DimensionError(BaerMLError, ValueError):
    """Matrix or vector shapes do not fit together."""


class RingMismatchError(BaerMLError, ValueError):
    """Operands live over different rings."""


class NotWellDefinedError(BaerMLError, ValueError):
    """A matrix does not define a homomorphism between the given modules."""


class DiagramError(BaerMLError, ValueError):
    """Hypotheses on a diagram of modules fail; the message names the first violated identity."""


class NotPureError(BaerMLError, ValueError):
    """A submodule required to be pure is not; ``witness`` carries ``(r, x)``."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ResourceLimitError(BaerMLError, RuntimeError):
    """A configured resource cap would be exceeded."""

    def __init__(self, cap: str, limit: int, requested: int):
        super().__init__(f"resource cap {cap}={limit} exceeded (requested {requested})")
        self.cap = cap
        self.limit = limit
        self.requested = requested


class SchemaError(BaerMLError, ValueError):
    """Input document does not match the expected schema."""
