"""Exception types shared across the package."""


class TwistedSLError(Exception):
    """Base class for all errors raised by twistedsl."""


class InputError(TwistedSLError, ValueError):
    """Malformed or mismatched input (dimensions, base fields, algebras)."""


class DomainError(TwistedSLError, ValueError):
    """Input is well-formed but outside the domain of the operation."""


class NotAnOrder(DomainError):
    """A candidate basis does not span an order.

    ``product`` holds the offending product (or missing element) when known.
    """

    def __init__(self, message, product=None):
        super().__init__(message)
        self.product = product


class Unconverged(TwistedSLError):
    """Ring saturation did not stabilise within the round budget."""

    def __init__(self, message, lattice=None, rounds=0):
        super().__init__(message)
        self.lattice = lattice
        self.rounds = rounds


class NotRational(DomainError):
    """A value expected in Q has a nonzero sqrt(d) component."""


class InternalConsistencyError(TwistedSLError, AssertionError):
    """An invariant that should be impossible to break was broken."""
