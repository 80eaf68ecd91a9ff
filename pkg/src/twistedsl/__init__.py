"""Exact arithmetic for twisted SL(2) over orders in rational quaternion algebras."""

from .errors import (
    DomainError,
    InputError,
    InternalConsistencyError,
    NotAnOrder,
    NotRational,
    TwistedSLError,
    Unconverged,
)
from .quat import Involution, QuatAlgebra, Quaternion
from .orders import Order, build_order
from .mat2grp import Mat2, Lattice16
from .qform import QForm5

__all__ = [
    "DomainError",
    "InputError",
    "InternalConsistencyError",
    "NotAnOrder",
    "NotRational",
    "TwistedSLError",
    "Unconverged",
    "Involution",
    "QuatAlgebra",
    "Quaternion",
    "Order",
    "build_order",
    "Mat2",
    "Lattice16",
    "QForm5",
]

__version__ = "0.1.0"
