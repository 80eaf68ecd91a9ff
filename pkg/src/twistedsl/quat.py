"""Quaternion algebras (a,b/F), first-kind involutions, Hilbert symbols, discriminants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Sequence

from sympy import factorint, isprime

from .errors import DomainError, InputError, InternalConsistencyError
from .exactnum import (
    FieldScalar,
    NatIdeal,
    SquareClass,
    as_fraction,
    format_rational,
    nullspace,
    scalar,
    square_class,
)

INF = "inf"


@dataclass(frozen=True)
class QuatAlgebra:
    """The algebra generated over F by i, j with i^2 = a, j^2 = b, ij = -ji."""

    a: FieldScalar
    b: FieldScalar

    def __post_init__(self):
        a, b = self.a, self.b
        if not isinstance(a, FieldScalar):
            a = scalar(a, b.d if isinstance(b, FieldScalar) else None)
        if not isinstance(b, FieldScalar):
            b = scalar(b, a.d)
        if a.d != b.d:
            raise InputError("a and b live in different fields")
        if not a or not b:
            raise InputError("a and b must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def over_q(cls, a, b) -> QuatAlgebra:
        return cls(scalar(a), scalar(b))

    @property
    def d(self) -> int | None:
        """Base field tag: None for Q, else the squarefree d of Q(sqrt d)."""
        return self.a.d

    @property
    def is_rational(self) -> bool:
        return self.d is None

    def scalar(self, value) -> FieldScalar:
        return scalar(value, self.d)

    def element(self, x=0, y=0, z=0, t=0) -> Quaternion:
        return Quaternion(self, self.scalar(x), self.scalar(y), self.scalar(z), self.scalar(t))

    def from_coords(self, coords: Sequence) -> Quaternion:
        if len(coords) != 4:
            raise InputError("a quaternion needs exactly 4 coordinates")
        return self.element(*coords)

    def one(self) -> Quaternion:
        return self.element(1)

    def zero(self) -> Quaternion:
        return self.element()

    @property
    def i(self) -> Quaternion:
        return self.element(0, 1)

    @property
    def j(self) -> Quaternion:
        return self.element(0, 0, 1)

    @property
    def ij(self) -> Quaternion:
        return self.element(0, 0, 0, 1)

    def basis(self) -> list[Quaternion]:
        return [self.one(), self.i, self.j, self.ij]

    def is_definite(self) -> bool:
        """Ramified at the real place (base field Q only)."""
        if not self.is_rational:
            raise DomainError("definiteness is only defined here for algebras over Q")
        return self.a.re < 0 and self.b.re < 0

    def extend(self, d: int) -> QuatAlgebra:
        """The same algebra with scalars extended to Q(sqrt d)."""
        return QuatAlgebra(self.a.in_field(d), self.b.in_field(d))

    def __str__(self):
        field = "Q" if self.d is None else f"Q(sqrt({self.d}))"
        return f"({self.a},{self.b}/{field})"


class Quaternion:
    """``x + y i + z j + t ij`` with coordinates in the algebra's base field."""

    __slots__ = ("alg", "x", "y", "z", "t")

    def __init__(self, alg: QuatAlgebra, x, y, z, t):
        self.alg = alg
        self.x, self.y, self.z, self.t = x, y, z, t

    def coords(self) -> tuple[FieldScalar, FieldScalar, FieldScalar, FieldScalar]:
        return (self.x, self.y, self.z, self.t)

    def rational_coords(self) -> tuple[Fraction, ...]:
        return tuple(c.to_fraction() for c in self.coords())

    def _check(self, other: Quaternion):
        if other.alg is not self.alg and other.alg != self.alg:
            raise InputError(f"algebra mismatch: {self.alg} vs {other.alg}")

    def __add__(self, other):
        if not isinstance(other, Quaternion):
            return self + self.alg.element(other)
        self._check(other)
        return Quaternion(self.alg, self.x + other.x, self.y + other.y, self.z + other.z, self.t + other.t)

    __radd__ = __add__

    def __neg__(self):
        return Quaternion(self.alg, -self.x, -self.y, -self.z, -self.t)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Quaternion):
            s = self.alg.scalar(other)
            return Quaternion(self.alg, self.x * s, self.y * s, self.z * s, self.t * s)
        self._check(other)
        if self.alg.d is None:
            return _rational_mul(self, other)
        a, b = self.alg.a, self.alg.b
        x1, y1, z1, t1 = self.x, self.y, self.z, self.t
        x2, y2, z2, t2 = other.x, other.y, other.z, other.t
        ab = a * b
        return Quaternion(
            self.alg,
            x1 * x2 + a * (y1 * y2) + b * (z1 * z2) - ab * (t1 * t2),
            x1 * y2 + y1 * x2 + b * (t1 * z2 - z1 * t2),
            x1 * z2 + z1 * x2 + a * (y1 * t2 - t1 * y2),
            x1 * t2 + t1 * x2 + y1 * z2 - z1 * y2,
        )

    def __rmul__(self, other):
        # scalars are central
        return self * other

    def __truediv__(self, other):
        if isinstance(other, Quaternion):
            return self * other.inverse()
        return self * (1 / self.alg.scalar(other))

    def conj(self) -> Quaternion:
        return Quaternion(self.alg, self.x, -self.y, -self.z, -self.t)

    def tr(self) -> FieldScalar:
        return self.x + self.x

    def nrm(self) -> FieldScalar:
        a, b = self.alg.a, self.alg.b
        return self.x * self.x - a * (self.y * self.y) - b * (self.z * self.z) + (a * b) * (self.t * self.t)

    def inverse(self) -> Quaternion:
        n = self.nrm()
        if not n:
            raise DomainError(f"{self} is not invertible")
        return self.conj() * n.inverse()

    def is_zero(self) -> bool:
        return not (self.x or self.y or self.z or self.t)

    def is_scalar(self) -> bool:
        return not (self.y or self.z or self.t)

    def is_pure(self) -> bool:
        return not self.x

    def extend(self, d: int) -> Quaternion:
        return self.alg.extend(d).element(*(c.in_field(d) for c in self.coords()))

    def __eq__(self, other):
        if isinstance(other, Quaternion):
            return self.alg == other.alg and self.coords() == other.coords()
        if isinstance(other, (int, Fraction, FieldScalar)):
            return self.is_scalar() and self.x == other
        return NotImplemented

    def __hash__(self):
        return hash(self.coords())

    def __repr__(self):
        return f"Quaternion({', '.join(str(c) for c in self.coords())})"

    def __str__(self):
        parts = []
        for c, name in zip(self.coords(), ("", "i", "j", "ij")):
            if c:
                parts.append(f"({c}){name}" if name else str(c))
        return " + ".join(parts) if parts else "0"


def _rational_mul(p: Quaternion, q: Quaternion) -> Quaternion:
    # same formula as Quaternion.__mul__, on bare Fractions
    a, b = p.alg.a.re, p.alg.b.re
    x1, y1, z1, t1 = p.x.re, p.y.re, p.z.re, p.t.re
    x2, y2, z2, t2 = q.x.re, q.y.re, q.z.re, q.t.re
    zero = _ZERO
    raw = FieldScalar._raw
    if not (x1 or y1 or z1 or t1) or not (x2 or y2 or z2 or t2):
        # sparse matrices are common; skip the 16 products
        z0 = raw(zero, zero, None)
        return Quaternion(p.alg, z0, z0, z0, z0)
    return Quaternion(
        p.alg,
        raw(x1 * x2 + a * y1 * y2 + b * z1 * z2 - a * b * t1 * t2, zero, None),
        raw(x1 * y2 + y1 * x2 + b * (t1 * z2 - z1 * t2), zero, None),
        raw(x1 * z2 + z1 * x2 + a * (y1 * t2 - t1 * y2), zero, None),
        raw(x1 * t2 + t1 * x2 + y1 * z2 - z1 * y2, zero, None),
    )


_ZERO = Fraction(0)


def quat_mul(p: Quaternion, q: Quaternion) -> Quaternion:
    return p * q


def std_conj_tr_nrm(q: Quaternion) -> tuple[Quaternion, FieldScalar, FieldScalar]:
    return q.conj(), q.tr(), q.nrm()


# ---------------------------------------------------------------------------
# Involutions
# ---------------------------------------------------------------------------


class InvolutionType(str, Enum):
    SYMPLECTIC = "SYMPLECTIC"
    ORTHOGONAL_TYPE = "ORTHOGONAL_TYPE"


def _normalize_pure(u: Quaternion) -> Quaternion:
    """Scale a pure quaternion with rational coordinates to primitive integral form."""
    if not u.alg.is_rational:
        return u
    coords = u.rational_coords()
    den = reduce(lcm, (c.denominator for c in coords), 1)
    ints = [int(c * den) for c in coords]
    g = reduce(gcd, ints, 0)
    ints = [v // g for v in ints]
    lead = next(v for v in ints if v)
    if lead < 0:
        ints = [-v for v in ints]
    return u.alg.element(*ints)


class Involution:
    """First-kind involution of a quaternion algebra.

    ``Involution.standard(H)`` is quaternion conjugation. ``Involution.orthogonal(u)``
    is ``q -> u * conj(q) * u^-1`` for a pure invertible ``u``; ``u`` is only defined up
    to a nonzero scalar, and is stored in primitive integral form when rational.
    """

    __slots__ = ("alg", "u", "_u_inv")

    def __init__(self, alg: QuatAlgebra, u: Quaternion | None = None):
        if u is not None:
            if u.alg != alg:
                raise InputError("involution generator lies in a different algebra")
            if not u.is_pure():
                raise DomainError("orthogonal involution needs a pure quaternion (tr(u) = 0)")
            if not u.nrm():
                raise DomainError("orthogonal involution needs an invertible quaternion")
            u = _normalize_pure(u)
        self.alg = alg
        self.u = u
        self._u_inv = None if u is None else u.inverse()

    @classmethod
    def standard(cls, alg: QuatAlgebra) -> Involution:
        return cls(alg, None)

    @classmethod
    def orthogonal(cls, u: Quaternion) -> Involution:
        return cls(u.alg, u)

    @property
    def is_standard(self) -> bool:
        return self.u is None

    def __call__(self, q: Quaternion) -> Quaternion:
        return apply_involution(self, q)

    def extend(self, d: int) -> Involution:
        alg = self.alg.extend(d)
        return Involution(alg, None if self.u is None else self.u.extend(d))

    def __eq__(self, other):
        if not isinstance(other, Involution):
            return NotImplemented
        if self.alg != other.alg:
            return False
        if self.u is None or other.u is None:
            return self.u is None and other.u is None
        # u' = lambda u  <=>  all 2x2 minors of the coordinate pair vanish
        a, b = self.u.coords(), other.u.coords()
        return all(a[r] * b[s] == a[s] * b[r] for r in range(4) for s in range(r + 1, 4))

    def __hash__(self):
        return hash((self.alg, None if self.u is None else self.u.coords()))

    def __repr__(self):
        if self.u is None:
            return f"Involution.standard({self.alg})"
        return f"Involution.orthogonal({self.u!r})"


def apply_involution(sigma: Involution, q: Quaternion) -> Quaternion:
    if q.alg is not sigma.alg and q.alg != sigma.alg:
        raise InputError("involution and quaternion live in different algebras")
    if sigma.u is None:
        return q.conj()
    return sigma.u * q.conj() * sigma._u_inv


def classify_involution(sigma: Involution) -> InvolutionType:
    return InvolutionType.SYMPLECTIC if sigma.is_standard else InvolutionType.ORTHOGONAL_TYPE


def involution_disc(sigma: Involution) -> SquareClass:
    """Square class of x^2 for any invertible x in the -1 eigenspace."""
    if sigma.is_standard:
        raise DomainError("the discriminant is only defined for orthogonal involutions")
    if not sigma.alg.is_rational:
        raise DomainError("involution discriminant implemented over Q only")
    usq = sigma.u * sigma.u
    return square_class(usq.x.to_fraction())


def involution_matrix(sigma: Involution) -> list[list[FieldScalar]]:
    """Matrix of sigma on coordinates (column k = image of the k-th basis element)."""
    images = [apply_involution(sigma, e).coords() for e in sigma.alg.basis()]
    return [[images[col][row] for col in range(4)] for row in range(4)]


def plus_minus_spaces(sigma: Involution, H: QuatAlgebra | None = None) -> tuple[list[Quaternion], list[Quaternion]]:
    """Bases of the +1 (dimension 3) and -1 (dimension 1) eigenspaces of an orthogonal sigma."""
    H = sigma.alg if H is None else H
    if H != sigma.alg:
        raise InputError("involution belongs to a different algebra")
    if sigma.is_standard:
        raise DomainError("eigenspaces have dimensions 1 and 3 for the standard involution; orthogonal only")
    S = involution_matrix(sigma)
    plus = nullspace([[S[r][c] - (1 if r == c else 0) for c in range(4)] for r in range(4)])
    minus = nullspace([[S[r][c] + (1 if r == c else 0) for c in range(4)] for r in range(4)])
    return [H.from_coords(v) for v in plus], [H.from_coords(v) for v in minus]


# ---------------------------------------------------------------------------
# Hilbert symbols and algebra discriminants over Q
# ---------------------------------------------------------------------------


def _is_inf(place) -> bool:
    return place == INF or (isinstance(place, float) and math.isinf(place) and place > 0)


def _split_p(n: int, p: int) -> tuple[int, int]:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def _legendre(u: int, p: int) -> int:
    r = pow(u % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else 1


def hilbert_symbol(a, b, place) -> int:
    """Local Hilbert symbol (a,b)_v over Q at a prime p or at ``INF``."""
    a, b = as_fraction(a), as_fraction(b)
    if a == 0 or b == 0:
        raise DomainError("Hilbert symbol needs nonzero arguments")
    if _is_inf(place):
        return -1 if a < 0 and b < 0 else 1
    if isinstance(place, bool) or not isinstance(place, int) or not isprime(place):
        raise InputError(f"place must be a prime or infinity, got {place!r}")
    p = place
    # multiply by squares of denominators: same square class
    A = a.numerator * a.denominator
    B = b.numerator * b.denominator
    alpha, u = _split_p(A, p)
    beta, v = _split_p(B, p)
    if p == 2:
        eps = lambda w: ((w - 1) // 2) % 2  # noqa: E731
        omega = lambda w: ((w * w - 1) // 8) % 2  # noqa: E731
        e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if e % 2 else 1
    s = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    if beta % 2:
        s *= _legendre(u, p)
    if alpha % 2:
        s *= _legendre(v, p)
    return s


def relevant_primes(a, b) -> list[int]:
    """Primes where (a,b) can ramify: 2 and the primes dividing numerators/denominators."""
    a, b = as_fraction(a), as_fraction(b)
    n = 2 * a.numerator * a.denominator * b.numerator * b.denominator
    return sorted(factorint(abs(n)))


@dataclass(frozen=True)
class AlgebraDiscriminant:
    disc: NatIdeal
    ramified_inf: bool
    ramified_primes: tuple[int, ...]


def algebra_discriminant(H: QuatAlgebra) -> AlgebraDiscriminant:
    if not H.is_rational:
        raise DomainError("algebra discriminant is only supported over Q")
    a, b = H.a.re, H.b.re
    primes = tuple(p for p in relevant_primes(a, b) if hilbert_symbol(a, b, p) == -1)
    inf = hilbert_symbol(a, b, INF) == -1
    if (len(primes) + inf) % 2:
        raise InternalConsistencyError("odd number of ramified places")
    return AlgebraDiscriminant(NatIdeal(math.prod(primes)), inf, primes)


# ---------------------------------------------------------------------------
# JSON helpers
# ---------------------------------------------------------------------------


def scalar_to_json(s: FieldScalar):
    if s.d is None or s.sq == 0:
        return format_rational(s.re)
    return {"re": format_rational(s.re), "sqrt": format_rational(s.sq)}


def scalar_from_json(value, d: int | None) -> FieldScalar:
    if isinstance(value, dict):
        if d is None:
            raise InputError("sqrt component given for an algebra over Q")
        return FieldScalar(value.get("re", 0), value.get("sqrt", 0), d)
    return scalar(value, d)


def algebra_to_json(H: QuatAlgebra) -> dict:
    field = "Q" if H.d is None else {"sqrt": H.d}
    return {"a": format_rational(H.a.re), "b": format_rational(H.b.re), "field": field}


def algebra_from_json(obj) -> QuatAlgebra:
    if not isinstance(obj, dict) or "a" not in obj or "b" not in obj:
        raise InputError('algebra must be an object with keys "a" and "b"')
    field = obj.get("field", "Q")
    if field == "Q":
        d = None
    elif isinstance(field, dict) and "sqrt" in field:
        d = int(field["sqrt"])
    else:
        raise InputError(f"unknown field {field!r}")
    return QuatAlgebra(scalar_from_json(obj["a"], d), scalar_from_json(obj["b"], d))


def quaternion_to_json(q: Quaternion) -> list:
    return [scalar_to_json(c) for c in q.coords()]


def quaternion_from_json(H: QuatAlgebra, value) -> Quaternion:
    if not isinstance(value, list) or len(value) != 4:
        raise InputError("a quaternion is a JSON array [x, y, z, t]")
    return H.element(*(scalar_from_json(v, H.d) for v in value))


def involution_to_json(sigma: Involution) -> dict:
    if sigma.is_standard:
        return {"kind": "standard"}
    return {"kind": "orthogonal", "u": quaternion_to_json(sigma.u)}


def involution_from_json(H: QuatAlgebra, obj) -> Involution:
    if not isinstance(obj, dict) or obj.get("kind") not in ("standard", "orthogonal"):
        raise InputError('involution must be {"kind": "standard"} or {"kind": "orthogonal", "u": [...]}')
    if obj["kind"] == "standard":
        return Involution.standard(H)
    return Involution.orthogonal(quaternion_from_json(H, obj.get("u")))
