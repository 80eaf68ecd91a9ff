"""Exact scalars (Q and Q(sqrt d)), ideals of Z, square classes and Z-lattices.

Everything here is immutable and exact. Rationals are :class:`fractions.Fraction`;
lattices are stored as one positive common denominator together with an integer
matrix in row Hermite normal form, so two lattices are equal exactly when their
stored forms are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
import math
from math import gcd, isqrt, lcm
from typing import Iterable, Sequence

from sympy import factorint

from .errors import DomainError, InputError, NotRational

Rational = Fraction


def as_fraction(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational number: {value!r}") from exc
    if isinstance(value, FieldScalar):
        return value.to_fraction()
    raise InputError(f"not a rational number: {value!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def squarefree_part(n: int) -> int:
    """Signed squarefree part of a nonzero integer."""
    if n == 0:
        raise DomainError("zero has no squarefree part")
    sign = -1 if n < 0 else 1
    core = 1
    for p, e in factorint(abs(n)).items():
        if e % 2:
            core *= p
    return sign * core


# ---------------------------------------------------------------------------
# Field scalars
# ---------------------------------------------------------------------------


class FieldScalar:
    """Element ``re + sq*sqrt(d)`` of Q (``d is None``) or of Q(sqrt d).

    Python ints and Fractions are promoted into whichever field they meet.
    Two FieldScalars must carry the same ``d`` to interoperate.
    """

    __slots__ = ("d", "re", "sq")

    def __init__(self, re=0, sq=0, d: int | None = None):
        re = as_fraction(re)
        sq = as_fraction(sq)
        if d is None:
            if sq != 0:
                raise InputError("rational scalar cannot carry a sqrt part")
        elif d in (0, 1) or squarefree_part(d) != d:
            raise InputError(f"d must be squarefree and not 0 or 1, got {d}")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "sq", sq)

    @classmethod
    def _raw(cls, re: Fraction, sq: Fraction, d):
        obj = object.__new__(cls)
        object.__setattr__(obj, "d", d)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "sq", sq)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("FieldScalar is immutable")

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other) -> FieldScalar | None:
        if isinstance(other, FieldScalar):
            if other.d != self.d:
                raise InputError(f"field mismatch: sqrt({self.d}) vs sqrt({other.d})")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return FieldScalar._raw(Fraction(other), Fraction(0), self.d)
        return None

    @property
    def is_rational(self) -> bool:
        return self.sq == 0

    def to_fraction(self) -> Fraction:
        if self.sq != 0:
            raise NotRational(f"{self} is not rational")
        return self.re

    def in_field(self, d: int | None) -> FieldScalar:
        """Re-tag a rational value into another base field."""
        if d == self.d:
            return self
        return FieldScalar._raw(self.to_fraction(), Fraction(0), d)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldScalar._raw(self.re + o.re, self.sq + o.sq, self.d)

    __radd__ = __add__

    def __neg__(self):
        return FieldScalar._raw(-self.re, -self.sq, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldScalar._raw(self.re - o.re, self.sq - o.sq, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.d is None:
            return FieldScalar._raw(self.re * o.re, Fraction(0), None)
        return FieldScalar._raw(
            self.re * o.re + self.d * self.sq * o.sq,
            self.re * o.sq + self.sq * o.re,
            self.d,
        )

    __rmul__ = __mul__

    def conj(self) -> FieldScalar:
        """Nontrivial automorphism of Q(sqrt d); identity on Q."""
        return FieldScalar._raw(self.re, -self.sq, self.d)

    def norm(self) -> Fraction:
        """Field norm down to Q."""
        if self.d is None:
            return self.re
        return self.re * self.re - self.d * self.sq * self.sq

    def inverse(self) -> FieldScalar:
        if self.re == 0 and self.sq == 0:
            raise DomainError("inversion of zero")
        if self.d is None:
            return FieldScalar._raw(1 / self.re, Fraction(0), None)
        n = self.norm()
        return FieldScalar._raw(self.re / n, -self.sq / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __bool__(self):
        return self.re != 0 or self.sq != 0

    def __eq__(self, other):
        if isinstance(other, FieldScalar):
            return self.d == other.d and self.re == other.re and self.sq == other.sq
        if isinstance(other, (int, Fraction)):
            return self.sq == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash(self.re) if self.sq == 0 else hash((self.re, self.sq, self.d))

    def __repr__(self):
        if self.d is None:
            return f"FieldScalar({format_rational(self.re)})"
        return f"FieldScalar({format_rational(self.re)}, {format_rational(self.sq)}, d={self.d})"

    def __str__(self):
        if self.sq == 0:
            return format_rational(self.re)
        root = f"{format_rational(self.sq)}*sqrt({self.d})"
        return root if self.re == 0 else f"{format_rational(self.re)} + {root}"


def scalar(value, d: int | None = None) -> FieldScalar:
    """Build a FieldScalar in Q (``d=None``) or Q(sqrt d) from a rational-like value."""
    if isinstance(value, FieldScalar):
        return value if value.d == d else value.in_field(d)
    return FieldScalar._raw(as_fraction(value), Fraction(0), d)


def sqrt_of(d: int) -> FieldScalar:
    return FieldScalar(0, 1, d)


def scalar_arith(op: str, x: FieldScalar, y: FieldScalar | None = None) -> FieldScalar:
    """Dispatch ``add``, ``mul``, ``inv`` or ``conj`` on field scalars."""
    if op in ("add", "mul"):
        if y is None:
            raise InputError(f"{op} needs two operands")
        if isinstance(y, FieldScalar) and y.d != x.d:
            raise InputError(f"field mismatch: sqrt({x.d}) vs sqrt({y.d})")
        return x + y if op == "add" else x * y
    if op == "inv":
        return x.inverse()
    if op == "conj":
        return x.conj()
    raise InputError(f"unknown scalar operation {op!r}")


# ---------------------------------------------------------------------------
# Ideals of Z and square classes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class NatIdeal:
    """Ideal ``gen * Z`` of Z; ``gen == 0`` is the zero ideal."""

    gen: int

    def __post_init__(self):
        if self.gen < 0:
            object.__setattr__(self, "gen", -self.gen)

    def intersect(self, other: NatIdeal) -> NatIdeal:
        return NatIdeal(lcm(self.gen, other.gen))

    def __add__(self, other: NatIdeal) -> NatIdeal:
        return NatIdeal(gcd(self.gen, other.gen))

    def __mul__(self, other: NatIdeal) -> NatIdeal:
        return NatIdeal(self.gen * other.gen)

    def __str__(self):
        return f"({self.gen})"


def ideal_generated(values: Iterable) -> NatIdeal:
    """Ideal of Z generated by integers (rationals must be integral)."""
    g = 0
    for v in values:
        v = as_fraction(v)
        if v.denominator != 1:
            raise DomainError(f"{v} is not an integer")
        g = gcd(g, v.numerator)
    return NatIdeal(g)


@dataclass(frozen=True)
class SquareClass:
    """Class of a nonzero rational in Q^x / (Q^x)^2, by its squarefree representative."""

    rep: int

    def __post_init__(self):
        if self.rep == 0 or squarefree_part(self.rep) != self.rep:
            raise InputError(f"{self.rep} is not a squarefree nonzero integer")

    def iota(self) -> NatIdeal:
        """Squarefree ideal attached to the class (over Z: generated by |rep|)."""
        return NatIdeal(abs(self.rep))

    def __str__(self):
        return f"{self.rep} (Q^x)^2"


def square_class(q) -> SquareClass:
    q = as_fraction(q)
    if q == 0:
        raise DomainError("zero has no square class")
    # q = n/m is in the class of n*m
    return SquareClass(squarefree_part(q.numerator * q.denominator))


# ---------------------------------------------------------------------------
# Generic exact linear algebra over a field (Fractions or FieldScalars)
# ---------------------------------------------------------------------------


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form; returns ``(rows, pivot_columns)``."""
    m = [[Fraction(x) if isinstance(x, int) else x for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((k for k in range(r, len(m)) if m[k][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for k in range(len(m)):
            if k != r and m[k][c] != 0:
                f = m[k][c]
                m[k] = [a - f * b for a, b in zip(m[k], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(matrix: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    """Basis of ``{x : matrix @ x = 0}`` (column vectors, returned as lists).

    The basis is the canonical one read off the reduced echelon form, so it is
    deterministic for a given matrix.
    """
    ncols = len(matrix[0]) if matrix else ncols
    red, pivots = rref(matrix, ncols)
    if red:
        zero = red[0][0] * 0
        one = zero + 1
    else:
        zero, one = Fraction(0), Fraction(1)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def det(matrix: Sequence[Sequence]):
    """Determinant by Gaussian elimination over a field."""
    m = [[Fraction(x) if isinstance(x, int) else x for x in r] for r in matrix]
    n = len(m)
    if n == 0:
        return Fraction(1)
    result = m[0][0] * 0 + 1
    for c in range(n):
        piv = next((k for k in range(c, n) if m[k][c] != 0), None)
        if piv is None:
            return m[0][0] * 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            result = -result
        result = result * m[c][c]
        inv = 1 / m[c][c]
        for k in range(c + 1, n):
            if m[k][c] != 0:
                f = m[k][c] * inv
                m[k] = [a - f * b for a, b in zip(m[k], m[c])]
    return result


def mat_inverse(matrix: Sequence[Sequence]) -> list[list]:
    n = len(matrix)
    one = matrix[0][0] * 0 + 1
    zero = one * 0
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(matrix)]
    red, pivots = rref(aug, n)
    if pivots != list(range(n)):
        raise DomainError("matrix is singular")
    return [row[n:] for row in red]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), start=row[0] * 0) for col in bt] for row in a]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(c) for c in zip(*a)]


def identity_matrix(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# Z-lattices
# ---------------------------------------------------------------------------


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _lead(row: Sequence[int]) -> int:
    for c, v in enumerate(row):
        if v:
            return c
    return -1


def _hnf_insert(rows: dict[int, list[int]], v: list[int]) -> None:
    """Fold integer vector ``v`` into the echelon basis ``rows`` (pivot column -> row)."""
    n = len(v)
    for c in range(n):
        if v[c] == 0:
            continue
        if c not in rows:
            if v[c] < 0:
                v = [-x for x in v]
            rows[c] = v
            return
        r = rows[c]
        a, b = r[c], v[c]
        g, x, y = _xgcd(a, b)
        if g < 0:
            g, x, y = -g, -x, -y
        new_r = [x * ri + y * vi for ri, vi in zip(r, v)]
        ag, bg = a // g, b // g
        v = [bg * ri - ag * vi for ri, vi in zip(r, v)]
        rows[c] = new_r
    # v reduced to zero


def _hnf_finish(rows: dict[int, list[int]]) -> list[list[int]]:
    cols = sorted(rows)
    out = [rows[c] for c in cols]
    # reduce entries above each pivot into [0, pivot)
    for k in range(len(out) - 1, -1, -1):
        c = cols[k]
        p = out[k][c]
        for i in range(k):
            q = out[i][c] // p
            if q:
                out[i] = [a - q * b for a, b in zip(out[i], out[k])]
    return out


@dataclass(frozen=True)
class ZLattice:
    """Z-lattice in Q^n: ``(1/denom) * rowspan_Z(rows)`` with ``rows`` in canonical HNF."""

    ambient_dim: int
    denom: int
    rows: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def basis(self) -> list[tuple[Fraction, ...]]:
        return [tuple(Fraction(x, self.denom) for x in r) for r in self.rows]

    def contains(self, v: Sequence) -> bool:
        return lattice_member(self, v)

    def contains_lattice(self, other: ZLattice) -> bool:
        return all(lattice_member(self, b) for b in other.basis)

    def coordinates(self, v: Sequence) -> list[int] | None:
        """Integer coordinates of ``v`` in the stored basis, or None if not a member."""
        if len(v) != self.ambient_dim:
            raise InputError(f"vector of length {len(v)} in dimension {self.ambient_dim}")
        w = [as_fraction(x) * self.denom for x in v]
        if any(x.denominator != 1 for x in w):
            return None
        w = [int(x) for x in w]
        coeffs = []
        for row in self.rows:
            c = _lead(row)
            q, r = divmod(w[c], row[c])
            if r:
                return None
            coeffs.append(q)
            if q:
                w = [a - q * b for a, b in zip(w, row)]
        if any(w):
            return None
        return coeffs

    def __add__(self, other: ZLattice) -> ZLattice:
        if other.ambient_dim != self.ambient_dim:
            raise InputError("lattice dimension mismatch")
        return hnf_reduce(self.basis + other.basis, self.ambient_dim)

    def volume(self) -> Fraction:
        """Covolume of a full-rank lattice (product of HNF pivots / denom^n)."""
        if self.rank != self.ambient_dim:
            raise DomainError("volume needs a full-rank lattice")
        prod = 1
        for row in self.rows:
            prod *= row[_lead(row)]
        return Fraction(prod, self.denom**self.ambient_dim)

    def scaled(self, factor) -> ZLattice:
        f = as_fraction(factor)
        return hnf_reduce([[x * f for x in b] for b in self.basis], self.ambient_dim)


def hnf_reduce(vectors: Iterable[Sequence], ambient_dim: int) -> ZLattice:
    """Canonical basis of the Z-span of rational vectors."""
    vecs = [[as_fraction(x) for x in v] for v in vectors]
    for v in vecs:
        if len(v) != ambient_dim:
            raise InputError(f"vector of length {len(v)} in dimension {ambient_dim}")
    den = reduce(lcm, (x.denominator for v in vecs for x in v), 1)
    rows: dict[int, list[int]] = {}
    for v in vecs:
        iv = [int(x * den) for x in v]
        if any(iv):
            _hnf_insert(rows, iv)
            # keep entries small: reduce the whole basis every insertion
            reduced = _hnf_finish(rows)
            rows = {_lead(r): r for r in reduced}
    out = _hnf_finish(rows)
    g = reduce(gcd, (x for r in out for x in r), den)
    out = tuple(tuple(x // g for x in r) for r in out)
    return ZLattice(ambient_dim, den // g, out)


def lattice_member(L: ZLattice, v: Sequence) -> bool:
    return L.coordinates(v) is not None


def integer_kernel(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Z-basis of ``{c in Z^m : sum_k c_k rows[k] = 0}`` for integer row vectors."""
    m = len(rows)
    if m == 0:
        return []
    n = len(rows[0])
    aug = [list(r) + [int(i == k) for i in range(m)] for k, r in enumerate(rows)]
    L = hnf_reduce(aug, n + m)
    return [list(r[n:]) for r in L.rows if not any(r[:n])]


def _clear(vectors: Sequence[Sequence]) -> list[list[int]]:
    den = reduce(lcm, (as_fraction(x).denominator for v in vectors for x in v), 1)
    return [[int(as_fraction(x) * den) for x in v] for v in vectors]


def lattice_intersection(A: ZLattice, B: ZLattice) -> ZLattice:
    if A.ambient_dim != B.ambient_dim:
        raise InputError("lattice dimension mismatch")
    ba, bb = A.basis, B.basis
    if not ba or not bb:
        return hnf_reduce([], A.ambient_dim)
    stacked = _clear(ba + [[-x for x in v] for v in bb])
    kernel = integer_kernel(stacked)
    n = A.ambient_dim
    out = []
    for c in kernel:
        out.append([sum((c[k] * ba[k][j] for k in range(len(ba))), Fraction(0)) for j in range(n)])
    return hnf_reduce(out, n)


def lattice_in_subspace(L: ZLattice, equations: Sequence[Sequence]) -> ZLattice:
    """Sublattice of ``L`` on which each linear functional in ``equations`` vanishes."""
    basis = L.basis
    if not basis:
        return L
    # image of each basis vector under all functionals
    images = [[sum((as_fraction(e[j]) * b[j] for j in range(L.ambient_dim)), Fraction(0)) for e in equations] for b in basis]
    if not equations:
        return L
    kernel = integer_kernel(_clear(images))
    out = [[sum((c[k] * basis[k][j] for k in range(len(basis))), Fraction(0)) for j in range(L.ambient_dim)] for c in kernel]
    return hnf_reduce(out, L.ambient_dim)


def floor_sqrt_fraction(q: Fraction) -> int:
    """Largest integer r >= 0 with r*r <= q (q >= 0)."""
    q = as_fraction(q)
    if q < 0:
        raise DomainError("negative radicand")
    r = isqrt(q.numerator // q.denominator)
    while (r + 1) * (r + 1) <= q:
        r += 1
    while r * r > q:
        r -= 1
    return r


def ldl_decomposition(gram: Sequence[Sequence]) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Split ``v^T G v`` as ``sum_i d[i] * (v_i + sum_{j>i} m[i][j] v_j)^2``.

    Requires every leading pivot to be nonzero (true for definite forms).
    """
    n = len(gram)
    A = [[as_fraction(x) for x in row] for row in gram]
    d: list[Fraction] = []
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        p = A[i][i]
        if p == 0:
            raise DomainError("zero pivot: form is not definite")
        d.append(p)
        for j in range(i + 1, n):
            m[i][j] = A[i][j] / p
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                A[j][k] -= p * m[i][j] * m[i][k]
    return d, m


def short_vectors(gram: Sequence[Sequence], bound) -> list[tuple[int, ...]]:
    """All integer vectors v with ``v^T G v <= bound`` for positive definite G.

    Exact Fincke-Pohst style enumeration: coordinates are fixed from the last one
    down, and each range is cut by the exact remaining budget.
    """
    bound = as_fraction(bound)
    d, m = ldl_decomposition(gram)
    if any(x <= 0 for x in d):
        raise DomainError("form is not positive definite")
    n = len(d)
    out: list[tuple[int, ...]] = []
    v = [0] * n

    def rec(i: int, budget: Fraction):
        if i < 0:
            out.append(tuple(v))
            return
        centre = -sum((m[i][j] * v[j] for j in range(i + 1, n)), Fraction(0))
        span = budget / d[i]
        r = floor_sqrt_fraction(span) + 1
        lo = math.floor(centre) - r
        hi = math.ceil(centre) + r
        for x in range(lo, hi + 1):
            diff = x - centre
            cost = d[i] * diff * diff
            if cost <= budget:
                v[i] = x
                rec(i - 1, budget - cost)
        v[i] = 0

    if bound >= 0:
        rec(n - 1, bound)
    return out
