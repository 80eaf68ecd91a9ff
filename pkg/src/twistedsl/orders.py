"""Z-orders in quaternion algebras over Q and their involution-related invariants."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import isqrt
from typing import Iterable, Sequence

from sympy import primefactors

from .errors import DomainError, InputError, InternalConsistencyError, NotAnOrder
from .exactnum import (
    NatIdeal,
    ZLattice,
    det,
    hnf_reduce,
    ideal_generated,
    lattice_in_subspace,
    lattice_intersection,
    short_vectors,
)
from .quat import (
    Involution,
    QuatAlgebra,
    Quaternion,
    algebra_discriminant,
    apply_involution,
    involution_disc,
    involution_matrix,
    quaternion_from_json,
    quaternion_to_json,
    algebra_from_json,
    algebra_to_json,
)


@dataclass(frozen=True)
class Order:
    """Rank-4 ring lattice in a rational quaternion algebra (coordinates in 1, i, j, ij)."""

    alg: QuatAlgebra
    lattice: ZLattice

    @property
    def basis(self) -> list[Quaternion]:
        return [self.alg.from_coords(v) for v in self.lattice.basis]

    def __contains__(self, q: Quaternion) -> bool:
        if q.alg != self.alg:
            return False
        return self.lattice.contains(q.rational_coords())

    def __str__(self):
        return "Z<" + ", ".join(str(e) for e in self.basis) + ">"


@dataclass(frozen=True)
class UnitSet:
    elements: tuple[Quaternion, ...]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, q):
        return q in self.elements


def _lattice_of(alg: QuatAlgebra, elements: Iterable[Quaternion]) -> ZLattice:
    return hnf_reduce([q.rational_coords() for q in elements], 4)


def build_order(H: QuatAlgebra, basis: Sequence[Quaternion]) -> Order:
    """Canonical order spanned by ``basis``; raises NotAnOrder if it is not one."""
    if not H.is_rational:
        raise DomainError("orders are implemented over Q only")
    for q in basis:
        if q.alg != H:
            raise InputError("basis element lies in a different algebra")
    L = _lattice_of(H, basis)
    if L.rank != 4:
        raise NotAnOrder(f"lattice has rank {L.rank}, not 4")
    one = H.one()
    if not L.contains(one.rational_coords()):
        raise NotAnOrder("lattice does not contain 1", product=one)
    elems = [H.from_coords(v) for v in L.basis]
    for p in elems:
        for q in elems:
            pq = p * q
            if not L.contains(pq.rational_coords()):
                raise NotAnOrder(f"product ({p})*({q}) = {pq} is not in the lattice", product=pq)
    return Order(H, L)


def order_from_lattice(H: QuatAlgebra, L: ZLattice) -> Order:
    return build_order(H, [H.from_coords(v) for v in L.basis])


def sigma_image(O: Order, sigma: Involution) -> ZLattice:
    return _lattice_of(O.alg, (apply_involution(sigma, e) for e in O.basis))


def is_sigma_order(O: Order, sigma: Involution) -> bool:
    if sigma.alg != O.alg:
        raise InputError("involution belongs to a different algebra")
    return all(apply_involution(sigma, e) in O for e in O.basis)


def sigma_core(O: Order, sigma: Involution) -> Order:
    """The sigma-order ``O ∩ sigma(O)``."""
    return order_from_lattice(O.alg, lattice_intersection(O.lattice, sigma_image(O, sigma)))


def trace_gram(elements: Sequence[Quaternion]) -> list[list[Fraction]]:
    return [[(p * q.conj()).tr().to_fraction() for q in elements] for p in elements]


def norm_gram(elements: Sequence[Quaternion]) -> list[list[Fraction]]:
    """Gram matrix G of the norm form: nrm(sum c_k e_k) = c^T G c."""
    return [[v / 2 for v in row] for row in trace_gram(elements)]


def order_discriminant(O: Order) -> NatIdeal:
    D = det(trace_gram(O.basis))
    D = abs(D)
    if D.denominator != 1:
        raise InternalConsistencyError(f"trace determinant {D} is not integral")
    r = isqrt(D.numerator)
    if r * r != D.numerator:
        raise InternalConsistencyError(f"trace determinant {D} is not a square")
    return NatIdeal(r)


def is_maximal_sigma_order(O: Order, sigma: Involution) -> bool:
    """sigma-stable with discriminant disc(H) ∩ iota(disc(sigma))."""
    if sigma.is_standard:
        raise DomainError("maximality criterion is stated for orthogonal involutions")
    if not is_sigma_order(O, sigma):
        return False
    target = algebra_discriminant(O.alg).disc.intersect(involution_disc(sigma).iota())
    return order_discriminant(O) == target


def unit_group(O: Order) -> UnitSet:
    """All norm-1 elements of an order in a definite algebra."""
    if not O.alg.is_definite():
        raise DomainError("infinite unit group")
    basis = O.basis
    gram = norm_gram(basis)
    units = []
    for c in short_vectors(gram, 1):
        q = sum((e * k for e, k in zip(basis, c)), O.alg.zero())
        if q.nrm() == 1:
            units.append(q)
    units.sort(key=lambda q: tuple((-abs(x), -x) for x in q.rational_coords()))
    return UnitSet(tuple(units))


def conjugate_order(O: Order, v: Quaternion) -> Order:
    if not v.nrm():
        raise DomainError(f"{v} is not invertible")
    vinv = v.inverse()
    return build_order(O.alg, [v * e * vinv for e in O.basis])


def plus_part(O: Order, sigma: Involution) -> ZLattice:
    """Sublattice ``O ∩ H^+`` of elements fixed by sigma."""
    S = involution_matrix(sigma)
    eqs = [[(S[r][c] - (1 if r == c else 0)).to_fraction() for c in range(4)] for r in range(4)]
    return lattice_in_subspace(O.lattice, eqs)


def minus_part(O: Order, sigma: Involution) -> ZLattice:
    S = involution_matrix(sigma)
    eqs = [[(S[r][c] + (1 if r == c else 0)).to_fraction() for c in range(4)] for r in range(4)]
    return lattice_in_subspace(O.lattice, eqs)


def plus_trace_ideal(O: Order, sigma: Involution) -> NatIdeal:
    if sigma.is_standard:
        raise DomainError("plus trace ideal is defined for orthogonal involutions")
    return ideal_generated(2 * v[0] for v in plus_part(O, sigma).basis)


def sigma_overorder_witnesses(O: Order, sigma: Involution) -> list[Quaternion]:
    """Elements w making O + Zw a strictly larger sigma-stable ring.

    w runs over (sum of a nonempty subset of the basis) / p for primes p | disc(O).
    """
    found = []
    disc = order_discriminant(O).gen
    basis = O.basis
    subsets = [c for k in range(1, 5) for c in combinations(basis, k)]
    for p in primefactors(disc):
        for combo in subsets:
            w = sum(combo, O.alg.zero()) * Fraction(1, p)
            if w in O:
                continue
            L = hnf_reduce(O.lattice.basis + [w.rational_coords()], 4)
            elems = [O.alg.from_coords(v) for v in L.basis]
            if not all(L.contains(apply_involution(sigma, x).rational_coords()) for x in elems):
                continue
            if all(L.contains((x * y).rational_coords()) for x in elems for y in elems):
                found.append(w)
    return found


def order_to_json(O: Order) -> dict:
    return {"algebra": algebra_to_json(O.alg), "basis": [quaternion_to_json(e) for e in O.basis]}


def order_from_json(obj) -> Order:
    if not isinstance(obj, dict) or "algebra" not in obj or "basis" not in obj:
        raise InputError('order must be an object with keys "algebra" and "basis"')
    H = algebra_from_json(obj["algebra"])
    basis = obj["basis"]
    if not isinstance(basis, list):
        raise InputError("basis must be a list of quaternions")
    return build_order(H, [quaternion_from_json(H, q) for q in basis])
