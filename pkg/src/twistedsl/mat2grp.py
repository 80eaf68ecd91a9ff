"""2x2 quaternionic matrices, the hat involution, SL^sigma(2, .) and its Lie algebra.

Matrices are flattened to 16 coordinates as (a, b, c, d) with each entry in the
basis 1, i, j, ij; integral structures inside Mat(2,H) are Z-lattices in that
coordinate space.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import DomainError, InputError, NotRational, Unconverged
from .exactnum import ZLattice, hnf_reduce, nullspace, rref
from .orders import Order, plus_part
from .quat import (
    Involution,
    QuatAlgebra,
    Quaternion,
    apply_involution,
    quaternion_from_json,
    quaternion_to_json,
)


class Mat2:
    """Matrix ``[[a, b], [c, d]]`` with entries in one quaternion algebra."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: Quaternion, b: Quaternion, c: Quaternion, d: Quaternion):
        alg = a.alg
        if not all(q.alg is alg or q.alg == alg for q in (b, c, d)):
            raise InputError("matrix entries lie in different algebras")
        self.a, self.b, self.c, self.d = a, b, c, d

    @property
    def alg(self) -> QuatAlgebra:
        return self.a.alg

    @property
    def entries(self) -> tuple[Quaternion, Quaternion, Quaternion, Quaternion]:
        return (self.a, self.b, self.c, self.d)

    @classmethod
    def identity(cls, H: QuatAlgebra) -> Mat2:
        return cls(H.one(), H.zero(), H.zero(), H.one())

    @classmethod
    def zero(cls, H: QuatAlgebra) -> Mat2:
        z = H.zero()
        return cls(z, z, z, z)

    @classmethod
    def J(cls, H: QuatAlgebra) -> Mat2:
        return cls(H.zero(), H.one(), -H.one(), H.zero())

    @classmethod
    def upper(cls, z: Quaternion) -> Mat2:
        H = z.alg
        return cls(H.one(), z, H.zero(), H.one())

    @classmethod
    def lower(cls, z: Quaternion) -> Mat2:
        H = z.alg
        return cls(H.one(), H.zero(), z, H.one())

    @classmethod
    def unit(cls, row: int, col: int, q: Quaternion) -> Mat2:
        """``q`` placed at (row, col), zeros elsewhere."""
        z = q.alg.zero()
        entries = [z, z, z, z]
        entries[2 * row + col] = q
        return cls(*entries)

    @classmethod
    def from_coords(cls, H: QuatAlgebra, v: Sequence) -> Mat2:
        if len(v) != 16:
            raise InputError("a 2x2 quaternion matrix has 16 coordinates")
        return cls(*(H.from_coords(v[4 * k : 4 * k + 4]) for k in range(4)))

    def coords(self) -> tuple:
        return tuple(c for q in self.entries for c in q.coords())

    def rational_coords(self) -> tuple[Fraction, ...]:
        return tuple(c for q in self.entries for c in q.rational_coords())

    def __add__(self, other: Mat2) -> Mat2:
        return Mat2(*(p + q for p, q in zip(self.entries, other.entries)))

    def __sub__(self, other: Mat2) -> Mat2:
        return Mat2(*(p - q for p, q in zip(self.entries, other.entries)))

    def __neg__(self) -> Mat2:
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other):
        if isinstance(other, Mat2):
            a1, b1, c1, d1 = self.entries
            a2, b2, c2, d2 = other.entries
            return Mat2(a1 * a2 + b1 * c2, a1 * b2 + b1 * d2, c1 * a2 + d1 * c2, c1 * b2 + d1 * d2)
        # right multiplication by a quaternion or scalar
        return Mat2(*(q * other for q in self.entries))

    def __rmul__(self, other):
        if isinstance(other, Quaternion):
            return Mat2(*(other * q for q in self.entries))
        return Mat2(*(q * other for q in self.entries))

    def conj_transpose(self) -> Mat2:
        return Mat2(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())

    def extend(self, d: int) -> Mat2:
        return Mat2(*(q.extend(d) for q in self.entries))

    def is_rational(self) -> bool:
        return all(c.sq == 0 for c in self.coords())

    def __eq__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.coords())

    def __repr__(self):
        return f"Mat2({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"

    def __str__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


def hat_sigma(sigma: Involution, M: Mat2) -> Mat2:
    s = lambda q: apply_involution(sigma, q)  # noqa: E731
    return Mat2(s(M.d), -s(M.b), -s(M.c), s(M.a))


def twisted_sl_membership(sigma: Involution, M: Mat2) -> bool:
    return M * hat_sigma(sigma, M) == Mat2.identity(M.alg)


def membership_by_entries(sigma: Involution, M: Mat2) -> bool:
    """Entrywise test: a sigma(b), c sigma(d) fixed by sigma and a sigma(d) - b sigma(c) = 1."""
    s = lambda q: apply_involution(sigma, q)  # noqa: E731
    ab = M.a * s(M.b)
    cd = M.c * s(M.d)
    return s(ab) == ab and s(cd) == cd and M.a * s(M.d) - M.b * s(M.c) == M.alg.one()


def sl_inverse(sigma: Involution, M: Mat2) -> Mat2:
    if not twisted_sl_membership(sigma, M):
        raise DomainError("matrix is not in SL^sigma(2, H)")
    return hat_sigma(sigma, M)


def _left_mult_matrix(M: Mat2) -> list[list]:
    """16x16 matrix of X -> M X on coordinates (column k = image of basis vector k)."""
    H = M.alg
    zero = H.scalar(0)
    one = H.scalar(1)
    cols = []
    for k in range(16):
        e = [zero] * 16
        e[k] = one
        cols.append((M * Mat2.from_coords(H, e)).coords())
    return [[cols[c][r] for c in range(16)] for r in range(16)]


def mat2_inverse(M: Mat2) -> Mat2:
    """Two-sided inverse by solving M X = I exactly."""
    H = M.alg
    A = _left_mult_matrix(M)
    rhs = Mat2.identity(H).coords()
    aug = [list(A[r]) + [rhs[r]] for r in range(16)]
    red, pivots = rref(aug, 16)
    if pivots != list(range(16)):
        raise DomainError("matrix is not invertible")
    return Mat2.from_coords(H, [row[16] for row in red])


def words_up_to(generators: Sequence[Mat2], max_length: int) -> list[Mat2]:
    """Distinct products of at most ``max_length`` generators (identity included), in BFS order."""
    if not generators:
        raise InputError("need at least one generator")
    I = Mat2.identity(generators[0].alg)
    seen = {I}
    out = [I]
    frontier = [I]
    for _ in range(max_length):
        nxt = []
        for w in frontier:
            for g in generators:
                m = w * g
                if m not in seen:
                    seen.add(m)
                    nxt.append(m)
        out.extend(nxt)
        frontier = nxt
    return out


def random_word(generators: Sequence[Mat2], rng, length: int) -> Mat2:
    """Product of ``length`` generators drawn with ``rng.choice``."""
    M = Mat2.identity(generators[0].alg)
    for _ in range(length):
        M = M * rng.choice(generators)
    return M


# ---------------------------------------------------------------------------
# Lie algebra
# ---------------------------------------------------------------------------


def hat_sigma_matrix(sigma: Involution) -> list[list]:
    H = sigma.alg
    zero, one = H.scalar(0), H.scalar(1)
    cols = []
    for k in range(16):
        e = [zero] * 16
        e[k] = one
        cols.append(hat_sigma(sigma, Mat2.from_coords(H, e)).coords())
    return [[cols[c][r] for c in range(16)] for r in range(16)]


def lie_basis(sigma: Involution, H: QuatAlgebra | None = None) -> list[Mat2]:
    """Basis of {X : hat_sigma(X) = -X}."""
    H = sigma.alg if H is None else H
    if H != sigma.alg:
        raise InputError("involution belongs to a different algebra")
    S = hat_sigma_matrix(sigma)
    shifted = [[S[r][c] + (1 if r == c else 0) for c in range(16)] for r in range(16)]
    return [Mat2.from_coords(H, v) for v in nullspace(shifted)]


def bracket(X: Mat2, Y: Mat2) -> Mat2:
    return X * Y - Y * X


def span_test(mats: Sequence[Mat2]) -> Callable[[Mat2], bool]:
    """Membership test for the F-span of ``mats``; the echelon form is computed once."""
    red, piv = rref([m.coords() for m in mats], 16) if mats else ([], [])

    def contains(X: Mat2) -> bool:
        v = list(X.coords())
        for row, p in zip(red, piv):
            f = v[p]
            if f:
                v = [a - f * b for a, b in zip(v, row)]
        return not any(v)

    return contains


def in_span(mats: Sequence[Mat2], X: Mat2) -> bool:
    return span_test(mats)(X)


def bracket_closed(B: Sequence[Mat2]) -> bool:
    """[X,Y] in span(B) for all X, Y in B; antisymmetry leaves only pairs i < j."""
    contains = span_test(B)
    return all(contains(bracket(B[i], B[j])) for i in range(len(B)) for j in range(i + 1, len(B)))


# ---------------------------------------------------------------------------
# Lattices in Mat(2,H) and ring closure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Lattice16:
    alg: QuatAlgebra
    lattice: ZLattice
    is_ring: bool = False
    unital: bool = False
    converged_round: int | None = None

    @property
    def basis(self) -> list[Mat2]:
        return [Mat2.from_coords(self.alg, v) for v in self.lattice.basis]

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def __contains__(self, M: Mat2) -> bool:
        return M.alg == self.alg and self.lattice.contains(M.rational_coords())

    def same_lattice(self, other: Lattice16) -> bool:
        return self.alg == other.alg and self.lattice == other.lattice


def _lattice16(mats: Iterable[Mat2]) -> ZLattice:
    return hnf_reduce([m.rational_coords() for m in mats], 16)


def matrix_order(O: Order) -> Lattice16:
    """Mat(2, O) as a rank-16 lattice."""
    mats = [Mat2.unit(r, c, e) for r in range(2) for c in range(2) for e in O.basis]
    return Lattice16(O.alg, _lattice16(mats), is_ring=True, unital=True)


def elementary_generators(O: Order, sigma: Involution) -> list[Mat2]:
    """Unipotents over a basis of O ∩ H^+ together with J; all lie in SL^sigma(2, O)."""
    H = O.alg
    plus = [H.from_coords(v) for v in plus_part(O, sigma).basis]
    gens = [Mat2.upper(e) for e in plus] + [Mat2.lower(e) for e in plus]
    return gens + [Mat2.J(H)]


def algebra_closure(H: QuatAlgebra, generators: Sequence[Mat2], max_rounds: int = 8) -> Lattice16:
    """Smallest unital ring lattice containing ``generators``, by repeated saturation."""
    if not generators:
        raise InputError("need at least one generator")
    for g in generators:
        if g.alg != H:
            raise InputError("generator lies in a different algebra")
    L = _lattice16([Mat2.identity(H), *generators])
    for rnd in range(1, max_rounds + 1):
        basis = [Mat2.from_coords(H, v) for v in L.basis]
        products = [x * y for x in basis for y in basis]
        bigger = hnf_reduce(L.basis + [p.rational_coords() for p in products], 16)
        if bigger == L:
            return Lattice16(H, L, is_ring=True, unital=True, converged_round=rnd)
        L = bigger
    raise Unconverged(
        f"no closure after {max_rounds} rounds (non-integral generators?)",
        lattice=Lattice16(H, L),
        rounds=max_rounds,
    )


def conjugate(gamma: Mat2, M: Mat2, gamma_inv: Mat2) -> Mat2:
    return gamma * M * gamma_inv


def _gamma_inverse(gamma: Mat2, sigma: Involution) -> Mat2:
    sig = sigma if sigma.alg == gamma.alg else sigma.extend(gamma.alg.d)
    if twisted_sl_membership(sig, gamma):
        return hat_sigma(sig, gamma)
    return mat2_inverse(gamma)


def conjugate_rational(gamma: Mat2, G: Mat2, gamma_inv: Mat2, base: QuatAlgebra) -> Mat2:
    """gamma G gamma^-1 brought back to the rational algebra; NotRational if impossible."""
    Gx = G.extend(gamma.alg.d) if gamma.alg.d is not None and G.alg.d is None else G
    C = gamma * Gx * gamma_inv
    if not C.is_rational():
        raise NotRational(f"conjugate of {G} has a nonzero sqrt({gamma.alg.d}) part")
    return Mat2.from_coords(base, [c.re for c in C.coords()])


def conjugation_check(gamma: Mat2, source_gens: Sequence[Mat2], target: Lattice16, sigma: Involution) -> bool:
    """True iff gamma G gamma^-1 lies in ``target`` for every source generator."""
    gamma_inv = _gamma_inverse(gamma, sigma)
    return all(conjugate_rational(gamma, G, gamma_inv, target.alg) in target for G in source_gens)


def conjugate_lattice(gamma: Mat2, source: Lattice16, sigma: Involution) -> Lattice16:
    gamma_inv = _gamma_inverse(gamma, sigma)
    mats = [conjugate_rational(gamma, G, gamma_inv, source.alg) for G in source.basis]
    return Lattice16(source.alg, _lattice16(mats), source.is_ring, source.unital)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def mat2_to_json(M: Mat2) -> dict:
    return {k: quaternion_to_json(q) for k, q in zip("abcd", M.entries)}


def mat2_from_json(H: QuatAlgebra, obj) -> Mat2:
    if not isinstance(obj, dict) or any(k not in obj for k in "abcd"):
        raise InputError('a matrix is an object with keys "a", "b", "c", "d"')
    return Mat2(*(quaternion_from_json(H, obj[k]) for k in "abcd"))


def closure_report(L: Lattice16) -> dict:
    return {
        "rank": L.rank,
        "denominator": L.lattice.denom,
        "hnf_rows": [list(r) for r in L.lattice.rows],
        "converged_round": L.converged_round,
    }
