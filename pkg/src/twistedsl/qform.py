"""The quinary form q_H = st - nrm(z), the representation rho, and integral trace forms.

Forms are stored by a symmetric rational Gram matrix G with q(v) = v^T G v.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form

from .errors import DomainError, InputError, InternalConsistencyError
from .exactnum import (
    FieldScalar,
    as_fraction,
    det,
    floor_sqrt_fraction,
    format_rational,
    hnf_reduce,
    lattice_in_subspace,
    mat_inverse,
    rref,
)
from .mat2grp import (
    Mat2,
    elementary_generators,
    hat_sigma,
    hat_sigma_matrix,
    matrix_order,
    random_word,
    twisted_sl_membership,
    words_up_to,
)
from .orders import Order, is_sigma_order, minus_part
from .quat import Involution, QuatAlgebra, Quaternion, apply_involution, plus_minus_spaces


def _frac_matrix(rows: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(as_fraction(x) for x in row) for row in rows)


@dataclass(frozen=True)
class QForm5:
    """Quadratic form v -> v^T G v (normally in five variables)."""

    gram: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        G = _frac_matrix(self.gram)
        n = len(G)
        if n == 0 or any(len(row) != n for row in G):
            raise InputError("Gram matrix must be square and nonempty")
        if any(G[r][c] != G[c][r] for r in range(n) for c in range(n)):
            raise InputError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", G)

    @classmethod
    def from_gram2(cls, gram2: Sequence[Sequence[int]]) -> QForm5:
        """Build from 2G, the integer matrix of the associated even bilinear form."""
        return cls(tuple(tuple(Fraction(as_fraction(x), 2) for x in row) for row in gram2))

    @classmethod
    def from_polynomial(cls, n: int, coeffs: dict[tuple[int, int], int]) -> QForm5:
        """``coeffs[(i, j)]`` (i <= j) is the coefficient of x_i x_j."""
        G = [[Fraction(0)] * n for _ in range(n)]
        for (i, j), c in coeffs.items():
            if i == j:
                G[i][i] += c
            else:
                G[i][j] += Fraction(c, 2)
                G[j][i] += Fraction(c, 2)
        return cls(tuple(map(tuple, G)))

    @property
    def dim(self) -> int:
        return len(self.gram)

    def __call__(self, v: Sequence) -> Fraction:
        G = self.gram
        n = self.dim
        return sum((G[r][c] * v[r] * v[c] for r in range(n) for c in range(n)), Fraction(0))

    def gram2(self) -> list[list[Fraction]]:
        return [[2 * x for x in row] for row in self.gram]

    @property
    def is_integral(self) -> bool:
        """2G is integral with even diagonal, i.e. q takes integer values on Z^n."""
        return all(x.denominator == 1 for row in self.gram2() for x in row) and all(
            self.gram[k][k].denominator == 1 for k in range(self.dim)
        )

    @property
    def det(self) -> Fraction:
        return det(self.gram)

    def signature(self) -> tuple[int, int]:
        return form_signature(self.gram)

    def transform(self, U: Sequence[Sequence]) -> QForm5:
        """The form v -> q(U v)."""
        n = self.dim
        U = _frac_matrix(U)
        G = self.gram
        GU = [[sum(G[r][k] * U[k][c] for k in range(n)) for c in range(n)] for r in range(n)]
        return QForm5(tuple(tuple(sum(U[k][r] * GU[k][c] for k in range(n)) for c in range(n)) for r in range(n)))

    def smith_invariants(self) -> list[int]:
        """Smith normal form diagonal of 2G (a Z-equivalence invariant of integral forms)."""
        if not self.is_integral:
            raise InputError("Smith invariants need an integral form")
        M = Matrix([[int(x) for x in row] for row in self.gram2()])
        S = smith_normal_form(M)
        return sorted(abs(int(S[k, k])) for k in range(self.dim))


def diagonalize(gram: Sequence[Sequence]) -> list[Fraction]:
    """Diagonal entries of a congruent diagonal form (exact symmetric elimination)."""
    A = [list(row) for row in _frac_matrix(gram)]
    n = len(A)

    def add_to(k: int, p: int) -> None:
        # basis change e_k -> e_k + e_p
        for c in range(n):
            A[k][c] += A[p][c]
        for r in range(n):
            A[r][k] += A[r][p]

    diag = []
    for k in range(n):
        if A[k][k] == 0:
            p = next((r for r in range(k + 1, n) if A[r][r] != 0), None)
            if p is not None:
                A[k], A[p] = A[p], A[k]
                for row in A:
                    row[k], row[p] = row[p], row[k]
            else:
                p = next((r for r in range(k + 1, n) if A[k][r] != 0), None)
                if p is not None:
                    add_to(k, p)
        piv = A[k][k]
        diag.append(piv)
        if piv == 0:
            continue
        for r in range(k + 1, n):
            f = A[r][k] / piv
            if f:
                for c in range(n):
                    A[r][c] -= f * A[k][c]
                for c in range(n):
                    A[c][r] -= f * A[c][k]
    return diag


def form_signature(gram: Sequence[Sequence]) -> tuple[int, int]:
    d = diagonalize(gram)
    return (sum(1 for x in d if x > 0), sum(1 for x in d if x < 0))


# ---------------------------------------------------------------------------
# q_H and rho
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MHPoint:
    """(s, t, z) with z in H^+, standing for the matrix [[s, z], [conj(z), t]]."""

    s: FieldScalar
    t: FieldScalar
    z: Quaternion

    def matrix(self) -> Mat2:
        H = self.z.alg
        return Mat2(H.one() * self.s, self.z, self.z.conj(), H.one() * self.t)


@dataclass(frozen=True)
class Rep5:
    matrix: tuple[tuple, ...]

    def rows_json(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self.matrix]


def _require_orthogonal(sigma: Involution) -> None:
    if sigma.is_standard:
        raise DomainError("q_H is defined for orthogonal involutions")


def qh_basis(sigma: Involution) -> list[Quaternion]:
    _require_orthogonal(sigma)
    plus, _ = plus_minus_spaces(sigma)
    return plus


def qh_form(H: QuatAlgebra, sigma: Involution) -> tuple[QForm5, tuple[int, int]]:
    """Gram of st - nrm(z) in the basis s, t, plus_basis; and its signature."""
    if sigma.alg != H:
        raise InputError("involution belongs to a different algebra")
    if not H.is_rational:
        raise DomainError("q_H is computed over Q")
    plus = qh_basis(sigma)
    G = [[Fraction(0)] * 5 for _ in range(5)]
    G[0][1] = G[1][0] = Fraction(1, 2)
    for r, p in enumerate(plus):
        for c, q in enumerate(plus):
            G[2 + r][2 + c] = -(p * q.conj()).tr().to_fraction() / 2
    form = QForm5(tuple(map(tuple, G)))
    return form, form.signature()


def _projector(basis: Sequence[Quaternion]) -> list[list]:
    """Rows P with P . coords(q) = coordinates of q in ``basis`` (for q in the span)."""
    n = len(basis)
    rows = [[basis[c].coords()[r] for c in range(n)] + [1 if k == r else 0 for k in range(4)] for r in range(4)]
    red, piv = rref(rows, n)
    if len(piv) != n:
        raise InternalConsistencyError("plus basis is not linearly independent")
    return [red[k][n:] for k in range(n)]


def _in_span_coords(P: Sequence[Sequence], basis: Sequence[Quaternion], q: Quaternion) -> list:
    H = q.alg
    c = q.coords()
    coeffs = [sum((row[r] * c[r] for r in range(4)), H.scalar(0)) for row in P]
    back = sum((b * x for b, x in zip(basis, coeffs)), H.zero())
    if back != q:
        raise InternalConsistencyError(f"{q} is not in the span of the plus basis")
    return coeffs


def rho_apply(gamma: Mat2, plus: Sequence[Quaternion], point: Sequence, *, _cache=None) -> list:
    """Image of (s, t, z-coordinates) under M -> gamma M conj(gamma)^T."""
    H = gamma.alg
    gbar, P = _cache if _cache is not None else (gamma.conj_transpose(), _projector(plus))
    s, t = point[0], point[1]
    z = sum((plus[k] * point[2 + k] for k in range(len(plus))), H.zero())
    M = Mat2(H.one() * s, z, z.conj(), H.one() * t)
    N = gamma * M * gbar
    if not (N.a.is_scalar() and N.d.is_scalar()) or N.c != N.b.conj():
        raise InternalConsistencyError("image left the matrix model of F^2 + H^+")
    return [N.a.x, N.d.x, *_in_span_coords(P, plus, N.b)]


@lru_cache(maxsize=32)
def _plus_frame(sigma: Involution) -> tuple[list[Quaternion], list[list]]:
    plus = qh_basis(sigma)
    return plus, _projector(plus)


def rho(gamma: Mat2, sigma: Involution) -> Rep5:
    """Matrix of M -> gamma M conj(gamma)^T on F^2 + H^+ (column k = image of basis vector k)."""
    _require_orthogonal(sigma)
    sig = sigma if sigma.alg == gamma.alg else sigma.extend(gamma.alg.d)
    if not twisted_sl_membership(sig, gamma):
        raise DomainError("rho is defined on SL^sigma(2, H)")
    plus, P = _plus_frame(sig)
    a, b, c, d = gamma.entries
    ab, cb, db = a.conj(), c.conj(), d.conj()
    # gamma M conj(gamma)^T in closed form:
    #   N11 = s n(a) + t n(b) + tr(a z conj(b)),  N22 = s n(c) + t n(d) + tr(c z conj(d)),
    #   N12 = s a conj(c) + t b conj(d) + a z conj(d) + b conj(z) conj(c)
    cols = [
        [a.nrm(), c.nrm(), *_in_span_coords(P, plus, a * cb)],
        [b.nrm(), d.nrm(), *_in_span_coords(P, plus, b * db)],
    ]
    bb = b.conj()
    for p in plus:
        ap = a * p
        n12 = ap * db + b * p.conj() * cb
        cols.append([(ap * bb).tr(), (c * p * db).tr(), *_in_span_coords(P, plus, n12)])
    rows = tuple(tuple(_plain(cols[k][r]) for k in range(5)) for r in range(5))
    return Rep5(rows)


def _plain(x):
    if isinstance(x, FieldScalar) and x.is_rational:
        return x.to_fraction()
    return x


def rep_mul(A: Rep5, B: Rep5) -> Rep5:
    n = len(A.matrix)
    return Rep5(tuple(tuple(sum((A.matrix[r][k] * B.matrix[k][c] for k in range(n)), Fraction(0)) for c in range(n)) for r in range(n)))


def preserves_form(R: Rep5, form: QForm5) -> bool:
    return form.transform(R.matrix).gram == form.gram


def rep_det(R: Rep5):
    return det([list(row) for row in R.matrix])


def rho_suite(O: Order, sigma: Involution, pairs: int = 50, word_length: int = 4, seed: int = 0) -> dict:
    """Exact checks of rho on members generated by unipotents over O ∩ H^+ and J."""
    H = O.alg
    form, _ = qh_form(H, sigma)
    gens = elementary_generators(O, sigma)
    letters = gens + [hat_sigma(sigma, g) for g in gens]
    rng = random.Random(seed)
    ident = rho(Mat2.identity(H), sigma)
    homomorphism = True
    for _ in range(pairs):
        g1 = random_word(letters, rng, rng.randint(1, 4))
        g2 = random_word(letters, rng, rng.randint(1, 4))
        if rep_mul(rho(g1, sigma), rho(g2, sigma)).matrix != rho(g1 * g2, sigma).matrix:
            homomorphism = False
    members = words_up_to(gens, word_length)
    reps = [rho(m, sigma) for m in members]
    I, minus_I = Mat2.identity(H), -Mat2.identity(H)
    kernel = [m for m, R in zip(members, reps) if R.matrix == ident.matrix]
    return {
        "pairs": pairs,
        "members": len(members),
        "homomorphism": homomorphism,
        "preserves_gram": all(preserves_form(R, form) for R in reps),
        "pm_identity": ident.matrix == identity_rep().matrix and rho(minus_I, sigma).matrix == ident.matrix,
        "det_one": all(rep_det(R) == 1 for R in reps),
        "kernel_size": len(kernel),
        "kernel_only_pm": all(m in (I, minus_I) for m in kernel),
    }


def identity_rep(n: int = 5) -> Rep5:
    return Rep5(tuple(tuple(Fraction(int(r == c)) for c in range(n)) for r in range(n)))


# ---------------------------------------------------------------------------
# Trace forms on fixed trace-zero matrices over an order
# ---------------------------------------------------------------------------


def fixed_trace_zero_lattice(O: Order, sigma: Involution):
    """{M in Mat(2,O) : hat_sigma(M) = M, reduced trace 0} as a Z-lattice in 16 coordinates."""
    S = hat_sigma_matrix(sigma)
    eqs = [[(S[r][c] - (1 if r == c else 0)).to_fraction() for c in range(16)] for r in range(16)]
    trace_row = [Fraction(0)] * 16
    trace_row[0] = trace_row[12] = Fraction(2)
    return lattice_in_subspace(matrix_order(O).lattice, eqs + [trace_row])


def _mat_trace(M: Mat2) -> Fraction:
    return (M.a.tr() + M.d.tr()).to_fraction()


def trace_form_basis(O: Order, sigma: Involution) -> list[Mat2]:
    """Basis of the fixed trace-zero lattice over O, ordered s, t, then the diagonal part.

    The diagonal part carries a trace-zero basis of O; t is signed so that the st
    coefficient of the trace form is positive.
    """
    _require_orthogonal(sigma)
    if not is_sigma_order(O, sigma):
        raise DomainError("order is not stable under the involution")
    H = O.alg
    L16 = fixed_trace_zero_lattice(O, sigma)
    if L16.rank != 5:
        raise InternalConsistencyError(f"fixed trace-zero lattice has rank {L16.rank}, not 5")
    minus = minus_part(O, sigma)
    if minus.rank != 1:
        raise InternalConsistencyError("minus part of an orthogonal sigma-order must have rank 1")
    w = H.from_coords(minus.basis[0])
    zero_tr = lattice_in_subspace(O.lattice, [[Fraction(1), 0, 0, 0]])
    diag = [H.from_coords(v) for v in zero_tr.basis]
    s_mat = Mat2(H.zero(), w, H.zero(), H.zero())
    t_mat = Mat2(H.zero(), H.zero(), w, H.zero())
    raw = lambda M: _mat_trace(M * M)  # noqa: E731
    if raw(s_mat + t_mat) < 0:
        t_mat = -t_mat
    basis = [s_mat, t_mat] + [Mat2(a, H.zero(), H.zero(), apply_involution(sigma, a)) for a in diag]
    if hnf_reduce([m.rational_coords() for m in basis], 16) != L16:
        raise InternalConsistencyError("explicit basis does not span the fixed trace-zero lattice")
    return basis


def order_trace_form(O: Order, sigma: Involution) -> QForm5:
    """The form M -> tr(M^2)/4 on the fixed trace-zero matrices over O."""
    basis = trace_form_basis(O, sigma)
    G = [[Fraction(0)] * 5 for _ in range(5)]
    for r in range(5):
        for c in range(5):
            G[r][c] = _mat_trace(basis[r] * basis[c] + basis[c] * basis[r]) / 8
    return QForm5(tuple(map(tuple, G)))


# ---------------------------------------------------------------------------
# Representation counts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompareResult:
    status: str  # "DISTINGUISHED" or "INDISTINGUISHABLE"
    witness: int | None
    counts1: dict[int, int]
    counts2: dict[int, int]
    certified: bool
    det1: Fraction = field(default=Fraction(0))
    det2: Fraction = field(default=Fraction(0))

    @property
    def determinants_differ(self) -> bool:
        return self.det1 != self.det2

    @property
    def proof(self) -> str | None:
        """Which argument, if any, proves the forms inequivalent."""
        if self.status == "DISTINGUISHED" and self.certified:
            return "representation-counts"
        if self.determinants_differ:
            return "determinant"
        return None

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "witness": self.witness,
            "certified": self.certified,
            "proof": self.proof,
            "counts1": {str(k): v for k, v in sorted(self.counts1.items())},
            "counts2": {str(k): v for k, v in sorted(self.counts2.items())},
            "det1": format_rational(self.det1),
            "det2": format_rational(self.det2),
        }


def representation_counts(form: QForm5, value_bound: int, box_bound: int) -> dict[int, int]:
    """#{v in [-B, B]^n : q(v) = m} for |m| <= value_bound."""
    if not form.is_integral:
        raise InputError("representation counts need an integral form")
    if box_bound < 0 or value_bound < 0:
        raise InputError("bounds must be nonnegative")
    n = form.dim
    G2 = np.array([[int(x) for x in row] for row in form.gram2()], dtype=np.int64)
    side = np.arange(-box_bound, box_bound + 1, dtype=np.int64)
    tail = n - 1
    if tail:
        grids = np.meshgrid(*([side] * tail), indexing="ij")
        rest = np.stack([g.ravel() for g in grids], axis=1)
    else:
        rest = np.zeros((1, 0), dtype=np.int64)
    totals = np.zeros(2 * value_bound + 1, dtype=np.int64)
    for first in side:
        v = np.concatenate([np.full((rest.shape[0], 1), first, dtype=np.int64), rest], axis=1)
        vals = np.einsum("ij,jk,ik->i", v, G2, v) // 2
        vals = vals[np.abs(vals) <= value_bound] + value_bound
        totals += np.bincount(vals, minlength=2 * value_bound + 1)
    return {m - value_bound: int(totals[m]) for m in range(2 * value_bound + 1)}


def box_covers(form: QForm5, value: int, box_bound: int) -> bool:
    """True when every v with q(v) = value satisfies |v_i| <= box_bound (definite forms only)."""
    p, n = form.signature()
    if p and n or p + n < form.dim:
        return False
    G = form.gram if p else tuple(tuple(-x for x in row) for row in form.gram)
    Ginv = mat_inverse(G)
    m = abs(Fraction(value))
    return all(floor_sqrt_fraction(m * Ginv[k][k]) <= box_bound for k in range(form.dim))


def rep_count_compare(q1: QForm5, q2: QForm5, value_bound: int, box_bound: int) -> CompareResult:
    """Compare box-limited representation counts of two integral forms.

    A difference at m is a proof of inequivalence only when the box provably holds
    every representation of m by both forms; ``certified`` records that.
    """
    if q1.dim != q2.dim:
        raise InputError("forms have different dimensions")
    for q in (q1, q2):
        if not q.is_integral:
            raise InputError("forms must be integral (2G integral, even diagonal)")
    c1 = representation_counts(q1, value_bound, box_bound)
    c2 = representation_counts(q2, value_bound, box_bound)
    order = sorted(c1, key=lambda m: (abs(m), m < 0))
    witness = next((m for m in order if c1[m] != c2[m]), None)
    if witness is None:
        return CompareResult("INDISTINGUISHABLE", None, c1, c2, False, q1.det, q2.det)
    certified = box_covers(q1, witness, box_bound) and box_covers(q2, witness, box_bound)
    return CompareResult("DISTINGUISHED", witness, c1, c2, certified, q1.det, q2.det)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def qform_to_json(form: QForm5) -> dict:
    g2 = form.gram2()
    return {
        "gram2": [[int(x) if x.denominator == 1 else format_rational(x) for x in row] for row in g2],
        "det": format_rational(form.det),
        "signature": list(form.signature()),
    }


def qform_from_json(obj) -> QForm5:
    if isinstance(obj, dict) and "gram2" in obj:
        rows = obj["gram2"]
    elif isinstance(obj, list):
        rows = obj
    else:
        raise InputError('a form is an object with key "gram2" (the integer matrix 2G)')
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError("gram2 must be a list of rows")
    return QForm5.from_gram2(rows)


def integral_scale(form: QForm5) -> int:
    """Smallest positive integer c with c*q integral."""
    return lcm(*(x.denominator for row in form.gram2() for x in row), *(x.denominator for x in (form.gram[k][k] for k in range(form.dim))))
