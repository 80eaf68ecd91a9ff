from fractions import Fraction

import pytest

from twistedsl.errors import DomainError, NotAnOrder
from twistedsl.orders import (
    build_order,
    conjugate_order,
    is_maximal_sigma_order,
    is_sigma_order,
    order_discriminant,
    order_from_json,
    order_to_json,
    plus_trace_ideal,
    sigma_core,
    sigma_overorder_witnesses,
    unit_group,
)
from twistedsl.quat import Involution, QuatAlgebra


def test_build_order_examples(pair23):
    H = QuatAlgebra.over_q(-1, -7)
    build_order(H, H.basis())
    with pytest.raises(NotAnOrder) as exc:
        build_order(H, [H.one(), H.i, H.j * Fraction(1, 3), H.ij])
    assert exc.value.product is not None


def test_build_order_rank_and_unit():
    H = QuatAlgebra.over_q(-1, -7)
    with pytest.raises(NotAnOrder):
        build_order(H, [H.one(), H.i, H.j])
    with pytest.raises(NotAnOrder):
        build_order(H, [H.one() * 2, H.i, H.j, H.ij])


def test_sigma_orders(pair23, pair7):
    H, s, O1, O2 = pair23
    assert is_sigma_order(O1, s) and is_sigma_order(O2, s)
    assert is_sigma_order(O1, Involution.standard(H))
    H7, s7, P1, _ = pair7
    assert is_sigma_order(P1, s7)


def test_discriminants(pair23, order6):
    _, _, O1, O2 = pair23
    assert order_discriminant(O1).gen == 23
    assert order_discriminant(O2).gen == 23
    _, _, O = order6
    assert order_discriminant(O).gen == 6
    H = QuatAlgebra.over_q(-1, -7)
    assert order_discriminant(build_order(H, H.basis())).gen == 28


def test_maximal_sigma_orders(pair23, order6):
    H, s, O1, O2 = pair23
    assert is_maximal_sigma_order(O1, s) and is_maximal_sigma_order(O2, s)
    _, s6, O = order6
    assert is_maximal_sigma_order(O, s6)
    H7 = QuatAlgebra.over_q(-1, -7)
    Z = build_order(H7, H7.basis())
    assert not is_maximal_sigma_order(Z, Involution.orthogonal(H7.ij))
    with pytest.raises(DomainError):
        is_maximal_sigma_order(O1, Involution.standard(H))


def test_not_sigma_stable_is_not_maximal():
    H = QuatAlgebra.over_q(-1, -3)
    h = Fraction(1, 2)
    O = build_order(H, [H.one(), H.element(h, 0, h, 0), H.i, H.element(0, h, 0, h)])
    s = Involution.orthogonal(H.i + H.j)
    assert not is_sigma_order(O, s)
    assert not is_maximal_sigma_order(O, s)
    core = sigma_core(O, s)
    assert is_sigma_order(core, s)
    assert order_discriminant(core).gen == 12


def test_units(pair23):
    H, _, O1, O2 = pair23
    assert set(unit_group(O1)) == {H.one(), -H.one(), H.i, -H.i}
    assert len(unit_group(O1)) == 4
    assert set(unit_group(O2)) == {H.one(), -H.one()}
    H1 = QuatAlgebra.over_q(-1, -1)
    assert len(unit_group(build_order(H1, H1.basis()))) == 8
    Hi = QuatAlgebra.over_q(1, -7)
    with pytest.raises(DomainError, match="infinite unit group"):
        unit_group(build_order(Hi, Hi.basis()))


def test_conjugation(pair7):
    H, _, O1, O2 = pair7
    assert conjugate_order(O1, H.element(1, 1)) == O2
    assert conjugate_order(O1, H.one()) == O1
    H1 = QuatAlgebra.over_q(-1, -1)
    Z = build_order(H1, H1.basis())
    assert conjugate_order(Z, H1.i) == Z
    with pytest.raises(DomainError):
        conjugate_order(O1, H.zero())


def test_trace_ideals(pair3, pair7):
    _, s, O1, O2 = pair3
    assert plus_trace_ideal(O1, s).gen == 2
    assert plus_trace_ideal(O2, s).gen == 1
    _, s7, P1, P2 = pair7
    assert plus_trace_ideal(P1, s7).gen == 1
    assert plus_trace_ideal(P2, s7).gen == 2


def test_overorder_witnesses(pair23, order6):
    _, s, O1, O2 = pair23
    assert sigma_overorder_witnesses(O1, s) == []
    assert sigma_overorder_witnesses(O2, s) == []
    _, s6, O = order6
    assert sigma_overorder_witnesses(O, s6) == []
    H = QuatAlgebra.over_q(-1, -7)
    Z = build_order(H, H.basis())
    assert sigma_overorder_witnesses(Z, Involution.orthogonal(H.ij))


def test_json_roundtrip(pair23):
    _, _, O1, _ = pair23
    assert order_from_json(order_to_json(O1)) == O1
