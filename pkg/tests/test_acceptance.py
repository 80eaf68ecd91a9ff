"""Acceptance criteria, one printed PASS/FAIL line each.

Tolerances: all checks are exact equalities. Time limits are pinned below
and enforced; each line reports the measured wall time.
"""

from __future__ import annotations

import importlib.util
import json
import time
from pathlib import Path

import pytest

from twistedsl.cli import _common, _gamma, _order, _printed_forms, default_fixture_dir
from twistedsl.mat2grp import (
    Mat2,
    algebra_closure,
    bracket_closed,
    conjugate,
    conjugation_check,
    elementary_generators,
    hat_sigma,
    lie_basis,
    mat2_from_json,
    matrix_order,
)
from twistedsl.orders import (
    conjugate_order,
    is_maximal_sigma_order,
    order_discriminant,
    plus_trace_ideal,
    unit_group,
)
from twistedsl.qform import order_trace_form, rep_count_compare, rho_suite
from twistedsl.quat import QuatAlgebra, apply_involution, algebra_discriminant, quaternion_from_json

TIME_LIMIT = {1: 1.0, 2: 1.0, 3: 10.0, 4: 1.0, 5: 1.0, 6: 5.0, 7: 60.0, 8: 1.0, 9: 30.0, 10: 120.0, 11: 60.0}


def fixture(name: str) -> dict:
    return json.loads((default_fixture_dir() / name).read_text())


def report(capsys, n: int, fn) -> None:
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    in_time = dt < TIME_LIMIT[n]
    status = "PASS" if ok and in_time else "FAIL"
    with capsys.disabled():
        print(f"\ncriterion {n}: {status} ({detail}; {dt:.2f}s, limit {TIME_LIMIT[n]:g}s)")
    assert ok, detail
    assert in_time, f"took {dt:.2f}s, limit {TIME_LIMIT[n]}s"


# ---------------------------------------------------------------- 1


def crit1():
    want = {(-1, -23): 23, (-1, -3): 3, (-1, -6): 3, (-1, -7): 7, (-1, -5): 2, (-1, -10): 2}
    got = {ab: algebra_discriminant(QuatAlgebra.over_q(*ab)).disc.gen for ab in want}
    return got == want, f"discs {list(got.values())}"


def test_criterion_1(capsys):
    report(capsys, 1, crit1)


# ---------------------------------------------------------------- 2


def crit2():
    fx = fixture("e1_pair23.json")
    H, sigma = _common(fx)
    O1, O2 = (_order(H, fx["orders"][k]) for k in ("O1", "O2"))
    fx6 = fixture("e3_order6.json")
    H6, s6 = _common(fx6)
    O6 = _order(H6, fx6["orders"]["O"])
    d = [order_discriminant(O).gen for O in (O1, O2, O6)]
    maxi = [is_maximal_sigma_order(O1, sigma), is_maximal_sigma_order(O2, sigma), is_maximal_sigma_order(O6, s6)]
    d6_alg = algebra_discriminant(H6).disc.gen
    ok = d == [23, 23, 6] and all(maxi) and d6_alg == 3 and d[2] != d6_alg
    return ok, f"discs {d}, sigma-maximal {maxi}, disc(-1,-6)={d6_alg}"


def test_criterion_2(capsys):
    report(capsys, 2, crit2)


# ---------------------------------------------------------------- 3


def crit3():
    fx = fixture("e1_pair23.json")
    H, _ = _common(fx)
    U1 = set(unit_group(_order(H, fx["orders"]["O1"])))
    U2 = set(unit_group(_order(H, fx["orders"]["O2"])))
    one, i = H.one(), H.i
    ok = U1 == {one, -one, i, -i} and U2 == {one, -one}
    return ok, f"|O1^x|={len(U1)}, |O2^x|={len(U2)}"


def test_criterion_3(capsys):
    report(capsys, 3, crit3)


# ---------------------------------------------------------------- 4


def crit4():
    got = []
    for name in ("e2_pair3.json", "e4_pair7.json"):
        fx = fixture(name)
        H, sigma = _common(fx)
        got += [plus_trace_ideal(_order(H, fx["orders"][k]), sigma).gen for k in ("O1", "O2")]
    return got == [2, 1, 1, 2], f"trace ideals (-1,-3): {got[:2]}, (-1,-7): {got[2:]}"


def test_criterion_4(capsys):
    report(capsys, 4, crit4)


# ---------------------------------------------------------------- 5


def crit5():
    fx = fixture("e4_pair7.json")
    H, _ = _common(fx)
    O1, O2 = (_order(H, fx["orders"][k]) for k in ("O1", "O2"))
    v = quaternion_from_json(H, fx["conjugator"])
    C = conjugate_order(O1, v)
    return C == O2 and C.lattice == O2.lattice, "(1+i) O1 (1+i)^-1 == O2 after HNF"


def test_criterion_5(capsys):
    report(capsys, 5, crit5)


# ---------------------------------------------------------------- 6


def crit6():
    fx = fixture("e5_gamma_sqrt3.json")
    H, sigma = _common(fx)
    gamma = _gamma(H, fx["gamma"])
    sig3 = sigma.extend(gamma.alg.d)
    hat = hat_sigma(sig3, gamma)
    unit = gamma * hat
    gens = [mat2_from_json(H, g) for g in fx["generators"]]
    images = [conjugate(gamma, G.extend(gamma.alg.d), hat) for G in gens]
    rational = all(M.is_rational() for M in images)
    M2 = matrix_order(_order(H, fx["orders"]["O2"]))
    inside = conjugation_check(gamma, gens, M2, sigma)
    is_one = unit == Mat2.identity(gamma.alg)
    ok = is_one and rational and inside
    return ok, f"gamma*hat(gamma)=I: {is_one}, {len(gens)} images rational: {rational}, in Mat(2,O2): {inside}"


def test_criterion_6(capsys):
    report(capsys, 6, crit6)


# ---------------------------------------------------------------- 7


def crit7():
    fx = fixture("e5_gamma_sqrt3.json")
    H, sigma = _common(fx)
    gens = [mat2_from_json(H, g) for g in fx["generators"]]
    M1 = matrix_order(_order(H, fx["orders"]["O1"]))
    L = algebra_closure(H, gens)
    ranks = [L.rank]
    ok = L.rank == 16 and L.same_lattice(M1)
    for name, key in (("e1_pair23.json", "O1"), ("e4_pair7.json", "O1")):
        f = fixture(name)
        Hf, sf = _common(f)
        O = _order(Hf, f["orders"][key])
        Lf = algebra_closure(Hf, elementary_generators(O, sf))
        ranks.append(Lf.rank)
        ok = ok and Lf.rank == 16 and Lf.same_lattice(matrix_order(O))
    return ok, f"closure ranks {ranks} equal Mat(2,O)"


def test_criterion_7(capsys):
    report(capsys, 7, crit7)


# ---------------------------------------------------------------- 8


def crit8():
    fx = fixture("e7_lie.json")
    dims, ok = [], True
    for case in fx["cases"]:
        H, sigma = _common(case)
        B = lie_basis(sigma, H)
        dims.append(len(B))
        s = lambda q: apply_involution(sigma, q)  # noqa: E731
        shape = all(X.d == -s(X.a) and s(X.b) == X.b and s(X.c) == X.c for X in B)
        closed = bracket_closed(B)
        want = 6 if sigma.is_standard else 10
        ok = ok and len(B) == want and shape and closed
    return ok, f"dims {dims}"


def test_criterion_8(capsys):
    report(capsys, 8, crit8)


# ---------------------------------------------------------------- 9


def crit9():
    fx = fixture("e8_rho.json")
    H, sigma = _common(fx)
    res = rho_suite(_order(H, fx["order"]), sigma, fx["pairs"], fx["word_length"], fx["seed"])
    keys = ("homomorphism", "preserves_gram", "pm_identity", "det_one", "kernel_only_pm")
    ok = res["pairs"] == 50 and all(res[k] for k in keys)
    return ok, f"{res['pairs']} pairs, {res['members']} words <= 4, kernel size {res['kernel_size']}"


def test_criterion_9(capsys):
    report(capsys, 9, crit9)


# ---------------------------------------------------------------- 10


def crit10():
    fx = fixture("e6_trace_forms.json")
    forms = []
    for case in fx["cases"]:
        H, sigma = _common(case)
        forms.append(order_trace_form(_order(H, case["basis"]), sigma))
    f1, f2 = forms
    q1, q2 = _printed_forms(fx)
    cmp_ = rep_count_compare(q1, q2, 20, fx["compare"]["box_bound"])
    dets_equal = f1.det == q1.det and f2.det == q2.det
    ok = dets_equal and cmp_.status == "DISTINGUISHED"
    detail = (
        f"dets computed {f1.det}, {f2.det} vs printed {q1.det}, {q2.det}: equal={dets_equal}; "
        f"printed forms {cmp_.status} at n={cmp_.witness}"
    )
    return ok, detail


def test_criterion_10(capsys):
    report(capsys, 10, crit10)


# ---------------------------------------------------------------- 11

PROPERTY_TESTS = (
    "test_involution_axioms",
    "test_involution_preserves_trace_and_norm",
    "test_hat_involution_axioms",
    "test_membership_characterization_members",
    "test_membership_characterization_random",
    "test_membership_characterization_perturbed",
    "test_hilbert_product_formula",
    "test_disc_conjugation_invariance",
)


def _property_module():
    path = Path(__file__).with_name("test_properties.py")
    loader = importlib.util.spec_from_file_location("_acceptance_properties", path)
    mod = importlib.util.module_from_spec(loader)
    loader.loader.exec_module(mod)
    return mod


def crit11():
    mod = _property_module()
    failed = []
    for name in PROPERTY_TESTS:
        try:
            getattr(mod, name)()
        except AssertionError:
            failed.append(name)
    return not failed, f"{len(PROPERTY_TESTS) - len(failed)}/{len(PROPERTY_TESTS)} suites hold" + (
        f", failed {failed}" if failed else ""
    )


def test_criterion_11(capsys):
    report(capsys, 11, crit11)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
