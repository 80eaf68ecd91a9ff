"""Command-line harness: the registry of worked examples and JSON subcommands.

Exit codes: 0 success, 1 a check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

from .errors import DomainError, InputError, NotRational, TwistedSLError, Unconverged
from .exactnum import format_rational
from .mat2grp import (
    Mat2,
    algebra_closure,
    bracket_closed,
    closure_report,
    conjugate_lattice,
    conjugation_check,
    elementary_generators,
    hat_sigma,
    lie_basis,
    mat2_from_json,
    matrix_order,
    twisted_sl_membership,
)
from .orders import (
    build_order,
    conjugate_order,
    is_maximal_sigma_order,
    is_sigma_order,
    order_discriminant,
    plus_trace_ideal,
    unit_group,
)
from .qform import (
    QForm5,
    order_trace_form,
    qform_from_json,
    qform_to_json,
    qh_form,
    rep_count_compare,
    rep_det,
    preserves_form,
    rho,
    rho_suite,
)
from .quat import (
    QuatAlgebra,
    algebra_discriminant,
    algebra_from_json,
    apply_involution,
    classify_involution,
    involution_disc,
    involution_from_json,
    quaternion_from_json,
    quaternion_to_json,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


def default_fixture_dir() -> Path:
    return Path(str(resources.files("twistedsl") / "fixtures"))


def load_json_file(path: Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"invalid JSON in {path}: {exc.msg} at line {exc.lineno} column {exc.colno} (char {exc.pos})"
        ) from exc


def _order(H: QuatAlgebra, basis):
    if not isinstance(basis, list):
        raise InputError("order basis must be a list of quaternions")
    return build_order(H, [quaternion_from_json(H, q) for q in basis])


def _gamma(H: QuatAlgebra, obj) -> Mat2:
    field_spec = obj.get("field", "Q") if isinstance(obj, dict) else "Q"
    if field_spec == "Q":
        return mat2_from_json(H, obj)
    if isinstance(field_spec, dict) and "sqrt" in field_spec:
        return mat2_from_json(H.extend(int(field_spec["sqrt"])), obj)
    raise InputError(f"unknown field {field_spec!r}")


def _common(obj: dict):
    if not isinstance(obj, dict):
        raise InputError("input must be a JSON object")
    if "algebra" not in obj:
        raise InputError('missing key "algebra"')
    H = algebra_from_json(obj["algebra"])
    sigma = involution_from_json(H, obj["involution"]) if "involution" in obj else None
    return H, sigma


def _require(obj: dict, key: str):
    if key not in obj:
        raise InputError(f'missing key "{key}"')
    return obj[key]


# ---------------------------------------------------------------------------
# Example registry
# ---------------------------------------------------------------------------


@dataclass
class ExampleRecord:
    id: str
    description: str
    status: str = "SKIPPED"
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"id": self.id, "description": self.description, "status": self.status, "details": self.details}


def _finish(record: ExampleRecord, checks: dict[str, bool]) -> ExampleRecord:
    failed = [name for name, ok in checks.items() if not ok]
    record.status = "FAIL" if failed else "PASS"
    if failed:
        record.details["failed_checks"] = failed
    return record


def example_e1(fx: dict) -> ExampleRecord:
    rec = ExampleRecord(fx["id"], fx["description"])
    H, sigma = _common(fx)
    O1, O2 = _order(H, fx["orders"]["O1"]), _order(H, fx["orders"]["O2"])
    exp = fx["expected"]
    u1, u2 = unit_group(O1), unit_group(O2)
    d1, d2 = order_discriminant(O1).gen, order_discriminant(O2).gen
    rec.details = {"disc": d1, "units_O1": len(u1), "units_O2": len(u2)}
    want1 = {quaternion_from_json(H, q) for q in exp["units_O1"]}
    want2 = {quaternion_from_json(H, q) for q in exp["units_O2"]}
    return _finish(
        rec,
        {
            "disc_O1": d1 == exp["disc"],
            "disc_O2": d2 == exp["disc"],
            "maximal_sigma_O1": is_maximal_sigma_order(O1, sigma),
            "maximal_sigma_O2": is_maximal_sigma_order(O2, sigma),
            "units_O1": set(u1) == want1 and len(u1) == len(want1),
            "units_O2": set(u2) == want2 and len(u2) == len(want2),
        },
    )


def example_e2(fx: dict) -> ExampleRecord:
    rec = ExampleRecord(fx["id"], fx["description"])
    H, sigma = _common(fx)
    O1, O2 = _order(H, fx["orders"]["O1"]), _order(H, fx["orders"]["O2"])
    exp = fx["expected"]
    t1, t2 = plus_trace_ideal(O1, sigma).gen, plus_trace_ideal(O2, sigma).gen
    rec.details = {"trace_ideal_O1": t1, "trace_ideal_O2": t2}
    return _finish(
        rec,
        {
            "disc_O1": order_discriminant(O1).gen == exp["disc"],
            "disc_O2": order_discriminant(O2).gen == exp["disc"],
            "trace_ideal_O1": t1 == exp["trace_ideal_O1"],
            "trace_ideal_O2": t2 == exp["trace_ideal_O2"],
        },
    )


def example_e3(fx: dict) -> ExampleRecord:
    rec = ExampleRecord(fx["id"], fx["description"])
    H, sigma = _common(fx)
    O = _order(H, fx["orders"]["O"])
    exp = fx["expected"]
    dH = algebra_discriminant(H).disc.gen
    dO = order_discriminant(O).gen
    ds = involution_disc(sigma).rep
    maxi = is_maximal_sigma_order(O, sigma)
    rec.details = {"algebra_disc": dH, "order_disc": dO, "involution_disc": ds, "maximal_sigma_order": maxi}
    return _finish(
        rec,
        {
            "algebra_disc": dH == exp["algebra_disc"],
            "order_disc": dO == exp["order_disc"],
            "not_maximal_order": dO != dH,
            "involution_disc": ds == exp["involution_disc"],
            "maximal_sigma_order": maxi == exp["maximal_sigma_order"],
        },
    )


def example_e4(fx: dict) -> ExampleRecord:
    rec = ExampleRecord(fx["id"], fx["description"])
    H, sigma = _common(fx)
    O1, O2 = _order(H, fx["orders"]["O1"]), _order(H, fx["orders"]["O2"])
    exp = fx["expected"]
    v = quaternion_from_json(H, fx["conjugator"])
    gamma = _gamma(H, fx["gamma"])
    M1, M2 = matrix_order(O1), matrix_order(O2)
    image = conjugate_lattice(gamma, M1, sigma)
    t1, t2 = plus_trace_ideal(O1, sigma).gen, plus_trace_ideal(O2, sigma).gen
    rec.details = {
        "trace_ideal_O1": t1,
        "trace_ideal_O2": t2,
        "gamma_hat_gamma": str(gamma * hat_sigma(sigma.extend(gamma.alg.d), gamma)),
    }
    return _finish(
        rec,
        {
            "disc_O1": order_discriminant(O1).gen == exp["disc"],
            "disc_O2": order_discriminant(O2).gen == exp["disc"],
            "maximal_sigma_O1": is_maximal_sigma_order(O1, sigma),
            "maximal_sigma_O2": is_maximal_sigma_order(O2, sigma),
            "trace_ideals": (t1, t2) == (exp["trace_ideal_O1"], exp["trace_ideal_O2"]),
            "conjugate_order": conjugate_order(O1, v) == O2,
            "matrix_conjugation": conjugation_check(gamma, M1.basis, M2, sigma) and image.same_lattice(M2),
        },
    )


def example_e5(fx: dict) -> ExampleRecord:
    rec = ExampleRecord(fx["id"], fx["description"])
    H, sigma = _common(fx)
    O1, O2 = _order(H, fx["orders"]["O1"]), _order(H, fx["orders"]["O2"])
    gamma = _gamma(H, fx["gamma"])
    gens = [mat2_from_json(H, g) for g in fx["generators"]]
    M1, M2 = matrix_order(O1), matrix_order(O2)
    member = twisted_sl_membership(sigma.extend(gamma.alg.d), gamma)
    try:
        conj_ok = conjugation_check(gamma, gens, M2, sigma)
        onto = conjugate_lattice(gamma, M1, sigma).same_lattice(M2)
    except NotRational as exc:
        conj_ok = onto = False
        rec.details["error"] = str(exc)
    closure = algebra_closure(H, gens)
    rec.details.update({"member": member, "closure_rank": closure.rank, "closure_rounds": closure.converged_round})
    return _finish(
        rec,
        {
            "gamma_member": member,
            "generators_conjugate_into_Mat2_O2": conj_ok,
            "generators_close_to_Mat2_O1": closure.same_lattice(M1),
            "conjugation_onto_Mat2_O2": onto,
        },
    )


def _printed_forms(fx: dict) -> tuple[QForm5, QForm5]:
    pf = fx["printed_forms"]
    return qform_from_json(pf["q1"]), qform_from_json(pf["q2"])


def example_e6(fx: dict) -> ExampleRecord:
    rec = ExampleRecord(fx["id"], fx["description"])
    forms = []
    for case in fx["cases"]:
        H, sigma = _common(case)
        forms.append(order_trace_form(_order(H, case["basis"]), sigma))
    f1, f2 = forms
    q1, q2 = _printed_forms(fx)
    cmp_ = fx["compare"]
    ours = rep_count_compare(f1, f2, cmp_["value_bound"], cmp_["box_bound"])
    printed = rep_count_compare(q1, q2, cmp_["value_bound"], cmp_["box_bound"])
    rec.details = {
        "form_O1": qform_to_json(f1),
        "form_O2": qform_to_json(f2),
        "printed_det_q1": format_rational(q1.det),
        "printed_det_q2": format_rational(q2.det),
        "det_matches_printed": [f1.det == q1.det, f2.det == q2.det],
        "compare_orders": {"status": ours.status, "witness": ours.witness, "proof": ours.proof},
        "compare_printed": {"status": printed.status, "witness": printed.witness, "proof": printed.proof},
    }
    return _finish(
        rec,
        {
            "integral": f1.is_integral and f2.is_integral,
            "signature": f1.signature() == (1, 4) and f2.signature() == (1, 4),
            "orders_forms_inequivalent": ours.proof is not None,
            "printed_forms_distinguished": printed.status == "DISTINGUISHED",
        },
    )


def example_e7(fx: dict) -> ExampleRecord:
    rec = ExampleRecord(fx["id"], fx["description"])
    checks: dict[str, bool] = {}
    dims = []
    for n, case in enumerate(fx["cases"]):
        H, sigma = _common(case)
        B = lie_basis(sigma, H)
        dims.append(len(B))
        s = lambda q: apply_involution(sigma, q)  # noqa: E731
        shape = all(X.d == -s(X.a) and s(X.b) == X.b and s(X.c) == X.c for X in B)
        closed = bracket_closed(B)
        checks[f"case{n}"] = len(B) == case["dim"] and shape and closed
    rec.details = {"dims": dims}
    return _finish(rec, checks)


def example_e8(fx: dict, quick: bool = False) -> ExampleRecord:
    rec = ExampleRecord(fx["id"], fx["description"])
    H, sigma = _common(fx)
    O = _order(H, fx["order"])
    pairs, length = fx["pairs"], fx["word_length"]
    if quick:
        pairs, length = min(pairs, 10), min(length, 2)
    res = rho_suite(O, sigma, pairs, length, fx["seed"])
    rec.details = res
    return _finish(
        rec,
        {k: bool(res[k]) for k in ("homomorphism", "preserves_gram", "pm_identity", "det_one", "kernel_only_pm")},
    )


REGISTRY: list[tuple[str, str, Callable[[dict], ExampleRecord]]] = [
    ("E1", "e1_pair23.json", example_e1),
    ("E2", "e2_pair3.json", example_e2),
    ("E3", "e3_order6.json", example_e3),
    ("E4", "e4_pair7.json", example_e4),
    ("E5", "e5_gamma_sqrt3.json", example_e5),
    ("E6", "e6_trace_forms.json", example_e6),
    ("E7", "e7_lie.json", example_e7),
    ("E8", "e8_rho.json", example_e8),
]


def run_examples(pattern: str | None = None, fixtures: Path | None = None, quick: bool = False) -> list[ExampleRecord]:
    """Run registered examples whose id matches the regular expression ``pattern``."""
    if pattern is not None:
        try:
            rx = re.compile(pattern)
        except re.error as exc:
            raise InputError(f"bad filter {pattern!r}: {exc}") from exc
    fixtures = default_fixture_dir() if fixtures is None else Path(fixtures)
    records = []
    for ident, fname, fn in REGISTRY:
        if pattern is not None and not rx.fullmatch(ident):
            continue
        fx = load_json_file(fixtures / fname)
        try:
            rec = example_e8(fx, quick) if fn is example_e8 else fn(fx)
        except TwistedSLError as exc:
            rec = ExampleRecord(ident, fx.get("description", ""), "FAIL", {"error": str(exc)})
        records.append(rec)
    return records


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_disc_algebra(obj) -> dict:
    H = algebra_from_json(obj.get("algebra", obj) if isinstance(obj, dict) else obj)
    D = algebra_discriminant(H)
    return {"disc": D.disc.gen, "definite": H.is_definite(), "ramified_primes": list(D.ramified_primes)}


def cmd_disc_order(obj) -> dict:
    H, _ = _common(obj)
    O = _order(H, _require(obj, "basis"))
    return {"disc": order_discriminant(O).gen}


def cmd_classify(obj) -> dict:
    H, sigma = _common(obj)
    if sigma is None:
        raise InputError('missing key "involution"')
    kind = classify_involution(sigma).value
    if sigma.is_standard:
        return {"type": kind}
    return {"type": kind, "disc": involution_disc(sigma).rep}


def cmd_max_sigma_order(obj) -> dict:
    H, sigma = _common(obj)
    if sigma is None:
        raise InputError('missing key "involution"')
    O = _order(H, _require(obj, "basis"))
    target = algebra_discriminant(H).disc.intersect(involution_disc(sigma).iota()).gen
    return {
        "sigma_order": is_sigma_order(O, sigma),
        "disc": order_discriminant(O).gen,
        "target_disc": target,
        "maximal_sigma_order": is_maximal_sigma_order(O, sigma),
    }


def cmd_units(obj) -> dict:
    H, _ = _common(obj)
    U = unit_group(_order(H, _require(obj, "basis")))
    return {"count": len(U), "units": [quaternion_to_json(u) for u in U]}


def cmd_trace_ideal(obj) -> dict:
    H, sigma = _common(obj)
    if sigma is None:
        raise InputError('missing key "involution"')
    return {"ideal": plus_trace_ideal(_order(H, _require(obj, "basis")), sigma).gen}


def cmd_closure(obj) -> dict:
    H, sigma = _common(obj)
    rounds = obj.get("max_rounds", 8)
    if "generators" in obj:
        gens = [mat2_from_json(H, g) for g in obj["generators"]]
    elif "basis" in obj and sigma is not None:
        gens = elementary_generators(_order(H, obj["basis"]), sigma)
    else:
        raise InputError('give "generators", or "basis" with "involution"')
    try:
        L = algebra_closure(H, gens, rounds)
    except Unconverged as exc:
        report = closure_report(exc.lattice)
        report["converged"] = False
        return report
    report = closure_report(L)
    report["converged"] = True
    if "basis" in obj:
        report["equals_Mat2_order"] = L.same_lattice(matrix_order(_order(H, obj["basis"])))
    return report


def cmd_rho(obj) -> dict:
    H, sigma = _common(obj)
    if sigma is None:
        raise InputError('missing key "involution"')
    gamma = _gamma(H, _require(obj, "gamma"))
    R = rho(gamma, sigma)
    form, _ = qh_form(H, sigma)
    return {"matrix": R.rows_json(), "det": str(rep_det(R)), "preserves_form": preserves_form(R, form)}


def cmd_qform(obj) -> dict:
    H, sigma = _common(obj)
    if sigma is None:
        raise InputError('missing key "involution"')
    if "basis" in obj:
        return qform_to_json(order_trace_form(_order(H, obj["basis"]), sigma))
    form, _ = qh_form(H, sigma)
    return qform_to_json(form)


def cmd_compare_forms(obj) -> dict:
    if not isinstance(obj, dict):
        raise InputError("input must be a JSON object")
    q1, q2 = qform_from_json(_require(obj, "q1")), qform_from_json(_require(obj, "q2"))
    vb, bb = obj.get("value_bound", 20), obj.get("box_bound", 12)
    if not (isinstance(vb, int) and isinstance(bb, int)):
        raise InputError("bounds must be integers")
    return rep_count_compare(q1, q2, vb, bb).to_json()


SUBCOMMANDS: dict[str, Callable[[object], dict]] = {
    "disc-algebra": cmd_disc_algebra,
    "disc-order": cmd_disc_order,
    "classify": cmd_classify,
    "max-sigma-order": cmd_max_sigma_order,
    "units": cmd_units,
    "trace-ideal": cmd_trace_ideal,
    "closure": cmd_closure,
    "rho": cmd_rho,
    "qform": cmd_qform,
    "compare-forms": cmd_compare_forms,
}


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twistedsl", description="Exact checks for twisted SL(2) over quaternion orders.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("examples", "run-examples"):
        p = sub.add_parser(name, help="run the registry of worked examples")
        p.add_argument("--filter", help="regular expression matched against example ids (e.g. E1, E[1-3])")
        p.add_argument("--json", action="store_true", help="print records as JSON")
        p.add_argument("--fixtures", type=Path, help="directory holding the example fixtures")
        p.add_argument("--quick", action="store_true", help="smaller sample sizes for the rho suite")
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=f"{name} over a JSON input file ('-' for stdin)")
        p.add_argument("input", help="JSON input file")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("examples", "run-examples"):
            records = run_examples(args.filter, args.fixtures, args.quick)
            if args.json:
                _emit([r.to_json() for r in records])
            else:
                for r in records:
                    sys.stdout.write(f"{r.id} {r.status} {r.description}\n")
            return EXIT_FAIL if any(r.status == "FAIL" for r in records) else EXIT_OK
        if args.input == "-":
            try:
                obj = json.loads(sys.stdin.read())
            except json.JSONDecodeError as exc:
                raise InputError(f"invalid JSON on stdin: {exc.msg} at line {exc.lineno} column {exc.colno} (char {exc.pos})") from exc
        else:
            obj = load_json_file(Path(args.input))
        _emit(SUBCOMMANDS[args.command](obj))
        return EXIT_OK
    except (InputError, DomainError) as exc:
        _emit({"error": str(exc)})
        return EXIT_INPUT
    except TwistedSLError as exc:
        _emit({"error": str(exc)})
        return EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
