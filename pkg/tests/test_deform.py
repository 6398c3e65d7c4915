import copy

import pytest

from tanaka_kit import fixture
from tanaka_kit.acceptance import DEFORMATION_CASES
from tanaka_kit.deform import (
    DeformationError, Poly, Step, audit_pins, build_deformation, certificate_exceptions, check_certificate, check_soundness,
    deformation_from_dict, eliminate, jacobi_system, replay, sample_solutions, settle, specialize_units,
)
from tanaka_kit.errors import InputError, load_json
from tanaka_kit.liealg import load_algebra
from tanaka_kit.scalars import Scalar


@pytest.mark.parametrize("name", DEFORMATION_CASES)
def test_cases_are_inconsistent(name):
    d = load_json(fixture(name))
    branches = settle(d)
    for spec, ds, v in branches:
        assert v.status == d["expect"]["deform"]["verdict"] == "Inconsistent"
        assert replay(ds, v) == "Inconsistent"
        assert check_certificate(ds, v)
    # the special branches end in units, so no further splits are needed
    assert all(v.certificate[1].is_unit() for spec, ds, v in branches[1:])


def test_generic_certificates_that_need_special_lines():
    d = load_json(fixture("sec3_5_3_case_ii"))
    ds = deformation_from_dict(d)
    v = eliminate(ds)
    assert not v.certificate[1].is_unit()
    specs = certificate_exceptions(d, v)
    assert sorted(s["w"] for s in specs) == ["(-1)*u1^-2", "(1)*u1^-2"]
    line = load_json(fixture("sec3_6_3_nonint_case_line"))
    v = eliminate(deformation_from_dict(line))
    assert sorted(s["w"] for s in certificate_exceptions(line, v)) == ["(-I)*u1^-2", "(I)*u1^-2"]


def test_specialize_units_rejects_non_units():
    d = load_json(fixture("sec3_5_3_case_ii"))
    with pytest.raises(DeformationError):
        specialize_units(d, {"w": "1+u1"})
    out = specialize_units(d, {"w": "u1^-2"})
    assert out["units"] == ["u1"] and d["units"] == ["u1", "w"]


def test_trace_is_deterministic():
    d = load_json(fixture("sec3_5_case_ii"))
    a = eliminate(deformation_from_dict(d))
    b = eliminate(deformation_from_dict(d))
    ds = deformation_from_dict(d)
    assert a.trace_lines(ds) == b.trace_lines(ds)


def test_streaming_matches_final_trace():
    d = load_json(fixture("sec3_5_case_iv"))
    ds = deformation_from_dict(d)
    seen = []
    v = eliminate(ds, on_step=seen.append)
    assert seen == v.steps


def test_tampered_trace_is_caught():
    d = load_json(fixture("sec3_5_case_ii"))
    ds = deformation_from_dict(d)
    v = eliminate(ds)
    bad = copy.copy(v)
    bad.steps = v.steps[1:]
    assert replay(ds, bad) != "Inconsistent" or not check_certificate(ds, bad)
    wrong = copy.copy(v)
    first = v.steps[0]
    shifted = first.expr + Poly.const(Scalar.const(1, 0, ds.base.ctx))
    wrong.steps = [Step(first.kind, first.var, shifted, first.equation)] + v.steps[1:]
    assert replay(ds, wrong) == "BrokenTrace"


def test_unpinned_heisenberg_is_residual_and_sound():
    ds = build_deformation(load_algebra(fixture("heis3")))
    v = eliminate(ds)
    assert v.status == "Residual"
    assert replay(ds, v) == "Residual"
    sols = sample_solutions(ds, v, count=20, seed=3)
    assert len(sols) == 20
    assert check_soundness(ds, v, count=50, seed=5)


def test_unpinned_fprime_is_consistent():
    ds = build_deformation(load_algebra(fixture("sec3_5_fprime")))
    v = eliminate(ds)
    assert v.status == "Consistent"
    assert replay(ds, v) == "Consistent"


def test_jacobi_system_of_a_lie_algebra_without_unknowns_is_empty():
    ds = build_deformation(load_algebra(fixture("sec3_5_full")), "none")
    assert not ds.unknowns
    assert not jacobi_system(ds)
    assert eliminate(ds).status == "Consistent"


def test_bad_pin_is_an_input_error():
    d = load_json(fixture("sec3_5_case_i"))
    d = copy.deepcopy(d)
    d["pinned"] = [{"x": "X10", "y": "nope", "z": "R", "value": "1"}]
    with pytest.raises(InputError):
        deformation_from_dict(d)


def test_pin_audit_flags_the_normalization():
    d = load_json(fixture("sec3_5_case_i"))
    audit = audit_pins(d)
    assert len(audit) == len(d["pinned"])
    crit = [a for a in audit if a.critical]
    assert [(a.label(), a.outcome) for a in crit] == [("[Z10,X01] -> Y = 1", "Consistent")]
    # the audit does not touch its input
    assert d == load_json(fixture("sec3_5_case_i"))


def test_pin_audit_budget_reports_unfinished():
    d = load_json(fixture("sec3_5_case_i"))
    assert {a.outcome for a in audit_pins(d, max_steps=0)} == {"Unfinished"}


def test_pin_audit_without_critical_relations():
    assert not any(a.critical for a in audit_pins(load_json(fixture("sec3_6_3_nonint_case_full"))))
