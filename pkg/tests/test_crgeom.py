import random

import pytest
import sympy as sp

from tanaka_kit import fixture
from tanaka_kit.crgeom import (
    Curve, FunctionRing, NotThreeNondegenerate, UnsupportedCase, Variant, VectorField, build_tube, catalog,
    catalog_entry, check_bracket_inclusions, curve_from_dict, curve_nondegenerate, freeman_ranks,
    gauge_equivalent, hyperquadric_tube, is_cr_symmetry, is_rational_normal_generator, jordan_nondegenerate,
    levi_form, load_curve, normalized_sections, rnc_spectrum_test, tube_symmetry_algebra, vf_bracket, wronskian4,
)
from tanaka_kit.errors import load_json


@pytest.fixture(scope="module")
def rnc():
    return build_tube(catalog_entry("(4)").curve())


def curve(*comps, var="t"):
    ring = FunctionRing([var], var)
    return Curve([ring.parse(c) for c in comps], ring)


# -- functions and fields ---------------------------------------------------------------------

def test_function_ring_basics():
    ring = FunctionRing(["t", "s"], "t")
    f = ring.parse("exp(2*t)*(1 + s^2)")
    assert f.diff("t") == ring.parse("2*exp(2*t)*(1 + s^2)")
    assert ring.parse("exp(2*t)").is_unit()
    assert ring.parse("12 + 48*t").is_unit()           # polynomials in the chart are invertible
    assert not ring.parse("exp(t) + t").is_unit()
    g = ring.parse("cos(t)^2 + sin(t)^2")
    assert g == ring.one()
    i = ring.const(sp.I)
    assert (i * f).conj() == -(i * f)


def test_vector_field_bracket_identities():
    ring = FunctionRing(["x", "y", "z"], None)
    X = VectorField(ring, {"x": ring.parse("y"), "z": ring.parse("x^2")})
    Y = VectorField(ring, {"y": ring.parse("z"), "x": ring.parse("1")})
    Z = VectorField(ring, {"z": ring.parse("x*y")})
    assert vf_bracket(X, Y) == vf_bracket(Y, X).scale(ring.const(-1))
    jac = vf_bracket(vf_bracket(X, Y), Z) + vf_bracket(vf_bracket(Y, Z), X) + vf_bracket(vf_bracket(Z, X), Y)
    assert not jac
    dx = VectorField.partial(ring, "x")
    assert vf_bracket(dx, X) == VectorField(ring, {"z": ring.parse("2*x")})


# -- curves -----------------------------------------------------------------------------------

def test_wronskians():
    assert wronskian4(curve("1", "t", "t^2", "t^3")) == 12
    assert not wronskian4(curve("1", "t", "t^2", "0"))
    assert wronskian4(curve("cos(t)", "sin(t)", "cos(2*t)", "sin(2*t)")) == 18


def test_power_curve_wronskian_golden():
    # golden: W(1, tau, tau^a, tau^b) = a*b*(a-1)*(b-1)*(b-a)*tau^(a+b-5)
    a, b, tau = sp.symbols("alpha beta tau", positive=True)
    golden = sp.expand(a * b * (a - 1) * (b - 1) * (b - a))

    def cofactor(w):
        # strip the power of tau, which must be exactly a + b - 5
        return sp.expand(sp.powsimp(sp.expand(w * tau ** (5 - a - b)), force=True))

    comps = [sp.Integer(1), tau, tau ** a, tau ** b]
    oracle = sp.Matrix(4, 4, lambda i, j: sp.diff(comps[j], tau, i)).det()
    assert cofactor(oracle) == golden
    rep = curve_nondegenerate(catalog_entry("(1111)").curve())
    got = rep.wronskian.as_expr()
    mine = {n.name: n for n in (a, b, tau)}
    got = got.subs({x: mine[x.name] for x in got.free_symbols})
    full = golden * tau ** (a + b - 5)
    for pt in [(2, 3, 5), (2, 4, 3), (sp.Rational(3, 2), sp.Rational(5, 2), 4), (3, 7, sp.Rational(1, 9))]:
        at = dict(zip((a, b, tau), pt))
        assert sp.nsimplify(got.subs(at)) == sp.nsimplify(full.subs(at)) != 0
    assert sorted(f["factor"] for f in rep.to_dict()["factors"]) == sorted(
        ["alpha", "beta", "alpha - 1", "beta - 1", "alpha - beta"])


@pytest.mark.parametrize("name", ["curve_rnc", "curve_cubic_shift", "curve_trig", "curve_planar", "curve_quartic"])
def test_curve_fixtures(name):
    d = load_json(fixture(name))
    rep = curve_nondegenerate(curve_from_dict(d))
    assert rep.nondegenerate == d["expect"]["curve"]["nondegenerate"]
    t = sp.Symbol(d.get("variable", "t"), real=True)
    want = sp.sympify(d["expect"]["curve"]["wronskian"].replace("^", "**"), locals={"t": t})
    assert sp.simplify(rep.wronskian.as_expr() - want) == 0


def test_catalog_is_complete_and_nondegenerate():
    entries = catalog()
    assert len(entries) == 12
    assert len({e.segre for e in entries}) == 9
    for hc in entries:
        assert curve_nondegenerate(hc.curve()).nondegenerate
        for vals in hc.samples:
            assert jordan_nondegenerate(hc.v(vals))
            assert hc.generator_consistent(vals)


def test_jordan_criterion():
    assert jordan_nondegenerate(sp.diag(-3, -1, 1, 3))
    assert not jordan_nondegenerate(sp.diag(0, 1, 1, 2))
    j = sp.Matrix([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 2]])
    assert not jordan_nondegenerate(j)
    with pytest.raises(UnsupportedCase):
        jordan_nondegenerate(sp.Matrix(4, 4, lambda i, k: sp.Symbol("a") if i == k else 0))


def test_spectrum_test():
    ok, spec, nu = rnc_spectrum_test(2, 3)
    assert ok and spec == (-6, -2, 2, 6) and nu == 2
    assert not rnc_spectrum_test(2, 4)[0]
    assert not rnc_spectrum_test(sp.Rational(3, 2), sp.Rational(5, 2))[0]
    with pytest.raises(ValueError):
        rnc_spectrum_test(3, 2)
    assert is_rational_normal_generator(sp.diag(-3, -1, 1, 3))
    assert not is_rational_normal_generator(sp.diag(-3, -1, 1, 5))


# -- tubes and the Freeman filtration ---------------------------------------------------------

def test_rnc_frame_brackets(rnc):
    s = rnc.ring.coord("s")
    half_s = (s + s).inverse()
    assert rnc.d_rank() == 6 and rnc.bracket_generating() == 7
    d = rnc.decompose(vf_bracket(rnc.Z[2], rnc.Zbar[0]))
    assert d.antihol == [rnc.ring.zero(), half_s, rnc.ring.zero()] and not any(d.hol) and not d.transverse
    d = rnc.decompose(vf_bracket(rnc.Z[2], rnc.Zbar[2]))
    assert d.transverse == half_s * rnc.ring.const(sp.I)
    for a in range(3):
        for b in range(3):
            # D10 is involutive
            dd = rnc.decompose(vf_bracket(rnc.Z[a], rnc.Z[b]))
            assert not any(dd.antihol) and not dd.transverse


def test_rnc_freeman_filtration(rnc):
    rep = freeman_ranks(rnc)
    assert rep.ranks == (3, 2, 1, True)
    assert rep.three_nondegenerate
    one, zero = rnc.ring.one(), rnc.ring.zero()
    assert rep.K10 == [[one, zero, zero], [zero, one, zero]]
    assert rep.L10 == [[one, zero, zero]]


def test_rnc_levi_forms(rnc):
    assert levi_form(rnc, 1).matrix() == [[["0"], ["0"], ["0"]], [["0"], ["0"], ["0"]],
                                          [["0"], ["0"], ["-1/(2*s)"]]]
    assert levi_form(rnc, 2).matrix() == [[["0"], ["0"], ["0"]], [["0"], ["0"], ["-1/(2*s)"]]]
    l3 = levi_form(rnc, 3)
    assert l3.matrix() == [[["0", "0"], ["0", "0"], ["-1/(2*s)", "0"]]] and not l3.kernel


def test_normalized_sections_and_gauge(rnc):
    ns = normalized_sections(rnc)
    assert [str(c) for c in ns.X10] == ["0", "0", "1"]
    assert [str(c) for c in ns.Y10] == ["0", "-2*s", "0"]
    assert [str(c) for c in ns.Z10] == ["4*s**2", "0", "0"]
    assert all(ns.check.values())
    two, zero = rnc.ring.const(2), rnc.ring.zero()
    frame = [[two, zero, zero], [zero, two, zero], [zero, zero, two]]
    ns2 = normalized_sections(rnc, frame)
    assert gauge_equivalent(rnc, ns, ns2)
    # a non-unimodular rescaling of X10 alone is not a gauge transformation
    bad = normalized_sections(rnc)
    bad.X10 = [c + c for c in ns.X10]
    assert not gauge_equivalent(rnc, ns, bad)


def test_hyperquadric_is_levi_nondegenerate():
    rep = freeman_ranks(hyperquadric_tube())
    assert rep.ranks == (3, 0, 0, True) and not rep.K10


def test_planar_curve_tube_is_degenerate():
    m = build_tube(load_curve(fixture("curve_planar")))
    rep = freeman_ranks(m)
    assert rep.degenerate and rep.bracket_rank == 6
    with pytest.raises(NotThreeNondegenerate):
        normalized_sections(m)


def test_bracket_table_and_negative_control(rnc):
    assert check_bracket_inclusions(rnc).ok
    bad = check_bracket_inclusions(rnc.with_corrupted_j(1))
    assert not bad.ok
    assert ("D10", "D10", "D10") in {v[:3] for v in bad.violations}


def test_frame_independence(rnc):
    rng = random.Random(1)
    ring = rnc.ring
    for _ in range(3):
        c = [ring.const(rng.randint(-3, 3)) * ring.coord(rng.choice(["r", "s"])) for _ in range(3)]
        frame = [[ring.one(), c[0], c[1]], [ring.zero(), ring.one(), c[2]], [ring.zero(), ring.zero(), ring.one()]]
        assert freeman_ranks(rnc, frame).ranks == (3, 2, 1, True)


# -- symmetries -------------------------------------------------------------------------------

def test_translations_and_radial_field(rnc):
    for k in range(4):
        assert is_cr_symmetry(rnc, k).ok
    assert is_cr_symmetry(rnc, sp.eye(4)).ok
    with pytest.raises(ValueError):
        is_cr_symmetry(rnc, 4)
    # a generic linear field is not even tangent to the surface
    v = is_cr_symmetry(rnc, sp.Matrix(4, 4, lambda i, k: 1 if k == 0 else 0))
    assert not v.ok and v.residue


def test_symmetry_algebra_of_rnc_type():
    rep = tube_symmetry_algebra(catalog_entry("(1111)"), {"alpha": 2, "beta": 3})
    assert rep.ok and rep.maximal
    assert rep.v_spectrum == [-6, -2, 2, 6]


def test_symmetry_algebra_generic_type():
    rep = tube_symmetry_algebra(catalog_entry("(1111)"), {"alpha": 2, "beta": 4})
    assert rep.ok and not rep.maximal
    assert rep.ad_spectrum == [-9, -1, 3, 7]
    assert rep.v_spectrum == [-7, -3, 1, 9]


def test_osculating_tube_over_quartic_curve():
    m = build_tube(load_curve(fixture("curve_quartic")), Variant.OSCULATING_RULED)
    assert freeman_ranks(m).ranks == (3, 2, 1, True)
    assert all(is_cr_symmetry(m, k).ok for k in range(4))
    v = is_cr_symmetry(m, sp.eye(4))
    assert not v.ok
    # the residue is -s times the Wronskian of the curve
    s, t = sp.symbols("s t", real=True)
    assert sp.expand(v.residue.as_expr() - (-s) * (12 + 48 * t - 12 * t ** 4)) == 0
