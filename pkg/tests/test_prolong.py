import random
from fractions import Fraction
from itertools import combinations

import pytest

from tanaka_kit import fixture
from tanaka_kit.errors import load_json
from tanaka_kit.liealg import algebra_from_dict, check_jacobi, load_algebra
from tanaka_kit.prolong import (
    ProlongationError, SymbolAlgebra, ce_differential, level_contains, spencer_delta1, tanaka_prolong,
)
from tanaka_kit.scalars import Scalar


def contact3():
    """Heisenberg symbol with gl(2) in degree 0; its prolongation is the contact algebra."""
    basis = [{"name": n, "degree": d} for n, d in
             [("e1", -1), ("e2", -1), ("e3", -2), ("E11", 0), ("E12", 0), ("E21", 0), ("E22", 0)]]
    br = [{"x": "e1", "y": "e2", "terms": [{"z": "e3", "c": "1"}]}]
    E = {(i, j): f"E{i}{j}" for i in (1, 2) for j in (1, 2)}
    for (i, j), name in E.items():
        # E_ij e_k = delta_jk e_i, and e3 scales by the trace
        br.append({"x": name, "y": f"e{j}", "terms": [{"z": f"e{i}", "c": "1"}]})
        if i == j:
            br.append({"x": name, "y": "e3", "terms": [{"z": "e3", "c": "1"}]})
    for (i, j), a in E.items():
        for (k, l), b in E.items():
            if a >= b:
                continue
            terms = {}
            if j == k:
                terms[E[(i, l)]] = terms.get(E[(i, l)], 0) + 1
            if l == i:
                terms[E[(k, j)]] = terms.get(E[(k, j)], 0) - 1
            terms = [{"z": z, "c": str(c)} for z, c in terms.items() if c]
            if terms:
                br.append({"x": a, "y": b, "terms": terms})
    return algebra_from_dict({"basis": basis, "brackets": br})


def test_contact_algebra_dimensions():
    # weight-(k+2) monomials in x, y (weight 1) and z (weight 2): 6, 9, 12
    g = contact3()
    assert check_jacobi(g).ok
    r = tanaka_prolong(g, 3)
    assert r.dims == [6, 9, 12]
    assert r.total == 7 + 6 + 9 + 12
    # brackets landing above degree 3 are not computed, so check only triples that stay below
    g = r.algebra
    one = Scalar.const(1)
    for i, j, k in combinations(range(g.dim), 3):
        d = [g.basis[x].degree for x in (i, j, k)]
        if max(d[0] + d[1], d[1] + d[2], d[0] + d[2]) > 3 or sum(d) > 3:
            continue
        x, y, z = {i: one}, {j: one}, {k: one}
        total = {}
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            for key, v in g.bracket(g.bracket(a, b), c).items():
                total[key] = total.get(key, 0) + v
        assert not any(total.values()), (g.basis[i].name, g.basis[j].name, g.basis[k].name)


def test_bare_heisenberg_has_no_positive_part():
    r = tanaka_prolong(load_algebra(fixture("heis3")), 3)
    assert r.dims == [0] and r.total == 3 and r.terminated


@pytest.mark.parametrize("name", ["sec3_5_fprime", "sec3_5_full", "sec3_5_3_symbol", "sec3_6_3_nonint",
                                  "sec3_6_3_lambda_5", "sec3_6_3_lambda_7"])
def test_fixture_expectations(name):
    d = load_json(fixture(name))
    exp = d["expect"]["prolong"]
    r = tanaka_prolong(load_algebra(fixture(name)), 3)
    assert r.dims == exp["dims"]
    assert r.total == exp["total"]
    if "level1_contains" in exp:
        assert level_contains(r, 1, exp["level1_contains"]) == (True, True)
    assert check_jacobi(r.algebra).ok


def test_fprime_degree_one_basis():
    # B10 = xi10 (x) B - rho (x) Z01 and its conjugate, up to scale
    r = tanaka_prolong(load_algebra(fixture("sec3_5_fprime")), 2)
    assert level_contains(r, 1, [{"X10": {"B": "1"}, "R": {"Z01": "-1"}}]) == (True, False)
    assert level_contains(r, 1, [{"X10": {"B": "1"}, "R": {"Z01": "1"}}])[0] is False


def test_wrong_basis_is_rejected():
    r = tanaka_prolong(load_algebra(fixture("sec3_6_3_nonint")), 2)
    # the positive sign version of the degree-one element is not in the prolongation
    assert not level_contains(r, 1, [{"X01": {"B": "u1^-1"}, "R": {"Y10": "1"}}])[0]
    assert level_contains(r, 1, [{"X01": {"B": "-u1^-1"}, "R": {"Y10": "1"}}])[0]


def test_not_fundamental():
    bad = algebra_from_dict({"basis": [{"name": "a", "degree": -1}, {"name": "b", "degree": -2}],
                             "brackets": []})
    with pytest.raises(ProlongationError):
        tanaka_prolong(bad, 1)


def _random_cochain(g, neg, p, rng):
    out = {}
    for xs in combinations(sorted(neg), p):
        vec = {k: Scalar.const(Fraction(rng.randint(-4, 4), rng.randint(1, 3)), rng.randint(-1, 1), g.ctx)
               for k in range(g.dim) if rng.random() < 0.5}
        vec = {k: v for k, v in vec.items() if v}
        if vec:
            out[xs] = vec
    return out


@pytest.mark.parametrize("name", ["heis3", "sec3_5_full", "sec3_5_3_symbol", "sec3_6_3_nonint"])
def test_differential_squares_to_zero(name):
    g = load_algebra(fixture(name))
    neg = SymbolAlgebra(g).neg
    rng = random.Random(name)
    for p in range(3):
        for _ in range(4):
            f = _random_cochain(g, neg, p, rng)
            assert not ce_differential(g, neg, ce_differential(g, neg, f, p), p + 1)


def test_prolongation_elements_are_spencer_closed():
    sym = SymbolAlgebra(load_algebra(fixture("sec3_5_fprime")))
    r = tanaka_prolong(sym, 1)
    for f in r.levels[0].maps:
        assert not spencer_delta1(sym, f)
