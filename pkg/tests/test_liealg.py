import pytest

from tanaka_kit import fixture
from tanaka_kit.errors import InputError
from tanaka_kit.liealg import (
    BasisElement, GradedLieAlgebra, LieAlgebraError, ad_spectrum, algebra_from_dict, check_jacobi, load_algebra,
)
from tanaka_kit.scalars import Scalar

ALGEBRAS = ["heis3", "sec3_5_fprime", "sec3_5_full", "sec3_5_yideal", "sec3_5_3_symbol",
            "sec3_6_3_nonint", "sec3_6_3_lambda_5", "sec3_6_3_lambda_7"]


def sl2():
    basis = [BasisElement("E", 1, 0), BasisElement("H", 0, 1), BasisElement("F", -1, 2)]
    table = {(1, 0): {0: 2}, (1, 2): {2: -2}, (0, 2): {1: 1}}
    return GradedLieAlgebra(basis, table)


@pytest.mark.parametrize("name", ALGEBRAS)
def test_fixtures_satisfy_jacobi(name):
    g = load_algebra(fixture(name))
    assert check_jacobi(g).ok


def test_sl2_spectrum():
    g = sl2()
    assert check_jacobi(g).ok
    assert ad_spectrum(g, {1: Scalar.const(1)}) == [-2, 0, 2]


def test_broken_jacobi_detected():
    basis = [BasisElement(n, 0, k) for k, n in enumerate("abc")]
    g = GradedLieAlgebra(basis, {(0, 1): {1: 1}, (1, 2): {0: 1}, (0, 2): {0: 1}})
    rep = check_jacobi(g)
    assert not rep.ok and "Jac" in rep.describe(g)


def test_grading_is_enforced():
    basis = [BasisElement("x", -1, 0), BasisElement("y", -1, 1), BasisElement("z", -1, 2)]
    with pytest.raises(LieAlgebraError):
        GradedLieAlgebra(basis, {(0, 1): {2: 1}})
    assert GradedLieAlgebra(basis, {(0, 1): {2: 1}}, filtered=True, validate=True).dim == 3


def test_conjugation_must_be_compatible():
    basis = [BasisElement("a", -1, 1), BasisElement("b", -1, 0), BasisElement("r", -2, 2)]
    with pytest.raises(LieAlgebraError):
        GradedLieAlgebra(basis, {(0, 1): {2: 1}})
    # i[a, conj a] = r is compatible with a real r
    assert GradedLieAlgebra(basis, {(0, 1): {2: Scalar.const(0, 1)}}).dim == 3


def test_bad_input_is_an_input_error():
    with pytest.raises(InputError):
        algebra_from_dict({"basis": [{"name": "a", "degree": -1}], "brackets": [{"x": "a", "y": "q", "terms": []}]})
    with pytest.raises(InputError):
        algebra_from_dict({"brackets": []})


def test_direct_sum_and_serialization():
    a = load_algebra(fixture("sec3_5_fprime"))
    b = load_algebra(fixture("sec3_5_yideal"))
    s = a.direct_sum(b)
    assert s.dim == a.dim + b.dim and check_jacobi(s).ok
    again = algebra_from_dict(s.to_dict())
    assert again.table == s.table and again.names() == s.names()
