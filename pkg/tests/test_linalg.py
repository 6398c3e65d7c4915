from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from tanaka_kit.linalg import kernel, rank, row_reduce, solve_in_span
from tanaka_kit.scalars import Scalar, UnitContext, parse_scalar

CTX = UnitContext(("u",))
ONE = Scalar.const(1, 0, CTX)
ZERO = Scalar.const(0, 0, CTX)


def S(text):
    return parse_scalar(text, CTX)


def _apply(rows, vec):
    out = []
    for r in rows:
        acc = ZERO
        for c, v in r.items():
            acc = acc + v * vec.get(c, ZERO)
        out.append(acc)
    return out


def test_kernel_of_unit_matrix():
    rows = [{"a": S("1"), "b": S("u"), "c": S("2")}, {"b": S("I"), "c": S("u^-1")}]
    basis, red = kernel(rows, ["a", "b", "c"], ONE)
    assert red.rank == 2 and len(basis) == 1 and not red.assumptions
    assert all(not x for x in _apply(rows, basis[0]))


def test_non_unit_pivot_recorded_as_assumption():
    rows = [{"a": S("1+u"), "b": S("1")}]
    basis, red = kernel(rows, ["a", "b"], ONE)
    assert len(basis) == 1
    assert all(not x for x in _apply(rows, basis[0]))
    assert S("1+u") in red.assumptions


def test_rank_and_span():
    rows = [{"x": S("1"), "y": S("u")}, {"x": S("2"), "y": S("2*u")}, {"z": S("I")}]
    assert rank(rows, ["x", "y", "z"]) == 2
    coeffs = solve_in_span(rows, {"x": S("3"), "y": S("3*u"), "z": S("1")}, ["x", "y", "z"], ZERO)
    assert coeffs is not None
    total = {}
    for c, r in zip(coeffs, rows):
        for k, v in r.items():
            total[k] = total.get(k, ZERO) + c * v
    assert total["x"] == 3 and total["z"] == 1
    assert solve_in_span(rows, {"y": S("1")}, ["x", "y", "z"], ZERO) is None


ints = st.integers(-4, 4)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(ints, min_size=4, max_size=4), min_size=1, max_size=4))
def test_rational_kernel_matches_sympy(m):
    import sympy as sp
    cols = list(range(4))
    rows = [{j: Scalar.const(Fraction(x)) for j, x in enumerate(r) if x} for r in m]
    basis, red = kernel(rows, cols, Scalar.const(1))
    assert red.rank == sp.Matrix(m).rank()
    assert len(basis) == 4 - red.rank
    for v in basis:
        assert all(not x for x in _apply(rows, v)) if rows else True
    assert row_reduce(rows, cols).rank == red.rank
