from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tanaka_kit.scalars import (
    EMPTY, ContextError, Scalar, ScalarParseError, UnitContext, format_scalar, parse_scalar, scalar_normalize,
)

CTX = UnitContext(("u", "w"))
u, w = CTX.units()

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=6)
exps = st.tuples(st.integers(-3, 3), st.integers(-3, 3))
scalars = st.lists(st.tuples(st.tuples(fractions, fractions), exps), max_size=4).map(
    lambda raw: scalar_normalize(raw, CTX))


def test_parse_and_format_round_trip():
    s = parse_scalar("3/2*u^2 - I*u^-1*w + 7", CTX)
    assert parse_scalar(format_scalar(s), CTX) == s
    assert s.conj() == parse_scalar("3/2*u^-2 + I*u*w^-1 + 7", CTX)


def test_units_and_inverse():
    x = parse_scalar("-2*I*u^3*w^-1", CTX)
    assert x.is_unit()
    assert x * x.inverse() == 1
    assert not (u + w).is_unit()
    with pytest.raises(ZeroDivisionError):
        (u + w).inverse()


def test_unit_conjugation_is_inverse():
    # units stand for points of the unit circle
    assert u.conj() == u.inverse()
    assert (u * w).conj() * (u * w) == 1


def test_constants_promote_into_any_context():
    c = Scalar.const(Fraction(1, 3), 2)
    assert (c * u).ctx == CTX
    assert c + u == parse_scalar("1/3 + 2*I + u", CTX)
    other = UnitContext(("v",))
    with pytest.raises(ContextError):
        u + other.unit("v")


def test_parse_errors_report_position():
    with pytest.raises(ScalarParseError) as e:
        parse_scalar("2*u^", CTX)
    assert e.value.pos >= 3
    with pytest.raises(ScalarParseError):
        parse_scalar("q + 1", CTX)


def test_substitute_units():
    s = parse_scalar("-3 + 3*u^4*w^2", CTX)
    one = UnitContext(("u",))
    assert not s.substitute_units({"w": parse_scalar("u^-2", one)}, one)
    assert s.substitute_units({"w": parse_scalar("I*u^-2", one)}, one) == -6


@settings(max_examples=60, deadline=None)
@given(scalars, scalars, scalars)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Scalar.const(0, 0, CTX)
    assert (a * b).conj() == a.conj() * b.conj()


@settings(max_examples=60, deadline=None)
@given(scalars)
def test_format_parse_identity(a):
    assert parse_scalar(format_scalar(a), CTX) == a
    assert hash(a) == hash(parse_scalar(format_scalar(a), CTX))


def test_empty_context_values():
    assert parse_scalar("(1+I)^2", EMPTY) == Scalar.const(0, 2)
    assert Scalar.const(0, 2).constant_value() == (0, 2)
