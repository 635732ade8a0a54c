from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from symspin.scalars import I, ONE, ZERO, Scalar, as_scalar

fractions = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 1000)
scalars = st.builds(Scalar, fractions, fractions)


def test_basic_arithmetic():
    a = Scalar(Fraction(1, 2), 3)
    b = Scalar(-2, Fraction(1, 3))
    assert a + b == Scalar(Fraction(-3, 2), Fraction(10, 3))
    assert a * b == Scalar(-1 - 1, Fraction(1, 6) - 6)
    assert I * I == -ONE
    assert (a / b) * b == a


def test_string_format_is_exact():
    assert str(Scalar(Fraction(1, 2), Fraction(-3, 4))) == "1/2-3/4*i"
    assert str(ONE) == "1/1+0/1*i"
    assert str(I) == "0/1+1/1*i"


@pytest.mark.parametrize("text,expected", [
    ("1/2+3/4*i", Scalar(Fraction(1, 2), Fraction(3, 4))),
    ("-3", Scalar(-3)),
    ("i", I),
    ("-i", -I),
    ("-3/2*i", Scalar(0, Fraction(-3, 2))),
    ("0/1+0/1*i", ZERO),
])
def test_parse(text, expected):
    assert Scalar.parse(text) == expected


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        Scalar.parse("1.5")


def test_float_complex_rejected():
    with pytest.raises(TypeError):
        as_scalar(1j)


def test_zero_division():
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


@given(scalars)
def test_roundtrip_through_text(a):
    assert Scalar.parse(str(a)) == a


@given(scalars, scalars, scalars)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if b:
        assert (a / b) * b == a


@given(scalars)
def test_hash_agrees_with_equality(a):
    b = Scalar.parse(str(a))
    assert hash(a) == hash(b)
    if a.imag == 0 and a.real.denominator == 1:
        assert a == int(a.real)
        assert hash(a) == hash(int(a.real))


@given(scalars)
def test_conjugate_product_is_real(a):
    p = a * a.conjugate()
    assert p.imag == 0 and p.real >= 0
