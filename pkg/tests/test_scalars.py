import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncgcurv.scalars import (
    Coeff,
    Scalar,
    ScalarParseError,
    ScalarPoleError,
    ScalarZeroDivision,
    format_scalar,
    lam,
    lam_pow,
    parse_scalar,
)

from conftest import coeffs, scalars

L = lam()
HALF = Scalar.const(Fraction(1, 2))


def test_monomial_product():
    assert lam_pow(2) * (HALF * lam_pow(-1)) == HALF * L


def test_inverse_is_canonical():
    x = (Scalar.one() + L).inv()
    assert x * (Scalar.one() + L) == Scalar.one()
    # same object whichever way it is built
    assert x == Scalar.one() / (L + Scalar.one())
    assert x.key() == ((Scalar.const(2) / (Scalar.const(2) + L * 2))).key()


def test_sqrt2_addition():
    r2 = Scalar.sqrt2()
    assert r2 * L + r2 * L == Scalar.const(2) * r2 * L
    assert r2 * r2 == Scalar.const(2)


def test_conjugation_examples():
    i = Scalar.i()
    assert (i * lam_pow(3)).conj() == -i * lam_pow(-3)
    assert (Scalar.one() + L).inv().conj() == L / (L + Scalar.one())
    assert Scalar.sqrt2().conj() == Scalar.sqrt2()


def test_eval_examples():
    assert abs(lam_pow(2).eval(Fraction(1, 4)) - (-1)) < 1e-12
    for q in (Fraction(0), Fraction(1, 3), Fraction(5, 7)):
        assert Scalar.const(3).eval(q) == 3
    assert abs((L + L.inv()).eval(Fraction(1, 8)) - math.sqrt(2)) < 1e-12


def test_eval_pole():
    with pytest.raises(ScalarPoleError):
        (Scalar.one() + L).inv().eval(Fraction(1, 2))


def test_zero_division():
    with pytest.raises(ScalarZeroDivision):
        Scalar.zero().inv()


def test_predicates():
    assert Scalar.zero().is_zero() and not Scalar.one().is_zero()
    assert Scalar.one().is_one() and not L.is_one()
    assert (L / L).is_one()


def test_subs_one():
    assert ((Scalar.one() + L) / (Scalar.const(3) - L)).subs_one() == Scalar.one()


@pytest.mark.parametrize(
    "text, value",
    [
        ("0", Scalar.zero()),
        ("-3", Scalar.const(-3)),
        ("1/2", HALF),
        ("(1)*L^-1", L.inv()),
        ("((0)+(1)i+(0+0i)r2)*L^0", Scalar.i()),
        ("[(1)*L^0]/[(1)*L^0+(1)*L^1]", (Scalar.one() + L).inv()),
    ],
)
def test_token_grammar(text, value):
    assert parse_scalar(text) == value
    assert format_scalar(value) == text


@pytest.mark.parametrize("bad", ["", "1/", "(1)*L", "[1]/[0]", "1)", "x"])
def test_token_grammar_rejects(bad):
    with pytest.raises((ScalarParseError, ScalarZeroDivision)):
        parse_scalar(bad)


def test_parse_error_position():
    with pytest.raises(ScalarParseError) as e:
        parse_scalar("(1)*L^2+(1)*Q^3")
    assert e.value.pos > 0


# ---------------------------------------------------------------- field laws


@given(scalars(), scalars(), scalars())
def test_ring_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(scalars())
def test_inverse(a):
    if not a.is_zero():
        assert a * a.inv() == Scalar.one()


@given(scalars(), scalars())
def test_conj_is_involutive_automorphism(a, b):
    assert a.conj().conj() == a
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a + b).conj() == a.conj() + b.conj()


@given(scalars())
def test_format_parse_round_trip(a):
    assert parse_scalar(format_scalar(a)) == a


@given(scalars(), st.sampled_from([Fraction(1, 7), Fraction(2, 5), Fraction(3, 11)]))
def test_eval_is_a_homomorphism(a, q):
    b = a * a.conj()
    # conj is complex conjugation on the unit circle
    assert abs(a.conj().eval(q) - a.eval(q).conjugate()) < 1e-9
    assert abs(b.eval(q) - abs(a.eval(q)) ** 2) < 1e-8


@given(coeffs(), coeffs())
def test_coeff_field(a, b):
    assert a * b == b * a
    if not a.is_zero():
        assert (a * a.inv()).is_one()
    assert abs(complex(a * b) - complex(a) * complex(b)) < 1e-9
