import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncgcurv.algebra import (
    AlgebraElement,
    AlgebraError,
    AlgebraSpec,
    Degree,
    DerivationTable,
    Mode,
    apply_derivation,
    check_leibniz,
    theta_cocycle,
)
from ncgcurv.scalars import Scalar, lam, lam_pow

from conftest import elements, geometry

CL, DF = Mode.CLASSICAL, Mode.DEFORMED
LAUR = AlgebraSpec.laurent()
U, V = AlgebraElement.basis((1, 0)), AlgebraElement.basis((0, 1))
KEYS = [(m, n) for m in range(-2, 3) for n in range(-2, 3)]


def test_deformed_torus_commutation():
    uv = LAUR.mul(U, V, DF)
    vu = LAUR.mul(V, U, DF)
    # S*T = lam^(n2(S) n1(T)) ST: U*V carries n2(U) n1(V) = 0, V*U carries 1
    assert uv == AlgebraElement.basis((1, 1))
    assert vu == AlgebraElement({(1, 1): lam()})
    assert vu == uv.scale(lam())


@pytest.mark.parametrize("mode", [CL, DF])
def test_unit_laws(mode):
    a = AlgebraElement({(2, -1): Scalar.const(3), (0, 1): Scalar.i()})
    assert LAUR.mul(LAUR.unit(), a, mode) == a
    assert LAUR.mul(a, LAUR.unit(), mode) == a


def test_constants_algebra_is_undeformed():
    c = AlgebraSpec.constants()
    a = AlgebraElement.basis("1", 5)
    assert c.mul(a, a, DF) == c.mul(a, a, CL) == AlgebraElement.basis("1", 25)
    assert c.star(a.scale(Scalar.i()), DF) == a.scale(-Scalar.i())


def test_star_examples():
    assert LAUR.star(U, DF) == AlgebraElement.basis((-1, 0))
    uv = AlgebraElement.basis((1, 1))
    # degree (1, 1): n1 n2 = 1
    assert LAUR.star(uv, DF) == AlgebraElement({(-1, -1): lam()})
    assert LAUR.star(uv, CL) == AlgebraElement.basis((-1, -1))


@given(elements(KEYS), st.sampled_from([CL, DF]))
def test_star_involution(a, mode):
    assert LAUR.star(LAUR.star(a, mode), mode) == a


@given(elements(KEYS), elements(KEYS), elements(KEYS))
def test_deformed_product_associative(a, b, c):
    assert LAUR.mul(LAUR.mul(a, b, DF), c, DF) == LAUR.mul(a, LAUR.mul(b, c, DF), DF)


@given(elements(KEYS), elements(KEYS))
def test_deformed_star_antimultiplicative(a, b):
    lhs = LAUR.star(LAUR.mul(a, b, DF), DF)
    rhs = LAUR.mul(LAUR.star(b, DF), LAUR.star(a, DF), DF)
    assert lhs == rhs


@given(elements(KEYS), elements(KEYS))
def test_lambda_one_specialization(a, b):
    d = LAUR.mul(a, b, DF).map_scalars(lambda s: s.subs_one())
    assert d == LAUR.mul(a, b, CL)


@given(elements(KEYS), elements(KEYS))
def test_product_degrees_add(a, b):
    for k1 in a.terms:
        for k2 in b.terms:
            for k in LAUR.key_product(k1, k2):
                assert LAUR.degree(k) == LAUR.degree(k1) + LAUR.degree(k2)


def test_theta_values():
    assert theta_cocycle(Degree(1, 0), Degree(0, 1)) == lam_pow(-1)
    assert theta_cocycle(Degree(2, 3), Degree(2, 3)) == Scalar.one()
    # exponent (-1)(-1) - (1)(1) = 0
    assert theta_cocycle(Degree(1, -1), Degree(-1, 1)) == Scalar.one()


# ---------------------------------------------------------------- user tables


def z2_table():
    products = {
        ("1", "1"): {"1": Scalar.one()},
        ("1", "g"): {"g": Scalar.one()},
        ("g", "1"): {"g": Scalar.one()},
        ("g", "g"): {"1": Scalar.one()},
    }
    stars = {"1": ("1", Scalar.one()), "g": ("g", Scalar.one())}
    degrees = {"1": Degree(0, 0), "g": Degree(0, 0)}
    return AlgebraSpec.table(["1", "g"], degrees, products, stars, "1")


def test_table_algebra_certified():
    t = z2_table()
    g = AlgebraElement.basis("g")
    assert t.mul(g, g) == t.unit()


def test_table_algebra_rejects_broken_unit():
    products = {("1", "1"): {"1": Scalar.one()}, ("1", "g"): {"g": Scalar.one()}, ("g", "1"): {"g": Scalar.const(2)}, ("g", "g"): {"1": Scalar.one()}}
    stars = {"1": ("1", Scalar.one()), "g": ("g", Scalar.one())}
    with pytest.raises(AlgebraError, match="unit law"):
        AlgebraSpec.table(["1", "g"], {"1": Degree(0, 0), "g": Degree(0, 0)}, products, stars, "1")


def test_table_algebra_rejects_bad_grading():
    products = {("1", "1"): {"1": Scalar.one()}, ("1", "g"): {"g": Scalar.one()}, ("g", "1"): {"g": Scalar.one()}, ("g", "g"): {"1": Scalar.one()}}
    stars = {"1": ("1", Scalar.one()), "g": ("g", Scalar.one())}
    with pytest.raises(AlgebraError):
        AlgebraSpec.table(["1", "g"], {"1": Degree(0, 0), "g": Degree(1, 0)}, products, stars, "1")


# ---------------------------------------------------------------- derivations


def test_torus_derivation_table():
    g = geometry("torus")
    i = Scalar.i()
    for m in range(-3, 4):
        for n in range(-3, 4):
            got = apply_derivation(g.derivation, g.algebra, AlgebraElement.basis((m, n)), g.frame.degrees)
            want = {j: AlgebraElement({(m, n): c}) for j, c in ((0, i * m), (1, i * n)) if not c.is_zero()}
            assert got == want


@pytest.mark.parametrize("mode", [CL, DF])
def test_leibniz_passes_on_builtins(mode):
    for name in ("torus", "sphere3"):
        g = geometry(name)
        assert check_leibniz(g.algebra, g.derivation, 50, g.frame.degrees, mode).passed


def test_constants_table_passes():
    assert check_leibniz(AlgebraSpec.constants(), DerivationTable(3)).passed


def test_corrupted_table_fails_with_witness():
    g = geometry("torus")
    bad = g.derivation.with_explicit((1, 0), {0: AlgebraElement({(1, 0): Scalar.i() * 2})})
    rep = check_leibniz(g.algebra, bad, 50, g.frame.degrees)
    assert not rep.passed
    assert rep.witnesses[0] == ((1, 0), (1, 0))
