from fractions import Fraction

import pytest

from ncgcurv.algebra import AlgebraElement, Mode
from ncgcurv.dirac import DiracModule, WeitzenbockHypothesisError, divergence_check, validate_dirac, weitzenbock_report
from ncgcurv.forms import Tensor
from ncgcurv.scalars import Scalar

from conftest import BOTH, SAMPLE_QS, calc, dirac, geometry

CL, DF = Mode.CLASSICAL, Mode.DEFORMED


def _identity(mod, k):
    one = mod.calc.unit.scale(Scalar.const(k))
    return tuple(tuple(one if a == b else AlgebraElement() for a in range(mod.s)) for b in range(mod.s))


@pytest.mark.parametrize("name, dim", [("torus", 2), ("sphere3", 3)])
@pytest.mark.parametrize("mode", [CL, DF])
def test_m_of_line_element_is_dimension(name, dim, mode):
    mod = dirac(name, mode)
    assert mod.m_rep(mod.calc.line_element) == _identity(mod, dim)


def test_clifford_of_zero_form():
    mod = dirac("sphere3")
    assert mod.clifford(Tensor("F"), mod.frame_spinor(0)).is_zero()


def test_clifford_contract_rejects_wrong_legs():
    mod = dirac("torus")
    with pytest.raises(ValueError):
        mod.clifford_contract(Tensor("FF"))


@pytest.mark.parametrize("mode", [CL, DF])
def test_torus_dirac_on_monomial(mode):
    mod = dirac("torus", mode)
    u = AlgebraElement.basis((1, 0))
    # grad(x_0 U) = omega_0 (x) x_0 iU, then c(omega_0) x_0 = x_1 (-i)
    assert mod.dirac_apply(mod.spinor({0: u})) == mod.spinor({1: u})
    assert mod.dirac_apply(mod.frame_spinor(0)).is_zero()


@pytest.mark.parametrize("mode", [CL, DF])
def test_sphere_dirac_on_constants(mode):
    mod = dirac("sphere3", mode)
    for a in range(mod.s):
        assert mod.dirac_apply(mod.frame_spinor(a)) == mod.frame_spinor(a).scale(Scalar.const(Fraction(-3, 2)))


@pytest.mark.parametrize("name, mode", BOTH)
def test_four_conditions(name, mode):
    res = dirac(name, mode).check_conditions()
    assert [r.name for r in res] == [
        "dirac_1_clifford_relation",
        "dirac_2_clifford_module",
        "dirac_3_spin_connection",
        "dirac_4_clifford_connection",
    ]
    assert all(r.passed for r in res), [r for r in res if not r.passed]


def test_scaled_spin_fails_clifford_connection():
    g = geometry("sphere3")
    bad = DiracModule(calc("sphere3"), g.dirac.scaled_spin(2))
    failed = [r for r in bad.check_conditions() if not r.passed]
    assert [r.name for r in failed] == ["dirac_4_clifford_connection"]
    assert failed[0].witness
    assert not weitzenbock_report(bad).passed


def test_validate_dirac_catches_degree_mismatch():
    g = geometry("torus")
    assert validate_dirac(g.dirac, g.frame.degrees) == []
    assert validate_dirac(g.dirac, g.frame.degrees[:1])


@pytest.mark.parametrize("mode", [CL, DF])
@pytest.mark.parametrize("m, n", [(0, 0), (1, 0), (2, -1), (-3, 2)])
def test_torus_laplacian_eigenvalues(mode, m, n):
    mod = dirac("torus", mode)
    for a in range(mod.s):
        x = mod.spinor({a: AlgebraElement.basis((m, n))})
        assert mod.laplacian(x) == x.scale(Scalar.const(m * m + n * n))


@pytest.mark.parametrize("name, k", [("torus", 0), ("sphere3", Fraction(3, 2))])
@pytest.mark.parametrize("mode", [CL, DF])
def test_weitzenbock_residue(name, k, mode):
    mod = dirac(name, mode)
    rep = weitzenbock_report(mod, samples=50)
    assert rep.passed and rep.samples == 50 + mod.s
    assert rep.residue_factor == Scalar.const(k)


def test_weitzenbock_hypothesis_guard():
    mod = dirac("sphere3")

    class Broken(DiracModule):
        def weitzenbock_hypotheses(self):
            return ["forced"]

    b = Broken(mod.calc, mod.spec, mod.connection)
    with pytest.raises(WeitzenbockHypothesisError):
        b.weitzenbock_residue(mod.frame_spinor(0))
    assert not weitzenbock_report(b).passed


@pytest.mark.parametrize("name, mode", BOTH)
def test_spinor_connection_hermitian_and_adjoint_identity(name, mode):
    mod = dirac(name, mode)
    sp = mod.sample_spinors(3)
    for _, x in sp:
        for _, y in sp:
            assert mod.hermitian_residual(x, y).is_zero()
            assert mod.adjoint_connection_identity(x, y).is_zero()


@pytest.mark.parametrize("name, mode", BOTH)
def test_divergence_vanishes_and_laplacian_positive(name, mode):
    mod = dirac(name, mode)
    for lab, x in mod.sample_spinors(8, seed=3):
        rep = divergence_check(mod, x, qs=(Fraction(0),) + SAMPLE_QS)
        assert rep.passed, (lab, rep.witness)
        assert rep.divergence.is_zero()
        assert rep.lhs == rep.rhs


def test_sphere_energy_of_constant_spinor():
    # Lap = D^2 - r/4 on constants: (3/2)^2 - 6/4 = 3/4
    mod = dirac("sphere3")
    rep = divergence_check(mod, mod.frame_spinor(0))
    assert rep.lhs == Scalar.const(Fraction(3, 4))
