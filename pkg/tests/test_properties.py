"""Seeded property tests: each runs at least 100 hypothesis examples."""

from hypothesis import given
from hypothesis import strategies as st

from ncgcurv.algebra import AlgebraElement, Degree, Mode, theta_cocycle
from ncgcurv.deformation import h_theta, homogeneous_degree, t_theta
from ncgcurv.dirac import divergence_check
from ncgcurv.forms import Tensor
from ncgcurv.levi_civita import Connection, leibniz_residual
from ncgcurv.scalars import Scalar, lam_pow

from conftest import BOTH, SAMPLE_QS, calc, dirac, geometry, lc

geo_modes = st.sampled_from(BOTH)
names = st.sampled_from(["torus", "sphere3"])
degrees = st.builds(Degree, st.integers(-4, 4), st.integers(-4, 4))


def _keys(name):
    return geometry(name).algebra.sample_keys()


@st.composite
def elements_of(draw, name, max_terms=2):
    keys = _keys(name)
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        k = draw(st.sampled_from(keys))
        c = Scalar.const(draw(st.integers(-3, 3)) or 1) * lam_pow(draw(st.integers(-1, 1)))
        terms[k] = terms[k] + c if k in terms else c
    return AlgebraElement(terms)


@st.composite
def tensors_of(draw, name, legs, max_terms=3, homogeneous=False):
    n = geometry(name).frame.n
    s = geometry(name).dirac.rank
    coords = {}
    for _ in range(1 if homogeneous else draw(st.integers(1, max_terms))):
        idx = tuple(draw(st.integers(0, (s if l == "X" else n) - 1)) for l in legs)
        a = draw(elements_of(name, 1 if homogeneous else 2))
        coords[idx] = coords[idx] + a if idx in coords else a
    return Tensor(legs, coords)


@st.composite
def calc_and(draw, legs, **kw):
    name, mode = draw(geo_modes)
    return name, mode, draw(tensors_of(name, legs, **kw))


@st.composite
def deformed_pair(draw, legs, **kw):
    name = draw(names)
    return name, draw(tensors_of(name, legs, **kw)), draw(tensors_of(name, legs, **kw))


# ---------------------------------------------------------------- one-forms and braiding


@given(calc_and("F"))
def test_frame_identity(data):
    name, mode, rho = data
    c = calc(name, mode)
    back = Tensor("F", {(k,): c.inner_right(c.frame_form(k), rho) for k in range(c.n)})
    assert (back - rho).is_zero()


@given(calc_and("FF"))
def test_psi_idempotent_and_self_adjoint(data):
    name, mode, t = data
    c = calc(name, mode)
    p = c.psi(t)
    assert c.psi(p) == p
    assert c.dagger(p) == c.psi(c.dagger(t))


@given(calc_and("FF"))
def test_dagger_intertwines_sigma_and_its_inverse(data):
    name, mode, t = data
    c = calc(name, mode)
    assert c.dagger(c.sigma(t)) == c.sigma_inverse(c.dagger(t))
    assert c.sigma_inverse(c.sigma(t)) == t


# ---------------------------------------------------------------- theta


@given(degrees, degrees, degrees)
def test_theta_bicharacter(n, n2, m):
    assert theta_cocycle(n + n2, m) == theta_cocycle(n, m) * theta_cocycle(n2, m)
    assert theta_cocycle(m, n + n2) == theta_cocycle(m, n) * theta_cocycle(m, n2)
    assert theta_cocycle(n, m) * theta_cocycle(m, n) == Scalar.one()
    assert theta_cocycle(n, n) == Scalar.one()


@given(deformed_pair("FF", homogeneous=True))
def test_t_theta_preserves_inner_products(data):
    name, s, t = data
    cl, th = calc(name), calc(name, Mode.DEFORMED)
    ds, dt = homogeneous_degree(cl, s), homogeneous_degree(cl, t)
    lhs = th.inner_right(t_theta(th, s), t_theta(th, t))
    assert lhs == cl.inner_right(s, t).scale(lam_pow((ds.n1 - dt.n1) * ds.n2))


@given(names.flatmap(lambda n: st.tuples(st.just(n), tensors_of(n, "FFF"))))
def test_h_theta_coherence(data):
    name, t = data
    th = calc(name, Mode.DEFORMED)
    assert h_theta(th, t, "left") == h_theta(th, t, "right")


# ---------------------------------------------------------------- connections


@st.composite
def connection_and_data(draw):
    name, mode = draw(geo_modes)
    # Levi-Civita, Grassmann, or Levi-Civita plus an arbitrary one-form-valued A
    kind = draw(st.sampled_from(["lc", "grassmann", "shifted"]))
    a = lc(name, mode).A
    if kind == "grassmann":
        a = Tensor("FFF")
    elif kind == "shifted":
        a = a + draw(tensors_of(name, "FFF", max_terms=2))
    return name, mode, a, draw(tensors_of(name, "F")), draw(elements_of(name))


@given(connection_and_data())
def test_leibniz_for_every_connection(data):
    name, mode, a, rho, b = data
    conn = Connection(calc(name, mode), "right", a)
    assert leibniz_residual(conn, rho, b).is_zero()
    assert leibniz_residual(conn.conjugate(), rho, b).is_zero()


@given(connection_and_data())
def test_conjugate_is_an_involution(data):
    name, mode, a, rho, _ = data
    conn = Connection(calc(name, mode), "right", a)
    twice = conn.conjugate().conjugate()
    assert twice.form == conn.form
    assert twice(rho) == conn(rho)


# ---------------------------------------------------------------- spinors


@given(calc_and("X"), st.data())
def test_adjoint_connection_identity(data, more):
    name, mode, x = data
    y = more.draw(tensors_of(name, "X"))
    assert dirac(name, mode).adjoint_connection_identity(x, y).is_zero()


@given(calc_and("X"))
def test_divergence_and_phi_positivity(data):
    name, mode, x = data
    rep = divergence_check(dirac(name, mode), x, qs=SAMPLE_QS, tol=1e-10)
    assert rep.passed, rep.witness
    for q in SAMPLE_QS:
        assert abs(rep.divergence.eval(q)) <= 1e-10
        assert rep.lhs.eval(q).real >= -1e-10
