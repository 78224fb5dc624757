from fractions import Fraction
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ncgcurv.algebra import AlgebraElement, Mode
from ncgcurv.geometries import builtin_sphere3, builtin_torus
from ncgcurv.scalars import Coeff, Scalar, lam_pow

settings.register_profile(
    "repro",
    derandomize=True,
    max_examples=100,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repro")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


SAMPLE_QS = (Fraction(1, 7), Fraction(1, 5), Fraction(2, 9), Fraction(3, 8), Fraction(5, 11))


@lru_cache(maxsize=None)
def geometry(name):
    return {"torus": builtin_torus, "sphere3": builtin_sphere3}[name]()


@lru_cache(maxsize=None)
def calc(name, mode=Mode.CLASSICAL):
    return geometry(name).calculus(mode)


@lru_cache(maxsize=None)
def lc(name, mode=Mode.CLASSICAL):
    return geometry(name).levi_civita(mode)


@lru_cache(maxsize=None)
def dirac(name, mode=Mode.CLASSICAL):
    return geometry(name).dirac_module(mode)


BOTH = [("torus", Mode.CLASSICAL), ("torus", Mode.DEFORMED), ("sphere3", Mode.CLASSICAL), ("sphere3", Mode.DEFORMED)]


@pytest.fixture(params=BOTH, ids=lambda p: f"{p[0]}-{p[1].value}")
def geo_mode(request):
    return request.param


# ---------------------------------------------------------------- strategies

small = st.integers(-3, 3)
frac = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def coeffs(draw):
    return Coeff.from_parts(draw(frac), draw(frac), draw(frac), draw(frac))


@st.composite
def laurent_scalars(draw, max_terms=3):
    out = Scalar.zero()
    for _ in range(draw(st.integers(0, max_terms))):
        out = out + Scalar.monomial(draw(coeffs()), draw(small))
    return out


@st.composite
def scalars(draw):
    """Laurent polynomials, sometimes divided by a nonvanishing-on-the-circle polynomial."""
    x = draw(laurent_scalars())
    if draw(st.booleans()):
        k = draw(st.integers(1, 2))
        x = x / (Scalar.const(3) + lam_pow(k))
    return x


def elements(alg_keys):
    @st.composite
    def build(draw):
        terms = {}
        for _ in range(draw(st.integers(1, 2))):
            terms[draw(st.sampled_from(alg_keys))] = Scalar.const(draw(st.integers(-2, 2)) or 1)
        return AlgebraElement(terms)

    return build()
