"""Acceptance criteria, one test each, each at its stated tolerance.

Every criterion records a single PASS/FAIL line; they are printed in the
pytest terminal summary, or directly when this file is run as a script.
Geometries are rebuilt from scratch here so the timing limits measure the
whole pipeline, not cached results.
"""

import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from ncgcurv.algebra import AlgebraElement, Mode
from ncgcurv.curvature import real_frame_components, ricci, riemann, riemann_apply, scalar_curvature
from ncgcurv.deformation import deform_connection, h_theta, identify_tensor, t_theta
from ncgcurv.dirac import DiracModule, divergence_check, weitzenbock_report
from ncgcurv.geometries import SABOTAGE, builtin_sphere3, builtin_torus, resolve_geometry
from ncgcurv.scalars import Scalar
from ncgcurv.suite import SuiteConfig, failed_checks, run_suite

from conftest import ACCEPTANCE_LINES, SAMPLE_QS

CL, DF = Mode.CLASSICAL, Mode.DEFORMED
BUILTINS = {"torus": builtin_torus, "sphere3": builtin_sphere3}


def _record(n, title, failures, extra=""):
    status = "PASS" if not failures else "FAIL"
    detail = extra if not failures else "; ".join(failures[:3])
    line = f"{status} criterion {n}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert not failures, line


def _unit(c, k):
    return c.unit.scale(Scalar.const(k))


# ---------------------------------------------------------------- 1


def test_criterion_1_flat_torus():
    fails = []
    t0 = time.perf_counter()
    g = builtin_torus()
    c = g.calculus(DF)
    res = g.levi_civita(DF)
    if not res.A.is_zero():
        fails.append("A != 0")
    for conn in (res.connection, res.connection.conjugate()):
        rt = riemann(conn)
        if not rt.tensor.is_zero():
            fails.append(f"R != 0 ({conn.chirality})")
        ric = ricci(c, rt)
        if not ric.is_zero():
            fails.append(f"Ric != 0 ({conn.chirality})")
        if not scalar_curvature(c, ric).is_zero():
            fails.append(f"r != 0 ({conn.chirality})")
    mod = DiracModule(c, g.dirac, res.connection)
    wr = weitzenbock_report(mod)
    if not wr.passed or wr.residue_factor != Scalar.zero():
        fails.append(f"Weitzenbock residue factor {wr.residue_factor}")
    for m in range(-3, 4):
        for n in range(-3, 4):
            for a in range(mod.s):
                x = mod.spinor({a: AlgebraElement.basis((m, n))})
                if mod.laplacian(x) != x.scale(Scalar.const(m * m + n * n)):
                    fails.append(f"Laplacian on x_{a} U^{m} V^{n}")
    dt = time.perf_counter() - t0
    if dt >= 1.0:
        fails.append(f"runtime {dt:.2f}s >= 1s")
    _record(1, "flat torus, symbolic lam", fails, f"{dt:.2f}s")


# ---------------------------------------------------------------- 2


def test_criterion_2_round_sphere():
    fails = []
    t0 = time.perf_counter()
    g = builtin_sphere3()
    c = g.calculus(CL)
    conn = g.levi_civita(CL).connection
    for cn in (conn, conn.conjugate()):
        rt = riemann(cn)
        ric = ricci(c, rt)
        if ric != c.line_element.scale(2):
            fails.append(f"Ric != 2G ({cn.chirality})")
        r = scalar_curvature(c, ric)
        if r != _unit(c, 6):
            fails.append(f"r = {r!r} ({cn.chirality})")
        comp = real_frame_components(c, rt, g.real_frame)
        for (i, j, k, l), v in comp.items():
            want = int(i == k and j == l) - int(i == l and j == k)
            if v != Scalar.const(want):
                fails.append(f"R_{i}{j}{k}{l} = {v} ({cn.chirality})")
    dt = time.perf_counter() - t0
    if dt >= 5.0:
        fails.append(f"runtime {dt:.2f}s >= 5s")
    _record(2, "round 3-sphere, classical", fails, f"r = 6, {dt:.2f}s")


# ---------------------------------------------------------------- 3


def test_criterion_3_theta_naturality_of_curvature():
    fails = []
    g = builtin_sphere3()
    cl, th = g.calculus(CL), g.calculus(DF)
    conn_cl = g.levi_civita(CL).connection
    conn_th = g.levi_civita(DF).connection
    for a, b in ((conn_cl, conn_th), (conn_cl.conjugate(), conn_th.conjugate())):
        rc, rt = riemann(a), riemann(b)
        if rt.tensor != identify_tensor(th, rc.tensor):
            fails.append(f"R_theta != H(R) ({a.chirality})")
        ric_c, ric_t = ricci(cl, rc), ricci(th, rt)
        if ric_t != t_theta(th, ric_c):
            fails.append(f"Ric_theta != T(Ric) ({a.chirality})")
        if scalar_curvature(th, ric_t) != _unit(th, 6):
            fails.append(f"r_theta != 6 ({a.chirality})")
    # the rank-3 pieces of R go through H itself
    for j in range(cl.n):
        x = cl.frame_form(j)
        if riemann_apply(conn_th, x) != h_theta(th, riemann_apply(conn_cl, x)):
            fails.append(f"R_theta(omega_{j}) != H(R(omega_{j}))")
    _record(3, "theta-naturality of R, Ric, r on the sphere", fails)


# ---------------------------------------------------------------- 4


def test_criterion_4_deformed_uniqueness():
    fails = []
    for name, f in BUILTINS.items():
        g = f()
        th = g.calculus(DF)
        from_scratch = g.levi_civita(DF).connection
        deformed = deform_connection(g.levi_civita(CL).connection, th)
        if from_scratch.form != deformed.form:
            fails.append(name)
    _record(4, "deformed Levi-Civita uniqueness", fails)


# ---------------------------------------------------------------- 5

POSTCONDITIONS = ("hermitian", "torsion_free_right", "torsion_free_left", "sigma_bimodule", "dagger_concordance")


def test_criterion_5_levi_civita_postconditions():
    fails = []
    for name, f in BUILTINS.items():
        g = f()
        for mode in (CL, DF):
            res = g.levi_civita(mode)
            by = {c.name: c for c in res.checks}
            for want in POSTCONDITIONS:
                if want not in by or not by[want].passed:
                    fails.append(f"{name}/{mode.value}/{want}")
    _record(5, "Levi-Civita postconditions", fails)


# ---------------------------------------------------------------- 6


def test_criterion_6_dirac_and_weitzenbock():
    fails = []
    for name, f in BUILTINS.items():
        g = f()
        for mode in (CL, DF):
            mod = DiracModule(g.calculus(mode), g.dirac, g.levi_civita(mode).connection)
            for c in mod.check_conditions():
                if not c.passed:
                    fails.append(f"{name}/{mode.value}/{c.name}")
    g = builtin_sphere3()
    for mode in (CL, DF):
        mod = DiracModule(g.calculus(mode), g.dirac, g.levi_civita(mode).connection)
        spinors = mod.sample_spinors(50, seed=0)[mod.s :]
        for lab, x in spinors:
            res = mod.weitzenbock_residue(x)
            if res != x.scale(Scalar.const(Fraction(3, 2))):
                fails.append(f"{mode.value} residue on {lab}")
            if res != mod.clifford_curvature(x):
                fails.append(f"{mode.value} residue != Clifford curvature on {lab}")
        if len(spinors) != 50:
            fails.append("sample count")
    # Laplacian undeformed: Delta_theta(ident x) = ident(Delta x)
    for name, f in BUILTINS.items():
        g = f()
        mc = DiracModule(g.calculus(CL), g.dirac, g.levi_civita(CL).connection)
        mt = DiracModule(g.calculus(DF), g.dirac, g.levi_civita(DF).connection)
        for lab, x in mc.sample_spinors(6, seed=1):
            if mt.laplacian(identify_tensor(mt.calc, x)) != identify_tensor(mt.calc, mc.laplacian(x)):
                fails.append(f"{name} Delta_theta != Delta on {lab}")
    _record(6, "Dirac conditions and Weitzenbock formula", fails, "sphere residue 3/2 on 50 spinors")


# ---------------------------------------------------------------- 7


def test_criterion_7_m_of_line_element():
    fails = []
    for name, f, dim in (("torus", builtin_torus, 2), ("sphere3", builtin_sphere3, 3)):
        g = f()
        for mode in (CL, DF):
            c = g.calculus(mode)
            mod = DiracModule(c, g.dirac, g.levi_civita(mode).connection)
            m = mod.m_rep(c.line_element)
            for b in range(mod.s):
                for a in range(mod.s):
                    want = _unit(c, dim) if a == b else AlgebraElement()
                    if m[b][a] != want:
                        fails.append(f"{name}/{mode.value} m(G)[{b}][{a}]")
            if c.e_beta() != _unit(c, dim):
                fails.append(f"{name}/{mode.value} e^beta = {c.e_beta()!r}")
    _record(7, "m(G) = dim M and e^beta = dim M", fails)


# ---------------------------------------------------------------- 8


def test_criterion_8_property_suites():
    here = Path(__file__).parent
    r = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(here / "test_properties.py")], capture_output=True, text=True)
    fails = [] if r.returncode == 0 else [r.stdout.strip().splitlines()[-1]]
    # spot check of the positivity bound at the five sampled theta values
    g = builtin_sphere3()
    mod = DiracModule(g.calculus(DF), g.dirac, g.levi_civita(DF).connection)
    for lab, x in mod.sample_spinors(4, seed=2):
        rep = divergence_check(mod, x, qs=SAMPLE_QS, tol=1e-10)
        if not rep.passed:
            fails.append(f"{lab}: {rep.witness}")
    _record(8, "seeded property suites (>= 100 cases each)", fails)


# ---------------------------------------------------------------- 9


def test_criterion_9_mutation_sensitivity():
    fails, caught = [], []
    for name in sorted(SABOTAGE):
        bad = failed_checks(run_suite(resolve_geometry(name), SuiteConfig(samples=4, spinor_samples=4)))
        with_witness = [c for c in bad if c.witness]
        if not with_witness:
            fails.append(f"{name} not caught")
        else:
            caught.append(f"{name}: {with_witness[0].name}")
    _record(9, "sabotage fixtures caught", fails, "; ".join(caught))


if __name__ == "__main__":
    sys.exit(subprocess.call([sys.executable, "-m", "pytest", "-q", __file__]))
