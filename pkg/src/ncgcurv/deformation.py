"""Theta-deformation as explicit phase maps, and the checks of its transformation laws.

Classical and deformed tensors describe the same vectors in two coordinate
systems.  For homogeneous x, y the comparison map is

    T(x (x) y) = lam^(-n2(x) n1(y)) x (x)_theta y,

and a right coefficient a of a one-form is re-read as omega a = lam^(-n2(omega) n1(a)) omega * a.
``t_theta`` and ``h_theta`` apply these phases term by term, ``h_theta``
along either bracketing.  ``verify_theta_theorems`` evaluates each
transformation law as an exact identity (or numerically at one theta).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .algebra import AlgebraElement, Degree, Mode, ZERO_DEGREE, theta_cocycle
from .checks import CheckResult, ThetaContext, check_zero
from .curvature import riemann, riemann_apply, ricci, scalar_curvature
from .dirac import DiracModule, DiracModuleSpec
from .forms import Calculus, Tensor, tensor_sum
from .levi_civita import (
    Connection,
    hermitian_residual,
    leibniz_residual,
    sample_elements,
    sample_one_forms,
    solve_levi_civita,
)
from .scalars import Scalar, lam_pow

__all__ = [
    "ThetaContext",
    "theta_cocycle",
    "phase_t",
    "module_identification",
    "t_theta",
    "t_theta_inverse",
    "h_theta",
    "identify_tensor",
    "deform_connection",
    "verify_theta_theorems",
]


def phase_t(x: Degree, y: Degree) -> Scalar:
    return lam_pow(-x.n2 * y.n1)


def _leg_degrees(calc: Calculus, t: Tensor, idx) -> List[Degree]:
    return [calc.leg_degree(l, i) for l, i in zip(t.legs, idx)]


def _sum(ds: Sequence[Degree]) -> Degree:
    out = ZERO_DEGREE
    for d in ds:
        out = out + d
    return out


def _phase_map(calc: Calculus, t: Tensor, phase: Callable[[List[Degree], Degree], Scalar]) -> Tensor:
    deg = calc.algebra.degree
    out = {}
    for idx, a in t.coords.items():
        legs = _leg_degrees(calc, t, idx)
        out[idx] = AlgebraElement({k: c * phase(legs, deg(k)) for k, c in a.terms.items()})
    return Tensor(t.legs, out)


def module_identification(calc: Calculus, t: Tensor, inverse: bool = False) -> Tensor:
    """Rank 1: omega a -> lam^(-n2(omega) n1(a)) omega * a."""
    if t.rank != 1:
        raise ValueError("module identification acts on rank-1 tensors")
    sign = -1 if inverse else 1

    def ph(legs, dk):
        p = phase_t(legs[0], dk)
        return p.inv() if sign < 0 else p

    return _phase_map(calc, t, ph)


def t_theta(calc: Calculus, t: Tensor) -> Tensor:
    """T on a rank-2 tensor: the split phase times the identification of the second factor."""
    if t.rank != 2:
        raise ValueError("t_theta acts on rank-2 tensors")
    return _phase_map(calc, t, lambda l, dk: phase_t(l[0], l[1] + dk) * phase_t(l[1], dk))


def t_theta_inverse(calc: Calculus, t: Tensor) -> Tensor:
    if t.rank != 2:
        raise ValueError("t_theta acts on rank-2 tensors")
    return _phase_map(calc, t, lambda l, dk: (phase_t(l[0], l[1] + dk) * phase_t(l[1], dk)).inv())


def h_theta(calc: Calculus, t: Tensor, bracketing: str = "left") -> Tensor:
    """H on a rank-3 tensor, through (1 (x) T) o T (``left``) or (T (x) 1) o T (``right``)."""
    if t.rank != 3:
        raise ValueError("h_theta acts on rank-3 tensors")
    if bracketing == "left":
        return _phase_map(
            calc, t, lambda l, dk: phase_t(l[0], l[1] + l[2] + dk) * phase_t(l[1], l[2] + dk) * phase_t(l[2], dk)
        )
    if bracketing == "right":
        return _phase_map(
            calc, t, lambda l, dk: phase_t(l[0] + l[1], l[2] + dk) * phase_t(l[0], l[1]) * phase_t(l[2], dk)
        )
    raise ValueError("bracketing must be 'left' or 'right'")


def identify_tensor(calc: Calculus, t: Tensor, inverse: bool = False) -> Tensor:
    """Any rank: peel off the first factor repeatedly, T(x (x) rest) then recurse on rest."""

    def ph(legs, dk):
        p = Scalar.one()
        for i in range(len(legs)):
            p = p * phase_t(legs[i], _sum(legs[i + 1 :]) + dk)
        return p.inv() if inverse else p

    return _phase_map(calc, t, ph)


# ---------------------------------------------------------------- connections


def deform_connection(conn: Connection, deformed: Calculus) -> Connection:
    """grad_theta = T o grad o (identification)^(-1), stored as a deformed connection form."""
    if conn.calc.deformed:
        raise ValueError("deform_connection expects a classical connection")
    if not deformed.deformed:
        raise ValueError("target calculus must be in deformed mode")
    n = deformed.n

    def image(rho_theta: Tensor) -> Tensor:
        return identify_tensor(deformed, conn(identify_tensor(deformed, rho_theta, inverse=True)))

    if conn.chirality == "right":
        form = tensor_sum("FFF", (deformed.tensor(image(deformed.frame_form(j)), deformed.frame_dagger(j)) for j in range(n)))
    else:
        form = tensor_sum("FFF", (deformed.tensor(deformed.frame_form(j), image(deformed.frame_dagger(j))) for j in range(n)))
    return Connection(deformed, conn.chirality, form)


# ---------------------------------------------------------------- samples


def random_homogeneous(calc: Calculus, legs: str, rng: random.Random, spinor_rank: int = 0) -> Tensor:
    keys = calc.algebra.sample_keys()
    idx = tuple(rng.randrange(spinor_rank if l == "X" else calc.n) for l in legs)
    return Tensor(legs, {idx: AlgebraElement.basis(rng.choice(keys), rng.randint(-3, 3) or 1)})


def random_tensor(calc: Calculus, legs: str, rng: random.Random, terms: int = 3, spinor_rank: int = 0) -> Tensor:
    return tensor_sum(legs, (random_homogeneous(calc, legs, rng, spinor_rank) for _ in range(terms)))


def homogeneous_degree(calc: Calculus, t: Tensor) -> Degree:
    """Total degree of a single-term, single-key tensor."""
    ((idx, a),) = t.coords.items()
    ((k, _),) = a.terms.items()
    return calc.index_degree(t.legs, idx) + calc.algebra.degree(k)


# ---------------------------------------------------------------- verification


@dataclass
class ThetaReport:
    geometry: str
    context: str
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "geometry": self.geometry,
            "context": self.context,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
        }


def verify_theta_theorems(
    classical: Calculus,
    deformed: Calculus,
    dirac: Optional[DiracModuleSpec] = None,
    ctx: Optional[ThetaContext] = None,
    samples: int = 6,
    seed: int = 0,
    name: str = "",
    perturbation: Optional[Tensor] = None,
) -> ThetaReport:
    """Evaluate every transformation law of the theta-deformation on frame data and samples.

    ``perturbation`` (classical coordinates) is added to both solved
    connection forms, deformed through H, as the perturbed-A fixture does.
    """
    ctx = ctx or ThetaContext.symbolic()
    cl, th = classical, deformed
    rng = random.Random(seed)
    ident = lambda t: identify_tensor(th, t)
    unident = lambda t: identify_tensor(th, t, inverse=True)
    checks: List[CheckResult] = []

    def add(name, cases):
        checks.append(check_zero(name, ctx, cases))

    # bicharacter laws of Theta on a degree grid
    grid = [Degree(a, b) for a in range(-2, 3) for b in range(-2, 3)]
    cases = []
    for _ in range(60):
        n, n2, m = rng.choice(grid), rng.choice(grid), rng.choice(grid)
        cases.append((f"{n.as_tuple()},{n2.as_tuple()},{m.as_tuple()}", theta_cocycle(n + n2, m) - theta_cocycle(n, m) * theta_cocycle(n2, m)))
        cases.append((f"antisym {n.as_tuple()},{m.as_tuple()}", theta_cocycle(n, m) * theta_cocycle(m, n) - Scalar.one()))
        cases.append((f"diag {n.as_tuple()}", theta_cocycle(n, n) - Scalar.one()))
    add("theta_bicharacter", cases)

    # T and H against the engine's coordinate identification, invertibility, coherence
    t2 = [random_tensor(cl, "FF", rng) for _ in range(samples)]
    t3 = [random_tensor(cl, "FFF", rng) for _ in range(samples)]
    cases = [(f"T #{i}", t_theta(th, t) - th.identify(t)) for i, t in enumerate(t2)]
    cases += [(f"T^-1 T #{i}", t_theta_inverse(th, t_theta(th, t)) - t) for i, t in enumerate(t2)]
    add("t_theta_invertible", cases)
    add(
        "h_theta_coherence",
        [(f"#{i}", h_theta(th, t, "left") - h_theta(th, t, "right")) for i, t in enumerate(t3)]
        + [(f"engine #{i}", h_theta(th, t) - th.identify(t)) for i, t in enumerate(t3)],
    )

    # T is a bimodule map preserving inner products
    cases = []
    for i in range(samples):
        s = random_homogeneous(cl, "FF", rng)
        t = random_homogeneous(cl, "FF", rng)
        if i % 2 == 0:  # same index so that the pairing is nonzero
            ((idx, _),) = s.coords.items()
            ((_, b),) = t.coords.items()
            t = Tensor("FF", {idx: b})
        ds, dt = homogeneous_degree(cl, s), homogeneous_degree(cl, t)
        lhs = th.inner_right(t_theta(th, s), t_theta(th, t))
        rhs = cl.inner_right(s, t).scale(lam_pow((ds.n1 - dt.n1) * ds.n2))
        cases.append((f"pair #{i}", lhs - rhs))
    add("t_theta_inner_product", cases)
    cases = []
    elems = sample_elements(cl, 3, seed)
    for i in range(samples):
        s = random_homogeneous(cl, "FF", rng)
        ds = homogeneous_degree(cl, s)
        for b in elems:
            db = homogeneous_degree(cl, Tensor("", {(): b}))
            right = cl.right_mul(s, b).scale(lam_pow(ds.n2 * db.n1))
            cases.append((f"right #{i} {b!r}", t_theta(th, right) - th.right_mul(t_theta(th, s), b)))
            left = cl.left_mul(b, s).scale(lam_pow(db.n2 * ds.n1))
            cases.append((f"left #{i} {b!r}", t_theta(th, left) - th.left_mul(b, t_theta(th, s))))
    add("t_theta_bimodule_map", cases)

    # differential, braiding, junk projection, dagger
    forms = sample_one_forms(th, samples, seed)
    add("d_theta_naturality", [(lab, th.exterior_d(r) - ident(cl.exterior_d(unident(r)))) for lab, r in forms])
    add(
        "sigma_psi_conjugation",
        [(f"sigma #{i}", th.sigma(ident(t)) - ident(cl.sigma(t))) for i, t in enumerate(t2)]
        + [(f"Psi #{i}", th.psi(ident(t)) - ident(cl.psi(t))) for i, t in enumerate(t2)],
    )
    cases = []
    for i in range(samples):
        for legs in ("F", "FF"):
            t = random_homogeneous(cl, legs, rng)
            d = homogeneous_degree(cl, t)
            rhs = ident(cl.dagger(t).scale(lam_pow(d.n2 * d.n1)))
            cases.append((f"{legs} #{i}", th.dagger(ident(t)) - rhs))
    add("dagger_theta", cases)

    # connections
    lc_cl = solve_levi_civita(cl, perturbation=perturbation)
    th_pert = h_theta(th, perturbation) if perturbation is not None else None
    lc_th = solve_levi_civita(th, perturbation=th_pert)
    grad_cl = lc_cl.connection
    grad_th = deform_connection(grad_cl, th)
    left_th = deform_connection(grad_cl.conjugate(), th)
    add("deformed_uniqueness", [("connection form", grad_th.form - lc_th.connection.form)] + [
        (lab, grad_th(r) - lc_th.connection(r)) for lab, r in forms
    ])
    add("deformed_connection_action", [(lab, grad_th(r) - ident(grad_cl(unident(r)))) for lab, r in forms])
    add(
        "deformed_leibniz",
        [(f"{lab}, {a!r}", leibniz_residual(grad_th, r, a)) for lab, r in forms[: 2 * th.n] for a in sample_elements(th, 2, seed)],
    )
    add("conjugate_commutes_with_deformation", [("form", left_th.form - grad_th.conjugate().form)])
    add("hermitian_theta", [("(grad (x) 1 + 1 (x) grad)(G_theta)", hermitian_residual(grad_th, left_th))])
    add("torsion_free_theta", [(lab, th.antisym(grad_th(r)) + th.exterior_d(r)) for lab, r in forms])
    add("sigma_bimodule_theta", [(lab, th.sigma(grad_th(r)) - left_th(r)) for lab, r in forms])

    # curvature
    solved_th = lc_th.connection
    cases = []
    for conn_c, conn_t, tag in ((grad_cl, solved_th, "right"), (grad_cl.conjugate(), solved_th.conjugate(), "left")):
        for lab, r in forms:
            cases.append((f"{tag} {lab}", riemann_apply(conn_t, r) - ident(riemann_apply(conn_c, unident(r)))))
    add("curvature_naturality", cases)
    cases, ric_cases, r_cases = [], [], []
    for conn_c, conn_t, tag in ((grad_cl, solved_th, "right"), (grad_cl.conjugate(), solved_th.conjugate(), "left")):
        rc, rt = riemann(conn_c), riemann(conn_t)
        cases.append((f"{tag} rank-4 tensor", rt.tensor - ident(rc.tensor)))
        ric_c, ric_t = ricci(cl, rc), ricci(th, rt)
        ric_cases.append((f"{tag} Ricci", ric_t - t_theta(th, ric_c)))
        r_cases.append((f"{tag} scalar", scalar_curvature(th, ric_t) - scalar_curvature(cl, ric_c)))
    add("curvature_tensor_naturality", cases)
    add("ricci_naturality", ric_cases)
    add("scalar_curvature_invariance", r_cases)

    # contractions with G_theta
    cases = []
    for i in range(samples):
        t4 = _degree_zero_sample(cl, "FFFF", rng)
        if t4 is None:
            continue
        head3 = Tensor("FFF", {idx[:3]: cl.unit for idx in t4.coords})
        ((idx, a),) = t4.coords.items()
        tau = Tensor("F", {idx[3:]: a})
        # H(omega (x) rho (x) eta) (x)_theta tau carries lam^(n2(tau) n1(tau)) relative
        # to the full identification of the four-fold tensor
        dt = cl.index_degree("F", idx[3:])
        lhs = th.pair_left(th.tensor(h_theta(th, head3), module_identification(th, tau)), th.line_element)
        rhs = ident(cl.pair_left(t4, cl.line_element)).scale(lam_pow(-dt.n2 * dt.n1))
        cases.append((f"#{i}", lhs - rhs))
        cases.append((f"full identification #{i}", th.pair_left(ident(t4), th.line_element) - ident(cl.pair_left(t4, cl.line_element))))
    add("contraction_rank4", cases)
    add("line_element_theta", [("G_theta = T(G)", th.line_element - t_theta(th, cl.line_element)), ("e^beta", th.e_beta() - cl.e_beta())])

    if dirac is not None:
        checks.extend(_dirac_theta_checks(cl, th, dirac, ctx, rng, samples, seed, lc_cl.connection, lc_th.connection))
    return ThetaReport(name, ctx.describe(), checks)


def _degree_zero_sample(calc: Calculus, legs: str, rng: random.Random, tries: int = 200) -> Optional[Tensor]:
    for _ in range(tries):
        t = random_homogeneous(calc, legs, rng)
        if homogeneous_degree(calc, t) == ZERO_DEGREE:
            return t
    return None


def _dirac_theta_checks(cl, th, spec, ctx, rng, samples, seed, grad_cl, grad_th) -> List[CheckResult]:
    mc = DiracModule(cl, spec, grad_cl)
    mt = DiracModule(th, spec, grad_th)
    cl, th = mc.calc, mt.calc  # spinor degrees attached
    ident = lambda t: identify_tensor(th, t)
    unident = lambda t: identify_tensor(th, t, inverse=True)
    s = spec.rank
    out = []

    def add(name, cases):
        out.append(check_zero(name, ctx, cases))

    spinors = mt.sample_spinors(samples, seed)
    t2 = [random_tensor(cl, "FF", rng) for _ in range(samples)]
    # m = m_theta o T, seen through the Clifford action on homogeneous t, x:
    # c_theta(m_theta(T t) (x) x) = lam^(n2(t) n1(x)) c(m(t) (x) x)
    cases = [("m(G_theta) = m(G)", _mat_diff(mt.m_rep(th.line_element), mc.m_rep(cl.line_element)))]
    for i in range(samples):
        t = random_homogeneous(cl, "FF", rng)
        x = random_homogeneous(cl, "X", rng, spinor_rank=s)
        dt, dx = homogeneous_degree(cl, t), homogeneous_degree(cl, x)
        rhs = ident(mc.m_apply(t, x)).scale(lam_pow(dt.n2 * dx.n1))
        cases.append((f"#{i}", mt.m_apply(t_theta(th, t), ident(x)) - rhs))
    add("invariant_m", cases)
    add("invariant_g", [(f"#{i}", th.g_pair(t_theta(th, t)) - cl.g_pair(t)) for i, t in enumerate(t2)])
    fx = [random_tensor(cl, "FX", rng, spinor_rank=s) for _ in range(samples)]
    ffx = [random_tensor(cl, "FFX", rng, spinor_rank=s) for _ in range(samples)]
    add("invariant_c", [(f"#{i}", mt.clifford_contract(ident(t)) - ident(mc.clifford_contract(t))) for i, t in enumerate(fx)])
    add(
        "invariant_c_tensor",
        [(f"#{i}", mt.clifford_contract(ident(t)) - ident(mc.clifford_contract(t))) for i, t in enumerate(ffx)],
    )
    add("invariant_sigma", [(f"#{i}", th.sigma(ident(t), 0) - ident(cl.sigma(t, 0))) for i, t in enumerate(ffx)])
    add(
        "contraction_rank3",
        [(f"#{i}", th.pair_right(th.line_element, ident(t)) - ident(cl.pair_right(cl.line_element, t))) for i, t in enumerate(ffx)],
    )
    add(
        "connection_pieces_theta",
        [(f"#{i}", mt.nabla_pair(ident(t)) - ident(mc.nabla_pair(t))) for i, t in enumerate(fx)],
    )
    add("dirac_invariance", [(lx, mt.dirac_apply(x) - ident(mc.dirac_apply(unident(x)))) for lx, x in spinors])
    add("laplacian_invariance", [(lx, mt.laplacian(x) - ident(mc.laplacian(unident(x)))) for lx, x in spinors])
    add(
        "clifford_curvature_invariance",
        [(lx, mt.clifford_curvature(x) - ident(mc.clifford_curvature(unident(x)))) for lx, x in spinors],
    )
    return out


def _mat_diff(a, b) -> Tensor:
    coords = {}
    for i, (ra, rb) in enumerate(zip(a, b)):
        for j, (x, y) in enumerate(zip(ra, rb)):
            coords[(i, j)] = x - y
    return Tensor("XX", coords)
