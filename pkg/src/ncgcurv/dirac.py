"""Spinor modules, Clifford action, Dirac operator, Laplacian and Weitzenbock residue.

A spinor is a rank-1 tensor with leg ``"X"``: coordinates ``{(a,): b}`` stand
for ``x_a * b`` with ``x_a`` the spinor frame.  The frame is orthonormal
for the left inner product, ``_B<x_a|x_c> = delta_ac``.

Clifford action in a mode:  c(omega_j (x) x_a * b) = lam^(n2(d_j) n1(s_a)) gamma_j x_a * b
(the phase is 1 classically).  The spin connection is a left connection;
classically  grad(x_a b) = sum_j omega_j (x) (x_a d_j(b) + sum_c x_c Gamma_j[c][a] b),
and the deformed one is the same vector map read through the coordinate
identification, grad_theta = T_theta o grad.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .algebra import AlgebraElement, Degree, Key, Mode
from .checks import CheckResult, ThetaContext, check_zero
from .forms import Calculus, Tensor, tensor_sum
from .levi_civita import Connection, solve_levi_civita
from .scalars import Scalar, ScalarPoleError, lam_pow

Matrix = Tuple[Tuple[Scalar, ...], ...]


class WeitzenbockHypothesisError(ArithmeticError):
    """sigma Psi != Psi or Psi(G) != G, so the Weitzenbock comparison does not apply."""


@dataclass(frozen=True)
class DiracModuleSpec:
    """Free spinor module with constant Clifford and spin-connection matrices.

    ``gamma[j][b][a]``: c(omega_j) x_a = sum_b x_b gamma[j][b][a].
    ``spin[j][b][a]``: grad(x_a) = sum_j omega_j (x) sum_b x_b spin[j][b][a].
    ``phi``: weights of the functional on algebra basis keys; ``None`` means
    the coefficient of the unit.
    """

    rank: int
    degrees: Tuple[Degree, ...]
    gamma: Tuple[Matrix, ...]
    spin: Tuple[Matrix, ...]
    phi: Optional[Mapping[Key, Scalar]] = None

    def scaled_spin(self, factor) -> "DiracModuleSpec":
        f = factor if isinstance(factor, Scalar) else Scalar.const(factor)
        spin = tuple(tuple(tuple(x * f for x in row) for row in m) for m in self.spin)
        return DiracModuleSpec(self.rank, self.degrees, self.gamma, spin, self.phi)


def validate_dirac(spec: DiracModuleSpec, frame_degrees: Sequence[Degree]) -> List[str]:
    """Shape and degree consistency of the Clifford and spin tables."""
    errs = []
    s = spec.rank
    if len(spec.degrees) != s:
        errs.append(f"spinor degrees: expected {s} entries, got {len(spec.degrees)}")
        return errs
    for name, table in (("clifford", spec.gamma), ("spin_connection", spec.spin)):
        if len(table) != len(frame_degrees):
            errs.append(f"{name}: expected {len(frame_degrees)} matrices, got {len(table)}")
            continue
        for j, m in enumerate(table):
            if len(m) != s or any(len(r) != s for r in m):
                errs.append(f"{name}[{j}]: expected a {s}x{s} matrix")
                continue
            for b in range(s):
                for a in range(s):
                    if m[b][a].is_zero():
                        continue
                    # c(omega_j) raises degree by d_j; Gamma_j lowers it by d_j
                    want = spec.degrees[a] + frame_degrees[j] if name == "clifford" else spec.degrees[a] - frame_degrees[j]
                    if spec.degrees[b] != want:
                        errs.append(
                            f"{name}[{j}][{b}][{a}] nonzero but spinor degrees "
                            f"{spec.degrees[a].as_tuple()} -> {spec.degrees[b].as_tuple()} do not match frame index {j}"
                        )
    return errs


# ---------------------------------------------------------------- the module


class DiracModule:
    """Clifford module over one calculus, with its spin connection and Levi-Civita partner."""

    def __init__(self, calc: Calculus, spec: DiracModuleSpec, connection: Optional[Connection] = None):
        if tuple(calc.spinor_degrees) != tuple(spec.degrees):
            calc = Calculus(calc.algebra, calc.derivation, calc.frame, calc.mode, spec.degrees, calc.braid_phases)
        self.calc = calc
        self.spec = spec
        self.s = spec.rank
        self._connection = connection

    @cached_property
    def classical(self) -> Calculus:
        return self.calc.with_mode(Mode.CLASSICAL)

    @property
    def connection(self) -> Connection:
        if self._connection is None:
            self._connection = solve_levi_civita(self.calc).connection
        return self._connection

    # spinors
    def spinor(self, coords: Mapping[int, AlgebraElement]) -> Tensor:
        return Tensor("X", {(a,): b for a, b in coords.items()})

    def frame_spinor(self, a: int) -> Tensor:
        return Tensor("X", {(a,): self.calc.unit})

    @staticmethod
    def flat(x: Tensor) -> Dict[Tuple[int, Key], Scalar]:
        """The ``{(spinor index, basis key): coefficient}`` view of a spinor."""
        return {(idx[0], k): c for idx, b in x.coords.items() for k, c in b.terms.items()}

    # Clifford action
    def clifford_phase(self, j: int, a: int) -> Scalar:
        if not self.calc.deformed:
            return Scalar.one()
        return lam_pow(self.calc.frame.degrees[j].n2 * self.spec.degrees[a].n1)

    def clifford_contract(self, t: Tensor) -> Tensor:
        """Apply c to the last one-form leg and the spinor leg of ``...F X``."""
        if not t.legs.endswith("FX"):
            raise ValueError(f"Clifford contraction needs legs ending in FX, got {t.legs!r}")
        out: Dict[tuple, AlgebraElement] = {}
        for idx, b in t.coords.items():
            j, a = idx[-2], idx[-1]
            ph = self.clifford_phase(j, a)
            g = self.spec.gamma[j]
            for bb in range(self.s):
                if g[bb][a].is_zero():
                    continue
                key = idx[:-2] + (bb,)
                c = b.scale(ph * g[bb][a])
                out[key] = out[key] + c if key in out else c
        return Tensor(t.legs[:-2] + "X", out)

    def clifford(self, omega: Tensor, x: Tensor) -> Tensor:
        return self.clifford_contract(self.calc.tensor(omega, x))

    def m_apply(self, t: Tensor, x: Tensor) -> Tensor:
        """m(t) x for a two-tensor t: c o (1 (x) c)."""
        return self.clifford_contract(self.clifford_contract(self.calc.tensor(t, x)))

    def m_rep(self, t: Tensor) -> Tuple[Tuple[AlgebraElement, ...], ...]:
        """Matrix of m(t) on the spinor frame: m(t) x_a = sum_b x_b * M[b][a]."""
        cols = [self.m_apply(t, self.frame_spinor(a)) for a in range(self.s)]
        return tuple(tuple(cols[a].coords.get((b,), AlgebraElement()) for a in range(self.s)) for b in range(self.s))

    # spin connection
    def _nabla_classical(self, x: Tensor) -> Tensor:
        c = self.classical
        out: Dict[tuple, AlgebraElement] = {}

        def add(key, val):
            if not val.is_zero():
                out[key] = out[key] + val if key in out else val

        for (a,), b in x.coords.items():
            for (j,), db in c.d_alg(b).coords.items():
                add((j, a), db)
            for j, m in enumerate(self.spec.spin):
                for bb in range(self.s):
                    if not m[bb][a].is_zero():
                        add((j, bb), b.scale(m[bb][a]))
        return Tensor("FX", out)

    def nabla(self, x: Tensor) -> Tensor:
        """The spin connection grad^X(x) in Omega^1 (x) X."""
        if not self.calc.deformed:
            return self._nabla_classical(x)
        return self.calc.identify(self._nabla_classical(self.calc.unidentify(x)))

    def nabla_pair(self, t: Tensor) -> Tensor:
        """(grad^G (x) 1 + 1 (x) grad^X) on Omega^1 (x) X."""
        c = self.calc
        parts = []
        for (j,), y in c.split_last(t, 1):
            parts.append(c.tensor(self.connection(c.frame_form(j)), y))
            parts.append(c.tensor(c.frame_form(j), self.nabla(y)))
        return tensor_sum("FFX", parts)

    def dirac_apply(self, x: Tensor) -> Tensor:
        return self.clifford_contract(self.nabla(x))

    # inner products and the functional
    def inner(self, x: Tensor, y: Tensor) -> AlgebraElement:
        """_B<x|y>, left linear in x, antilinear in y."""
        c = self.calc
        out = AlgebraElement()
        for (a,), b in x.coords.items():
            e = y.coords.get((a,))
            if e is None:
                continue
            f = c.uncommute(c.mul(e, c.star(b)), self.spec.degrees[a])
            out = out + c.star(f)
        return out

    def pair_spinor(self, t: Tensor, y: Tensor) -> Tensor:
        """_{T}<t|y>: the left inner product of the spinor leg of t with y, leaving the form legs."""
        c = self.calc
        p = t.rank - 1
        parts = []
        for head, tail in c.split_last(t, 1):
            parts.append(c.right_mul(c.legs_tensor(t.legs[:p], head), self.inner(tail, y)))
        return tensor_sum(t.legs[:p], parts)

    def pair_spinor_form(self, x: Tensor, t: Tensor) -> Tensor:
        """_B<x|eta (x) y> = _B<x|y> eta^dag for t in Omega^1 (x) X."""
        c = self.calc
        parts = []
        for (k,), y in c.split_last(t, 1):
            parts.append(c.tensor(c.scalar_tensor(self.inner(x, y)), c.frame_dagger(k)))
        return tensor_sum("F", parts)

    def phi(self, b: AlgebraElement) -> Scalar:
        if self.spec.phi is None:
            return self.calc.algebra.unit_coefficient(b)
        total = Scalar.zero()
        for k, c in b.terms.items():
            w = self.spec.phi.get(k)
            if w is not None:
                total = total + c * w
        return total

    def e_beta_inverse(self) -> Scalar:
        eb = self.calc.e_beta()
        uk = self.calc.algebra.unit_key
        if set(eb.terms) != {uk}:
            raise ValueError("e^beta is not a nonzero constant; the Laplacian normalization needs it")
        return eb.terms[uk].inv()

    # second-order operators
    def second_derivative(self, x: Tensor) -> Tensor:
        return self.nabla_pair(self.nabla(x))

    def laplacian(self, x: Tensor) -> Tensor:
        """e^(-beta) m(G) <G|(grad^G (x) 1 + 1 (x) grad^X) grad^X(x)>_X."""
        c = self.calc
        inner = c.pair_right(c.line_element, self.second_derivative(x))
        return self.m_apply(c.line_element, inner).scale(self.e_beta_inverse())

    def spinor_curvature(self, x: Tensor) -> Tensor:
        """((1 - Psi) (x) 1)(1 (x) grad^X - d (x) 1) grad^X(x)."""
        c = self.calc
        parts = []
        for eta, (a,) in c.split_first_left(self.nabla(x), 1):
            parts.append(c.tensor(eta, self.nabla(self.frame_spinor(a))))
            parts.append(-c.tensor(c.exterior_d(eta), self.frame_spinor(a)))
        return c.antisym(tensor_sum("FFX", parts), 0)

    def clifford_curvature(self, x: Tensor) -> Tensor:
        """c o (m o sigma (x) 1)(R^X(x))."""
        return self.clifford_contract(self.clifford_contract(self.calc.sigma(self.spinor_curvature(x), 0)))

    def weitzenbock_hypotheses(self) -> List[str]:
        c = self.calc
        bad = []
        for i in range(c.n):
            for k in range(c.n):
                t = c.legs_tensor("FF", (i, k))
                p = c.psi(t)
                if c.sigma(p) != p:
                    bad.append(f"sigma Psi != Psi on omega_{i} (x) omega_{k}")
        if c.psi(c.line_element) != c.line_element:
            bad.append("Psi(G) != G")
        return bad

    def weitzenbock_residue(self, x: Tensor, check_hypotheses: bool = True) -> Tensor:
        """D^2 x - Laplacian x."""
        if check_hypotheses:
            bad = self.weitzenbock_hypotheses()
            if bad:
                raise WeitzenbockHypothesisError("; ".join(bad))
        return self.dirac_apply(self.dirac_apply(x)) - self.laplacian(x)

    # samples
    def sample_spinors(self, count: int = 6, seed: int = 0, terms: int = 2) -> List[Tuple[str, Tensor]]:
        """Frame spinors, then seeded random sums of x_a * (small integer) * basis key."""
        out = [(f"x_{a}", self.frame_spinor(a)) for a in range(self.s)]
        rng = random.Random(seed)
        keys = self.calc.algebra.sample_keys()
        for r in range(count):
            coords: Dict[int, AlgebraElement] = {}
            for _ in range(terms):
                a = rng.randrange(self.s)
                b = AlgebraElement.basis(rng.choice(keys), rng.randint(-3, 3) or 1)
                coords[a] = coords[a] + b if a in coords else b
            out.append((f"random_{r}", self.spinor(coords)))
        return out

    # ------------------------------------------------------------ checks

    def divergence(self, x: Tensor) -> AlgebraElement:
        """_B<grad^G(omega_(0) _B<x_(1)|x>)|G> with grad^X(x) = omega_(0) (x) x_(1)."""
        c = self.calc
        return c.inner_left(self.connection(self.pair_spinor(self.nabla(x), x)), c.line_element)

    def energy(self, x: Tensor) -> AlgebraElement:
        """_B<grad x|grad x> = sum _B<omega_(0) _B<x_(1)|x'_(1)> | omega'_(0)>."""
        c = self.calc
        nx = self.nabla(x)
        total = AlgebraElement()
        for (j,), y in c.split_last(nx, 1):
            for (k,), z in c.split_last(nx, 1):
                rho = c.right_mul(c.frame_form(j), self.inner(y, z))
                total = total + c.inner_left(rho, c.frame_form(k))
        return total

    def adjoint_connection_identity(self, x: Tensor, y: Tensor) -> AlgebraElement:
        """Residual of <G|_B<grad x|grad y>>_B = _B<_T<(grad^G(x)1+1(x)grad^X)grad x|y> - grad^G(_O<grad x|y>)|G>."""
        c = self.calc
        nx, ny = self.nabla(x), self.nabla(y)
        parts = []
        for (j,), xx in c.split_last(nx, 1):
            for (k,), yy in c.split_last(ny, 1):
                parts.append(c.tensor(c.right_mul(c.frame_form(j), self.inner(xx, yy)), c.frame_dagger(k)))
        lhs = c.inner_right(c.line_element, tensor_sum("FF", parts))
        two = self.pair_spinor(self.nabla_pair(nx), y) - self.connection(self.pair_spinor(nx, y))
        rhs = c.inner_left(two, c.line_element)
        return lhs - rhs

    def hermitian_residual(self, x: Tensor, y: Tensor) -> Tensor:
        """_O<grad x|y> - _B<x|grad y> - d _B<x|y>."""
        c = self.calc
        return self.pair_spinor(self.nabla(x), y) - self.pair_spinor_form(x, self.nabla(y)) - c.d_alg(self.inner(x, y))

    def check_conditions(self, ctx: Optional[ThetaContext] = None, samples: int = 4, seed: int = 0) -> List[CheckResult]:
        ctx = ctx or ThetaContext.symbolic()
        c = self.calc
        spinors = self.sample_spinors(samples, seed)
        forms = self._sample_forms(samples, seed)
        elems = self._sample_elements(seed)
        out = []

        # condition 1
        ebi = self.e_beta_inverse()
        cases = []
        for lab, rho in forms:
            for lab2, eta in forms[: c.n]:
                pair = c.inner_right(c.dagger(rho), eta)
                t = c.psi(c.tensor(rho, eta))
                for a in range(self.s):
                    xa = self.frame_spinor(a)
                    lhs = self.m_apply(t, xa)
                    rhs = self.m_apply(c.line_element, c.left_mul(pair, xa)).scale(ebi)
                    cases.append((f"rho={lab}, eta={lab2}, x_{a}", lhs - rhs))
        out.append(check_zero("dirac_1_clifford_relation", ctx, cases))

        # condition 2
        cases = []
        for lab, rho in forms:
            for a_el in elems:
                for lx, x in spinors:
                    lhs = self.clifford(c.right_mul(rho, a_el), x)
                    rhs = self.clifford(rho, c.left_mul(a_el, x))
                    cases.append((f"balanced: {lab}*{a_el!r} (x) {lx}", lhs - rhs))
                    lhs = self.clifford(c.left_mul(a_el, rho), x)
                    rhs = c.left_mul(a_el, self.clifford(rho, x))
                    cases.append((f"left-linear: {a_el!r}*{lab} (x) {lx}", lhs - rhs))
        res2 = check_zero("dirac_2_clifford_module", ctx, cases)
        phi_one = self.phi(c.unit)
        if res2.passed and not phi_one.is_one():
            res2 = CheckResult("dirac_2_clifford_module", False, witness=f"phi(1) = {phi_one}")
        if res2.passed:
            neg = self._phi_positivity_witness(ctx)
            if neg is not None:
                res2 = CheckResult("dirac_2_clifford_module", False, witness=neg)
        out.append(res2)

        # condition 3: grad^X is a left connection and D = c o grad^X
        cases = []
        for lx, x in spinors:
            for a_el in elems:
                lhs = self.nabla(c.left_mul(a_el, x))
                rhs = c.tensor(c.d_alg(a_el), x) + c.tensor(c.scalar_tensor(a_el), self.nabla(x))
                cases.append((f"leibniz: {a_el!r} {lx}", lhs - rhs))
            cases.append((f"D = c o grad: {lx}", self.dirac_apply(x) - self.clifford_contract(self.nabla(x))))
        out.append(check_zero("dirac_3_spin_connection", ctx, cases))

        # condition 4
        cases = []
        for lab, rho in forms:
            for lx, x in spinors:
                t = c.tensor(rho, x)
                lhs = self.dirac_apply(self.clifford_contract(t))
                rhs = self.clifford_contract(self.clifford_contract(c.sigma(self.nabla_pair(t), 0)))
                cases.append((f"rho={lab}, x={lx}", lhs - rhs))
        out.append(check_zero("dirac_4_clifford_connection", ctx, cases))
        return out

    def _sample_forms(self, count: int, seed: int) -> List[Tuple[str, Tensor]]:
        from .levi_civita import sample_one_forms

        return sample_one_forms(self.calc, count, seed)

    def _sample_elements(self, seed: int) -> List[AlgebraElement]:
        from .levi_civita import sample_elements

        return sample_elements(self.calc, 2, seed)

    def _phi_positivity_witness(self, ctx: ThetaContext, qs: Sequence[Fraction] = (Fraction(1, 7), Fraction(2, 5))) -> Optional[str]:
        """phi(b^dag b) >= 0 on sampled b, evaluated at sampled theta."""
        c = self.calc
        rng = random.Random(17)
        keys = c.algebra.sample_keys()
        points = [ctx.q] if not ctx.is_symbolic else list(qs)
        for _ in range(6):
            b = AlgebraElement()
            for _ in range(3):
                b = b + AlgebraElement.basis(rng.choice(keys), rng.randint(-3, 3) or 1)
            val = self.phi(c.mul(c.star(b), b))
            for q in points:
                z = val.eval(q)
                if abs(z.imag) > 1e-10 or z.real < -1e-10:
                    return f"phi(b^dag b) = {z} at q={q} for b={b!r}"
        return None


# ---------------------------------------------------------------- reports


@dataclass
class WeitzenbockReport:
    hypotheses_ok: bool
    matches_curvature: CheckResult
    residue_factor: Optional[Scalar]
    samples: int

    @property
    def passed(self) -> bool:
        return self.hypotheses_ok and self.matches_curvature.passed


def weitzenbock_report(mod: DiracModule, ctx: Optional[ThetaContext] = None, samples: int = 6, seed: int = 0) -> WeitzenbockReport:
    """Compare D^2 - Laplacian with the Clifford image of the spinor curvature on samples.

    ``residue_factor`` is set when the residue is a constant multiple of the
    identity on every sample.
    """
    ctx = ctx or ThetaContext.symbolic()
    bad = mod.weitzenbock_hypotheses()
    if bad:
        return WeitzenbockReport(False, CheckResult("weitzenbock", False, witness="; ".join(bad)), None, 0)
    spin = mod.sample_spinors(samples, seed)
    cases = []
    factor = _constant_factor(mod, [mod.frame_spinor(a) for a in range(mod.s)])
    for lab, x in spin:
        cases.append((lab, mod.weitzenbock_residue(x, check_hypotheses=False) - mod.clifford_curvature(x)))
    res = check_zero("weitzenbock", ctx, cases)
    if factor is not None:
        for lab, x in spin:
            if mod.weitzenbock_residue(x, check_hypotheses=False) != x.scale(factor):
                factor = None
                break
    return WeitzenbockReport(True, res, factor, len(spin))


def _constant_factor(mod: DiracModule, frame: Sequence[Tensor]) -> Optional[Scalar]:
    """k if the residue is k * x on every frame spinor (constant k), else None."""
    k = None
    uk = mod.calc.algebra.unit_key
    for x in frame:
        r = mod.weitzenbock_residue(x, check_hypotheses=False)
        (a,) = next(iter(x.coords))
        if set(r.coords) - {(a,)}:
            return None
        coeff = r.coords.get((a,), AlgebraElement())
        if set(coeff.terms) - {uk}:
            return None
        val = coeff.terms.get(uk, Scalar.zero())
        if k is None:
            k = val
        elif k != val:
            return None
    return k


@dataclass
class DivergenceReport:
    divergence: Scalar
    lhs: Scalar
    rhs: Scalar
    numeric: Dict[str, float] = field(default_factory=dict)
    passed: bool = True
    witness: Optional[str] = None


def divergence_check(
    mod: DiracModule,
    x: Tensor,
    qs: Sequence[Fraction] = (Fraction(0), Fraction(1, 7), Fraction(1, 3), Fraction(2, 5), Fraction(5, 11)),
    tol: float = 1e-10,
) -> DivergenceReport:
    """phi of the divergence term; when it vanishes, phi(_B<Lap x|x>) against phi(_B<grad x|grad x>).

    The weight e^(-beta) m(G) is the identity on the built-ins, so the
    positive side is phi(_B<grad x|grad x>) scaled by that constant.
    """
    div = mod.phi(mod.divergence(x))
    lhs = mod.phi(mod.inner(mod.laplacian(x), x))
    weight = _identity_weight(mod)
    rhs = mod.phi(mod.energy(x)) * weight if weight is not None else Scalar.zero()
    rep = DivergenceReport(div, lhs, rhs)
    if weight is None:
        rep.passed = False
        rep.witness = "e^(-beta) m(G) is not a constant multiple of the identity"
        return rep
    for q in qs:
        try:
            d = div.eval(q)
        except ScalarPoleError:
            continue
        rep.numeric[f"divergence@{q}"] = abs(d)
        if abs(d) > tol:
            continue
        l, r = lhs.eval(q), rhs.eval(q)
        rep.numeric[f"lhs@{q}"] = l.real
        if abs(l - r) > tol:
            rep.passed, rep.witness = False, f"phi(<Lap x|x>) = {l} but positive side = {r} at q={q}"
            return rep
        if abs(l.imag) > tol or l.real < -tol:
            rep.passed, rep.witness = False, f"phi(<Lap x|x>) = {l} is not >= 0 at q={q}"
            return rep
    return rep


def _identity_weight(mod: DiracModule) -> Optional[Scalar]:
    m = mod.m_rep(mod.calc.line_element)
    uk = mod.calc.algebra.unit_key
    k = None
    for b in range(mod.s):
        for a in range(mod.s):
            e = m[b][a]
            if a != b:
                if not e.is_zero():
                    return None
                continue
            if set(e.terms) - {uk}:
                return None
            v = e.terms.get(uk, Scalar.zero())
            if k is None:
                k = v
            elif k != v:
                return None
    return None if k is None else k * mod.e_beta_inverse()
