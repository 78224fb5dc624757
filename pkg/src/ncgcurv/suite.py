"""Check batches over a geometry, shared by the command line and the tests.

A run is a list of sections; each section holds named CheckResults and the
computed objects worth reporting (A, the curvature table, Ric, r, the
Weitzenbock factor).  Sections are independent and may run on worker
threads; the report is assembled in a fixed order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

from .algebra import AlgebraElement, Mode
from .checks import CheckResult, ThetaContext, check_zero
from .curvature import (
    brute_force_scalar,
    curvature_is_module_map,
    real_frame_components,
    ricci,
    riemann,
    riemann_apply,
    riemann_frame_formula,
    scalar_curvature,
)
from .deformation import verify_theta_theorems
from .dirac import DiracModule, divergence_check, weitzenbock_report
from .forms import Tensor
from .geometries import GeometrySpec, tensor_to_json, validate_geometry
from .levi_civita import LeviCivitaResult, sample_elements, sample_one_forms, solve_levi_civita
from .scalars import Scalar, format_scalar, parse_scalar

SECTIONS = ("validate", "connection", "curvature", "dirac", "deformation")


@dataclass(frozen=True)
class SuiteConfig:
    ctx: ThetaContext = field(default_factory=ThetaContext.symbolic)
    seed: int = 0
    samples: int = 6
    spinor_samples: int = 6
    modes: Sequence[Mode] = (Mode.CLASSICAL, Mode.DEFORMED)
    pi_component: Optional[Tensor] = None
    workers: int = 4


@dataclass
class Section:
    name: str
    checks: List[CheckResult] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def scalar_out(x: Scalar, ctx: ThetaContext) -> Any:
    """Exact token string; in numeric mode also the value at the sample point."""
    if ctx.is_symbolic:
        return format_scalar(x)
    z = x.eval(ctx.q)
    return {"exact": format_scalar(x), "value": [round(z.real, 12) + 0.0, round(z.imag, 12) + 0.0]}


def _unit_scalar(calc, a: AlgebraElement) -> Optional[Scalar]:
    uk = calc.algebra.unit_key
    if set(a.terms) - {uk}:
        return None
    return a.terms.get(uk, Scalar.zero())


def _mode_tag(mode: Mode) -> str:
    return "classical" if mode is Mode.CLASSICAL else "deformed"


def _named(results: List[CheckResult], tag: str) -> List[CheckResult]:
    for r in results:
        r.name = f"{r.name}[{tag}]"
    return results


class SuiteRun:
    """Caches the solved connections so sections can share them."""

    def __init__(self, spec: GeometrySpec, cfg: SuiteConfig):
        self.spec = spec
        self.cfg = cfg
        self._lc: Dict[Mode, LeviCivitaResult] = {}

    def levi_civita(self, mode: Mode) -> LeviCivitaResult:
        if mode not in self._lc:
            pi = self.cfg.pi_component
            if pi is not None and mode is Mode.DEFORMED:
                from .deformation import h_theta

                pi = h_theta(self.spec.calculus(mode), pi)
            self._lc[mode] = solve_levi_civita(
                self.spec.calculus(mode),
                self.cfg.ctx,
                pi_component=pi,
                perturbation=self.spec.perturbation(mode),
                samples=self.cfg.samples,
                seed=self.cfg.seed,
            )
        return self._lc[mode]

    # ------------------------------------------------------------ sections

    def validate(self) -> Section:
        issues = validate_geometry(self.spec, seed=self.cfg.seed)
        sec = Section("validate")
        names = ["frame_shape", "orthonormality", "algebra_table", "star_matrix_degree", "star_involution",
                 "d_omega_degree", "d_omega_in_image_of_1_minus_psi", "derivation_degree", "leibniz",
                 "frame_identity", "clifford_balancing"]
        for i in issues:
            if i.invariant not in names:
                names.append(i.invariant)
        for nm in names:
            hit = [i for i in issues if i.invariant == nm]
            sec.checks.append(CheckResult(nm, not hit, witness=f"{hit[0].location}: {hit[0].witness}" if hit else None))
        return sec

    def connection(self) -> Section:
        sec = Section("connection")
        for mode in self.cfg.modes:
            tag = _mode_tag(mode)
            lc = self.levi_civita(mode)
            sec.checks.extend(_named([CheckResult(c.name, c.passed, c.witness, c.residual, c.detail) for c in lc.checks], tag))
            sec.data[tag] = {
                "A": tensor_to_json(self.spec.algebra, lc.A),
                "A_is_zero": lc.A.is_zero(),
                "pi_dims_on_W": {f"{d[0]},{d[1]}": k for d, k in sorted(lc.pi_dims_on_w.items())},
            }
        return sec

    def curvature(self) -> Section:
        sec = Section("curvature")
        spec, ctx = self.spec, self.cfg.ctx
        for mode in self.cfg.modes:
            tag = _mode_tag(mode)
            calc = spec.calculus(mode)
            conn = self.levi_civita(mode).connection
            forms = sample_one_forms(calc, self.cfg.samples, self.cfg.seed)
            elems = sample_elements(calc, 2, self.cfg.seed)
            out: Dict[str, Any] = {}
            for c in (conn, conn.conjugate()):
                ch = c.chirality
                checks = [
                    check_zero(
                        f"curvature_module_map_{ch}",
                        ctx,
                        ((f"{lab}, {a!r}", curvature_is_module_map(c, r, a)) for lab, r in forms[: 2 * calc.n] for a in elems),
                    ),
                    check_zero(
                        f"curvature_frame_formula_{ch}",
                        ctx,
                        (
                            (f"j={j}", riemann_apply(c, calc.frame_form(j) if ch == "right" else calc.frame_dagger(j)) - riemann_frame_formula(c, j))
                            for j in range(calc.n)
                        ),
                    ),
                ]
                rt = riemann(c)
                ric = ricci(calc, rt)
                r = scalar_curvature(calc, ric)
                r_s = _unit_scalar(calc, r)
                entry: Dict[str, Any] = {
                    "ricci": tensor_to_json(spec.algebra, ric),
                    "scalar_curvature": scalar_out(r_s, ctx) if r_s is not None else repr(r),
                }
                if _constant_coefficients(calc, rt.tensor):
                    entry["riemann_table"] = {
                        ",".join(map(str, idx)): scalar_out(a.terms.get(calc.algebra.unit_key, Scalar.zero()), ctx)
                        for idx, a in sorted(rt.tensor.coords.items())
                    }
                out[ch] = entry
                oracle = spec.oracle
                if "scalar_curvature" in oracle:
                    want = parse_scalar(oracle["scalar_curvature"])
                    checks.append(check_zero(f"scalar_curvature_oracle_{ch}", ctx, [("r - expected", r - calc.unit.scale(want))]))
                if "ricci_factor" in oracle:
                    k = parse_scalar(oracle["ricci_factor"])
                    checks.append(check_zero(f"ricci_oracle_{ch}", ctx, [("Ric - k G", ric - calc.line_element.scale(k))]))
                if mode is Mode.CLASSICAL and _constant_coefficients(calc, rt.tensor) and r_s is not None:
                    checks.append(check_zero(f"scalar_curvature_brute_force_{ch}", ctx, [("double contraction", brute_force_scalar(calc, rt) - r_s)]))
                if mode is Mode.CLASSICAL and spec.real_frame is not None and "sectional_curvature" in oracle and _constant_coefficients(calc, rt.tensor):
                    k = parse_scalar(oracle["sectional_curvature"])
                    comp = real_frame_components(calc, rt, spec.real_frame)
                    d = lambda a, b: Scalar.one() if a == b else Scalar.zero()
                    checks.append(
                        check_zero(
                            f"constant_curvature_table_{ch}",
                            ctx,
                            (
                                (f"R_{''.join(map(str, i))}", v - k * (d(i[0], i[2]) * d(i[1], i[3]) - d(i[0], i[3]) * d(i[1], i[2])))
                                for i, v in sorted(comp.items())
                            ),
                        )
                    )
                sec.checks.extend(_named(checks, tag))
            sec.data[tag] = out
        return sec

    def dirac(self) -> Section:
        sec = Section("dirac")
        spec, ctx, cfg = self.spec, self.cfg.ctx, self.cfg
        for mode in cfg.modes:
            tag = _mode_tag(mode)
            mod = DiracModule(spec.calculus(mode), spec.dirac, self.levi_civita(mode).connection)
            calc = mod.calc
            checks = mod.check_conditions(ctx, samples=max(2, cfg.samples // 2), seed=cfg.seed)
            wr = weitzenbock_report(mod, ctx, cfg.spinor_samples, cfg.seed)
            checks.append(wr.matches_curvature)
            data: Dict[str, Any] = {"weitzenbock_hypotheses": wr.hypotheses_ok}
            if wr.residue_factor is not None:
                data["weitzenbock_factor"] = scalar_out(wr.residue_factor, ctx)
            if "weitzenbock" in spec.oracle:
                want = parse_scalar(spec.oracle["weitzenbock"])
                got = wr.residue_factor
                checks.append(
                    CheckResult(
                        "weitzenbock_oracle",
                        got is not None and ctx.is_zero(got - want),
                        witness=None if got is not None and ctx.is_zero(got - want) else f"residue factor {got}, expected {want}",
                    )
                )
            # Lichnerowicz: residue = r/4, with r from the one-form curvature
            r = _unit_scalar(calc, scalar_curvature(calc, ricci(calc, riemann(self.levi_civita(mode).connection))))
            if wr.residue_factor is not None and r is not None:
                checks.append(check_zero("weitzenbock_lichnerowicz", ctx, [("factor - r/4", wr.residue_factor - r / 4)]))
            g = calc.line_element
            m = mod.m_rep(g)
            dim = Scalar.const(spec.dimension)
            checks.append(
                check_zero(
                    "m_of_G_dimension",
                    ctx,
                    ((f"m(G)[{b}][{a}]", m[b][a] - (calc.unit.scale(dim) if a == b else AlgebraElement())) for b in range(mod.s) for a in range(mod.s)),
                )
            )
            checks.append(check_zero("e_beta_dimension", ctx, [("e^beta - dim", calc.e_beta() - calc.unit.scale(dim))]))
            spinors = mod.sample_spinors(cfg.spinor_samples, cfg.seed)
            checks.append(check_zero("spinor_hermitian", ctx, ((f"{lx}, {ly}", mod.hermitian_residual(x, y)) for lx, x in spinors[:3] for ly, y in spinors[:3])))
            checks.append(check_zero("adjoint_connection_identity", ctx, ((f"{lx}, {ly}", mod.adjoint_connection_identity(x, y)) for lx, x in spinors[:3] for ly, y in spinors[:3])))
            bad = None
            for lx, x in spinors:
                rep = divergence_check(mod, x)
                if not rep.passed:
                    bad = f"{lx}: {rep.witness}"
                    break
            checks.append(CheckResult("divergence_positivity", bad is None, witness=bad))
            sec.checks.extend(_named(checks, tag))
            sec.data[tag] = data
        return sec

    def deformation(self) -> Section:
        spec, cfg = self.spec, self.cfg
        rep = verify_theta_theorems(
            spec.calculus(Mode.CLASSICAL),
            spec.calculus(Mode.DEFORMED),
            spec.dirac,
            cfg.ctx,
            samples=cfg.samples,
            seed=cfg.seed,
            name=spec.name,
            perturbation=spec.a_perturbation,
        )
        return Section("deformation", rep.checks, {})


def _constant_coefficients(calc, t: Tensor) -> bool:
    uk = calc.algebra.unit_key
    return all(not (set(a.terms) - {uk}) for a in t.coords.values())


def run_suite(spec: GeometrySpec, cfg: Optional[SuiteConfig] = None, sections: Sequence[str] = SECTIONS) -> List[Section]:
    """Run the named sections; a geometry failing validation stops after ``validate``."""
    cfg = cfg or SuiteConfig()
    run = SuiteRun(spec, cfg)
    out: List[Section] = []
    if "validate" in sections:
        v = run.validate()
        out.append(v)
        if not v.passed:
            return out
    rest = [s for s in sections if s != "validate"]
    # solve once up front so worker threads share the cached connections
    if any(s in rest for s in ("connection", "curvature", "dirac")):
        for mode in cfg.modes:
            run.levi_civita(mode)
    jobs: List[Callable[[], Section]] = [getattr(run, s) for s in rest]
    if cfg.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as ex:
            out.extend(ex.map(lambda f: f(), jobs))
    else:
        out.extend(f() for f in jobs)
    return out


def failed_checks(sections: List[Section]) -> List[CheckResult]:
    return [c for s in sections for c in s.checks if not c.passed]
