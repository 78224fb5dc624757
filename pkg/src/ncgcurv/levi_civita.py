"""Levi-Civita connection on the one-form module.

Right connections are stored as ``grad(rho) = grad_v(rho) + alpha_right(F)(rho)``
and left connections as ``grad(rho) = grad_v_left(rho) + alpha_left(F)(rho)``
with a rank-3 connection form F.  The Levi-Civita form is

    A = -(1 + Pi - PQ)^(-1) (W + P W^dag),   W = sum_j d(omega_j) (x) omega_j^dag,

solved block by block over the scalar field.  The Im(Pi) part of A is set
to zero unless an explicit component is supplied.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import linalg
from .algebra import AlgebraElement, Degree
from .checks import CheckResult, ThetaContext, check_zero
from .forms import Calculus, ProjectionBlocks, Tensor, apply_block_matrices, projection_blocks, tensor_sum


class ConnectionError_(ArithmeticError):
    """Singular block or failed postcondition while building a connection."""


# ---------------------------------------------------------------- Grassmann parts


def grassmann_apply(calc: Calculus, rho: Tensor) -> Tensor:
    """Right Grassmann connection: sum_j omega_j (x) d<omega_j|rho>."""
    parts = []
    for (j,), a in rho.coords.items():
        parts.append(calc.tensor(calc.frame_form(j), calc.d_alg(a)))
    return tensor_sum("FF", parts)


def grassmann_left_apply(calc: Calculus, rho: Tensor) -> Tensor:
    """Left Grassmann connection: sum_j d(_B<rho|omega_j^dag>) (x) omega_j^dag."""
    parts = []
    for j in range(calc.n):
        fd = calc.frame_dagger(j)
        c = calc.inner_left(rho, fd)
        if c:
            parts.append(calc.tensor(calc.d_alg(c), fd))
    return tensor_sum("FF", parts)


@dataclass(frozen=True)
class Connection:
    calc: Calculus
    chirality: str
    form: Tensor

    def __post_init__(self):
        if self.chirality not in ("right", "left"):
            raise ValueError("chirality must be 'right' or 'left'")

    def __call__(self, rho: Tensor) -> Tensor:
        c = self.calc
        if self.chirality == "right":
            return grassmann_apply(c, rho) + c.alpha_right(self.form, rho)
        return grassmann_left_apply(c, rho) + c.alpha_left(self.form, rho)

    def conjugate(self) -> "Connection":
        """The conjugate connection -dag o grad o dag, as a connection form."""
        other = "left" if self.chirality == "right" else "right"
        return Connection(self.calc, other, -self.calc.dagger(self.form))


def conjugate(c: Connection) -> Connection:
    return c.conjugate()


def conjugate_direct(c: Connection, rho: Tensor) -> Tensor:
    """Evaluate -dag(grad(dag(rho))) without going through the stored form."""
    return -c.calc.dagger(c(c.calc.dagger(rho)))


# ---------------------------------------------------------------- W and concordance


def w_tensor(calc: Calculus) -> Tuple[Tensor, Tensor]:
    w = tensor_sum("FFF", (calc.tensor(calc.d_omega[j], calc.frame_dagger(j)) for j in range(calc.n)))
    wd = tensor_sum(
        "FFF",
        (calc.tensor(calc.frame_form(j), calc.exterior_d(calc.frame_dagger(j))) for j in range(calc.n)),
    )
    return w, wd


def _block_mats(calc: Calculus, pb: ProjectionBlocks, order: str) -> Dict[Degree, linalg.Matrix]:
    out = {}
    for d, block in pb.blocks.items():
        prod = linalg.matmul(pb.P[d], pb.Q[d]) if order == "PQ" else linalg.matmul(pb.Q[d], pb.P[d])
        out[d] = linalg.matadd(linalg.matadd(linalg.identity(len(block)), pb.Pi[d]), prod, -1)
    return out


def _solve_blocks(
    calc: Calculus, pb: ProjectionBlocks, mats: Dict[Degree, linalg.Matrix], rhs: Tensor
) -> Tensor:
    """Apply mats^(-1) block-wise to rhs, inverting only the blocks rhs touches."""
    touched = {calc.index_degree(rhs.legs, idx) for idx in rhs.coords}
    inv = {}
    for d in touched:
        try:
            inv[d] = (pb.blocks[d], linalg.inverse(mats[d]))
        except linalg.SingularMatrixError:
            raise ConnectionError_(f"singular block at degree {d.as_tuple()}") from None
    return apply_block_matrices(calc, rhs, inv)


@dataclass
class ConcordanceReport:
    difference: Tensor
    decomposition_ok: bool
    block_dims: Dict[Tuple[int, int], Tuple[int, int, int]]
    pi_dims_on_w: Dict[Tuple[int, int], int]

    def as_result(self, ctx: ThetaContext) -> List[CheckResult]:
        return [
            check_zero("dagger_concordance", ctx, [("difference tensor", self.difference)]),
            CheckResult(
                "direct_sum_decomposition",
                self.decomposition_ok,
                witness=None if self.decomposition_ok else repr(self.block_dims),
            ),
        ]


def concordance_check(calc: Calculus, pb: Optional[ProjectionBlocks] = None) -> ConcordanceReport:
    pb = pb or projection_blocks(calc)
    w, wd = w_tensor(calc)
    lhs = _solve_blocks(calc, pb, _block_mats(calc, pb, "PQ"), w + calc.psi(wd, 0))
    rhs = _solve_blocks(calc, pb, _block_mats(calc, pb, "QP"), wd + calc.psi(w, 1))
    dims = {}
    ok = True
    for d, block in pb.blocks.items():
        size = len(block)
        one = linalg.identity(size)
        cols = [row_p + row_q for row_p, row_q in zip(linalg.matadd(one, pb.P[d], -1), linalg.matadd(one, pb.Q[d], -1))]
        r = linalg.rank(cols)
        dims[d.as_tuple()] = (size, pb.pi_rank[d], r)
        ok = ok and pb.pi_rank[d] + r == size
    touched = {calc.index_degree("FFF", idx) for idx in (w + wd).coords}
    return ConcordanceReport(
        lhs - rhs, ok, dims, {d.as_tuple(): pb.pi_rank[d] for d in touched}
    )


# ---------------------------------------------------------------- solver


@dataclass
class LeviCivitaResult:
    connection: Connection
    A: Tensor
    checks: List[CheckResult]
    pi_dims_on_w: Dict[Tuple[int, int], int]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def connection_form(
    calc: Calculus, pb: Optional[ProjectionBlocks] = None, pi_component: Optional[Tensor] = None
) -> Tensor:
    pb = pb or projection_blocks(calc)
    w, wd = w_tensor(calc)
    a = -_solve_blocks(calc, pb, _block_mats(calc, pb, "PQ"), w + calc.psi(wd, 0))
    if pi_component is not None and pi_component:
        a = a + apply_block_matrices(calc, pi_component, pb.mats("Pi"))
    return a


def solve_levi_civita(
    calc: Calculus,
    ctx: Optional[ThetaContext] = None,
    pi_component: Optional[Tensor] = None,
    perturbation: Optional[Tensor] = None,
    samples: int = 6,
    seed: int = 0,
    strict: bool = False,
) -> LeviCivitaResult:
    """Solve for A, assemble grad^G = grad_v + alpha(A) and run the postconditions."""
    ctx = ctx or ThetaContext.symbolic()
    pb = projection_blocks(calc)
    a = connection_form(calc, pb, pi_component)
    if perturbation is not None:
        a = a + perturbation
    conn = Connection(calc, "right", a)
    rep = concordance_check(calc, pb)
    checks = rep.as_result(ctx) + postconditions(conn, ctx, samples=samples, seed=seed)
    if strict and not all(c.passed for c in checks):
        bad = [c.name for c in checks if not c.passed]
        raise ConnectionError_(f"Levi-Civita postconditions failed: {', '.join(bad)}")
    return LeviCivitaResult(conn, a, checks, rep.pi_dims_on_w)


# ---------------------------------------------------------------- postconditions


def sample_one_forms(calc: Calculus, count: int = 6, seed: int = 0) -> List[Tuple[str, Tensor]]:
    """Frame forms, omega_j * g for small generators g, then seeded random sums."""
    alg = calc.algebra
    out = [(f"omega_{j}", calc.frame_form(j)) for j in range(calc.n)]
    for g in alg.generators()[:2]:
        for j in range(calc.n):
            out.append((f"omega_{j}*{g!r}", calc.right_mul(calc.frame_form(j), AlgebraElement.basis(g))))
    rng = random.Random(seed)
    keys = alg.sample_keys()
    for r in range(count):
        coords = {}
        for j in range(calc.n):
            k = rng.choice(keys)
            coords[j] = AlgebraElement.basis(k, rng.randint(-3, 3) or 1)
        out.append((f"random_{r}", calc.one_form(coords)))
    return out


def sample_elements(calc: Calculus, count: int = 4, seed: int = 0) -> List[AlgebraElement]:
    alg = calc.algebra
    rng = random.Random(seed + 1)
    keys = alg.sample_keys()
    out = [AlgebraElement.basis(g) for g in alg.generators()[:2]]
    for _ in range(count):
        out.append(AlgebraElement.basis(rng.choice(keys), rng.randint(1, 3)))
    return out


def hermitian_residual(right: Connection, left: Connection) -> Tensor:
    c = right.calc
    parts = []
    for j in range(c.n):
        parts.append(c.tensor(right(c.frame_form(j)), c.frame_dagger(j)))
        parts.append(c.tensor(c.frame_form(j), left(c.frame_dagger(j))))
    return tensor_sum("FFF", parts)


def leibniz_residual(conn: Connection, rho: Tensor, a: AlgebraElement) -> Tensor:
    c = conn.calc
    if conn.chirality == "right":
        return conn(c.right_mul(rho, a)) - c.right_mul(conn(rho), a) - c.tensor(rho, c.d_alg(a))
    return conn(c.left_mul(a, rho)) - c.left_mul(a, conn(rho)) - c.tensor(c.d_alg(a), rho)


def postconditions(conn: Connection, ctx: ThetaContext, samples: int = 6, seed: int = 0) -> List[CheckResult]:
    c = conn.calc
    left = conn.conjugate()
    forms = sample_one_forms(c, samples, seed)
    elems = sample_elements(c, 3, seed)
    return [
        check_zero("hermitian", ctx, [("sum_j grad(w_j)(x)w_j^dag + w_j(x)grad(w_j^dag)", hermitian_residual(conn, left))]),
        check_zero("torsion_free_right", ctx, ((lab, c.antisym(conn(r)) + c.exterior_d(r)) for lab, r in forms)),
        check_zero("torsion_free_left", ctx, ((lab, c.antisym(left(r)) - c.exterior_d(r)) for lab, r in forms)),
        check_zero("sigma_bimodule", ctx, ((lab, c.sigma(conn(r)) - left(r)) for lab, r in forms)),
        check_zero(
            "leibniz_right",
            ctx,
            ((f"{lab}, {a!r}", leibniz_residual(conn, r, a)) for lab, r in forms[: 2 * c.n] for a in elems),
        ),
        check_zero(
            "leibniz_left",
            ctx,
            ((f"{lab}, {a!r}", leibniz_residual(left, r, a)) for lab, r in forms[: 2 * c.n] for a in elems),
        ),
        check_zero(
            "conjugate_matches_definition",
            ctx,
            ((lab, left(r) - conjugate_direct(conn, r)) for lab, r in forms),
        ),
    ]
