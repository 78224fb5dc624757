"""Riemann, Ricci and scalar curvature of connections on one-forms.

Right curvature   R(x) = (1 (x) (1 - Psi)) (grad (x) 1 + 1 (x) d) grad(x)
Left curvature    R(x) = ((1 - Psi) (x) 1) (1 (x) grad - d (x) 1) grad(x)

Two-form slots hold antisymmetric representatives, so a wedge a^b is the
tensor (a (x) b - b (x) a)/2.  The rank-4 curvature tensor is
sum_j R(omega_j) (x) omega_j^dag for right connections and
sum_j omega_j (x) R(omega_j^dag) for left ones.  The pairing _B<R|G>
contracts its last two legs against G.

Normalization: on a manifold, R(x) = grad^2(x) is the curvature two-form
(1/2) R_{sr mu}^nu dx^s ^ dx^r, and _B<dx^r (x) dx^nu^dag | G> = +g^{r nu}.
The literal pairing therefore equals -1/2 of the classical Ricci tensor
written as Ric_{mu s} dx^mu (x) dx^s^dag.  ``ricci`` returns the classical
normalization -2 _B<R|G>; ``ricci_pairing`` returns the literal pairing.
The scalar curvature is r = <G|Ric>.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import AlgebraElement
from .forms import Calculus, Tensor, tensor_sum
from .levi_civita import Connection
from .scalars import Scalar


def _split_first(calc: Calculus, t: Tensor) -> List[Tuple[int, Tensor]]:
    """t = sum_j omega_j (x) y_j with y_j right-standard."""
    return [(head[0], tail) for head, tail in calc.split_last(t, t.rank - 1)]


def _split_last_left(calc: Calculus, t: Tensor) -> List[Tuple[Tensor, int]]:
    """t = sum_j eta_j (x) omega_j with every coefficient moved into eta_j."""
    return [(head, tail[0]) for head, tail in calc.split_first_left(t, t.rank - 1)]


def riemann_apply(conn: Connection, x: Tensor) -> Tensor:
    """Curvature of a connection on one-forms, straight from the definition."""
    c = conn.calc
    g = conn(x)
    if conn.chirality == "right":
        parts = []
        for j, y in _split_first(c, g):
            parts.append(c.tensor(conn(c.frame_form(j)), y))
            parts.append(c.tensor(c.frame_form(j), c.exterior_d(y)))
        return c.antisym(tensor_sum("FFF", parts), 1)
    parts = []
    for eta, j in _split_last_left(c, g):
        parts.append(c.tensor(eta, conn(c.frame_form(j))))
        parts.append(-c.tensor(c.exterior_d(eta), c.frame_form(j)))
    return c.antisym(tensor_sum("FFF", parts), 0)


def connection_matrix_right(conn: Connection) -> Dict[Tuple[int, int], Tensor]:
    """A^k_l with grad(omega_k) = sum_l omega_l (x) A^k_l (Grassmann part vanishes on frame forms)."""
    c = conn.calc
    out = {}
    for k in range(c.n):
        img = c.alpha_right(conn.form, c.frame_form(k))
        for l in range(c.n):
            out[(k, l)] = c.pair_right(c.frame_form(l), img)
    return out


def connection_matrix_left(conn: Connection) -> Dict[Tuple[int, int], Tensor]:
    """A_j^k with grad(omega_j^dag) = sum_k A_j^k (x) omega_k^dag."""
    c = conn.calc
    out = {}
    for j in range(c.n):
        img = c.alpha_left(conn.form, c.frame_dagger(j))
        for k in range(c.n):
            out[(j, k)] = c.pair_left(img, c.frame_dagger(k))
    return out


def riemann_frame_formula(conn: Connection, j: int) -> Tensor:
    """Curvature on a frame element from the connection matrix.

    Right: R(omega_j) = sum omega_l (x) (1-Psi)(A^k_l (x) A^j_k + d A^j_l).
    Left:  R(omega_j^dag) = (1-Psi)(A_j^l (x) A_l^k - d A_j^k) (x) omega_k^dag.
    The Grassmann term drops out because the frame is orthonormal with
    constant inner products.
    """
    c = conn.calc
    n = c.n
    if conn.chirality == "right":
        a = connection_matrix_right(conn)
        parts = []
        for l in range(n):
            two = [c.tensor(a[(k, l)], a[(j, k)]) for k in range(n)]
            two.append(c.exterior_d(a[(j, l)]))
            parts.append(c.tensor(c.frame_form(l), c.antisym(tensor_sum("FF", two))))
        return tensor_sum("FFF", parts)
    a = connection_matrix_left(conn)
    parts = []
    for k in range(n):
        two = [c.tensor(a[(j, l)], a[(l, k)]) for l in range(n)]
        two.append(-c.exterior_d(a[(j, k)]))
        parts.append(c.tensor(c.antisym(tensor_sum("FF", two)), c.frame_dagger(k)))
    return tensor_sum("FFF", parts)


@dataclass(frozen=True)
class CurvatureTensor:
    chirality: str
    tensor: Tensor  # rank 4, two-form in legs 2,3 (right) or 1,2 (left)


def riemann(conn: Connection) -> CurvatureTensor:
    c = conn.calc
    if conn.chirality == "right":
        t = tensor_sum("FFFF", (c.tensor(riemann_apply(conn, c.frame_form(j)), c.frame_dagger(j)) for j in range(c.n)))
    else:
        t = tensor_sum("FFFF", (c.tensor(c.frame_form(j), riemann_apply(conn, c.frame_dagger(j))) for j in range(c.n)))
    return CurvatureTensor(conn.chirality, t)


RICCI_NORMALIZATION = Scalar.const(-2)


def ricci_pairing(calc: Calculus, r: CurvatureTensor) -> Tensor:
    """The literal contraction _B<R|G> over the last two legs."""
    return calc.pair_left(r.tensor, calc.line_element)


def ricci(calc: Calculus, r: CurvatureTensor) -> Tensor:
    return ricci_pairing(calc, r).scale(RICCI_NORMALIZATION)


def scalar_curvature(calc: Calculus, ric: Tensor) -> AlgebraElement:
    return calc.inner_right(calc.line_element, ric)


def brute_force_scalar(calc: Calculus, r: CurvatureTensor) -> Scalar:
    """Independent double contraction r = -2 sum R_ijkl h_kl h_ij, h_kl = conj(S_lk).

    Valid for classical geometries whose curvature has constant coefficients.
    """
    uk = calc.algebra.unit_key
    s = calc.frame.star
    total = Scalar.zero()
    for (i, j, k, l), a in r.tensor.coords.items():
        if set(a.terms) - {uk}:
            raise ValueError("brute-force contraction needs constant coefficients")
        total = total + a.terms[uk] * s[l][k].conj() * s[j][i].conj()
    return total * RICCI_NORMALIZATION


def curvature_is_module_map(conn: Connection, x: Tensor, a: AlgebraElement) -> Tensor:
    """Residual of R(x a) = R(x) a (right) or R(a x) = a R(x) (left)."""
    c = conn.calc
    if conn.chirality == "right":
        return riemann_apply(conn, c.right_mul(x, a)) - c.right_mul(riemann_apply(conn, x), a)
    return riemann_apply(conn, c.left_mul(a, x)) - c.left_mul(a, riemann_apply(conn, x))


def real_frame_components(calc: Calculus, r: CurvatureTensor, to_real: Sequence[Sequence[Scalar]]) -> Dict[Tuple[int, int, int, int], Scalar]:
    """R_{sigma rho mu nu} = -2 R'_{mu sigma rho nu} in a real orthonormal frame.

    ``to_real[b][a]`` expresses frame element b in the real frame:
    omega_b = sum_a to_real[b][a] e^a.
    """
    uk = calc.algebra.unit_key
    n = calc.n
    real: Dict[Tuple[int, int, int, int], Scalar] = {}
    for (b, c_, d, e), a in r.tensor.coords.items():
        coeff = a.terms.get(uk, Scalar.zero())
        for a1 in range(n):
            f1 = to_real[b][a1]
            if f1.is_zero():
                continue
            for a2 in range(n):
                f2 = to_real[c_][a2]
                if f2.is_zero():
                    continue
                for a3 in range(n):
                    f3 = to_real[d][a3]
                    if f3.is_zero():
                        continue
                    for a4 in range(n):
                        f4 = to_real[e][a4]
                        if f4.is_zero():
                            continue
                        key = (a1, a2, a3, a4)
                        real[key] = real.get(key, Scalar.zero()) + coeff * f1 * f2 * f3 * f4
    out = {}
    for s in range(n):
        for rho in range(n):
            for mu in range(n):
                for nu in range(n):
                    out[(s, rho, mu, nu)] = real.get((mu, s, rho, nu), Scalar.zero()) * RICCI_NORMALIZATION
    return out
