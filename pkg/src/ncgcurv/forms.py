"""Tensor powers of a frame-presented one-form module.

A :class:`Tensor` stores right-standard coordinates: a term with index
``(j1, ..., jk)`` and coefficient ``a`` stands for
``omega_j1 (x) ... (x) omega_jk * a``.  Leg letters record which module each
slot lives in: ``"F"`` for one-forms, ``"X"`` for spinors (only ever last).

:class:`Calculus` bundles the frame data with a :class:`~ncgcurv.algebra.Mode`
and implements every operation in that mode: moving coefficients past
legs (the Theta phase), dagger, inner products, the braiding, the junk
projection, the exterior derivative on one-forms and the alpha maps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import linalg
from .algebra import (
    AlgebraElement,
    AlgebraSpec,
    Degree,
    DerivationTable,
    Key,
    Mode,
    ZERO_DEGREE,
    apply_derivation,
    theta_cocycle,
    theta_exponent,
)
from .scalars import Scalar, lam_pow

Index = Tuple[int, ...]


class FrameError(ValueError):
    pass


# ---------------------------------------------------------------- tensors


class Tensor:
    """Right-standard coordinates ``{index tuple: AlgebraElement}``."""

    __slots__ = ("legs", "coords", "_hash")

    def __init__(self, legs: str, coords: Optional[Mapping[Index, AlgebraElement]] = None):
        self.legs = legs
        self.coords: Dict[Index, AlgebraElement] = {
            tuple(i): a for i, a in (coords or {}).items() if not a.is_zero()
        }
        self._hash = None

    @property
    def rank(self) -> int:
        return len(self.legs)

    def is_zero(self) -> bool:
        return not self.coords

    def __bool__(self) -> bool:
        return bool(self.coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.legs == other.legs and self.coords == other.coords

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.legs, frozenset(self.coords.items())))
        return self._hash

    def _check(self, o: "Tensor"):
        if self.legs != o.legs:
            raise ValueError(f"leg mismatch: {self.legs} vs {o.legs}")

    def __add__(self, o: "Tensor") -> "Tensor":
        self._check(o)
        out = dict(self.coords)
        for i, a in o.coords.items():
            out[i] = out[i] + a if i in out else a
        return Tensor(self.legs, out)

    def __neg__(self) -> "Tensor":
        return Tensor(self.legs, {i: -a for i, a in self.coords.items()})

    def __sub__(self, o: "Tensor") -> "Tensor":
        return self + (-o)

    def scale(self, c) -> "Tensor":
        return Tensor(self.legs, {i: a.scale(c) for i, a in self.coords.items()})

    def map_scalars(self, f: Callable[[Scalar], Scalar]) -> "Tensor":
        return Tensor(self.legs, {i: a.map_scalars(f) for i, a in self.coords.items()})

    def items(self):
        return self.coords.items()

    def __repr__(self) -> str:
        body = ", ".join(f"{i}: {a!r}" for i, a in sorted(self.coords.items()))
        return f"Tensor({self.legs!r}, {{{body}}})"


def tensor_sum(legs: str, ts: Iterable[Tensor]) -> Tensor:
    out: Dict[Index, AlgebraElement] = {}
    for t in ts:
        for i, a in t.coords.items():
            out[i] = out[i] + a if i in out else a
    return Tensor(legs, out)


# ---------------------------------------------------------------- frame data


@dataclass(frozen=True)
class FrameSpec:
    """Orthonormal frame: degrees, star matrix and classical d(omega_j).

    ``star[k][j]`` is S_kj with omega_j^dag = sum_k omega_k S_kj.
    """

    n: int
    degrees: Tuple[Degree, ...]
    star: Tuple[Tuple[Scalar, ...], ...]
    d_omega: Tuple[Tensor, ...]
    gram: Optional[Tuple[Tuple[Scalar, ...], ...]] = None

    def validate_shape(self) -> List[str]:
        out = []
        if len(self.degrees) != self.n:
            out.append("frame degrees: expected one per frame index")
        if len(self.star) != self.n or any(len(r) != self.n for r in self.star):
            out.append("star matrix must be n x n")
        if len(self.d_omega) != self.n:
            out.append("d(omega) table: expected one entry per frame index")
        if self.gram is not None:
            for i in range(self.n):
                for j in range(self.n):
                    want = Scalar.one() if i == j else Scalar.zero()
                    if self.gram[i][j] != want:
                        out.append(
                            f"frame is not orthonormal: gram[{i}][{j}] = {self.gram[i][j]} "
                            "(only orthonormal frames are supported)"
                        )
                        return out
        return out


# ---------------------------------------------------------------- calculus


class Calculus:
    """All module operations for one geometry in one mode."""

    def __init__(
        self,
        algebra: AlgebraSpec,
        derivation: DerivationTable,
        frame: FrameSpec,
        mode: Mode = Mode.CLASSICAL,
        spinor_degrees: Sequence[Degree] = (),
        braid_phases: Optional[Mapping[Tuple[int, int], Scalar]] = None,
    ):
        self.algebra = algebra
        self.derivation = derivation
        self.frame = frame
        self.mode = mode
        self.n = frame.n
        self.spinor_degrees = tuple(spinor_degrees)
        # extra factors on sigma_theta for ordered frame pairs, deformed mode only
        # (used by sabotage fixtures)
        self.braid_phases = dict(braid_phases or {})
        self.deformed = mode is Mode.DEFORMED
        self.unit = algebra.unit()
        if self.deformed:
            self.star_matrix = tuple(
                tuple(frame.star[k][j] * lam_pow(frame.degrees[j].n1 * frame.degrees[j].n2) for j in range(self.n))
                for k in range(self.n)
            )
        else:
            self.star_matrix = frame.star
        self.d_omega = tuple(self.identify(t) for t in frame.d_omega)

    def with_mode(self, mode: Mode) -> "Calculus":
        return Calculus(self.algebra, self.derivation, self.frame, mode, self.spinor_degrees, self.braid_phases)

    # degrees and phases
    def leg_degree(self, leg: str, i: int) -> Degree:
        return self.frame.degrees[i] if leg == "F" else self.spinor_degrees[i]

    def index_degree(self, legs: str, idx: Index) -> Degree:
        d = ZERO_DEGREE
        for leg, i in zip(legs, idx):
            d = d + self.leg_degree(leg, i)
        return d

    def theta(self, s: Degree, t: Degree) -> Scalar:
        if not self.deformed:
            return Scalar.one()
        return theta_cocycle(s, t)

    def commute(self, a: AlgebraElement, e: Degree) -> AlgebraElement:
        """Return a' with a * v = v * a' for any v of degree e."""
        if not self.deformed or e == ZERO_DEGREE:
            return a
        deg = self.algebra.degree
        return AlgebraElement({k: c * lam_pow(theta_exponent(deg(k), e)) for k, c in a.terms.items()})

    def uncommute(self, a: AlgebraElement, e: Degree) -> AlgebraElement:
        """Return a' with v * a = a' * v for any v of degree e."""
        if not self.deformed or e == ZERO_DEGREE:
            return a
        deg = self.algebra.degree
        return AlgebraElement({k: c * lam_pow(theta_exponent(e, deg(k))) for k, c in a.terms.items()})

    def mul(self, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
        return self.algebra.mul(a, b, self.mode)

    def star(self, a: AlgebraElement) -> AlgebraElement:
        return self.algebra.star(a, self.mode)

    def identify(self, t: Tensor) -> Tensor:
        """Classical coordinates of a vector -> coordinates in this mode.

        A classical term with leg degrees e_1..e_k and coefficient degree
        e_{k+1} picks up lam^(-sum_{p<q} n2(e_p) n1(e_q)).  Rank 1 is the
        module identification, rank 2 is T_theta, rank 3 is H_theta.
        """
        if not self.deformed:
            return t
        return self._rephase(t, -1)

    def unidentify(self, t: Tensor) -> Tensor:
        if not self.deformed:
            return t
        return self._rephase(t, 1)

    def _rephase(self, t: Tensor, sign: int) -> Tensor:
        deg = self.algebra.degree
        out = {}
        for idx, a in t.coords.items():
            legd = [self.leg_degree(l, i) for l, i in zip(t.legs, idx)]
            base = 0
            acc_n2 = 0
            for e in legd:
                base += acc_n2 * e.n1
                acc_n2 += e.n2
            terms = {}
            for k, c in a.terms.items():
                ex = base + acc_n2 * deg(k).n1
                terms[k] = c * lam_pow(sign * ex) if ex else c
            out[idx] = AlgebraElement(terms)
        return Tensor(t.legs, out)

    # constructors
    def frame_form(self, j: int) -> Tensor:
        return Tensor("F", {(j,): self.unit})

    def one_form(self, coords: Mapping[int, AlgebraElement]) -> Tensor:
        return Tensor("F", {(j,): a for j, a in coords.items()})

    def scalar_tensor(self, a: AlgebraElement) -> Tensor:
        return Tensor("", {(): a})

    def as_element(self, t: Tensor) -> AlgebraElement:
        if t.rank:
            raise ValueError("expected a rank-0 tensor")
        return t.coords.get((), AlgebraElement())

    # module structure
    def right_mul(self, t: Tensor, b: AlgebraElement) -> Tensor:
        return Tensor(t.legs, {i: self.mul(a, b) for i, a in t.coords.items()})

    def left_mul(self, a: AlgebraElement, t: Tensor) -> Tensor:
        out = {}
        for idx, c in t.coords.items():
            out[idx] = self.mul(self.commute(a, self.index_degree(t.legs, idx)), c)
        return Tensor(t.legs, out)

    def tensor(self, s: Tensor, t: Tensor) -> Tensor:
        legs = s.legs + t.legs
        out: Dict[Index, AlgebraElement] = {}
        for i1, a in s.coords.items():
            for i2, b in t.coords.items():
                c = self.mul(self.commute(a, self.index_degree(t.legs, i2)), b)
                idx = i1 + i2
                out[idx] = out[idx] + c if idx in out else c
        return Tensor(legs, out)

    def split_last(self, t: Tensor, q: int) -> List[Tuple[Index, Tensor]]:
        """Write t = sum_I omega_I (x) y_I with y_I carrying the last q legs and the coefficient."""
        p = t.rank - q
        groups: Dict[Index, Dict[Index, AlgebraElement]] = {}
        for idx, a in t.coords.items():
            groups.setdefault(idx[:p], {})[idx[p:]] = a
        return [(head, Tensor(t.legs[p:], tail)) for head, tail in groups.items()]

    def split_first_left(self, t: Tensor, p: int) -> List[Tuple[Tensor, Index]]:
        """Write t = sum_J y_J (x) omega_J with y_J carrying the first p legs and all coefficients."""
        groups: Dict[Index, Dict[Index, AlgebraElement]] = {}
        for idx, a in t.coords.items():
            head, tail = idx[:p], idx[p:]
            moved = self.uncommute(a, self.index_degree(t.legs[p:], tail))
            groups.setdefault(tail, {})[head] = moved
        return [(Tensor(t.legs[:p], heads), tail) for tail, heads in groups.items()]

    def legs_tensor(self, legs: str, idx: Index) -> Tensor:
        return Tensor(legs, {idx: self.unit})

    # derivation
    def d_alg(self, a: AlgebraElement) -> Tensor:
        return self.one_form(apply_derivation(self.derivation, self.algebra, a, self.frame.degrees, self.mode))

    # dagger and inner products
    def frame_dagger(self, j: int) -> Tensor:
        return Tensor(
            "F",
            {(k,): AlgebraElement({self.algebra.unit_key: self.star_matrix[k][j]}) for k in range(self.n)},
        )

    def dagger(self, t: Tensor) -> Tensor:
        if "X" in t.legs:
            raise ValueError("dagger is defined on one-form tensors only")
        parts = []
        for idx, a in t.coords.items():
            acc = self.scalar_tensor(self.unit)
            for j in reversed(idx):
                acc = self.tensor(acc, self.frame_dagger(j))
            parts.append(self.left_mul(self.star(a), acc))
        return tensor_sum(t.legs, parts)

    def inner_right(self, s: Tensor, t: Tensor) -> AlgebraElement:
        """<s|t>, antilinear in s, right linear in t."""
        if s.legs != t.legs:
            raise ValueError(f"rank mismatch: {s.legs} vs {t.legs}")
        out = AlgebraElement()
        for idx, a in s.coords.items():
            b = t.coords.get(idx)
            if b is not None:
                out = out + self.mul(self.star(a), b)
        return out

    def inner_left(self, s: Tensor, t: Tensor) -> AlgebraElement:
        """_B<s|t> = <s^dag|t^dag>."""
        return self.inner_right(self.dagger(s), self.dagger(t))

    def pair_right(self, s: Tensor, t: Tensor) -> Tensor:
        """<s|t> contracting the first rank(s) legs of t."""
        p = s.rank
        if t.legs[:p] != s.legs:
            raise ValueError("rank mismatch in right pairing")
        legs = t.legs[p:]
        out: Dict[Index, AlgebraElement] = {}
        for idx, b in t.coords.items():
            a = s.coords.get(idx[:p])
            if a is None:
                continue
            rest = idx[p:]
            c = self.mul(self.commute(self.star(a), self.index_degree(legs, rest)), b)
            out[rest] = out[rest] + c if rest in out else c
        return Tensor(legs, out)

    def pair_left(self, t: Tensor, s: Tensor) -> Tensor:
        """_B<t|s> contracting the last rank(s) legs of t."""
        q = s.rank
        if t.legs[t.rank - q:] != s.legs:
            raise ValueError("rank mismatch in left pairing")
        sd = self.dagger(s)
        parts = []
        for head, tail in self.split_last(t, q):
            val = self.inner_right(self.dagger(tail), sd)
            parts.append(self.tensor(self.legs_tensor(t.legs[: t.rank - q], head), self.scalar_tensor(val)))
        return tensor_sum(t.legs[: t.rank - q], parts)

    # metric
    @cached_property
    def line_element(self) -> Tensor:
        return tensor_sum("FF", (self.tensor(self.frame_form(j), self.frame_dagger(j)) for j in range(self.n)))

    def e_beta(self) -> AlgebraElement:
        out = AlgebraElement()
        for j in range(self.n):
            out = out + self.inner_left(self.frame_form(j), self.frame_form(j))
        return out

    def g_pair(self, t: Tensor) -> AlgebraElement:
        return -self.inner_right(self.line_element, t)

    # braiding and junk projection
    def braid_phase(self, i: int, j: int) -> Scalar:
        ph = self.theta(self.frame.degrees[i], self.frame.degrees[j])
        if not self.deformed:
            return ph
        extra = self.braid_phases.get((i, j))
        return ph * extra if extra is not None else ph

    def sigma(self, t: Tensor, pos: int = 0) -> Tensor:
        if t.legs[pos : pos + 2] != "FF":
            raise ValueError("sigma acts on two one-form legs")
        out: Dict[Index, AlgebraElement] = {}
        for idx, a in t.coords.items():
            i, j = idx[pos], idx[pos + 1]
            new = idx[:pos] + (j, i) + idx[pos + 2 :]
            c = a.scale(self.braid_phase(i, j))
            out[new] = out[new] + c if new in out else c
        return Tensor(t.legs, out)

    def sigma_inverse(self, t: Tensor, pos: int = 0) -> Tensor:
        out: Dict[Index, AlgebraElement] = {}
        for idx, a in t.coords.items():
            j, i = idx[pos], idx[pos + 1]
            new = idx[:pos] + (i, j) + idx[pos + 2 :]
            c = a.scale(self.braid_phase(i, j).inv())
            out[new] = out[new] + c if new in out else c
        return Tensor(t.legs, out)

    def psi(self, t: Tensor, pos: int = 0) -> Tensor:
        return (t + self.sigma(t, pos)).scale(_HALF)

    def antisym(self, t: Tensor, pos: int = 0) -> Tensor:
        """(1 - Psi) on legs pos, pos+1."""
        return t - self.psi(t, pos)

    # exterior derivative of one-forms
    def exterior_d(self, rho: Tensor) -> Tensor:
        if rho.legs != "F":
            raise ValueError("exterior_d expects a one-form")
        parts = []
        for (j,), a in rho.coords.items():
            parts.append(self.right_mul(self.d_omega[j], a))
            parts.append(-self.antisym(self.tensor(self.frame_form(j), self.d_alg(a))))
        return tensor_sum("FF", parts)

    # alpha maps
    def alpha_right(self, a_t: Tensor, rho: Tensor) -> Tensor:
        """alpha(w (x) eta)(rho) = w <eta^dag|rho>, eta the last rank(rho) legs."""
        q = rho.rank
        parts = []
        for head, tail in self.split_last(a_t, q):
            val = self.inner_right(self.dagger(tail), rho)
            parts.append(self.tensor(self.legs_tensor(a_t.legs[: a_t.rank - q], head), self.scalar_tensor(val)))
        return tensor_sum(a_t.legs[: a_t.rank - q], parts)

    def alpha_left(self, a_t: Tensor, rho: Tensor) -> Tensor:
        """alpha(w (x) eta)(rho) = _B<rho|w^dag> eta, w the first rank(rho) legs."""
        p = rho.rank
        parts = []
        for head, tail in self.split_first_left_right(a_t, p):
            val = self.inner_left(rho, self.dagger(head))
            parts.append(self.left_mul(val, tail))
        return tensor_sum(a_t.legs[p:], parts)

    def split_first_left_right(self, t: Tensor, p: int) -> List[Tuple[Tensor, Tensor]]:
        """t = sum w_I (x) eta_I with w_I = omega_I (unit coefficient) and eta_I right-standard."""
        groups: Dict[Index, Dict[Index, AlgebraElement]] = {}
        for idx, a in t.coords.items():
            groups.setdefault(idx[:p], {})[idx[p:]] = a
        return [(self.legs_tensor(t.legs[:p], h), Tensor(t.legs[p:], tail)) for h, tail in groups.items()]

    # block linear maps on frame coordinates
    def index_blocks(self, rank: int) -> Dict[Degree, List[Index]]:
        blocks: Dict[Degree, List[Index]] = {}
        for idx in itertools.product(range(self.n), repeat=rank):
            blocks.setdefault(self.index_degree("F" * rank, idx), []).append(idx)
        return blocks

    def block_matrix(self, op: Callable[[Tensor], Tensor], rank: int, block: List[Index]) -> linalg.Matrix:
        """Matrix of a right-linear scalar-coordinate map on one degree block."""
        pos = {idx: r for r, idx in enumerate(block)}
        m = linalg.zeros(len(block), len(block))
        uk = self.algebra.unit_key
        for c, idx in enumerate(block):
            img = op(self.legs_tensor("F" * rank, idx))
            for jdx, a in img.coords.items():
                if set(a.terms) - {uk}:
                    raise ValueError("map does not act by scalar coordinates")
                m[pos[jdx]][c] = a.terms.get(uk, Scalar.zero())
        return m


_HALF = Scalar.const(1) / 2


def apply_block_matrices(calc: Calculus, t: Tensor, mats: Mapping[Degree, Tuple[List[Index], linalg.Matrix]]) -> Tensor:
    """Apply per-degree-block scalar matrices to the coordinates of t, key by key."""
    out: Dict[Index, Dict[Key, Scalar]] = {}
    per_block: Dict[Degree, Dict[Key, Dict[Index, Scalar]]] = {}
    for idx, a in t.coords.items():
        d = calc.index_degree(t.legs, idx)
        for k, c in a.terms.items():
            per_block.setdefault(d, {}).setdefault(k, {})[idx] = c
    for d, by_key in per_block.items():
        block, m = mats[d]
        for k, vec in by_key.items():
            v = [vec.get(idx, Scalar.zero()) for idx in block]
            w = linalg.matvec(m, v)
            for idx, c in zip(block, w):
                if not c.is_zero():
                    out.setdefault(idx, {})[k] = c
    return Tensor(t.legs, {idx: AlgebraElement(terms) for idx, terms in out.items()})


@dataclass
class ProjectionBlocks:
    """P = Psi (x) 1, Q = 1 (x) Psi and Pi on rank-3 frame coordinates, per degree block."""

    blocks: Dict[Degree, List[Index]]
    P: Dict[Degree, linalg.Matrix]
    Q: Dict[Degree, linalg.Matrix]
    Pi: Dict[Degree, linalg.Matrix]
    pi_rank: Dict[Degree, int]

    def mats(self, which: str) -> Dict[Degree, Tuple[List[Index], linalg.Matrix]]:
        src = {"P": self.P, "Q": self.Q, "Pi": self.Pi}[which]
        return {d: (self.blocks[d], src[d]) for d in self.blocks}


def projection_blocks(calc: Calculus) -> ProjectionBlocks:
    blocks = calc.index_blocks(3)
    P, Q, Pi, ranks = {}, {}, {}, {}
    for d, block in blocks.items():
        p = calc.block_matrix(lambda t: calc.psi(t, 0), 3, block)
        q = calc.block_matrix(lambda t: calc.psi(t, 1), 3, block)
        two = linalg.scale(linalg.identity(len(block)), Scalar.const(2))
        k = linalg.kernel(linalg.matadd(linalg.matadd(two, p, -1), q, -1))
        P[d], Q[d] = p, q
        Pi[d] = linalg.orthogonal_projector(k)
        ranks[d] = len(k[0]) if k and k[0] else 0
    return ProjectionBlocks(blocks, P, Q, Pi, ranks)


def projections_PQ(calc: Calculus, t: Tensor, which: str) -> Tensor:
    if which == "P":
        return calc.psi(t, 0)
    if which == "Q":
        return calc.psi(t, 1)
    raise ValueError("which must be 'P' or 'Q'")


def intersection_Pi(calc: Calculus, degree: Degree) -> linalg.Matrix:
    return projection_blocks(calc).Pi[degree]
