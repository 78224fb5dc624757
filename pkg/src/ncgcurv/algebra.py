"""Z^2-graded *-algebras given by homogeneous basis symbols.

Three presentations are supported:

``constants``
    a single unit symbol ``"1"`` of degree (0, 0);
``laurent``
    monomials ``U^m V^n`` keyed by ``(m, n)`` with degree ``(m, n)``, the
    commutative algebra of trigonometric polynomials on the 2-torus;
``table``
    user supplied basis, degrees, products and star, certified associative
    on the full (finite) table at construction time.

Every algebra can be read in two modes.  ``Mode.CLASSICAL`` uses the
structure constants as given.  ``Mode.DEFORMED`` twists them by the
formal phase ``lam``::

    S * T   = lam^(n2(S) n1(T)) S T
    T^dag   = lam^(n1(T) n2(T)) T^star
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .scalars import Coeff, Scalar, lam_pow

Key = Hashable


class Mode(enum.Enum):
    CLASSICAL = "classical"
    DEFORMED = "deformed"


@dataclass(frozen=True, order=True)
class Degree:
    n1: int = 0
    n2: int = 0

    def __add__(self, o: "Degree") -> "Degree":
        return Degree(self.n1 + o.n1, self.n2 + o.n2)

    def __neg__(self) -> "Degree":
        return Degree(-self.n1, -self.n2)

    def __sub__(self, o: "Degree") -> "Degree":
        return Degree(self.n1 - o.n1, self.n2 - o.n2)

    def as_tuple(self) -> Tuple[int, int]:
        return (self.n1, self.n2)


ZERO_DEGREE = Degree(0, 0)


def theta_exponent(s: Degree, t: Degree) -> int:
    """Exponent of lam in Theta(s, t) = lam^(n2(s) n1(t) - n2(t) n1(s))."""
    return s.n2 * t.n1 - t.n2 * s.n1


def theta_cocycle(s: Degree, t: Degree) -> Scalar:
    return lam_pow(theta_exponent(s, t))


# ---------------------------------------------------------------- elements


class AlgebraElement:
    """Finitely supported ``{basis key: Scalar}``; zero coefficients are dropped."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Key, Scalar]] = None):
        self.terms: Dict[Key, Scalar] = {k: v for k, v in (terms or {}).items() if not v.is_zero()}
        self._hash = None

    @classmethod
    def basis(cls, key: Key, coeff=1) -> "AlgebraElement":
        return cls({key: Scalar.const(coeff) if not isinstance(coeff, Scalar) else coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __add__(self, o: "AlgebraElement") -> "AlgebraElement":
        out = dict(self.terms)
        for k, v in o.terms.items():
            out[k] = out[k] + v if k in out else v
        return AlgebraElement(out)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement({k: -v for k, v in self.terms.items()})

    def __sub__(self, o: "AlgebraElement") -> "AlgebraElement":
        return self + (-o)

    def scale(self, c) -> "AlgebraElement":
        c = c if isinstance(c, Scalar) else Scalar.const(c)
        if c.is_zero():
            return AlgebraElement()
        return AlgebraElement({k: v * c for k, v in self.terms.items()})

    def items(self):
        return self.terms.items()

    def map_scalars(self, f: Callable[[Scalar], Scalar]) -> "AlgebraElement":
        return AlgebraElement({k: f(v) for k, v in self.terms.items()})

    def __repr__(self) -> str:
        inner = ", ".join(f"{k!r}: {v}" for k, v in sorted(self.terms.items(), key=lambda kv: repr(kv[0])))
        return f"AlgebraElement({{{inner}}})"


# ---------------------------------------------------------------- specs


class AlgebraKind(enum.Enum):
    CONSTANTS = "constants"
    LAURENT = "laurent"
    TABLE = "table"


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraSpec:
    kind: AlgebraKind
    basis: Tuple[Key, ...] = ()
    degrees: Mapping[Key, Degree] = field(default_factory=dict)
    products: Mapping[Tuple[Key, Key], Mapping[Key, Scalar]] = field(default_factory=dict)
    stars: Mapping[Key, Tuple[Key, Scalar]] = field(default_factory=dict)
    unit_key: Key = "1"
    sample_bound: int = 2

    @classmethod
    def constants(cls) -> "AlgebraSpec":
        return cls(AlgebraKind.CONSTANTS, basis=("1",), degrees={"1": ZERO_DEGREE}, unit_key="1")

    @classmethod
    def laurent(cls, sample_bound: int = 2) -> "AlgebraSpec":
        return cls(AlgebraKind.LAURENT, unit_key=(0, 0), sample_bound=sample_bound)

    @classmethod
    def table(cls, basis, degrees, products, stars, unit_key) -> "AlgebraSpec":
        spec = cls(
            AlgebraKind.TABLE,
            basis=tuple(basis),
            degrees=dict(degrees),
            products={k: dict(v) for k, v in products.items()},
            stars=dict(stars),
            unit_key=unit_key,
        )
        problems = spec.certify()
        if problems:
            raise AlgebraError("; ".join(problems))
        return spec

    # basic structure
    def degree(self, key: Key) -> Degree:
        if self.kind is AlgebraKind.LAURENT:
            return Degree(*key)
        try:
            return self.degrees[key]
        except KeyError:
            raise AlgebraError(f"unknown basis key {key!r}") from None

    def key_product(self, k1: Key, k2: Key) -> Dict[Key, Scalar]:
        if self.kind is AlgebraKind.CONSTANTS:
            return {"1": Scalar.one()}
        if self.kind is AlgebraKind.LAURENT:
            return {(k1[0] + k2[0], k1[1] + k2[1]): Scalar.one()}
        return dict(self.products.get((k1, k2), {}))

    def key_star(self, k: Key) -> Tuple[Key, Scalar]:
        if self.kind is AlgebraKind.CONSTANTS:
            return ("1", Scalar.one())
        if self.kind is AlgebraKind.LAURENT:
            return ((-k[0], -k[1]), Scalar.one())
        return self.stars[k]

    def unit(self) -> AlgebraElement:
        return AlgebraElement.basis(self.unit_key)

    def sample_keys(self) -> List[Key]:
        if self.kind is AlgebraKind.LAURENT:
            b = self.sample_bound
            return [(m, n) for m in range(-b, b + 1) for n in range(-b, b + 1)]
        return list(self.basis)

    def generators(self) -> List[Key]:
        """Small keys tried first when hunting for counterexamples."""
        if self.kind is AlgebraKind.LAURENT:
            return [(1, 0), (0, 1), (-1, 0), (0, -1)]
        return [k for k in self.basis if k != self.unit_key] or [self.unit_key]

    def certify(self) -> List[str]:
        """Check unit, grading, star involution and associativity on the whole table."""
        out: List[str] = []
        if self.kind is not AlgebraKind.TABLE:
            return out
        keys = list(self.basis)
        if self.unit_key not in keys:
            return [f"unit {self.unit_key!r} not in basis"]
        if self.degrees.get(self.unit_key) != ZERO_DEGREE:
            out.append("unit must have degree (0, 0)")
        one = self.unit()
        for k in keys:
            x = AlgebraElement.basis(k)
            if self.mul(one, x) != x or self.mul(x, one) != x:
                out.append(f"unit law fails on {k!r}")
        for k1, k2 in itertools.product(keys, keys):
            for k in self.key_product(k1, k2):
                if k not in self.degrees:
                    out.append(f"product {k1!r}*{k2!r} leaves the basis")
                elif self.degree(k) != self.degree(k1) + self.degree(k2):
                    out.append(f"product {k1!r}*{k2!r} breaks the grading")
        for k in keys:
            if k not in self.stars:
                out.append(f"missing star for {k!r}")
                continue
            ks, _ = self.stars[k]
            if self.degree(ks) != -self.degree(k):
                out.append(f"star of {k!r} is not degree negating")
        if out:
            return out
        for k in keys:
            x = AlgebraElement.basis(k)
            if self.star(self.star(x)) != x:
                out.append(f"star is not an involution on {k!r}")
        for k1, k2, k3 in itertools.product(keys, keys, keys):
            a, b, c = (AlgebraElement.basis(k) for k in (k1, k2, k3))
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                out.append(f"associativity fails on ({k1!r}, {k2!r}, {k3!r})")
        for k1, k2 in itertools.product(keys, keys):
            a, b = AlgebraElement.basis(k1), AlgebraElement.basis(k2)
            if self.star(self.mul(a, b)) != self.mul(self.star(b), self.star(a)):
                out.append(f"star is not antimultiplicative on ({k1!r}, {k2!r})")
        return out

    # element operations
    def mul(self, a: AlgebraElement, b: AlgebraElement, mode: Mode = Mode.CLASSICAL) -> AlgebraElement:
        out: Dict[Key, Scalar] = {}
        deformed = mode is Mode.DEFORMED
        for k1, c1 in a.terms.items():
            for k2, c2 in b.terms.items():
                c = c1 * c2
                if deformed:
                    e = self.degree(k1).n2 * self.degree(k2).n1
                    if e:
                        c = c * lam_pow(e)
                for k, s in self.key_product(k1, k2).items():
                    v = c * s
                    out[k] = out[k] + v if k in out else v
        return AlgebraElement(out)

    def star(self, a: AlgebraElement, mode: Mode = Mode.CLASSICAL) -> AlgebraElement:
        out: Dict[Key, Scalar] = {}
        deformed = mode is Mode.DEFORMED
        for k, c in a.terms.items():
            ks, s = self.key_star(k)
            v = c.conj() * s
            if deformed:
                d = self.degree(k)
                if d.n1 * d.n2:
                    v = v * lam_pow(d.n1 * d.n2)
            out[ks] = out[ks] + v if ks in out else v
        return AlgebraElement(out)

    def homogeneous_parts(self, a: AlgebraElement) -> Dict[Degree, AlgebraElement]:
        parts: Dict[Degree, Dict[Key, Scalar]] = {}
        for k, c in a.terms.items():
            parts.setdefault(self.degree(k), {})[k] = c
        return {d: AlgebraElement(t) for d, t in parts.items()}

    def unit_coefficient(self, a: AlgebraElement) -> Scalar:
        """The default functional phi: coefficient of the unit symbol."""
        return a.terms.get(self.unit_key, Scalar.zero())


def alg_mul(spec: AlgebraSpec, a: AlgebraElement, b: AlgebraElement, mode: Mode = Mode.CLASSICAL) -> AlgebraElement:
    return spec.mul(a, b, mode)


def alg_star(spec: AlgebraSpec, a: AlgebraElement, mode: Mode = Mode.CLASSICAL) -> AlgebraElement:
    return spec.star(a, mode)


# ---------------------------------------------------------------- derivations

OneFormCoords = Dict[int, AlgebraElement]


@dataclass(frozen=True)
class DerivationTable:
    """Classical values of d(b) = [D, b] on basis symbols, as frame coordinates.

    ``log_rule`` (Laurent algebras only) maps each frame index j to the pair
    ``(c_U, c_V)`` so that ``d(U^m V^n) = sum_j omega_j (m c_U + n c_V) U^m V^n``.
    ``explicit`` gives ``d(key)`` directly and takes precedence.
    """

    n: int
    log_rule: Mapping[int, Tuple[Scalar, Scalar]] = field(default_factory=dict)
    explicit: Mapping[Key, Mapping[int, AlgebraElement]] = field(default_factory=dict)

    def classical(self, key: Key) -> OneFormCoords:
        if key in self.explicit:
            return {j: a for j, a in self.explicit[key].items() if a}
        out: OneFormCoords = {}
        if self.log_rule and isinstance(key, tuple):
            m, n = key
            for j, (cu, cv) in self.log_rule.items():
                c = cu * m + cv * n
                if not c.is_zero():
                    out[j] = AlgebraElement({key: c})
        return out

    def with_explicit(self, key: Key, value: Mapping[int, AlgebraElement]) -> "DerivationTable":
        ex = dict(self.explicit)
        ex[key] = dict(value)
        return DerivationTable(self.n, self.log_rule, ex)


def identify_rank1(
    coords: OneFormCoords, spec: AlgebraSpec, frame_degrees: Sequence[Degree], mode: Mode
) -> OneFormCoords:
    """Re-express classical coordinates of a one-form in the given mode.

    A classical term omega_j a equals lam^(-n2(d_j) n1(a)) omega_j * a.
    """
    if mode is Mode.CLASSICAL:
        return coords
    out: OneFormCoords = {}
    for j, a in coords.items():
        e2 = frame_degrees[j].n2
        if e2 == 0:
            out[j] = a
            continue
        out[j] = AlgebraElement({k: c * lam_pow(-e2 * spec.degree(k).n1) for k, c in a.terms.items()})
    return out


def apply_derivation(
    table: DerivationTable,
    spec: AlgebraSpec,
    a: AlgebraElement,
    frame_degrees: Sequence[Degree],
    mode: Mode = Mode.CLASSICAL,
) -> OneFormCoords:
    out: OneFormCoords = {}
    for k, c in a.terms.items():
        for j, v in identify_rank1(table.classical(k), spec, frame_degrees, mode).items():
            v = v.scale(c)
            out[j] = out[j] + v if j in out else v
    return {j: v for j, v in out.items() if v}


def _right_mul(spec, coords: OneFormCoords, b: AlgebraElement, mode) -> OneFormCoords:
    return {j: spec.mul(a, b, mode) for j, a in coords.items()}


def _left_mul(spec, a: AlgebraElement, coords: OneFormCoords, frame_degrees, mode) -> OneFormCoords:
    out = {}
    for j, c in coords.items():
        moved = a
        if mode is Mode.DEFORMED:
            dj = frame_degrees[j]
            moved = AlgebraElement(
                {k: v * theta_cocycle(spec.degree(k), dj) for k, v in a.terms.items()}
            )
        out[j] = spec.mul(moved, c, mode)
    return out


def _add(x: OneFormCoords, y: OneFormCoords) -> OneFormCoords:
    out = dict(x)
    for j, v in y.items():
        out[j] = out[j] + v if j in out else v
    return {j: v for j, v in out.items() if v}


@dataclass
class LeibnizReport:
    passed: bool
    checked: int
    witnesses: List[Tuple[Key, Key]]

    def as_dict(self) -> dict:
        return {"passed": self.passed, "checked": self.checked, "witnesses": [[repr(a), repr(b)] for a, b in self.witnesses]}


def check_leibniz(
    spec: AlgebraSpec,
    table: DerivationTable,
    samples: int = 50,
    frame_degrees: Optional[Sequence[Degree]] = None,
    mode: Mode = Mode.CLASSICAL,
    seed: int = 0,
) -> LeibnizReport:
    """Test d(ab) = d(a) b + a d(b) on generator pairs, then on random basis pairs."""
    if frame_degrees is None:
        frame_degrees = [ZERO_DEGREE] * table.n
    gens = spec.generators()
    pairs: List[Tuple[Key, Key]] = list(itertools.product(gens, gens))
    keys = spec.sample_keys()
    rng = random.Random(seed)
    pairs += [(rng.choice(keys), rng.choice(keys)) for _ in range(samples)]
    bad: List[Tuple[Key, Key]] = []
    for k1, k2 in pairs:
        a, b = AlgebraElement.basis(k1), AlgebraElement.basis(k2)
        lhs = apply_derivation(table, spec, spec.mul(a, b, mode), frame_degrees, mode)
        rhs = _add(
            _right_mul(spec, apply_derivation(table, spec, a, frame_degrees, mode), b, mode),
            _left_mul(spec, a, apply_derivation(table, spec, b, frame_degrees, mode), frame_degrees, mode),
        )
        if lhs != rhs and (k1, k2) not in bad:
            bad.append((k1, k2))
    unit_d = apply_derivation(table, spec, spec.unit(), frame_degrees, mode)
    if unit_d:
        bad.insert(0, (spec.unit_key, spec.unit_key))
    return LeibnizReport(not bad, len(pairs), bad)
