"""Built-in geometries and the geometry-file loader.

Two built-ins:

``torus``
    the flat 2-torus; Laurent monomials U^m V^n, frame omega^1, omega^2 of
    degree (0, 0), omega_j^dag = -omega_j, d(omega_j) = 0.
``sphere3``
    the unit round 3-sphere in a left-invariant frame with constant
    coefficients; complex frame f+ = (e1 + i e2)/sqrt2, f- = (e1 - i e2)/sqrt2,
    e3 of degrees (1,-1), (-1,1), (0,0).  The d(omega) table and spin
    constants are the output of ``scripts/derive_sphere3_constants.py``.

Geometry files are TOML with sections ``[meta]``, ``[algebra]``, ``[frame]``,
``[differential]``, ``[clifford]``, ``[spin_connection]``, ``[functional]``
and an optional ``[fixture]``; ``docs/geometry-format.md`` has the schema.
Scalars are strings in the token grammar of ``scalars.format_scalar``.
``serialize_geometry`` writes canonical text, so load/serialize round-trips
bit for bit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import tomli
import tomli_w

from .algebra import (
    AlgebraElement,
    AlgebraError,
    AlgebraKind,
    AlgebraSpec,
    Degree,
    DerivationTable,
    Key,
    Mode,
    check_leibniz,
)
from .checks import ThetaContext
from .deformation import h_theta
from .dirac import DiracModule, DiracModuleSpec, validate_dirac
from .forms import Calculus, FrameSpec, Tensor
from .levi_civita import LeviCivitaResult, solve_levi_civita
from .scalars import Scalar, ScalarParseError, ScalarZeroDivision, format_scalar, parse_scalar

_I = Scalar.i()
_ONE = Scalar.one()
_Z = Scalar.zero()
_RT2 = Scalar.sqrt2()


@dataclass(frozen=True)
class GeometrySpec:
    name: str
    algebra: AlgebraSpec
    derivation: DerivationTable
    frame: FrameSpec
    dirac: DiracModuleSpec
    dimension: int
    oracle: Mapping[str, str] = field(default_factory=dict)
    braid_phases: Mapping[Tuple[int, int], Scalar] = field(default_factory=dict)
    # a rank-3 tensor added to the solved connection form (experiments and fixtures)
    a_perturbation: Optional[Tensor] = None
    # real_frame[b][a]: omega_b = sum_a real_frame[b][a] e^a for a real orthonormal e
    real_frame: Optional[Tuple[Tuple[Scalar, ...], ...]] = None

    def calculus(self, mode: Mode = Mode.CLASSICAL) -> Calculus:
        return Calculus(
            self.algebra,
            self.derivation,
            self.frame,
            mode,
            spinor_degrees=self.dirac.degrees,
            braid_phases=self.braid_phases,
        )

    def replace(self, **kw) -> "GeometrySpec":
        return replace(self, **kw)

    def perturbation(self, mode: Mode) -> Optional[Tensor]:
        if self.a_perturbation is None:
            return None
        if mode is Mode.DEFORMED:
            return h_theta(self.calculus(mode), self.a_perturbation)
        return self.a_perturbation

    def levi_civita(self, mode: Mode = Mode.CLASSICAL, ctx: Optional[ThetaContext] = None, **kw) -> LeviCivitaResult:
        return solve_levi_civita(self.calculus(mode), ctx, perturbation=self.perturbation(mode), **kw)

    def dirac_module(self, mode: Mode = Mode.CLASSICAL) -> DiracModule:
        """Spinor module over the (possibly perturbed) Levi-Civita connection."""
        calc = self.calculus(mode)
        conn = solve_levi_civita(calc, perturbation=self.perturbation(mode)).connection
        return DiracModule(calc, self.dirac, conn)


def _mat(rows) -> Tuple[Tuple[Scalar, ...], ...]:
    return tuple(tuple(x if isinstance(x, Scalar) else Scalar.const(x) for x in r) for r in rows)


def _const_tensor(legs: str, unit_key, entries: Mapping[tuple, Scalar]) -> Tensor:
    return Tensor(legs, {idx: AlgebraElement({unit_key: c}) for idx, c in entries.items()})


def builtin_torus() -> GeometrySpec:
    algebra = AlgebraSpec.laurent(sample_bound=3)
    derivation = DerivationTable(2, log_rule={0: (_I, _Z), 1: (_Z, _I)})
    frame = FrameSpec(
        n=2,
        degrees=(Degree(0, 0), Degree(0, 0)),
        star=_mat([[-1, 0], [0, -1]]),
        d_omega=(Tensor("FF"), Tensor("FF")),
    )
    # c(omega_j) = -i sigma_j
    gamma = (
        _mat([[0, -_I], [-_I, 0]]),
        _mat([[0, -1], [1, 0]]),
    )
    zero2 = _mat([[0, 0], [0, 0]])
    dirac = DiracModuleSpec(2, (Degree(0, 0), Degree(0, 0)), gamma, (zero2, zero2))
    return GeometrySpec(
        "torus",
        algebra,
        derivation,
        frame,
        dirac,
        dimension=2,
        oracle={"scalar_curvature": "0", "ricci_factor": "0", "weitzenbock": "0", "sectional_curvature": "0"},
        real_frame=_mat([[1, 0], [0, 1]]),
    )


def builtin_sphere3() -> GeometrySpec:
    algebra = AlgebraSpec.constants()
    derivation = DerivationTable(3)
    uk = algebra.unit_key
    d_omega = (
        _const_tensor("FF", uk, {(0, 2): _I, (2, 0): -_I}),
        _const_tensor("FF", uk, {(1, 2): -_I, (2, 1): _I}),
        _const_tensor("FF", uk, {(0, 1): -_I, (1, 0): _I}),
    )
    frame = FrameSpec(
        n=3,
        degrees=(Degree(1, -1), Degree(-1, 1), Degree(0, 0)),
        star=_mat([[0, -1, 0], [-1, 0, 0], [0, 0, -1]]),
        d_omega=d_omega,
    )
    mi_rt2 = -_I * _RT2
    half_i = _I / 2
    # c(f+) = -i(sigma1 + i sigma2)/sqrt2, c(f-) = -i(sigma1 - i sigma2)/sqrt2, c(e3) = -i sigma3
    gamma = (
        _mat([[0, mi_rt2], [0, 0]]),
        _mat([[0, 0], [mi_rt2, 0]]),
        _mat([[-_I, 0], [0, _I]]),
    )
    # spin[j] = -(1/2) c(omega_j^dag)
    spin = (
        _mat([[0, 0], [mi_rt2 / 2, 0]]),
        _mat([[0, mi_rt2 / 2], [0, 0]]),
        _mat([[-half_i, 0], [0, half_i]]),
    )
    dirac = DiracModuleSpec(2, (Degree(1, 0), Degree(0, 1)), gamma, spin)
    return GeometrySpec(
        "sphere3",
        algebra,
        derivation,
        frame,
        dirac,
        dimension=3,
        oracle={"scalar_curvature": "6", "ricci_factor": "2", "weitzenbock": "3/2", "sectional_curvature": "1"},
        real_frame=_mat([[1 / _RT2, _I / _RT2, 0], [1 / _RT2, -_I / _RT2, 0], [0, 0, 1]]),
    )


BUILTINS = {"torus": builtin_torus, "sphere3": builtin_sphere3}


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class ValidationIssue:
    invariant: str
    location: str
    witness: str

    def __str__(self) -> str:
        return f"{self.invariant} at {self.location}: {self.witness}"


class GeometryError(ValueError):
    pass


class GeometryParseError(GeometryError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None, path: str = ""):
        where = f"line {line}, column {column}" if line is not None else path or "document"
        super().__init__(f"parse error at {where}: {message}")
        self.line, self.column, self.path = line, column, path


class GeometryValidationError(GeometryError):
    def __init__(self, issues: List[ValidationIssue]):
        super().__init__("geometry failed validation:\n" + "\n".join(f"  {i}" for i in issues))
        self.issues = issues


def _is_identity(m) -> Optional[Tuple[int, int]]:
    for i, row in enumerate(m):
        for j, x in enumerate(row):
            if x != (Scalar.one() if i == j else Scalar.zero()):
                return (i, j)
    return None


def validate_geometry(spec: GeometrySpec, leibniz_samples: int = 50, seed: int = 0) -> List[ValidationIssue]:
    """Every structural invariant a geometry must satisfy before any solver runs."""
    issues: List[ValidationIssue] = []

    def bad(inv, loc, wit):
        issues.append(ValidationIssue(inv, loc, wit))

    fr = spec.frame
    for msg in fr.validate_shape():
        bad("orthonormality" if "orthonormal" in msg else "frame_shape", "frame", msg)
    if spec.derivation.n != fr.n:
        bad("frame_shape", "differential", f"derivation table has {spec.derivation.n} frame slots, frame has {fr.n}")
    if spec.dimension < 1:
        bad("dimension", "meta.dimension", f"declared dimension {spec.dimension} must be positive")
    for msg in spec.algebra.certify():
        bad("algebra_table", "algebra", msg)
    if issues:
        return issues

    alg, n, deg = spec.algebra, fr.n, fr.degrees
    for k in range(n):
        for j in range(n):
            if not fr.star[k][j].is_zero() and deg[k] != -deg[j]:
                bad("star_matrix_degree", f"frame.star[{k}][{j}]", f"nonzero entry joins degrees {deg[k].as_tuple()} and {deg[j].as_tuple()}")
    # (omega^dag)^dag = omega  <=>  sum_k S_lk conj(S_kj) = delta_lj
    sq = [[sum((fr.star[l][k] * fr.star[k][j].conj() for k in range(n)), Scalar.zero()) for j in range(n)] for l in range(n)]
    at = _is_identity(sq)
    if at is not None:
        bad("star_involution", f"frame.star (row {at[0]}, column {at[1]})", f"S conj(S) has entry {sq[at[0]][at[1]]}")

    calc = spec.calculus(Mode.CLASSICAL)
    for j, t in enumerate(fr.d_omega):
        for idx, a in t.coords.items():
            if len(idx) != 2 or any(not 0 <= i < n for i in idx):
                bad("d_omega_shape", f"differential.d_omega frame index {j}", f"index {list(idx)}")
                continue
            for key in a.terms:
                got = calc.index_degree("FF", idx) + alg.degree(key)
                if got != deg[j]:
                    bad(
                        "d_omega_degree",
                        f"differential.d_omega frame index {j}",
                        f"term {list(idx)} with coefficient {key!r} has degree {got.as_tuple()}, expected {deg[j].as_tuple()}",
                    )
    if issues:
        return issues
    for j, t in enumerate(calc.d_omega):
        if calc.psi(t):
            bad("d_omega_in_image_of_1_minus_psi", f"differential.d_omega frame index {j}", "Psi(d omega_j) is nonzero")

    for key in alg.sample_keys():
        for j, a in spec.derivation.classical(key).items():
            for k2 in a.terms:
                if alg.degree(k2) + deg[j] != alg.degree(key):
                    bad("derivation_degree", f"differential d({_key_text(alg, key)})", f"frame index {j} coefficient {k2!r} breaks degree")
    lb = check_leibniz(alg, spec.derivation, leibniz_samples, deg, seed=seed)
    if not lb.passed:
        k1, k2 = lb.witnesses[0]
        bad("leibniz", "differential", f"d(ab) != d(a) b + a d(b) for a = {_key_text(alg, k1)}, b = {_key_text(alg, k2)}")

    # frame identity: rho = sum_j omega_j <omega_j|rho>
    for j in range(n):
        for g in alg.generators()[:2]:
            rho = calc.right_mul(calc.frame_form(j), AlgebraElement.basis(g))
            back = Tensor("F", {(k,): calc.inner_right(calc.frame_form(k), rho) for k in range(n)})
            if back != rho:
                bad("frame_identity", f"frame index {j}", f"sum_k omega_k <omega_k|rho> != rho for rho = omega_{j} {_key_text(alg, g)}")

    for msg in validate_dirac(spec.dirac, deg):
        bad("clifford_balancing", "clifford", msg)
    return issues


# ---------------------------------------------------------------- serialization

FORMAT = "ncgcurv-geometry/1"


def _key_text(alg: AlgebraSpec, key: Key) -> str:
    if alg.kind is AlgebraKind.LAURENT:
        return f"{key[0]},{key[1]}"
    return str(key)


_LAURENT_KEY = re.compile(r"^\s*(-?\d+)\s*,\s*(-?\d+)\s*$")


def _key_parse(alg: AlgebraSpec, text: str, where: str) -> Key:
    if alg.kind is AlgebraKind.LAURENT:
        m = _LAURENT_KEY.match(text)
        if not m:
            raise GeometryParseError(f"Laurent basis key must read 'm,n', got {text!r}", path=where)
        return (int(m.group(1)), int(m.group(2)))
    if alg.kind is AlgebraKind.CONSTANTS and text != "1":
        raise GeometryParseError(f"constants algebra has only the key '1', got {text!r}", path=where)
    if alg.kind is AlgebraKind.TABLE and text not in alg.degrees:
        raise GeometryParseError(f"unknown basis key {text!r}", path=where)
    return text


def _elem_out(alg: AlgebraSpec, a: AlgebraElement) -> Dict[str, str]:
    items = sorted(((_key_text(alg, k), format_scalar(c)) for k, c in a.terms.items()))
    return dict(items)


def _mat_out(m) -> List[List[str]]:
    return [[format_scalar(x) for x in row] for row in m]


def _tensor_out(alg: AlgebraSpec, t: Tensor) -> List[dict]:
    return [{"index": list(idx), "coeff": _elem_out(alg, a)} for idx, a in sorted(t.coords.items())]


def tensor_to_json(alg: AlgebraSpec, t: Tensor) -> dict:
    """{rank, legs, terms: [{index, coeff: {basis: scalar}}]} with exact scalar strings."""
    return {"rank": t.rank, "legs": t.legs, "terms": _tensor_out(alg, t)}


def tensor_from_json(alg: AlgebraSpec, data: dict, legs: Optional[str] = None) -> Tensor:
    if not isinstance(data, dict) or "terms" not in data:
        raise GeometryParseError("tensor JSON needs a 'terms' array", path="tensor")
    rank = data.get("rank")
    legs = legs or data.get("legs") or "F" * (rank or 0)
    if rank is not None and rank != len(legs):
        raise GeometryParseError(f"rank {rank} does not match legs {legs!r}", path="tensor.rank")
    return _Reader({}).tensor(alg, legs, data["terms"], "tensor.terms")


def serialize_geometry(spec: GeometrySpec) -> str:
    alg = spec.algebra
    doc: Dict[str, Any] = {}
    meta: Dict[str, Any] = {"format": FORMAT, "name": spec.name, "dimension": spec.dimension}
    if spec.oracle:
        meta["oracle"] = dict(sorted(spec.oracle.items()))
    doc["meta"] = meta

    a: Dict[str, Any] = {"kind": alg.kind.value}
    if alg.kind is AlgebraKind.LAURENT:
        a["sample_bound"] = alg.sample_bound
    elif alg.kind is AlgebraKind.TABLE:
        a["unit"] = str(alg.unit_key)
        a["basis"] = [str(k) for k in alg.basis]
        a["degrees"] = {str(k): list(alg.degrees[k].as_tuple()) for k in alg.basis}
        a["products"] = [
            {"left": str(k1), "right": str(k2), "result": _elem_out(alg, AlgebraElement(v))}
            for (k1, k2), v in sorted(alg.products.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1])))
        ]
        a["star"] = [
            {"key": str(k), "image": str(img), "coeff": format_scalar(c)}
            for k, (img, c) in sorted(alg.stars.items(), key=lambda kv: str(kv[0]))
        ]
    doc["algebra"] = a

    fr = spec.frame
    f: Dict[str, Any] = {"size": fr.n, "degrees": [list(d.as_tuple()) for d in fr.degrees], "star": _mat_out(fr.star)}
    if fr.gram is not None:
        f["gram"] = _mat_out(fr.gram)
    if spec.real_frame is not None:
        f["real_frame"] = _mat_out(spec.real_frame)
    doc["frame"] = f

    der = spec.derivation
    d: Dict[str, Any] = {}
    if der.log_rule:
        d["log_rule"] = [
            {"frame": j, "u": format_scalar(cu), "v": format_scalar(cv)} for j, (cu, cv) in sorted(der.log_rule.items())
        ]
    if der.explicit:
        d["explicit"] = [
            {
                "key": _key_text(alg, k),
                "value": [{"frame": j, "coeff": _elem_out(alg, v)} for j, v in sorted(der.explicit[k].items())],
            }
            for k in sorted(der.explicit, key=lambda k: _key_text(alg, k))
        ]
    d["d_omega"] = [{"frame": j, "terms": _tensor_out(alg, t)} for j, t in enumerate(fr.d_omega)]
    doc["differential"] = d

    dm = spec.dirac
    doc["clifford"] = {
        "rank": dm.rank,
        "degrees": [list(x.as_tuple()) for x in dm.degrees],
        "gamma": [_mat_out(m) for m in dm.gamma],
    }
    doc["spin_connection"] = {"matrices": [_mat_out(m) for m in dm.spin]}
    if dm.phi is None:
        doc["functional"] = {"kind": "unit_coefficient"}
    else:
        doc["functional"] = {
            "kind": "weights",
            "weights": dict(sorted((_key_text(alg, k), format_scalar(c)) for k, c in dm.phi.items())),
        }

    fx: Dict[str, Any] = {}
    if spec.braid_phases:
        fx["braid_phases"] = [{"pair": [i, j], "phase": format_scalar(c)} for (i, j), c in sorted(spec.braid_phases.items())]
    if spec.a_perturbation is not None:
        fx["a_perturbation"] = _tensor_out(alg, spec.a_perturbation)
    if fx:
        doc["fixture"] = fx
    return tomli_w.dumps(doc)


def save_geometry(spec: GeometrySpec, path: Union[str, Path]) -> None:
    Path(path).write_text(serialize_geometry(spec), encoding="utf-8")


# ---------------------------------------------------------------- loading


class _Reader:
    """Typed access into the parsed document; errors carry the TOML path."""

    def __init__(self, doc: dict):
        self.doc = doc

    def get(self, node: dict, key: str, where: str, kind=None, default=...):
        if key not in node:
            if default is not ...:
                return default
            raise GeometryParseError(f"missing key '{key}'", path=where)
        v = node[key]
        if kind is not None and not isinstance(v, kind) or isinstance(v, bool) and kind is not bool:
            raise GeometryParseError(f"'{key}' has the wrong type ({type(v).__name__})", path=f"{where}.{key}")
        return v

    def section(self, name: str, required: bool = True) -> dict:
        if name not in self.doc:
            if required:
                raise GeometryParseError(f"missing section [{name}]", path=name)
            return {}
        v = self.doc[name]
        if not isinstance(v, dict):
            raise GeometryParseError(f"[{name}] must be a table", path=name)
        return v

    @staticmethod
    def scalar(text, where: str) -> Scalar:
        if isinstance(text, int) and not isinstance(text, bool):
            return Scalar.const(text)
        if not isinstance(text, str):
            raise GeometryParseError(f"scalar must be a string, got {type(text).__name__}", path=where)
        try:
            return parse_scalar(text)
        except (ScalarParseError, ScalarZeroDivision) as e:
            raise GeometryParseError(f"bad scalar {text!r}: {e}", path=where) from None

    def matrix(self, rows, size: int, where: str):
        if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
            raise GeometryParseError("matrix must be an array of arrays", path=where)
        return tuple(tuple(self.scalar(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)) for i, r in enumerate(rows))

    @staticmethod
    def degree(v, where: str) -> Degree:
        if not (isinstance(v, list) and len(v) == 2 and all(isinstance(x, int) and not isinstance(x, bool) for x in v)):
            raise GeometryParseError("degree must be a pair of integers", path=where)
        return Degree(v[0], v[1])

    def element(self, alg: AlgebraSpec, table, where: str) -> AlgebraElement:
        if not isinstance(table, dict):
            raise GeometryParseError("algebra element must be a table {basis = scalar}", path=where)
        return AlgebraElement({_key_parse(alg, k, where): self.scalar(v, f"{where}.{k}") for k, v in table.items()})

    def tensor(self, alg: AlgebraSpec, legs: str, terms, where: str) -> Tensor:
        if not isinstance(terms, list):
            raise GeometryParseError("tensor must be an array of {index, coeff} tables", path=where)
        coords: Dict[tuple, AlgebraElement] = {}
        for i, term in enumerate(terms):
            w = f"{where}[{i}]"
            idx = self.get(term, "index", w, list)
            if len(idx) != len(legs) or not all(isinstance(x, int) for x in idx):
                raise GeometryParseError(f"index must be {len(legs)} integers", path=f"{w}.index")
            a = self.element(alg, self.get(term, "coeff", w, dict), f"{w}.coeff")
            key = tuple(idx)
            coords[key] = coords[key] + a if key in coords else a
        return Tensor(legs, coords)


def _parse_algebra(r: _Reader) -> AlgebraSpec:
    sec = r.section("algebra")
    kind = r.get(sec, "kind", "algebra", str)
    if kind == "constants":
        return AlgebraSpec.constants()
    if kind == "laurent":
        return AlgebraSpec.laurent(sample_bound=r.get(sec, "sample_bound", "algebra", int, 2))
    if kind != "table":
        raise GeometryParseError(f"unknown algebra kind {kind!r} (constants, laurent, table)", path="algebra.kind")
    basis = r.get(sec, "basis", "algebra", list)
    degs = r.get(sec, "degrees", "algebra", dict)
    degrees = {k: r.degree(v, f"algebra.degrees.{k}") for k, v in degs.items()}
    shell = AlgebraSpec(AlgebraKind.TABLE, basis=tuple(basis), degrees=degrees, unit_key=r.get(sec, "unit", "algebra", str))
    products = {}
    for i, e in enumerate(r.get(sec, "products", "algebra", list, [])):
        w = f"algebra.products[{i}]"
        k1 = _key_parse(shell, r.get(e, "left", w, str), w)
        k2 = _key_parse(shell, r.get(e, "right", w, str), w)
        products[(k1, k2)] = r.element(shell, r.get(e, "result", w, dict), f"{w}.result").terms
    stars = {}
    for i, e in enumerate(r.get(sec, "star", "algebra", list, [])):
        w = f"algebra.star[{i}]"
        stars[_key_parse(shell, r.get(e, "key", w, str), w)] = (
            _key_parse(shell, r.get(e, "image", w, str), w),
            r.scalar(r.get(e, "coeff", w, default="1"), f"{w}.coeff"),
        )
    try:
        return AlgebraSpec.table(basis, degrees, products, stars, shell.unit_key)
    except AlgebraError as e:
        raise GeometryValidationError([ValidationIssue("algebra_table", "algebra", str(e))]) from None


def parse_geometry(text: str, validate: bool = True) -> GeometrySpec:
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as e:
        msg = e.msg if hasattr(e, "msg") else str(e)
        raise GeometryParseError(msg, getattr(e, "lineno", None), getattr(e, "colno", None)) from None
    r = _Reader(doc)
    meta = r.section("meta")
    fmt = r.get(meta, "format", "meta", str, FORMAT)
    if fmt != FORMAT:
        raise GeometryParseError(f"unsupported format {fmt!r}", path="meta.format")
    name = r.get(meta, "name", "meta", str)
    dimension = r.get(meta, "dimension", "meta", int)
    oracle = {k: str(v) for k, v in r.get(meta, "oracle", "meta", dict, {}).items()}
    alg = _parse_algebra(r)

    fs = r.section("frame")
    n = r.get(fs, "size", "frame", int)
    degrees = tuple(r.degree(v, f"frame.degrees[{i}]") for i, v in enumerate(r.get(fs, "degrees", "frame", list)))
    star = r.matrix(r.get(fs, "star", "frame", list), n, "frame.star")
    gram = r.matrix(fs["gram"], n, "frame.gram") if "gram" in fs else None
    real_frame = r.matrix(fs["real_frame"], n, "frame.real_frame") if "real_frame" in fs else None

    ds = r.section("differential")
    log_rule = {}
    for i, e in enumerate(r.get(ds, "log_rule", "differential", list, [])):
        w = f"differential.log_rule[{i}]"
        if alg.kind is not AlgebraKind.LAURENT:
            raise GeometryParseError("log_rule needs a Laurent algebra", path=w)
        log_rule[r.get(e, "frame", w, int)] = (r.scalar(r.get(e, "u", w), f"{w}.u"), r.scalar(r.get(e, "v", w), f"{w}.v"))
    explicit = {}
    for i, e in enumerate(r.get(ds, "explicit", "differential", list, [])):
        w = f"differential.explicit[{i}]"
        key = _key_parse(alg, r.get(e, "key", w, str), w)
        vals = {}
        for k, v in enumerate(r.get(e, "value", w, list)):
            wv = f"{w}.value[{k}]"
            vals[r.get(v, "frame", wv, int)] = r.element(alg, r.get(v, "coeff", wv, dict), f"{wv}.coeff")
        explicit[key] = vals
    d_omega: List[Optional[Tensor]] = [Tensor("FF") for _ in range(n)]
    for i, e in enumerate(r.get(ds, "d_omega", "differential", list, [])):
        w = f"differential.d_omega[{i}]"
        j = r.get(e, "frame", w, int)
        if not 0 <= j < n:
            raise GeometryParseError(f"frame index {j} out of range", path=f"{w}.frame")
        d_omega[j] = r.tensor(alg, "FF", r.get(e, "terms", w, list), f"{w}.terms")

    cs = r.section("clifford")
    srank = r.get(cs, "rank", "clifford", int)
    sdeg = tuple(r.degree(v, f"clifford.degrees[{i}]") for i, v in enumerate(r.get(cs, "degrees", "clifford", list)))
    gamma = tuple(r.matrix(m, srank, f"clifford.gamma[{j}]") for j, m in enumerate(r.get(cs, "gamma", "clifford", list)))
    ss = r.section("spin_connection")
    spin = tuple(r.matrix(m, srank, f"spin_connection.matrices[{j}]") for j, m in enumerate(r.get(ss, "matrices", "spin_connection", list)))
    fn = r.section("functional", required=False)
    kind = r.get(fn, "kind", "functional", str, "unit_coefficient")
    if kind == "unit_coefficient":
        phi = None
    elif kind == "weights":
        phi = {_key_parse(alg, k, "functional.weights"): r.scalar(v, f"functional.weights.{k}") for k, v in r.get(fn, "weights", "functional", dict).items()}
    else:
        raise GeometryParseError(f"unknown functional kind {kind!r}", path="functional.kind")

    fx = r.section("fixture", required=False)
    braid = {}
    for i, e in enumerate(r.get(fx, "braid_phases", "fixture", list, [])):
        w = f"fixture.braid_phases[{i}]"
        pair = r.get(e, "pair", w, list)
        braid[(pair[0], pair[1])] = r.scalar(r.get(e, "phase", w), f"{w}.phase")
    pert = r.tensor(alg, "FFF", fx["a_perturbation"], "fixture.a_perturbation") if "a_perturbation" in fx else None

    spec = GeometrySpec(
        name=name,
        algebra=alg,
        derivation=DerivationTable(n, log_rule, explicit),
        frame=FrameSpec(n=n, degrees=degrees, star=star, d_omega=tuple(d_omega), gram=gram),
        dirac=DiracModuleSpec(srank, sdeg, gamma, spin, phi),
        dimension=dimension,
        oracle=oracle,
        braid_phases=braid,
        a_perturbation=pert,
        real_frame=real_frame,
    )
    if validate:
        issues = validate_geometry(spec)
        if issues:
            raise GeometryValidationError(issues)
    return spec


def load_geometry(path: Union[str, Path], validate: bool = True) -> GeometrySpec:
    return parse_geometry(Path(path).read_text(encoding="utf-8"), validate=validate)


def resolve_geometry(name_or_path: str, validate: bool = True) -> GeometrySpec:
    """A builtin or fixture name, or a path to a geometry file."""
    if name_or_path in BUILTINS:
        return BUILTINS[name_or_path]()
    if name_or_path in SABOTAGE:
        return SABOTAGE[name_or_path]()
    p = Path(name_or_path)
    if not p.exists():
        raise GeometryError(f"unknown geometry {name_or_path!r}: not a builtin, fixture or file")
    return load_geometry(p, validate=validate)


# ---------------------------------------------------------------- sabotage fixtures
# Each one breaks a single ingredient; the check suite must catch it.


def sabotage_scaled_spin() -> GeometrySpec:
    g = builtin_sphere3()
    return g.replace(name="sabotage-scaled-spin", dirac=g.dirac.scaled_spin(2), oracle={})


def sabotage_flipped_sigma() -> GeometrySpec:
    g = builtin_torus()
    return g.replace(name="sabotage-flipped-sigma", braid_phases={(0, 1): Scalar.const(-1)}, oracle={})


def sabotage_corrupted_derivation() -> GeometrySpec:
    g = builtin_torus()
    # d(U) = 2 omega_1 iU instead of omega_1 iU
    bad = g.derivation.with_explicit((1, 0), {0: AlgebraElement({(1, 0): _I * 2})})
    return g.replace(name="sabotage-corrupted-derivation", derivation=bad, oracle={})


def sabotage_wrong_star() -> GeometrySpec:
    g = builtin_sphere3()
    # f+^dag = +f- instead of -f-; still an involution of the right degrees
    star = _mat([[0, 1, 0], [1, 0, 0], [0, 0, -1]])
    return g.replace(name="sabotage-wrong-star", frame=replace(g.frame, star=star), oracle={})


def sabotage_perturbed_connection() -> GeometrySpec:
    g = builtin_torus()
    pert = _const_tensor("FFF", g.algebra.unit_key, {(0, 0, 0): _ONE})
    return g.replace(name="sabotage-perturbed-connection", a_perturbation=pert, oracle={})


SABOTAGE = {
    "sabotage-scaled-spin": sabotage_scaled_spin,
    "sabotage-flipped-sigma": sabotage_flipped_sigma,
    "sabotage-corrupted-derivation": sabotage_corrupted_derivation,
    "sabotage-wrong-star": sabotage_wrong_star,
    "sabotage-perturbed-connection": sabotage_perturbed_connection,
}
