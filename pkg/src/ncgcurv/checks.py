"""Check results and the exact/numeric zero test shared by all verifiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Union

from .algebra import AlgebraElement
from .forms import Tensor
from .scalars import Scalar, ScalarPoleError


@dataclass(frozen=True)
class ThetaContext:
    """How residuals are judged: structurally (``q is None``) or at lam = exp(2 pi i q)."""

    q: Optional[Fraction] = None
    tol: float = 1e-9

    @classmethod
    def symbolic(cls) -> "ThetaContext":
        return cls(None)

    @classmethod
    def numeric(cls, q, tol: float = 1e-9) -> "ThetaContext":
        return cls(Fraction(q), tol)

    @property
    def is_symbolic(self) -> bool:
        return self.q is None

    def describe(self) -> str:
        return "symbolic" if self.q is None else f"theta=2*pi*{self.q}"

    def residual(self, x: Union[Tensor, AlgebraElement, Scalar]) -> float:
        """Largest |coefficient| of x at the evaluation point (0.0 for exact zero)."""
        worst = 0.0
        for s in _scalars(x):
            if self.q is None:
                if not s.is_zero():
                    return float("inf")
                continue
            try:
                worst = max(worst, abs(s.eval(self.q)))
            except ScalarPoleError:
                return float("inf")
        return worst

    def is_zero(self, x) -> bool:
        if self.q is None:
            return all(s.is_zero() for s in _scalars(x))
        return self.residual(x) <= self.tol


def _scalars(x) -> Iterable[Scalar]:
    if isinstance(x, Scalar):
        yield x
    elif isinstance(x, AlgebraElement):
        yield from x.terms.values()
    elif isinstance(x, Tensor):
        for a in x.coords.values():
            yield from a.terms.values()
    else:
        raise TypeError(f"cannot take residual of {type(x).__name__}")


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: Optional[str] = None
    residual: Optional[float] = None
    detail: Optional[str] = None

    def as_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.residual is not None and self.residual != float("inf"):
            out["residual"] = float(f"{self.residual:.3e}")
        if self.detail is not None:
            out["detail"] = self.detail
        return out


def check_zero(name: str, ctx: ThetaContext, cases, detail: Optional[str] = None) -> CheckResult:
    """``cases`` yields (label, residual object); passes iff every residual is zero."""
    worst = 0.0
    for label, value in cases:
        if not ctx.is_zero(value):
            return CheckResult(name, False, witness=str(label), residual=ctx.residual(value), detail=detail)
        if not ctx.is_symbolic:
            worst = max(worst, ctx.residual(value))
    return CheckResult(name, True, residual=None if ctx.is_symbolic else worst, detail=detail)


def all_passed(results: List[CheckResult]) -> bool:
    return all(r.passed for r in results)
