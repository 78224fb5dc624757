"""Exact arithmetic in Q(i, sqrt2)(lam).

A :class:`Coeff` is ``a + b*sqrt2`` with Gaussian rational ``a, b``.  A
:class:`Scalar` is a quotient of Laurent polynomials in the formal unit
circle parameter ``lam`` with :class:`Coeff` coefficients, kept in a
canonical form so that structural equality decides equality of values.

Canonical form of a scalar ``num/den``:

* zero has an empty numerator and denominator ``1``;
* ``den`` is an honest polynomial with nonzero constant term equal to 1;
* ``num`` and ``den`` are coprime in Q(i, sqrt2)[lam].

Text form (see ``docs/scalar-grammar.md``)::

    scalar := poly | "[" poly "]/[" poly "]"
    poly   := "0" | rat | term ("+" term)*
    term   := coeff "*L^" int
    coeff  := "(" rat ")" | "((" rat ")+(" rat ")i+(" rat sign rat "i)r2)"

so that ``((3/2)+(1/2)i+(0+0i)r2)*L^-1`` is ``(3/2 + i/2)/lam``.
"""

from __future__ import annotations

import cmath
import math
import re
from fractions import Fraction
from typing import Dict, Iterable, Tuple, Union

__all__ = [
    "Coeff",
    "Scalar",
    "ScalarZeroDivision",
    "ScalarPoleError",
    "ScalarParseError",
    "parse_scalar",
    "lam",
    "lam_pow",
    "as_scalar",
]


class ScalarZeroDivision(ZeroDivisionError):
    """Raised when inverting the zero scalar."""


class ScalarPoleError(ArithmeticError):
    """Raised when numeric evaluation hits a zero of the denominator."""


class ScalarParseError(ValueError):
    def __init__(self, text: str, pos: int, msg: str):
        super().__init__(f"{msg} at column {pos + 1} in {text!r}")
        self.text = text
        self.pos = pos


def _gcd5(*vals: int) -> int:
    g = 0
    for v in vals:
        g = math.gcd(g, v)
    return g


class Coeff:
    """``(ar + ai*i) + (br + bi*i)*sqrt2``, stored over a common denominator."""

    __slots__ = ("ar", "ai", "br", "bi", "den", "_hash")

    def __init__(self, ar: int = 0, ai: int = 0, br: int = 0, bi: int = 0, den: int = 1):
        if den == 0:
            raise ScalarZeroDivision("zero denominator")
        if den < 0:
            ar, ai, br, bi, den = -ar, -ai, -br, -bi, -den
        g = _gcd5(ar, ai, br, bi, den)
        if g > 1:
            ar //= g
            ai //= g
            br //= g
            bi //= g
            den //= g
        self.ar, self.ai, self.br, self.bi, self.den = ar, ai, br, bi, den
        self._hash = None

    @classmethod
    def rational(cls, q) -> "Coeff":
        q = Fraction(q)
        return cls(q.numerator, 0, 0, 0, q.denominator)

    @classmethod
    def from_parts(cls, ar, ai=0, br=0, bi=0) -> "Coeff":
        fr = [Fraction(x) for x in (ar, ai, br, bi)]
        den = 1
        for f in fr:
            den = den * f.denominator // math.gcd(den, f.denominator)
        return cls(*(int(f * den) for f in fr), den)

    def parts(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        d = self.den
        return (Fraction(self.ar, d), Fraction(self.ai, d), Fraction(self.br, d), Fraction(self.bi, d))

    # structural identity
    def key(self) -> Tuple[int, int, int, int, int]:
        return (self.ar, self.ai, self.br, self.bi, self.den)

    def __eq__(self, other) -> bool:
        if isinstance(other, Coeff):
            return self.key() == other.key()
        if isinstance(other, (int, Fraction)):
            return self == Coeff.rational(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def is_zero(self) -> bool:
        return not (self.ar or self.ai or self.br or self.bi)

    def is_one(self) -> bool:
        return self.ar == self.den and not (self.ai or self.br or self.bi)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, o: "Coeff") -> "Coeff":
        d1, d2 = self.den, o.den
        if d1 == d2:
            return Coeff(self.ar + o.ar, self.ai + o.ai, self.br + o.br, self.bi + o.bi, d1)
        return Coeff(
            self.ar * d2 + o.ar * d1,
            self.ai * d2 + o.ai * d1,
            self.br * d2 + o.br * d1,
            self.bi * d2 + o.bi * d1,
            d1 * d2,
        )

    def __neg__(self) -> "Coeff":
        return Coeff(-self.ar, -self.ai, -self.br, -self.bi, self.den)

    def __sub__(self, o: "Coeff") -> "Coeff":
        return self + (-o)

    def __mul__(self, o: "Coeff") -> "Coeff":
        a1r, a1i, b1r, b1i = self.ar, self.ai, self.br, self.bi
        a2r, a2i, b2r, b2i = o.ar, o.ai, o.br, o.bi
        # (a1 + b1 r)(a2 + b2 r) = (a1 a2 + 2 b1 b2) + (a1 b2 + b1 a2) r
        ar = a1r * a2r - a1i * a2i + 2 * (b1r * b2r - b1i * b2i)
        ai = a1r * a2i + a1i * a2r + 2 * (b1r * b2i + b1i * b2r)
        br = a1r * b2r - a1i * b2i + b1r * a2r - b1i * a2i
        bi = a1r * b2i + a1i * b2r + b1r * a2i + b1i * a2r
        return Coeff(ar, ai, br, bi, self.den * o.den)

    def conj(self) -> "Coeff":
        """Complex conjugation: i -> -i, sqrt2 fixed."""
        return Coeff(self.ar, -self.ai, self.br, -self.bi, self.den)

    def inv(self) -> "Coeff":
        if self.is_zero():
            raise ScalarZeroDivision("inverse of zero coefficient")
        # 1/(a + b r) = (a - b r)/(a^2 - 2 b^2), then a Gaussian inverse.
        ar, ai, br, bi = self.ar, self.ai, self.br, self.bi
        nr = ar * ar - ai * ai - 2 * (br * br - bi * bi)
        ni = 2 * ar * ai - 4 * br * bi
        # (a^2 - 2b^2) / den^2 ; its inverse is den^2 * conj / |.|^2
        norm = nr * nr + ni * ni
        d = self.den
        # result = (a - b r) * den * (nr - ni i) / norm   (all over den^2 cancels)
        cr, ci = nr, -ni
        rr = ar * cr - ai * ci
        ri = ar * ci + ai * cr
        sr = -(br * cr - bi * ci)
        si = -(br * ci + bi * cr)
        return Coeff(rr * d, ri * d, sr * d, si * d, norm)

    def __complex__(self) -> complex:
        d = self.den
        s2 = math.sqrt(2.0)
        return complex((self.ar + s2 * self.br) / d, (self.ai + s2 * self.bi) / d)

    def is_rational(self) -> bool:
        return not (self.ai or self.br or self.bi)

    def __repr__(self) -> str:
        return f"Coeff({_fmt_coeff(self)})"


ZERO_C = Coeff(0)
ONE_C = Coeff(1)

Poly = Dict[int, Coeff]


# ---------------------------------------------------------------- Laurent helpers


def _padd(p: Poly, q: Poly) -> Poly:
    out = dict(p)
    for e, c in q.items():
        if e in out:
            s = out[e] + c
            if s.is_zero():
                del out[e]
            else:
                out[e] = s
        else:
            out[e] = c
    return out


def _pneg(p: Poly) -> Poly:
    return {e: -c for e, c in p.items()}


def _pmul(p: Poly, q: Poly) -> Poly:
    if len(p) == 1 and len(q) == 1:
        (e1, c1), = p.items()
        (e2, c2), = q.items()
        return {e1 + e2: c1 * c2}
    out: Poly = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = e1 + e2
            if e in out:
                out[e] = out[e] + c1 * c2
            else:
                out[e] = c1 * c2
    return {e: c for e, c in out.items() if not c.is_zero()}


def _pscale(p: Poly, c: Coeff, shift: int = 0) -> Poly:
    if c.is_one():
        return {e + shift: v for e, v in p.items()}
    return {e + shift: v * c for e, v in p.items()}


def _pdivmod(a: Poly, b: Poly) -> Tuple[Poly, Poly]:
    """Division of honest polynomials (nonnegative exponents)."""
    db = max(b)
    lead_inv = b[db].inv()
    q: Poly = {}
    r = dict(a)
    while r and max(r) >= db:
        dr = max(r)
        c = r[dr] * lead_inv
        q[dr - db] = c
        r = _padd(r, _pscale(_pneg(b), c, dr - db))
    return q, r


def _pmonic(p: Poly) -> Poly:
    return _pscale(p, p[max(p)].inv())


def _pgcd(a: Poly, b: Poly) -> Poly:
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, r
    return _pmonic(a)


def _key(p: Poly) -> tuple:
    return tuple(sorted((e, c.key()) for e, c in p.items()))


# ---------------------------------------------------------------- Scalar

_ONE_POLY: Poly = {0: ONE_C}


class Scalar:
    """Element of Q(i, sqrt2)(lam) in canonical reduced form. Immutable."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly | None = None, _canonical: bool = False):
        if den is None:
            den = _ONE_POLY
            _canonical = True
        if not _canonical:
            num, den = _canonicalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    # construction helpers
    @classmethod
    def zero(cls) -> "Scalar":
        return _ZERO

    @classmethod
    def one(cls) -> "Scalar":
        return _ONE

    @classmethod
    def const(cls, c) -> "Scalar":
        if isinstance(c, Scalar):
            return c
        if not isinstance(c, Coeff):
            c = Coeff.rational(c)
        return cls({0: c} if not c.is_zero() else {})

    @classmethod
    def monomial(cls, c, k: int) -> "Scalar":
        if not isinstance(c, Coeff):
            c = Coeff.rational(c)
        return cls({k: c} if not c.is_zero() else {})

    @classmethod
    def laurent(cls, terms: Dict[int, Union[Coeff, int, Fraction]]) -> "Scalar":
        p = {}
        for k, c in terms.items():
            c = c if isinstance(c, Coeff) else Coeff.rational(c)
            if not c.is_zero():
                p[k] = c
        return cls(p)

    @classmethod
    def i(cls) -> "Scalar":
        return cls({0: Coeff(0, 1)})

    @classmethod
    def sqrt2(cls) -> "Scalar":
        return cls({0: Coeff(0, 0, 1)})

    # predicates
    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_one(self) -> bool:
        return self.is_laurent() and len(self.num) == 1 and 0 in self.num and self.num[0].is_one()

    def is_laurent(self) -> bool:
        return len(self.den) == 1

    def is_constant(self) -> bool:
        return self.is_laurent() and (not self.num or (len(self.num) == 1 and 0 in self.num))

    def constant(self) -> Coeff:
        if not self.num:
            return ZERO_C
        if not self.is_constant():
            raise ValueError("scalar depends on lam")
        return self.num[0]

    def key(self) -> tuple:
        return (_key(self.num), _key(self.den))

    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return self.key() == other.key()
        if isinstance(other, (int, Fraction, Coeff)):
            return self == Scalar.const(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    # arithmetic
    def __add__(self, o) -> "Scalar":
        o = as_scalar(o)
        if not o.num:
            return self
        if not self.num:
            return o
        if len(self.den) == 1 and len(o.den) == 1:
            return Scalar(_padd(self.num, o.num))
        num = _padd(_pmul(self.num, o.den), _pmul(o.num, self.den))
        return Scalar(num, _pmul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar(_pneg(self.num), self.den, _canonical=True)

    def __sub__(self, o) -> "Scalar":
        return self + (-as_scalar(o))

    def __rsub__(self, o) -> "Scalar":
        return as_scalar(o) - self

    def __mul__(self, o) -> "Scalar":
        o = as_scalar(o)
        if not self.num or not o.num:
            return _ZERO
        if len(self.den) == 1 and len(o.den) == 1:
            return Scalar(_pmul(self.num, o.num))
        return Scalar(_pmul(self.num, o.num), _pmul(self.den, o.den))

    __rmul__ = __mul__

    def inv(self) -> "Scalar":
        if not self.num:
            raise ScalarZeroDivision("inverse of the zero scalar")
        return Scalar(self.den, self.num)

    def __truediv__(self, o) -> "Scalar":
        return self * as_scalar(o).inv()

    def __rtruediv__(self, o) -> "Scalar":
        return as_scalar(o) * self.inv()

    def __pow__(self, k: int) -> "Scalar":
        if k < 0:
            return self.inv() ** (-k)
        out = _ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "Scalar":
        """i -> -i, sqrt2 -> sqrt2, lam -> 1/lam."""
        num = {-e: c.conj() for e, c in self.num.items()}
        den = {-e: c.conj() for e, c in self.den.items()}
        return Scalar(num, den)

    def subs_one(self) -> "Scalar":
        """Specialise lam -> 1."""
        n = ZERO_C
        for c in self.num.values():
            n = n + c
        d = ZERO_C
        for c in self.den.values():
            d = d + c
        if d.is_zero():
            raise ScalarPoleError("pole at lam = 1")
        return Scalar.const(n * d.inv())

    def eval(self, q) -> complex:
        """Numeric value at lam = exp(2*pi*i*q)."""
        z = cmath.exp(2j * math.pi * float(Fraction(q)))
        return self.eval_at(z)

    def eval_at(self, z: complex) -> complex:
        n = sum(complex(c) * z**e for e, c in self.num.items())
        d = sum(complex(c) * z**e for e, c in self.den.items())
        if abs(d) < 1e-12:
            raise ScalarPoleError(f"denominator vanishes at lam = {z}")
        return n / d

    def __complex__(self) -> complex:
        if not self.is_constant():
            raise TypeError("scalar depends on lam; use eval()")
        return complex(self.constant())

    def __str__(self) -> str:
        return format_scalar(self)

    def __repr__(self) -> str:
        return f"Scalar({format_scalar(self)!r})"


def _canonicalize(num: Poly, den: Poly) -> Tuple[Poly, Poly]:
    num = {e: c for e, c in num.items() if not c.is_zero()}
    den = {e: c for e, c in den.items() if not c.is_zero()}
    if not den:
        raise ScalarZeroDivision("zero denominator")
    if not num:
        return {}, _ONE_POLY
    md = min(den)
    if len(den) == 1:
        c = den[md].inv()
        return _pscale(num, c, -md), _ONE_POLY
    den = _pscale(den, ONE_C, -md)
    num = _pscale(num, ONE_C, -md)
    mn = min(num)
    num_poly = _pscale(num, ONE_C, -mn)
    g = _pgcd(dict(den), dict(num_poly))
    if len(g) > 1:
        num_poly, r1 = _pdivmod(num_poly, g)
        den, r2 = _pdivmod(den, g)
        assert not r1 and not r2
    c = den[0].inv()
    num = _pscale(num_poly, c, mn)
    den = _pscale(den, c)
    if len(den) == 1:
        den = _ONE_POLY
    return num, den


_ZERO = Scalar({}, _ONE_POLY, _canonical=True)
_ONE = Scalar({0: ONE_C}, _ONE_POLY, _canonical=True)


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction, Coeff)):
        return Scalar.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")


def lam() -> Scalar:
    return Scalar.monomial(1, 1)


def lam_pow(k: int) -> Scalar:
    if k == 0:
        return _ONE
    return Scalar({k: ONE_C}, _ONE_POLY, _canonical=True)


# ---------------------------------------------------------------- text form


def _fmt_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_coeff(c: Coeff) -> str:
    ar, ai, br, bi = c.parts()
    if not (ai or br or bi):
        return f"({_fmt_rat(ar)})"
    sign = "-" if bi < 0 else "+"
    return f"(({_fmt_rat(ar)})+({_fmt_rat(ai)})i+({_fmt_rat(br)}{sign}{_fmt_rat(abs(bi))}i)r2)"


def _fmt_poly(p: Poly) -> str:
    if not p:
        return "0"
    return "+".join(f"{_fmt_coeff(p[e])}*L^{e}" for e in sorted(p))


def format_scalar(x: Scalar) -> str:
    if x.is_laurent():
        if not x.num:
            return "0"
        if x.is_constant() and x.num[0].is_rational():
            return _fmt_rat(x.num[0].parts()[0])
        return _fmt_poly(x.num)
    return f"[{_fmt_poly(x.num)}]/[{_fmt_poly(x.den)}]"


_RAT = r"-?\d+(?:/\d+)?"
_RE_RAT = re.compile(_RAT)
_RE_FULL = re.compile(
    r"\(\((" + _RAT + r")\)\+\((" + _RAT + r")\)i\+\((" + _RAT + r")([+-])(\d+(?:/\d+)?)i\)r2\)"
)
_RE_SIMPLE = re.compile(r"\((" + _RAT + r")\)")
_RE_EXP = re.compile(r"\*L\^(-?\d+)")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise ScalarParseError(self.text, self.pos, msg)

    def match(self, rx):
        m = rx.match(self.text, self.pos)
        if m:
            self.pos = m.end()
        return m

    def coeff(self) -> Coeff:
        m = self.match(_RE_FULL)
        if m:
            ar, ai, br, sign, bi = m.groups()
            biv = Fraction(bi) * (-1 if sign == "-" else 1)
            return Coeff.from_parts(Fraction(ar), Fraction(ai), Fraction(br), biv)
        m = self.match(_RE_SIMPLE)
        if m:
            return Coeff.rational(Fraction(m.group(1)))
        self.error("expected coefficient")

    def poly(self) -> Poly:
        t = self.text
        if t.startswith("0", self.pos) and (self.pos + 1 == len(t) or t[self.pos + 1] in "]"):
            self.pos += 1
            return {}
        if self.pos < len(t) and t[self.pos] != "(":
            m = self.match(_RE_RAT)
            if not m:
                self.error("expected rational or term")
            q = Fraction(m.group(0))
            return {0: Coeff.rational(q)} if q else {}
        out: Poly = {}
        while True:
            c = self.coeff()
            m = self.match(_RE_EXP)
            if not m:
                self.error("expected '*L^<int>'")
            out = _padd(out, {int(m.group(1)): c})
            if self.pos < len(t) and t[self.pos] == "+":
                self.pos += 1
                continue
            return out

    def scalar(self) -> Scalar:
        t = self.text
        if t.startswith("[", self.pos):
            self.pos += 1
            num = self.poly()
            if not t.startswith("]/[", self.pos):
                self.error("expected ']/['")
            self.pos += 3
            den = self.poly()
            if not t.startswith("]", self.pos):
                self.error("expected ']'")
            self.pos += 1
            if not den:
                raise ScalarZeroDivision("zero denominator in scalar text")
            res = Scalar(num, den)
        else:
            res = Scalar(self.poly())
        if self.pos != len(t):
            self.error("trailing characters")
        return res


def parse_scalar(text: str) -> Scalar:
    """Parse the token grammar of :func:`format_scalar` (whitespace ignored)."""
    return _Parser("".join(str(text).split())).scalar()


def sum_scalars(xs: Iterable[Scalar]) -> Scalar:
    out = _ZERO
    for x in xs:
        out = out + x
    return out
