"""Dense exact linear algebra over Q(i, sqrt2)(lam).

Matrices are lists of rows of :class:`Scalar`.  Sizes here are at most
n^3 x n^3 per degree block, so plain Gauss-Jordan elimination with
first-nonzero pivoting is enough.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

from .scalars import Scalar, ScalarZeroDivision

Matrix = List[List[Scalar]]

_Z = Scalar.zero()
_ONE = Scalar.one()


class SingularMatrixError(ScalarZeroDivision):
    pass


def zeros(r: int, c: int) -> Matrix:
    return [[_Z] * c for _ in range(r)]


def identity(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = _ONE
    return m


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner, cols = len(b), len(b[0]) if b else 0
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        acc = out[i]
        for k in range(inner):
            x = row[k]
            if x.is_zero():
                continue
            bk = b[k]
            for j in range(cols):
                y = bk[j]
                if not y.is_zero():
                    acc[j] = acc[j] + x * y
    return out


def matadd(a: Matrix, b: Matrix, sb: int = 1) -> Matrix:
    if sb == 1:
        return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(a: Matrix, c: Scalar) -> Matrix:
    return [[x * c for x in row] for row in a]


def conj_transpose(a: Matrix) -> Matrix:
    if not a:
        return []
    return [[a[i][j].conj() for i in range(len(a))] for j in range(len(a[0]))]


def is_zero(a: Matrix) -> bool:
    return all(x.is_zero() for row in a for x in row)


def rref(a: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(r) for r in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if not m[i][c].is_zero()), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inv()
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a: Matrix) -> int:
    return len(rref(a)[1])


def kernel(a: Matrix) -> Matrix:
    """Basis of the right kernel, returned as columns of an n x k matrix."""
    cols = len(a[0]) if a else 0
    red, piv = rref(a)
    free = [c for c in range(cols) if c not in piv]
    basis = []
    for f in free:
        v = [_Z] * cols
        v[f] = _ONE
        for r, pc in enumerate(piv):
            v[pc] = -red[r][f]
        basis.append(v)
    return [[basis[k][i] for k in range(len(basis))] for i in range(cols)]


def solve(a: Matrix, b: Matrix) -> Matrix:
    """Solve a X = b for square invertible a."""
    n = len(a)
    aug = [list(a[i]) + list(b[i]) for i in range(n)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [row[n:] for row in red[:n]]


def inverse(a: Matrix) -> Matrix:
    return solve(a, identity(len(a)))


def orthogonal_projector(k: Matrix) -> Matrix:
    """K (K^H K)^(-1) K^H for a column basis K (possibly empty)."""
    n = len(k)
    if n == 0 or not k[0]:
        return zeros(n, n)
    kh = conj_transpose(k)
    return matmul(matmul(k, inverse(matmul(kh, k))), kh)


def matvec(a: Matrix, v: Sequence[Scalar]) -> List[Scalar]:
    out = []
    for row in a:
        acc = _Z
        for x, y in zip(row, v):
            if not x.is_zero() and not y.is_zero():
                acc = acc + x * y
        out.append(acc)
    return out
