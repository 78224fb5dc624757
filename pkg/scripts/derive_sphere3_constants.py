"""Oracle for the unit round 3-sphere in a left-invariant frame.

Independent of the package: uses sympy on the Lie algebra su(2) with
[X_i, X_j] = 2 eps_ijk X_k, orthonormal for the round metric of radius 1.

Prints
  * d e^k as tensors in the convention a^b = (a(x)b - b(x)a)/2,
  * the same table in the complex frame f+-, e3,
  * Koszul Christoffel symbols, the Riemann tensor R_{ijkl}, Ricci, r,
  * the spinor constants D(const) and the Lichnerowicz residue r/4.

Run: python3 scripts/derive_sphere3_constants.py
"""

import itertools

import sympy as sp

n = 3
eps = sp.LeviCivita
C = {(i, j, k): 2 * eps(i, j, k) for i in range(n) for j in range(n) for k in range(n)}  # [X_i,X_j] = C_ijk X_k

# d e^k(X_i, X_j) = -e^k([X_i, X_j]).  With a^b = (a(x)b - b(x)a)/2 and v antisymmetric,
# sum_{i<j} v_ij e^i^e^j = sum_{i,j} (v_ij / 2) e^i (x) e^j.
de_real = {}
for k in range(n):
    t = {}
    for i, j in itertools.product(range(n), repeat=2):
        v = -C[(i, j, k)]
        if v:
            t[(i, j)] = t.get((i, j), 0) + sp.Rational(1, 2) * v
    de_real[k] = {key: sp.nsimplify(val) for key, val in t.items() if val}
print("real frame d e^k (tensor coefficients, keys (i,j) for e^i (x) e^j):")
for k in range(n):
    print(" ", k + 1, de_real[k])

# complex frame: f+ = (e1 + i e2)/sqrt2, f- = (e1 - i e2)/sqrt2, e3
s2 = sp.sqrt(2)
# e_real as combinations of (f+, f-, e3)
E = sp.Matrix([[1 / s2, 1 / s2, 0], [-sp.I / s2, sp.I / s2, 0], [0, 0, 1]])  # row a: e^a = sum_b E[a,b] w_b
F = sp.Matrix([[1 / s2, sp.I / s2, 0], [1 / s2, -sp.I / s2, 0], [0, 0, 1]])  # row b: w_b = sum_a F[b,a] e^a
assert sp.simplify(F * E) == sp.eye(3)
de_cplx = {}
for b in range(n):
    t = {}
    for a in range(n):
        for (i, j), v in de_real[a].items():
            for p, q in itertools.product(range(n), repeat=2):
                t[(p, q)] = t.get((p, q), 0) + F[b, a] * v * E[i, p] * E[j, q]
    de_cplx[b] = {key: sp.simplify(val) for key, val in t.items() if sp.simplify(val) != 0}
names = ["f+", "f-", "e3"]
print("complex frame d w_b (keys (p,q) for w_p (x) w_q):")
for b in range(n):
    print(" ", names[b], de_cplx[b])

# Koszul: for orthonormal left-invariant frame,
# g(nabla_X Y, Z) = 1/2 (g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y))
Gam = {}
for i, j, k in itertools.product(range(n), repeat=3):
    Gam[(i, j, k)] = sp.Rational(1, 2) * (C[(i, j, k)] - C[(j, k, i)] + C[(k, i, j)])  # nabla_{X_i} X_j = Gam_ijk X_k
print("nabla_{X_i} X_j = sum_k Gamma_ijk X_k, nonzero:", {k: v for k, v in Gam.items() if v})


def nabla(i, vec):
    out = [0] * n
    for j in range(n):
        for k in range(n):
            out[k] += vec[j] * Gam[(i, j, k)]
    return out


def unit(j):
    return [1 if a == j else 0 for a in range(n)]


# R(X_i, X_j) X_k = nabla_i nabla_j X_k - nabla_j nabla_i X_k - nabla_[X_i,X_j] X_k
Riem = {}
for i, j, k, l in itertools.product(range(n), repeat=4):
    a = nabla(i, nabla(j, unit(k)))
    b = nabla(j, nabla(i, unit(k)))
    c = [0] * n
    for m in range(n):
        if C[(i, j, m)]:
            c = [x + C[(i, j, m)] * y for x, y in zip(c, nabla(m, unit(k)))]
    Riem[(i, j, k, l)] = sp.simplify(a[l] - b[l] - c[l])  # g(R(X_i,X_j)X_k, X_l)
# sectional curvature convention: K(X_i,X_j) = g(R(X_i,X_j)X_j, X_i)
for i, j in [(0, 1), (0, 2), (1, 2)]:
    print(f"sectional K({i+1},{j+1}) =", Riem[(i, j, j, i)])
ok = all(Riem[(i, j, k, l)] == (1 if (i == l and j == k) else 0) - (1 if (i == k and j == l) else 0)
         for i, j, k, l in itertools.product(range(n), repeat=4))
print("R(X_i,X_j,X_k,X_l) = d_il d_jk - d_ik d_jl :", ok)
Ric = sp.Matrix(n, n, lambda j, k: sum(Riem[(i, j, k, i)] for i in range(n)))
print("Ricci =", Ric.tolist(), " r =", Ric.trace())

# spinors: c(e^k) = -i sigma_k; spin connection nabla_{X_i} psi = (1/4) sum Gam_ijk c(e^j) c(e^k) psi
sig = [sp.Matrix([[0, 1], [1, 0]]), sp.Matrix([[0, -sp.I], [sp.I, 0]]), sp.Matrix([[1, 0], [0, -1]])]
cl = [-sp.I * s for s in sig]
spin = [sp.zeros(2) for _ in range(n)]
for i in range(n):
    for j in range(n):
        for k in range(n):
            spin[i] += sp.Rational(1, 4) * Gam[(i, j, k)] * cl[j] * cl[k]
    spin[i] = sp.simplify(spin[i])
print("spin connection on X_i:", [m.tolist() for m in spin])
print("compare to (1/2) c(e^i):", all(sp.simplify(spin[i] - cl[i] / 2) == sp.zeros(2) for i in range(n)))
# D = sum_i c(e^i) nabla_{X_i}; on constant spinors D = sum_i c(e^i) spin[i]
Dconst = sp.simplify(sum((cl[i] * spin[i] for i in range(n)), sp.zeros(2)))
print("D on constant spinors =", Dconst.tolist())
print("Lichnerowicz residue r/4 =", Ric.trace() / 4)
