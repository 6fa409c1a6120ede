"""Independent oracles: brute force, exact recursion, finite differences, polynomial roots."""

import itertools

import numpy as np
import sympy as sp

from arrmorse.arrangement import log_f_alpha
from arrmorse.master import log_gradient


def exact_rows(arr):
    return [([sp.nsimplify(complex(x).real) + sp.I * sp.nsimplify(complex(x).imag) for x in h.linear_part],
             sp.nsimplify(complex(h.offset).real) + sp.I * sp.nsimplify(complex(h.offset).imag))
            for h in arr.hyperplanes]


def whitney_oracle(arr):
    """Flats and Moebius values from all 2^m subsets: mu(X) = sum over S with closure X of (-1)^|S|."""
    rows = exact_rows(arr)
    m = len(rows)
    mu = {}
    for k in range(m + 1):
        for S in itertools.combinations(range(m), k):
            A = sp.Matrix([rows[i][0] for i in S]) if S else sp.zeros(0, arr.n)
            aug = sp.Matrix([rows[i][0] + [rows[i][1]] for i in S]) if S else sp.zeros(0, arr.n + 1)
            if S and A.rank() != aug.rank():
                continue  # empty intersection
            closure = frozenset(j for j in range(m)
                                if (aug.col_join(sp.Matrix([rows[j][0] + [rows[j][1]]])).rank() == aug.rank()))
            mu[closure] = mu.get(closure, 0) + (-1) ** k
    return mu


def deletion_restriction_chi(rows, n):
    """chi(A) = chi(A') - chi(A'') on exact data, recursing down to the empty arrangement."""
    if not rows:
        return 1
    *rest, (a, c) = rows
    A = sp.Matrix([a])
    N = A.nullspace()
    # particular point on the last hyperplane
    k = next(i for i, x in enumerate(a) if x != 0)
    p = sp.zeros(n, 1)
    p[k] = -c / a[k]
    restricted = []
    for b, d in rest:
        b2 = [sp.simplify((sp.Matrix([b]) * v)[0]) for v in N]
        d2 = sp.simplify((sp.Matrix([b]) * p)[0] + d)
        if all(x == 0 for x in b2):
            continue  # parallel: no trace on the last hyperplane
        piv = next(x for x in b2 if x != 0)
        key = tuple(sp.simplify(x / piv) for x in b2 + [d2])
        if key not in {tuple(sp.simplify(x / next(y for y in r[0] if y != 0)) for x in r[0] + [r[1]])
                       for r in restricted}:
            restricted.append((b2, d2))
    return deletion_restriction_chi(rest, n) - deletion_restriction_chi(restricted, n - 1)


def fd_gradient(arr, w, z, h=1e-6):
    """Centered differences of log f in the real coordinates, packed as a complex vector."""
    n = arr.n
    g = np.zeros(n, dtype=complex)
    for k in range(n):
        e = np.zeros(n, dtype=complex)
        e[k] = h
        dx = (log_f_alpha(arr, w, z + e) - log_f_alpha(arr, w, z - e)) / (2 * h)
        dy = (log_f_alpha(arr, w, z + 1j * e) - log_f_alpha(arr, w, z - 1j * e)) / (2 * h)
        g[k] = dx + 1j * dy
    return g


def fd_hessian(arr, w, z, h=1e-4):
    n = arr.n
    dirs = [np.eye(n)[k].astype(complex) for k in range(n)] + [1j * np.eye(n)[k] for k in range(n)]

    def grad_real(y):
        g = fd_gradient(arr, w, y, 1e-6)
        return np.concatenate([g.real, g.imag])

    cols = [(grad_real(z + h * d) - grad_real(z - h * d)) / (2 * h) for d in dirs]
    H = np.array(cols).T
    return (H + H.T) / 2


def companion_roots(ps, alpha) -> np.ndarray:
    """Roots of sum_i alpha_i prod_{j != i} (z - p_j), via numpy's companion matrix."""
    poly = np.zeros(len(ps))
    for i in range(len(ps)):
        poly = poly + float(alpha[i]) * np.poly(np.delete(np.asarray(ps, dtype=float), i))
    return np.sort_complex(np.roots(poly))


def analytic_fd_hessian(arr, w, z, h=1e-5) -> np.ndarray:
    """Centered differences of the closed-form gradient in the 2n real coordinates."""
    n = arr.n
    dirs = [np.eye(n)[k].astype(complex) for k in range(n)] + [1j * np.eye(n)[k] for k in range(n)]

    def g(y):
        v = log_gradient(arr, w, y).value
        return np.concatenate([v.real, v.imag])

    H = np.array([(g(z + h * d) - g(z - h * d)) / (2 * h) for d in dirs]).T
    return (H + H.T) / 2
