"""Orlik-Solomon algebra in the nbc basis and the Aomoto complex (A, a ^ -).

The algebra is the exterior algebra on e_1..e_m modulo the ideal generated by
e_S for every S with empty intersection and by the boundaries of dependent
sets.  Each graded piece is computed as an explicit quotient over QQ, the nbc
monomials are checked to form a basis of it, and products are expressed in
that basis.  Everything structural is integral; only the weight vector a may
be inexact.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .arrangement import Arrangement, Weights
from .errors import LengthMismatch
from .lattice import Lattice, arrangement_rank, build_lattice, euler_characteristic, poincare_coefficients

log = logging.getLogger(__name__)

SVD_RANK_TOL = 1e-10


def wedge(s: tuple, t: tuple) -> tuple[int, tuple] | None:
    """e_s ^ e_t as (sign, sorted index tuple), or None if they share an index."""
    if set(s) & set(t):
        return None
    merged = s + t
    # sign of the sorting permutation = parity of inversions
    inv = sum(1 for i in range(len(merged)) for j in range(i + 1, len(merged)) if merged[i] > merged[j])
    return (-1 if inv % 2 else 1), tuple(sorted(merged))


def boundary(s: tuple) -> list[tuple[int, tuple]]:
    """d e_S = sum_k (-1)^k e_{S minus s_k}."""
    return [((-1) ** k, s[:k] + s[k + 1:]) for k in range(len(s))]


@dataclass(frozen=True, eq=False)
class OSAlgebra:
    m: int
    nbc_basis: tuple  # per degree, tuple of sorted index tuples
    circuits: tuple
    broken_circuits: tuple
    products: tuple  # products[k][j]: matrix of e_j ^ - from degree k to k+1 (integer lists)

    @property
    def dims(self) -> list[int]:
        return [len(b) for b in self.nbc_basis]

    @property
    def top_degree(self) -> int:
        return len(self.nbc_basis) - 1

    def euler(self) -> int:
        return sum((-1) ** k * b for k, b in enumerate(self.dims))


def _dependency(lat: Lattice, s) -> str:
    """'empty', 'independent' or 'dependent' for the hyperplane subset s."""
    flat = lat.meet(s)
    if flat is None:
        return "empty"
    return "independent" if flat.codim == len(s) else "dependent"


def _qq_matrix(rows, ncols) -> DomainMatrix:
    return DomainMatrix([[QQ(int(x)) if not isinstance(x, Fraction) else QQ(x.numerator, x.denominator) for x in r] for r in rows], (len(rows), ncols), QQ)


def build_os_algebra(arr: Arrangement, lat: Lattice | None = None) -> OSAlgebra:
    lat = lat or build_lattice(arr)
    m = arr.m
    rank = arrangement_rank(lat)
    status = {}
    for k in range(0, min(m, rank + 1) + 1):
        for s in itertools.combinations(range(m), k):
            status[s] = _dependency(lat, s) if k else "independent"

    def stat(s):
        return status.get(s) or _dependency(lat, s)

    circuits = []
    for k in range(1, min(m, rank + 1) + 1):
        for s in itertools.combinations(range(m), k):
            if stat(s) != "dependent":
                continue
            if all(stat(s[:i] + s[i + 1:]) == "independent" for i in range(k)):
                circuits.append(s)
    broken = sorted({c[1:] for c in circuits})
    nbc = []
    for k in range(rank + 1):
        level = [s for s in itertools.combinations(range(m), k)
                 if stat(s) == "independent" and not any(set(b) <= set(s) for b in broken)]
        nbc.append(tuple(level))
    while len(nbc) > 1 and not nbc[-1]:
        nbc.pop()

    expected = poincare_coefficients(lat)
    if [len(b) for b in nbc] != expected:
        raise RuntimeError(f"nbc dimensions {[len(b) for b in nbc]} disagree with lattice {expected}")

    reducers = [_reducer(lat, m, k, nbc[k], stat) for k in range(len(nbc))]
    products = []
    for k in range(len(nbc) - 1):
        per_j = []
        for j in range(m):
            cols = []
            for s in nbc[k]:
                vec = [0] * len(reducers[k + 1][0])
                pr = wedge((j,), s)
                if pr is not None:
                    sign, t = pr
                    vec[reducers[k + 1][0][t]] = sign
                cols.append(_reduce(reducers[k + 1], vec))
            # matrix rows = target basis, columns = source basis
            per_j.append([[cols[c][r] for c in range(len(cols))] for r in range(len(nbc[k + 1]))])
        products.append(tuple(per_j))
    return OSAlgebra(m, tuple(nbc), tuple(circuits), tuple(broken), tuple(products))


def _reducer(lat, m, k, nbc_k, stat):
    """Coordinates map E^k -> A^k in the nbc basis.

    Returns (monomial index, inverse of [nbc rows; ideal basis rows], count of nbc rows).
    """
    monos = list(itertools.combinations(range(m), k))
    index = {s: i for i, s in enumerate(monos)}
    N = len(monos)
    gens = []
    for s in monos:
        if stat(s) == "empty":
            row = [0] * N
            row[index[s]] = 1
            gens.append(row)
    for size in range(2, k + 2):
        for s in itertools.combinations(range(m), size):
            if stat(s) != "dependent":
                continue
            for t in itertools.combinations(range(m), k - size + 1):
                row = [0] * N
                for sign, face in boundary(s):
                    pr = wedge(t, face)
                    if pr is not None:
                        row[index[pr[1]]] += sign * pr[0]
                if any(row):
                    gens.append(row)
    nbc_rows = []
    for s in nbc_k:
        row = [0] * N
        row[index[s]] = 1
        nbc_rows.append(row)
    if gens:
        ideal, pivots = _qq_matrix(gens, N).rref()
        ideal_rows = [ideal.to_list()[i] for i in range(len(pivots))]
    else:
        ideal_rows = []
    full = nbc_rows + ideal_rows
    if len(full) != N:
        raise RuntimeError(f"degree {k}: {len(nbc_rows)} nbc + {len(ideal_rows)} relations != {N}")
    P = DomainMatrix([[QQ(x) if isinstance(x, int) else x for x in r] for r in full], (N, N), QQ)
    return index, P.inv(), len(nbc_rows)


def _reduce(reducer, vec) -> list:
    """nbc coordinates of an exterior-algebra vector (exact rationals)."""
    index, Pinv, nb = reducer
    v = DomainMatrix([[QQ(int(x)) for x in vec]], (1, len(vec)), QQ)
    coords = (v * Pinv).to_list()[0]
    return [Fraction(int(c.numerator), int(c.denominator)) for c in coords[:nb]]


@dataclass(frozen=True, eq=False)
class AomotoComplex:
    weight_class: tuple
    boundary_matrices: tuple  # d_k : A^k -> A^{k+1}, Fraction lists or float arrays
    cohomology_ranks: tuple
    exact: bool

    def euler(self) -> int:
        return sum((-1) ** k * r for k, r in enumerate(self.cohomology_ranks))


def _weight_entries(a) -> tuple[tuple, bool]:
    if isinstance(a, Weights):
        return a.values, a.is_exact
    vals = []
    exact = True
    for x in a:
        if isinstance(x, (Fraction, int, np.integer)) and not isinstance(x, bool):
            vals.append(Fraction(int(x)) if not isinstance(x, Fraction) else x)
        else:
            vals.append(float(x))
            exact = False
    return tuple(vals), exact


def _exact_rank(M: list) -> int:
    if not M or not M[0]:
        return 0
    rows = [[QQ(x.numerator, x.denominator) for x in r] for r in M]
    return DomainMatrix(rows, (len(rows), len(rows[0])), QQ).rank()


def _float_rank(M: np.ndarray) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > SVD_RANK_TOL * s[0]))


def aomoto_cohomology(os_alg: OSAlgebra, a) -> AomotoComplex:
    """Cohomology ranks of the complex A^0 -> A^1 -> ... with differential a ^ -."""
    vals, exact = _weight_entries(a)
    if len(vals) != os_alg.m:
        raise LengthMismatch(f"weight class of length {len(vals)} for {os_alg.m} hyperplanes")
    mats = []
    ranks = []
    for k, per_j in enumerate(os_alg.products):
        rows, cols = len(os_alg.nbc_basis[k + 1]), len(os_alg.nbc_basis[k])
        if exact:
            M = [[sum((vals[j] * per_j[j][r][c] for j in range(os_alg.m)), Fraction(0))
                  for c in range(cols)] for r in range(rows)]
            ranks.append(_exact_rank(M))
        else:
            M = sum(float(vals[j]) * np.array(per_j[j], dtype=float).reshape(rows, cols)
                    for j in range(os_alg.m))
            ranks.append(_float_rank(M))
        mats.append(M)
    dims = os_alg.dims
    coh = []
    for k, b in enumerate(dims):
        out_rank = ranks[k] if k < len(ranks) else 0
        in_rank = ranks[k - 1] if k >= 1 else 0
        coh.append(b - out_rank - in_rank)
    return AomotoComplex(tuple(vals), tuple(mats), tuple(coh), exact)


def differential_squares(cx: AomotoComplex) -> list:
    """Products d_{k+1} d_k, which must vanish."""
    out = []
    for d0, d1 in zip(cx.boundary_matrices, cx.boundary_matrices[1:]):
        if cx.exact:
            prod = [[sum((d1[r][i] * d0[i][c] for i in range(len(d0))), Fraction(0))
                     for c in range(len(d0[0]) if d0 else 0)] for r in range(len(d1))]
        else:
            prod = np.asarray(d1) @ np.asarray(d0)
        out.append(prod)
    return out


@dataclass(frozen=True)
class ResonanceVerdict:
    rank: int
    cohomology_ranks: tuple
    vanishing_below_rank: tuple  # booleans for degrees 0..rank-1
    top_rank: int
    chi: int

    @property
    def non_resonant(self) -> bool:
        return all(self.vanishing_below_rank)

    @property
    def top_matches_chi(self) -> bool:
        return self.top_rank == abs(self.chi)

    @property
    def verdict(self) -> str:
        return "non-resonant" if self.non_resonant else "resonant"

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "cohomology_ranks": list(self.cohomology_ranks),
            "vanishing_below_rank": list(self.vanishing_below_rank),
            "top_rank": self.top_rank,
            "chi": self.chi,
            "verdict": self.verdict,
            "top_rank_equals_abs_chi": self.top_matches_chi,
        }


def check_nonresonance(arr: Arrangement, lat: Lattice | None, w) -> ResonanceVerdict:
    """Aomoto cohomology at a = alpha must vanish below the rank; failures are reported, not raised."""
    lat = lat or build_lattice(arr)
    os_alg = build_os_algebra(arr, lat)
    cx = aomoto_cohomology(os_alg, w)
    rank = arrangement_rank(lat)
    ranks = list(cx.cohomology_ranks) + [0] * (rank + 1 - len(cx.cohomology_ranks))
    return ResonanceVerdict(
        rank=rank,
        cohomology_ranks=tuple(ranks),
        vanishing_below_rank=tuple(r == 0 for r in ranks[:rank]),
        top_rank=ranks[rank],
        chi=euler_characteristic(lat),
    )
