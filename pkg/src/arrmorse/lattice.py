"""Intersection lattice, Moebius function and Euler characteristic of the complement.

Flats are identified by their closed generator sets: the set of all hyperplanes
that contain the flat.  Two candidate intersections are the same flat exactly
when their closures coincide, so deduplication is a set comparison once the
closure test is right.  The closure test runs either in exact rational
arithmetic (all coefficients Gaussian rationals) or in floating point with an
absolute tolerance of 1e-9 on normalized functionals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
import scipy.linalg
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .arrangement import Arrangement, Hyperplane

FLAT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Flat:
    generators: frozenset
    point: np.ndarray  # particular point of the affine subspace
    basis: np.ndarray  # n x dim, orthonormal columns spanning the direction space
    codim: int
    moebius: int

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def distance(self, z) -> float:
        """Euclidean distance from z to the affine subspace."""
        d = np.asarray(z, dtype=complex) - self.point
        if self.dim:
            d = d - self.basis @ (self.basis.conj().T @ d)
        return float(np.linalg.norm(d))

    def contains_flat(self, other: "Flat") -> bool:
        """True if other's subspace lies inside this one (other is below-or-equal in the poset)."""
        return self.generators <= other.generators


@dataclass(frozen=True, eq=False)
class Lattice:
    arrangement: Arrangement
    flats: tuple  # ordered by codim, bottom first
    covers: tuple  # (i, j): flats[j] covers flats[i], codim difference 1
    exact: bool

    @cached_property
    def index(self) -> dict:
        return {f.generators: k for k, f in enumerate(self.flats)}

    @property
    def bottom(self) -> Flat:
        return self.flats[0]

    def by_codim(self, k: int) -> list:
        return [f for f in self.flats if f.codim == k]

    def vertices(self) -> list:
        """Flats of dimension zero."""
        n = self.arrangement.ambient_dim
        return [f for f in self.flats if f.codim == n]

    def meet(self, subset) -> Flat | None:
        """The flat cut out by the hyperplanes in subset, or None if the intersection is empty."""
        s = frozenset(subset)
        best = None
        for f in self.flats:
            if s <= f.generators and (best is None or f.codim < best.codim):
                best = f
        return best


def _qq(x: Fraction):
    return QQ(x.numerator, x.denominator)


class _RankOracle:
    """Ranks of (augmented) coefficient matrices of hyperplane subsets."""

    def __init__(self, arr: Arrangement, exact: bool):
        self.arr = arr
        self.exact = exact
        self._cache: dict = {}
        if exact:
            rows = []
            for h in arr.hyperplanes:
                lin, off = h.exact
                rows.append([(_qq(re), _qq(im)) for re, im in lin] + [(_qq(off[0]), _qq(off[1]))])
            self._rows = rows
        else:
            A = np.hstack([arr.A, arr.c[:, None]])
            self._rows = A / arr.row_norms[:, None]

    def ranks(self, subset: frozenset) -> tuple[int, int]:
        """(rank of linear parts, rank of augmented matrix) for the subset."""
        hit = self._cache.get(subset)
        if hit is not None:
            return hit
        idx = sorted(subset)
        n = self.arr.ambient_dim
        if not idx:
            out = (0, 0)
        elif self.exact:
            out = (self._exact_rank(idx, n), self._exact_rank(idx, n + 1))
        else:
            M = self._rows[idx]
            out = (_float_rank(M[:, :n]), _float_rank(M))
        self._cache[subset] = out
        return out

    def _exact_rank(self, idx, ncols) -> int:
        # complex rank = half the rank of the real 2x2-block form [[Re, -Im], [Im, Re]]
        top, bottom = [], []
        for i in idx:
            row = self._rows[i][:ncols]
            top.append([re for re, _ in row] + [-im for _, im in row])
            bottom.append([im for _, im in row] + [re for re, _ in row])
        M = DomainMatrix(top + bottom, (2 * len(idx), 2 * ncols), QQ)
        return M.rank() // 2


def _float_rank(M: np.ndarray) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > FLAT_TOL))


def _subspace(arr: Arrangement, gens) -> tuple[np.ndarray, np.ndarray]:
    n = arr.ambient_dim
    if not gens:
        return np.zeros(n, dtype=complex), np.eye(n, dtype=complex)
    idx = sorted(gens)
    A, c = arr.A[idx], arr.c[idx]
    point = np.linalg.lstsq(A, -c, rcond=None)[0]
    basis = scipy.linalg.null_space(A, rcond=FLAT_TOL)
    return point, basis.astype(complex)


def _closure(oracle: _RankOracle, gens: frozenset, m: int) -> frozenset:
    base = oracle.ranks(gens)[1]
    extra = [j for j in range(m) if j not in gens and oracle.ranks(gens | {j})[1] == base]
    return gens | frozenset(extra)


def build_lattice(arr: Arrangement, exact: bool | None = None) -> Lattice:
    """Enumerate all non-empty intersections by incremental closure.

    Codimension-k flats are intersected with single hyperplanes to get the
    codimension-(k+1) candidates.  exact=None picks exact arithmetic whenever
    every coefficient is a Gaussian rational.
    """
    if exact is None:
        exact = arr.is_exact
    elif exact and not arr.is_exact:
        raise ValueError("exact lattice requested for an arrangement with inexact data")
    oracle = _RankOracle(arr, exact)
    m = arr.m
    levels = [[frozenset()]]
    cover_pairs = []
    while levels[-1]:
        nxt: dict = {}
        for gens in levels[-1]:
            for j in range(m):
                if j in gens:
                    continue
                cand = gens | {j}
                lin, aug = oracle.ranks(cand)
                if lin != aug:
                    continue
                closed = _closure(oracle, cand, m)
                nxt.setdefault(closed, set()).add(gens)
        for closed, below in nxt.items():
            for g in below:
                cover_pairs.append((g, closed))
        levels.append(list(nxt))
    ordered = [g for level in levels for g in sorted(level, key=sorted)]
    moebius: dict = {}
    for gens in ordered:
        if not gens:
            moebius[gens] = 1
        else:
            moebius[gens] = -sum(mu for g, mu in moebius.items() if g < gens)
    flats = []
    for codim, level in enumerate(levels):
        for gens in sorted(level, key=sorted):
            point, basis = _subspace(arr, gens)
            flats.append(Flat(gens, point, basis, codim, moebius[gens]))
    pos = {f.generators: k for k, f in enumerate(flats)}
    covers = tuple((pos[a], pos[b]) for a, b in cover_pairs)
    return Lattice(arr, tuple(flats), covers, exact)


def euler_characteristic(lat: Lattice) -> int:
    """chi(M) as the sum of the Moebius function over all flats."""
    return sum(f.moebius for f in lat.flats)


def poincare_coefficients(lat: Lattice) -> list[int]:
    """Coefficients of sum_X |mu(X)| t^codim(X), lowest degree first."""
    top = max(f.codim for f in lat.flats)
    out = [0] * (top + 1)
    for f in lat.flats:
        out[f.codim] += abs(f.moebius)
    return out


def arrangement_rank(lat: Lattice) -> int:
    return max(f.codim for f in lat.flats)


def is_essential(lat: Lattice) -> bool:
    return arrangement_rank(lat) == lat.arrangement.ambient_dim


def is_central(lat: Lattice) -> bool:
    """True if all hyperplanes share a common point."""
    return any(len(f.generators) == lat.arrangement.m for f in lat.flats)


def geometry_scale(lat: Lattice) -> float:
    """Max pairwise distance between vertices, 1 if there are fewer than two."""
    pts = [f.point for f in lat.vertices()]
    best = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            best = max(best, float(np.linalg.norm(pts[i] - pts[j])))
    return best if best > 0 else 1.0


@dataclass(frozen=True, eq=False)
class EssentialReduction:
    """An essential arrangement in C^l together with the coordinate change.

    basis has orthonormal columns spanning the orthogonal complement of the
    common direction space; a point z of C^n maps to basis^H z in C^l.
    """

    arrangement: Arrangement
    basis: np.ndarray
    kernel: np.ndarray
    identity: bool

    def project(self, z) -> np.ndarray:
        return self.basis.conj().T @ np.asarray(z, dtype=complex)

    def lift(self, w) -> np.ndarray:
        return self.basis @ np.asarray(w, dtype=complex)


def essentialize(arr: Arrangement, rank: int | None = None) -> EssentialReduction:
    """Restrict every functional to the span of the conjugated linear parts."""
    n = arr.ambient_dim
    if rank is None:
        rank = arrangement_rank(build_lattice(arr))
    if rank == n:
        eye = np.eye(n, dtype=complex)
        return EssentialReduction(arr, eye, np.zeros((n, 0), dtype=complex), True)
    _, _, vh = np.linalg.svd(arr.A.real if arr.is_real else arr.A)
    vh = vh.astype(complex)
    basis = vh[:rank].conj().T
    kernel = vh[rank:].conj().T
    reduced = arr.A @ basis
    # snap round-off so real data stays real
    reduced = np.where(np.abs(reduced.imag) < 1e-14, reduced.real, reduced)
    reduced = np.where(np.abs(reduced) < 1e-14, 0.0, reduced)
    hs = tuple(Hyperplane(reduced[i], h.offset) for i, h in enumerate(arr.hyperplanes))
    return EssentialReduction(Arrangement(rank, hs), basis, kernel, False)
