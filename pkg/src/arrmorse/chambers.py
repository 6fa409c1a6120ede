"""Bounded chambers of a real arrangement, found through their sign vectors.

Candidate sign vectors come from a grid over the vertex bounding box and
from small spheres around every vertex (every bounded chamber of an essential
arrangement has a vertex on its closure).  Each candidate is then checked for
boundedness with linear programs on its recession cone.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .arrangement import Arrangement
from .lattice import Lattice, build_lattice


@dataclass(frozen=True)
class Chamber:
    signs: tuple  # +1/-1 per hyperplane
    center: np.ndarray  # Chebyshev center, real
    radius: float

    @property
    def tag(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)


def _real_data(arr: Arrangement) -> tuple[np.ndarray, np.ndarray]:
    if not arr.is_real:
        raise ValueError("chamber enumeration needs real hyperplane data")
    return arr.A.real.copy(), arr.c.real.copy()


def _sign_vectors(A, c, points) -> set:
    vals = points @ A.T + c
    ok = np.all(np.abs(vals) > 1e-12, axis=1)
    return {tuple(int(s) for s in row) for row in np.sign(vals[ok])}


def _directions(n: int, A: np.ndarray, rng) -> np.ndarray:
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        # bisectors between consecutive line directions through a vertex, plus a fine ring
        ang = np.arctan2(-A[:, 0], A[:, 1]) % np.pi
        ang = np.sort(np.concatenate([ang, ang + np.pi]))
        nxt = np.roll(ang, -1)
        nxt[-1] += 2 * np.pi
        mids = (ang + nxt) / 2
        ring = np.linspace(0, 2 * np.pi, 721)[:-1]
        th = np.concatenate([mids, ring])
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    d = rng.standard_normal((4000, n))
    return d / np.linalg.norm(d, axis=1)[:, None]


def _is_bounded(A, c, signs) -> bool:
    n = A.shape[1]
    S = np.asarray(signs, dtype=float)[:, None] * A
    # recession cone {d : S d >= 0} must be {0}
    for k in range(n):
        for sgn in (1.0, -1.0):
            obj = np.zeros(n)
            obj[k] = -sgn
            res = linprog(obj, A_ub=-S, b_ub=np.zeros(len(S)), bounds=[(-1, 1)] * n, method="highs")
            if res.status == 0 and -res.fun > 1e-9:
                return False
    return True


def _chebyshev(A, c, signs) -> tuple[np.ndarray, float] | None:
    n = A.shape[1]
    S = np.asarray(signs, dtype=float)
    norms = np.linalg.norm(A, axis=1)
    # maximize r subject to s_i (a_i x + c_i) >= r |a_i|
    A_ub = np.hstack([-(S[:, None] * A), norms[:, None]])
    b_ub = S * c
    obj = np.zeros(n + 1)
    obj[-1] = -1.0
    res = linprog(obj, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * n + [(0, None)], method="highs")
    if res.status != 0 or res.x[-1] <= 1e-12:
        return None
    return res.x[:n], float(res.x[-1])


def bounded_chambers(arr: Arrangement, lat: Lattice | None = None, grid: int = 60, seed: int = 0) -> list[Chamber]:
    """All bounded chambers of an essential real arrangement."""
    A, c = _real_data(arr)
    n = arr.ambient_dim
    if lat is None:
        lat = build_lattice(arr)
    verts = np.array([f.point.real for f in lat.vertices()])
    if verts.size == 0:
        return []
    rng = np.random.default_rng(seed)
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    pad = 0.05 * (hi - lo) + 1e-3
    candidates: set = set()
    if n <= 3:
        axes = [np.linspace(lo[k] - pad[k], hi[k] + pad[k], grid) for k in range(n)]
        pts = np.array(list(itertools.product(*axes)))
        candidates |= _sign_vectors(A, c, pts)
    dirs = _directions(n, A, rng)
    for v in verts:
        dist = np.abs(A @ v + c) / np.linalg.norm(A, axis=1)
        far = dist[dist > 1e-9]
        r = 0.25 * far.min() if far.size else 1.0
        r = min(r, 0.25 * float(np.max(hi - lo) + 1.0))
        candidates |= _sign_vectors(A, c, v + r * dirs)
    out = []
    for signs in sorted(candidates):
        if not _is_bounded(A, c, signs):
            continue
        cheb = _chebyshev(A, c, signs)
        if cheb is None:
            continue
        out.append(Chamber(signs, cheb[0], cheb[1]))
    return out
