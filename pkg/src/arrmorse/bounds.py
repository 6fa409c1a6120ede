"""Sampled certificates for the gradient inequalities near the arrangement.

Each certificate evaluates one ratio on points drawn at prescribed distances
("shells") from the flats, records the extreme value per shell and overall,
and applies a fixed pass rule.  The neighbourhood U of the analytic
statements is stood in for by these shells.  These are statistical
certificates: they can refute a bound, never prove one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .arrangement import Arrangement, Weights
from .errors import NonCentral, NonPositiveWeights, PointOnArrangement
from .lattice import Flat, Lattice, build_lattice, geometry_scale, is_central
from .master import log_gradient

DEFAULT_SHELLS = (0.1, 0.01, 0.001)
DEFAULT_PER_SHELL = 500
PASS_FLOOR = 1e-6
STABILITY_FACTOR = 0.1
APPROXIMATION_NOTE = (
    "statistical certificate: sampling shells around the flats stand in for the "
    "neighbourhood U; not a proof"
)


class SamplingError(RuntimeError):
    pass


@dataclass
class ShellSamples:
    shells: tuple
    points: np.ndarray  # (N, n) complex
    shell_index: np.ndarray  # (N,) index into shells
    flat_index: np.ndarray  # (N,) index into the lattice's flats

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class BoundCertificate:
    inequality_id: str
    sample_count: int
    estimated_constant: float
    worst_point: np.ndarray | None
    shell_distances: tuple
    per_shell: tuple
    passed: bool
    shell_stable: bool
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "inequality_id": self.inequality_id,
            "sample_count": self.sample_count,
            "estimated_constant": self.estimated_constant,
            "worst_point": None if self.worst_point is None
            else [[float(x.real), float(x.imag)] for x in self.worst_point],
            "shell_distances": list(self.shell_distances),
            "per_shell": list(self.per_shell),
            "passed": self.passed,
            "shell_stable": self.shell_stable,
            "notes": list(self.notes),
        }


def _normal_basis(flat: Flat, n: int) -> np.ndarray:
    if flat.dim == 0:
        return np.eye(n, dtype=complex)
    return scipy.linalg.null_space(flat.basis.conj().T).astype(complex)


def points_near_flat(flat: Flat, arr: Arrangement, distance: float, count: int, rng,
                     scale: float, center=None, reject_fraction: float = 0.1,
                     max_attempts: int | None = None) -> list:
    """Points at distance `distance` from the flat, based within `scale` of center.

    A point is rejected when it comes closer than reject_fraction * distance
    to any hyperplane, which keeps samples off H and away from deeper strata.
    """
    n = arr.ambient_dim
    normals = _normal_basis(flat, n)
    if center is None:
        center = flat.point
    base0 = flat.point
    if flat.dim:
        base0 = flat.point + flat.basis @ (flat.basis.conj().T @ (np.asarray(center) - flat.point))
    out = []
    attempts = 0
    max_attempts = max_attempts or 50 * count + 50
    while len(out) < count and attempts < max_attempts:
        attempts += 1
        base = base0
        if flat.dim:
            t = rng.uniform(-scale, scale, flat.dim) + 1j * rng.uniform(-scale, scale, flat.dim)
            base = base0 + flat.basis @ t
        g = rng.standard_normal(normals.shape[1]) + 1j * rng.standard_normal(normals.shape[1])
        offset = normals @ g
        z = base + distance * offset / np.linalg.norm(offset)
        if arr.distances(z).min() < reject_fraction * distance or arr.distances(z).min() == 0:
            continue
        out.append(z)
    return out


def sample_near_arrangement(arr: Arrangement, shells=DEFAULT_SHELLS, per_shell: int = DEFAULT_PER_SHELL,
                            seed: int = 0, lat: Lattice | None = None,
                            relative: bool = False) -> ShellSamples:
    """per_shell points around every proper flat for each shell distance.

    relative=True multiplies the shells by the geometry scale.
    """
    shells = tuple(float(s) for s in shells)
    if not shells or any(s <= 0 for s in shells) or any(b >= a for a, b in zip(shells, shells[1:])):
        raise ValueError("shells must be positive and strictly decreasing")
    lat = lat or build_lattice(arr)
    scale = geometry_scale(lat)
    if relative:
        shells = tuple(s * scale for s in shells)
    verts = lat.vertices()
    center = np.mean([f.point for f in verts], axis=0) if verts else np.zeros(arr.ambient_dim, dtype=complex)
    rng = np.random.default_rng(seed)
    pts, sh, fl = [], [], []
    for k, flat in enumerate(lat.flats):
        if flat.codim == 0:
            continue
        for si, d in enumerate(shells):
            got = points_near_flat(flat, arr, d, per_shell, rng, scale, center)
            if not got:
                raise SamplingError(f"no admissible points at distance {d:g} from flat {sorted(flat.generators)}")
            pts.extend(got)
            sh.extend([si] * len(got))
            fl.extend([k] * len(got))
    return ShellSamples(shells, np.array(pts), np.array(sh), np.array(fl))


def _summarize(ident, values, samples: ShellSamples, mode: str, floor: float, notes=None) -> BoundCertificate:
    values = np.asarray(values, dtype=float)
    pick = np.argmin if mode == "inf" else np.argmax
    k = int(pick(values))
    per_shell = []
    for si in range(len(samples.shells)):
        sel = values[samples.shell_index == si]
        per_shell.append(float(sel.min() if mode == "inf" else sel.max()) if sel.size else float("nan"))
    est = float(values[k])
    if mode == "inf":
        stable = all(v >= STABILITY_FACTOR * per_shell[0] for v in per_shell[1:])
        passed = bool(min(per_shell) > floor and stable)
    else:
        stable = bool(np.all(np.isfinite(per_shell)))
        passed = bool(np.isfinite(est) and stable)
    return BoundCertificate(ident, int(values.size), est, samples.points[k], samples.shells,
                            tuple(per_shell), passed, bool(stable), [APPROXIMATION_NOTE] + list(notes or []))


def grad_ratio(arr: Arrangement, w: Weights, z) -> float:
    """||v_alpha(z)|| / sum_i 1/|xi_i(z)|."""
    v = log_gradient(arr, w, z).value
    return float(np.linalg.norm(v) / np.sum(1.0 / np.abs(arr.values(z))))


def certify_grad_lower_bound(arr: Arrangement, w: Weights, samples: ShellSamples,
                             lat: Lattice | None = None) -> BoundCertificate:
    """Infimum of ||v_alpha|| / sum 1/|xi_i| on a central arrangement."""
    lat = lat or build_lattice(arr)
    if not is_central(lat):
        raise NonCentral("the gradient lower bound needs a common point of all hyperplanes")
    if not w.is_positive:
        raise NonPositiveWeights("weights must be positive")
    vals = [grad_ratio(arr, w, z) for z in samples.points]
    return _summarize("grad_lower_K", vals, samples, "inf", PASS_FLOOR * geometry_scale(lat))


def localizations(lat: Lattice) -> list:
    """(flat, central subarrangement of the hyperplanes through it) for every proper flat."""
    arr = lat.arrangement
    return [(f, arr.subarrangement(sorted(f.generators))) for f in lat.flats if f.codim > 0]


def beta_box(w: Weights, count: int, seed: int = 0, fraction: float = 0.1) -> list:
    """Random positive weights with max_i |alpha_i - beta_i| <= fraction * min_i alpha_i."""
    rng = np.random.default_rng(seed)
    r = fraction * float(np.min(w.array))
    return [Weights(list(w.array + rng.uniform(-r, r, len(w)))) for _ in range(count)]


def certify_neighborhood_bounds(arr: Arrangement, w_alpha: Weights, w_betas, samples: ShellSamples,
                                lat: Lattice | None = None) -> tuple[BoundCertificate, BoundCertificate]:
    """A: inf ||v_alpha||.  B: sup ||v_alpha - v_beta|| / (max|alpha - beta| ||v_beta||)."""
    lat = lat or build_lattice(arr)
    va = [log_gradient(arr, w_alpha, z).value for z in samples.points]
    a_vals = [float(np.linalg.norm(v)) for v in va]
    cert_a = _summarize("neighborhood_A", a_vals, samples, "inf", PASS_FLOOR * geometry_scale(lat))
    b_vals = np.full(len(samples), -np.inf)
    skipped = 0
    for wb in w_betas:
        gap = float(np.max(np.abs(w_alpha.array - wb.array)))
        if gap == 0:
            skipped += 1
            continue
        for k, z in enumerate(samples.points):
            vb = log_gradient(arr, wb, z).value
            ratio = float(np.linalg.norm(va[k] - vb) / (gap * np.linalg.norm(vb)))
            b_vals[k] = max(b_vals[k], ratio)
    notes = [f"{skipped} beta equal to alpha skipped"] if skipped else []
    if np.all(np.isneginf(b_vals)):
        cert_b = BoundCertificate("neighborhood_B", 0, 0.0, None, samples.shells,
                                  tuple(0.0 for _ in samples.shells), True, True,
                                  [APPROXIMATION_NOTE, "no admissible beta"] + notes)
    else:
        cert_b = _summarize("neighborhood_B", b_vals, samples, "sup", 0.0, notes)
    return cert_a, cert_b


def certify_pairing_bound(arr: Arrangement, w_alpha: Weights, w_beta: Weights, samples: ShellSamples,
                          lat: Lattice | None = None, regime: float = 0.1) -> BoundCertificate:
    """Infimum of <v_alpha, w_beta> with w_beta = v_beta / ||v_beta||."""
    lat = lat or build_lattice(arr)
    if not w_beta.is_positive:
        raise NonPositiveWeights("beta must be positive")
    vals = []
    for z in samples.points:
        va = log_gradient(arr, w_alpha, z).value
        vb = log_gradient(arr, w_beta, z).value
        vals.append(float(np.real(np.vdot(va, vb))) / float(np.linalg.norm(vb)))
    notes = []
    gap = float(np.max(np.abs(w_alpha.array - w_beta.array)))
    if gap > regime * float(np.min(w_alpha.array)):
        notes.append(f"out of regime: max|alpha - beta| = {gap:g} exceeds {regime:g} * min alpha")
    return _summarize("pairing_D", vals, samples, "inf", PASS_FLOOR * geometry_scale(lat), notes)
