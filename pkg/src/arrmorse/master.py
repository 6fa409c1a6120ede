"""Gradient of log f_alpha, the critical equation of the master function, and Morse certification.

Complex vectors stand for real vectors of R^{2n} through z = x + iy; the real
inner product of two such vectors is Re(conj(u) . v).  With this convention
the gradient of |a . z + c| is (xi/|xi|) conj(a), so

    v_alpha(z) = grad f_alpha / f_alpha = conj(sum_i alpha_i a_i / xi_i(z)).

The holomorphic map z -> sum_i alpha_i a_i / xi_i(z) is the residual map that
Newton's method is run on; its zeros are the critical points of Phi_alpha.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .arrangement import Arrangement, Weights, checked_values
from .chambers import bounded_chambers
from .errors import BudgetExhausted, DegenerateCritical, NotCritical, PointOnArrangement
from .lattice import Lattice, build_lattice, euler_characteristic, is_central, is_essential

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LogGradient:
    value: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.value))


@dataclass(frozen=True, eq=False)
class CriticalPoint:
    location: np.ndarray
    residual: float
    hessian_signature: tuple
    min_abs_eigenvalue: float
    basin_tag: str | None = None
    eigenvalues: np.ndarray = field(default=None, repr=False)

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.location.imag) < 1e-9 * (1 + np.abs(self.location.real))))

    def to_dict(self) -> dict:
        return {
            "location": [[float(x.real), float(x.imag)] for x in self.location],
            "residual": self.residual,
            "hessian_signature": list(self.hessian_signature),
            "min_abs_eigenvalue": self.min_abs_eigenvalue,
            "basin_tag": self.basin_tag,
        }


@dataclass
class SolverConfig:
    max_iter: int = 100
    tol_factor: float = 1e-11
    dedup_factor: float = 1e-7
    degeneracy: float = 1e-8
    starts_per_missing: int = 64
    rounds: int = 50
    seed: int = 0
    use_chambers: bool = True
    deflation_power: float = 2.0
    deflation_shift: float = 1.0

    def tolerance(self, w: Weights) -> float:
        return self.tol_factor * (1.0 + float(np.linalg.norm(w.array)))


def residual_map(arr: Arrangement, w: Weights, z) -> np.ndarray:
    """sum_i alpha_i a_i / xi_i(z), the coefficient vector of omega_alpha at z."""
    vals = checked_values(arr, z)
    return (w.array / vals) @ arr.A


def residual_jacobian(arr: Arrangement, w: Weights, z) -> np.ndarray:
    """Holomorphic Jacobian -sum_i alpha_i a_i a_i^T / xi_i(z)^2."""
    vals = checked_values(arr, z)
    return -(arr.A.T * (w.array / vals**2)) @ arr.A


def log_gradient(arr: Arrangement, w: Weights, z) -> LogGradient:
    """v_alpha(z) = sum_j alpha_j u_j(z) / |xi_j(z)| with u_j = (xi_j/|xi_j|) conj(a_j)."""
    vals = checked_values(arr, z)
    mags = np.abs(vals)
    u = (vals / mags)[:, None] * arr.A.conj()
    return LogGradient((w.array / mags) @ u)


def critical_equation_residual(arr: Arrangement, w: Weights, z) -> float:
    return float(np.linalg.norm(residual_map(arr, w, z)))


def common_point(lat: Lattice) -> np.ndarray | None:
    """A point shared by all hyperplanes, if the arrangement is central."""
    for f in lat.flats:
        if len(f.generators) == lat.arrangement.m:
            return f.point
    return None


def euler_residual_lower_bound(arr: Arrangement, w: Weights, z, center) -> float:
    """|sum alpha| / ||z - p|| for a central arrangement through p.

    From sum_i alpha_i xi_i(z)/xi_i(z) = sum alpha and xi_i(z) = a_i . (z - p),
    the residual vector paired with z - p equals sum alpha, so by Cauchy-Schwarz
    its norm is at least this bound.
    """
    return abs(float(np.sum(w.array))) / float(np.linalg.norm(np.asarray(z) - center))


def real_hessian(arr: Arrangement, w: Weights, z) -> np.ndarray:
    """2n x 2n Hessian of log f_alpha in coordinates (x_1..x_n, y_1..y_n).

    log f_alpha is locally Re h with h'' equal to the residual Jacobian H, so
    the blocks are [[Re H, -Im H], [-Im H, -Re H]].
    """
    H = residual_jacobian(arr, w, z)
    return np.block([[H.real, -H.imag], [-H.imag, -H.real]])


def certify_morse(arr: Arrangement, w: Weights, z, tol: float | None = None,
                  config: SolverConfig | None = None, basin_tag: str | None = None) -> CriticalPoint:
    config = config or SolverConfig()
    tol = config.tolerance(w) if tol is None else tol
    z = np.asarray(z, dtype=complex)
    res = float(np.linalg.norm(log_gradient(arr, w, z).value))
    if not res < tol:
        raise NotCritical(f"residual {res:.3g} above tolerance {tol:.3g}")
    eig = np.linalg.eigvalsh(real_hessian(arr, w, z))
    mags = np.abs(eig)
    if mags.min() < config.degeneracy * mags.max():
        raise DegenerateCritical(float(mags.min()), float(mags.max()))
    sig = (int(np.sum(eig > 0)), int(np.sum(eig < 0)))
    return CriticalPoint(z, res, sig, float(mags.min()), basin_tag, eig)


def _rdot(u, v) -> float:
    return float(np.real(np.vdot(u, v)))


def _deflation(z, roots, power, shift) -> tuple[float, np.ndarray]:
    """Deflation factor m(z) = prod (||z - r||^-p + shift) and the real gradient of log m."""
    m = 1.0
    grad = np.zeros_like(z)
    for r in roots:
        d = z - r
        dist = max(float(np.linalg.norm(d)), 1e-60)
        inv = dist ** (-power)
        m *= inv + shift
        grad += (-power * dist ** (-power - 2) / (inv + shift)) * d
    return m, grad


def _log_cleared(arr: Arrangement, w: Weights, z) -> float:
    """log ||F(z) prod_i xi_i(z)||, the residual with denominators cleared."""
    vals = checked_values(arr, z)
    F = (w.array / vals) @ arr.A
    return float(np.log(np.linalg.norm(F)) + np.sum(np.log(np.abs(vals))))


def newton(arr: Arrangement, w: Weights, z0, config: SolverConfig, roots=(),
           ball: tuple | None = None) -> np.ndarray | None:
    """Damped, deflated Newton for the critical equation.

    The iteration runs on the polynomial Q = F * prod_i xi_i rather than on the
    rational residual map F: F decays like 1/|z| so plain Newton on F is
    drawn to infinity, whereas Q grows there.  The Q-step needs only F-data,
    step = dF / (1 - s . dF) with dF the F-Newton step and s = sum_i a_i / xi_i.
    Q also vanishes where two hyperplanes meet; runs heading onto H are
    abandoned.  Previously found roots are deflated with the factor
    prod_r (|z - r|^-p + shift).  Armijo backtracking is on log |Q| plus the
    log of the deflation factor, falling back to the undeflated merit.
    Returns the converged point or None.
    """
    tol = config.tolerance(w)
    z = np.asarray(z0, dtype=complex).copy()
    center, radius = ball if ball is not None else (z.copy(), 1.0 + float(np.linalg.norm(z)))
    history = []
    for it in range(config.max_iter):
        try:
            vals = checked_values(arr, z)
            F = (w.array / vals) @ arr.A
            dF = np.linalg.solve(residual_jacobian(arr, w, z), -F)
        except (PointOnArrangement, np.linalg.LinAlgError):
            return None
        # F is small near infinity too, so convergence also needs a small step
        if np.linalg.norm(F) < tol and np.linalg.norm(dF) < 1e-8 * (1.0 + np.linalg.norm(z)):
            return _polish(arr, w, z, tol)
        if arr.distance_to_union(z) < 1e-6 * radius or np.linalg.norm(z - center) > 1e3 * radius:
            return None
        history.append(_log_cleared(arr, w, z))
        # stalled: less than a halving of |Q| over the last 20 iterations
        if it >= 20 and history[-1] > history[-21] - np.log(2.0):
            return None
        s = (1.0 / vals) @ arr.A
        step = dF / (1.0 - s @ dF)
        if not np.all(np.isfinite(step)):
            return None
        m, glog = _deflation(z, roots, config.deflation_power, config.deflation_shift)
        denom = 1.0 - _rdot(glog, step)
        if denom > 0.1:
            step = step / denom
        trial = _armijo(arr, w, z, step, roots, config, deflate=True)
        if trial is None:
            trial = _armijo(arr, w, z, step, roots, config, deflate=False)
        if trial is None:
            return None
        z = trial
    return None


def _armijo(arr, w, z, step, roots, config, deflate: bool):
    def merit(y):
        val = _log_cleared(arr, w, y)
        if deflate:
            val += float(np.log(_deflation(y, roots, config.deflation_power, config.deflation_shift)[0]))
        return val

    m0 = merit(z)
    lam = 1.0
    for _ in range(40):
        trial = z + lam * step
        try:
            if merit(trial) <= m0 + np.log1p(-1e-4 * lam):
                return trial
        except PointOnArrangement:
            pass
        lam *= 0.5
    return None


def _polish(arr, w, z, tol) -> np.ndarray:
    best, best_norm = z, float(np.linalg.norm(residual_map(arr, w, z)))
    for _ in range(3):
        try:
            z = z + np.linalg.solve(residual_jacobian(arr, w, z), -residual_map(arr, w, z))
            norm = float(np.linalg.norm(residual_map(arr, w, z)))
        except (np.linalg.LinAlgError, PointOnArrangement):
            break
        if norm < best_norm:
            best, best_norm = z, norm
        else:
            break
    return best


def chamber_ascent(arr: Arrangement, w: Weights, x0, signs, config: SolverConfig) -> np.ndarray | None:
    """Newton ascent of the strictly concave log f_alpha inside one real chamber."""
    A, c = arr.A.real, arr.c.real
    alpha = w.array
    s = np.asarray(signs)
    x = np.asarray(x0, dtype=float).copy()

    def phi(y):
        return float(alpha @ np.log(np.abs(A @ y + c)))

    tol = config.tolerance(w)
    for _ in range(config.max_iter):
        vals = A @ x + c
        g = (alpha / vals) @ A
        if np.linalg.norm(g) < tol:
            break
        Hs = -(A.T * (alpha / vals**2)) @ A
        try:
            d = np.linalg.solve(Hs, -g)
        except np.linalg.LinAlgError:
            return None
        slope = float(g @ d)
        if slope <= 0:
            d, slope = g, float(g @ g)
        f0, t = phi(x), 1.0
        for _ in range(60):
            y = x + t * d
            vy = A @ y + c
            if np.all(np.sign(vy) == s) and phi(y) >= f0 + 1e-4 * t * slope:
                break
            t *= 0.5
        else:
            break
        x = y
    return x.astype(complex)


def _dedup_insert(found: list, z, config: SolverConfig) -> bool:
    for p in found:
        if np.linalg.norm(p.location - z) < config.dedup_factor * (1 + np.linalg.norm(p.location)):
            return False
    return True


def sampling_ball(lat: Lattice) -> tuple[np.ndarray, float]:
    pts = [f.point for f in lat.vertices()]
    if not pts:
        n = lat.arrangement.ambient_dim
        return np.zeros(n, dtype=complex), 2.0
    pts = np.array(pts)
    center = pts.mean(axis=0)
    radius = 2.0 * (float(np.max(np.linalg.norm(pts, axis=1))) + 1.0)
    return center, radius


def _ball_sample(rng, center, radius, count) -> np.ndarray:
    n = center.size
    g = rng.standard_normal((count, 2 * n))
    g /= np.linalg.norm(g, axis=1)[:, None]
    r = radius * rng.random(count) ** (1.0 / (2 * n))
    g *= r[:, None]
    return center + g[:, :n] + 1j * g[:, n:]


def find_critical_points(arr: Arrangement, w: Weights, config: SolverConfig | None = None,
                         lat: Lattice | None = None) -> list[CriticalPoint]:
    """Certified critical points of Phi_alpha on an essential arrangement.

    Real arrangements with positive weights are seeded from the bounded
    chambers; any shortfall against |chi(M)| is filled by random multistart
    Newton with deflation.  Raises BudgetExhausted if the count is not reached.
    """
    config = config or SolverConfig()
    w.check(arr)
    lat = lat or build_lattice(arr)
    if not is_essential(lat):
        raise ValueError("find_critical_points needs an essential arrangement; essentialize first")
    target = abs(euler_characteristic(lat))
    if target == 0:
        # central case: the Euler identity bounds the residual away from zero
        return []
    found: list[CriticalPoint] = []

    def accept(z, tag=None):
        if z is None or not _dedup_insert(found, z, config):
            return
        try:
            found.append(certify_morse(arr, w, z, config=config, basin_tag=tag))
        except (NotCritical, DegenerateCritical, PointOnArrangement) as exc:
            log.debug("rejected candidate %s: %s", z, exc)

    if config.use_chambers and arr.is_real and w.is_positive:
        for ch in bounded_chambers(arr, lat):
            x = chamber_ascent(arr, w, ch.center, ch.signs, config)
            if x is not None:
                accept(newton(arr, w, x, config), ch.tag)

    rng = np.random.default_rng(config.seed)
    center, radius = sampling_ball(lat)
    rounds = 0
    while len(found) < target and rounds < config.rounds:
        rounds += 1
        starts = _ball_sample(rng, center, radius, config.starts_per_missing * (target - len(found)))
        for z0 in starts:
            if len(found) >= target:
                break
            roots = [p.location for p in found]
            accept(newton(arr, w, z0, config, roots, (center, radius)))
    if len(found) < target:
        raise BudgetExhausted(found, target)
    return found
