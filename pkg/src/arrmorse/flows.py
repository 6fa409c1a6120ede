"""Integral curves of the gradient-type fields on the complement.

Fields, all written as complex vectors (see master for the identification):

    w_alpha       v / |v|            unit-speed ascent of log f_alpha
    minus_w_alpha -v / |v|
    iota_alpha    i v                dual to Im omega_alpha, tangent to level sets
    y_alpha       iota / |iota|^2    advances arg Phi_alpha at unit speed

where v = grad f_alpha / f_alpha.  The integrator is an embedded Dormand-Prince
5(4) pair whose step is additionally capped so that one step never moves more
than a tenth of the distance to the nearest hyperplane.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .arrangement import Arrangement, Weights, checked_values, log_f_alpha
from .errors import NotRankOne, PointOnArrangement, StepUnderflow
from .lattice import Lattice, build_lattice, geometry_scale
from .master import log_gradient

log = logging.getLogger(__name__)

FIELDS = ("w_alpha", "minus_w_alpha", "iota_alpha", "y_alpha")
FIELD_ALIASES = {"w": "w_alpha", "-w": "minus_w_alpha", "minus_w": "minus_w_alpha",
                 "iota": "iota_alpha", "y": "y_alpha"}

# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


def iota_field(arr: Arrangement, w: Weights, z) -> np.ndarray:
    """iota_alpha(z) = i v_alpha(z); grad f / f = -i iota."""
    return 1j * log_gradient(arr, w, z).value


def field_value(name: str, arr: Arrangement, w: Weights, z) -> np.ndarray:
    v = log_gradient(arr, w, z).value
    if name == "w_alpha":
        return v / np.linalg.norm(v)
    if name == "minus_w_alpha":
        return -v / np.linalg.norm(v)
    if name == "iota_alpha":
        return 1j * v
    if name == "y_alpha":
        return 1j * v / float(np.vdot(v, v).real)
    raise ValueError(f"unknown field {name!r}; expected one of {FIELDS}")


def arg_increment(arr: Arrangement, w: Weights, z_old, z_new) -> float:
    """Change of sum alpha_i arg xi_i between two nearby points (each factor turns by less than pi)."""
    ratio = checked_values(arr, z_new) / checked_values(arr, z_old)
    return float(np.dot(w.array, np.angle(ratio)))


@dataclass(frozen=True)
class WeightRank:
    rank: int
    period: float | None
    warning: str | None = None


def weight_rank(w: Weights) -> WeightRank:
    """Dimension of the Q-span of the weights and, in rank one, the period 2 pi g.

    With rationals alpha_i = p_i / q over a common denominator, g = gcd(p) / q
    generates the group sum alpha_i Z.  Floats carry no provenance, so any
    float entry makes the rank the number of weights (one if there is a single
    weight).
    """
    vals = [v for v in w.values if v != 0]
    if not vals:
        return WeightRank(0, None)
    if all(isinstance(v, Fraction) for v in vals):
        q = math.lcm(*(v.denominator for v in vals))
        g = math.gcd(*(int(v * q) for v in vals))
        return WeightRank(1, 2 * math.pi * g / q)
    if len(w.values) == 1:
        return WeightRank(1, 2 * math.pi * abs(float(vals[0])))
    msg = "float weights: rational dependence unknown, rank taken as the number of weights"
    log.warning(msg)
    return WeightRank(len(w.values), None, msg)


@dataclass
class Guards:
    """Stopping rules; guard hits are recorded as events, not raised."""

    level: float | None = None  # stop when log f_alpha reaches this value
    min_distance: float = 1e-12
    max_norm: float = 1e8
    max_steps: int = 200_000


@dataclass(frozen=True)
class Sample:
    t: float
    z: np.ndarray
    log_f: float
    arg: float  # continuously tracked sum alpha_i arg xi_i, relative to the start


@dataclass
class Trajectory:
    field_name: str
    samples: list = field(default_factory=list)
    events: list = field(default_factory=list)  # (time, kind)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def points(self) -> np.ndarray:
        return np.array([s.z for s in self.samples])

    @property
    def levels(self) -> np.ndarray:
        return np.array([s.log_f for s in self.samples])

    @property
    def args(self) -> np.ndarray:
        return np.array([s.arg for s in self.samples])

    @property
    def end(self) -> Sample:
        return self.samples[-1]

    def event_kinds(self) -> list:
        return [k for _, k in self.events]

    def to_dict(self) -> dict:
        return {
            "field": self.field_name,
            "samples": [
                {"t": s.t, "z": [[float(x.real), float(x.imag)] for x in s.z], "log_f": s.log_f, "arg": s.arg}
                for s in self.samples
            ],
            "events": [{"t": t, "kind": k} for t, k in self.events],
        }


def _rk_step(fun, z, h):
    """One Dormand-Prince step; returns (5th order value, error estimate)."""
    k = []
    for i in range(7):
        zi = z + h * sum((a * kj for a, kj in zip(_A[i], k)), np.zeros_like(z))
        k.append(fun(zi))
    K = np.array(k)
    z5 = z + h * (_B5 @ K)
    err = h * ((_B5 - _B4) @ K)
    return z5, err


def integrate(arr: Arrangement, w: Weights, field_name: str, z0, t_max: float,
              guards: Guards | None = None, atol: float = 1e-10, rtol: float = 1e-9,
              max_dist_fraction: float = 0.1) -> Trajectory:
    """Adaptive Runge-Kutta integration of one of the named fields from z0."""
    field_name = FIELD_ALIASES.get(field_name, field_name)
    if field_name not in FIELDS:
        raise ValueError(f"unknown field {field_name!r}")
    guards = guards or Guards()
    z = np.asarray(z0, dtype=complex).copy()

    def fun(y):
        return field_value(field_name, arr, w, y)

    lf = log_f_alpha(arr, w, z)
    traj = Trajectory(field_name, [Sample(0.0, z.copy(), lf, 0.0)])
    if guards.level is not None:
        rising = field_name == "w_alpha"
        falling = field_name == "minus_w_alpha"
        if (rising and lf >= guards.level) or (falling and lf <= guards.level):
            traj.events.append((0.0, "reached-level-set"))
            return traj
    t, arg = 0.0, 0.0
    h = None
    for _ in range(guards.max_steps):
        if t >= t_max:
            traj.events.append((t, "t-max"))
            return traj
        fz = fun(z)
        speed = float(np.linalg.norm(fz))
        dist = arr.distance_to_union(z)
        if dist < guards.min_distance or np.linalg.norm(z) > guards.max_norm:
            traj.events.append((t, "left-domain-guard"))
            return traj
        cap = max_dist_fraction * dist / speed if speed > 0 else t_max
        if h is None:
            h = min(cap, 0.01 * max(t_max, 1e-12))
        h = min(h, cap, t_max - t)
        while True:
            if h < 1e-14 * max(1.0, abs(t)):
                raise StepUnderflow(t, z)
            try:
                z_new, err = _rk_step(fun, z, h)
                checked_values(arr, z_new)
            except PointOnArrangement:
                h *= 0.25
                continue
            scale = atol + rtol * np.maximum(np.abs(z), np.abs(z_new))
            e = float(np.max(np.abs(err) / scale))
            if e <= 1.0:
                break
            h *= max(0.2, 0.9 * e ** -0.2)
        lf_new = log_f_alpha(arr, w, z_new)
        if guards.level is not None and _crossed(field_name, lf, lf_new, guards.level):
            hs = brentq(lambda s: log_f_alpha(arr, w, _rk_step(fun, z, s)[0]) - guards.level,
                        0.0, h, xtol=1e-15, rtol=1e-14)
            z_new = _rk_step(fun, z, hs)[0]
            arg += arg_increment(arr, w, z, z_new)
            t += hs
            traj.samples.append(Sample(t, z_new.copy(), log_f_alpha(arr, w, z_new), arg))
            traj.events.append((t, "reached-level-set"))
            return traj
        arg += arg_increment(arr, w, z, z_new)
        t = t + h if t_max - t - h > 1e-15 * max(1.0, t_max) else t_max
        z, lf = z_new, lf_new
        traj.samples.append(Sample(t, z.copy(), lf, arg))
        grow = 5.0 if e == 0 else min(5.0, 0.9 * e ** -0.2)
        h = h * grow
    traj.events.append((t, "max-steps"))
    return traj


def _crossed(name, old, new, level) -> bool:
    if name == "w_alpha":
        return old < level <= new
    if name == "minus_w_alpha":
        return old > level >= new
    return False


def step_halving_defect(arr: Arrangement, w: Weights, traj: Trajectory) -> float:
    """Max distance between each recorded step and the same step redone as two half steps."""
    name = traj.field_name

    def fun(y):
        return field_value(name, arr, w, y)

    worst = 0.0
    for a, b in zip(traj.samples, traj.samples[1:]):
        h = b.t - a.t
        if h <= 0:
            continue
        mid = _rk_step(fun, a.z, h / 2)[0]
        two = _rk_step(fun, mid, h / 2)[0]
        worst = max(worst, float(np.linalg.norm(two - b.z)))
    return worst


def project_to_level(arr: Arrangement, w: Weights, z, log_eps: float, tol: float = 1e-13,
                     max_iter: int = 100) -> np.ndarray:
    """Move z along the gradient line until log f_alpha = log_eps (Newton in the step length)."""
    z = np.asarray(z, dtype=complex).copy()
    for _ in range(max_iter):
        gap = log_eps - log_f_alpha(arr, w, z)
        if abs(gap) < tol:
            return z
        v = log_gradient(arr, w, z).value
        step = (gap / float(np.vdot(v, v).real)) * v
        # do not jump across a hyperplane
        limit = 0.5 * arr.distance_to_union(z)
        norm = float(np.linalg.norm(step))
        if norm > limit:
            step *= limit / norm
        z = z + step
    raise RuntimeError(f"level projection did not converge (gap {gap:.3g})")


def default_epsilon(arr: Arrangement, w: Weights, lat: Lattice | None = None,
                    critical_log_values=None, per_hyperplane: int = 200, seed: int = 0) -> float:
    """Level epsilon whose sublevel set {f < epsilon} stays within delta of the hyperplanes.

    delta = 0.05 * minimal inter-vertex gap; epsilon is the minimum of f_alpha
    over sampled points at distance delta from each hyperplane, lowered if
    needed below every known critical value.
    """
    lat = lat or build_lattice(arr)
    verts = [f.point for f in lat.vertices()]
    gaps = [float(np.linalg.norm(p - q)) for i, p in enumerate(verts) for q in verts[i + 1:]]
    delta = 0.05 * (min(gaps) if gaps else geometry_scale(lat))
    from .bounds import points_near_flat

    rng = np.random.default_rng(seed)
    scale = geometry_scale(lat)
    best = math.inf
    for f in lat.by_codim(1):
        for z in points_near_flat(f, arr, delta, per_hyperplane, rng, scale, reject_fraction=0.0):
            try:
                best = min(best, log_f_alpha(arr, w, z))
            except PointOnArrangement:
                continue
    if critical_log_values:
        best = min(best, min(critical_log_values) - math.log(2.0))
    return math.exp(best)


def level_set_points(arr: Arrangement, w: Weights, epsilon: float, count: int, seed: int = 0,
                     lat: Lattice | None = None) -> list:
    """Points of V = {f_alpha = epsilon} near the hyperplanes, spread over the vertex box."""
    from .bounds import points_near_flat

    lat = lat or build_lattice(arr)
    rng = np.random.default_rng(seed)
    scale = geometry_scale(lat)
    hyper = lat.by_codim(1)
    log_eps = math.log(epsilon)
    out = []
    attempts = 0
    while len(out) < count and attempts < 50 * count:
        attempts += 1
        f = hyper[attempts % len(hyper)]
        z = points_near_flat(f, arr, 0.5 * epsilon ** (1.0 / max(float(np.sum(w.array)), 1e-12)), 1, rng, scale)
        if not z:
            continue
        try:
            out.append(project_to_level(arr, w, z[0], log_eps))
        except (RuntimeError, PointOnArrangement):
            continue
    return out


@dataclass
class ReturnRecord:
    start: np.ndarray
    end: np.ndarray
    g_change: float
    fiber_error: float  # distance of g_change from aZ
    level_drift: float
    max_speed_error: float
    steps: int

    def to_dict(self) -> dict:
        return {
            "start": [[float(x.real), float(x.imag)] for x in self.start],
            "end": [[float(x.real), float(x.imag)] for x in self.end],
            "g_change": self.g_change,
            "fiber_error": self.fiber_error,
            "level_drift": self.level_drift,
            "max_speed_error": self.max_speed_error,
            "steps": self.steps,
        }


@dataclass
class FibrationReport:
    period: float
    epsilon: float
    records: list

    @property
    def max_fiber_error(self) -> float:
        return max(r.fiber_error for r in self.records)

    @property
    def max_period_error(self) -> float:
        return max(abs(r.g_change - self.period) for r in self.records)

    @property
    def max_level_drift(self) -> float:
        return max(r.level_drift for r in self.records)

    @property
    def max_speed_error(self) -> float:
        return max(r.max_speed_error for r in self.records)

    def passes(self, tol: float = 1e-6) -> bool:
        return max(self.max_period_error, self.max_level_drift, self.max_speed_error) < tol

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "epsilon": self.epsilon,
            "max_period_error": self.max_period_error,
            "max_fiber_error": self.max_fiber_error,
            "max_level_drift": self.max_level_drift,
            "max_speed_error": self.max_speed_error,
            "records": [r.to_dict() for r in self.records],
        }


def fibration_return_map(arr: Arrangement, w: Weights, epsilon: float, base_points,
                         atol: float = 1e-10, rtol: float = 1e-9) -> FibrationReport:
    """Flow each base point along y_alpha for one period and measure how it comes back."""
    wr = weight_rank(w)
    if wr.rank != 1:
        raise NotRankOne(f"weights have rank {wr.rank}; the argument map is not circle-valued")
    a = wr.period
    log_eps = math.log(epsilon)
    records = []
    for z0 in base_points:
        start = project_to_level(arr, w, z0, log_eps)
        traj = integrate(arr, w, "y_alpha", start, a, atol=atol, rtol=rtol)
        if traj.end.t < a:
            raise StepUnderflow(traj.end.t, traj.end.z, f"trajectory stopped early: {traj.event_kinds()}")
        t, g, lf = traj.times, traj.args, traj.levels
        dt = np.diff(t)
        speed_err = float(np.max(np.abs(np.diff(g) / dt - 1.0))) if dt.size else 0.0
        dg = float(g[-1])
        records.append(ReturnRecord(
            start=start,
            end=traj.end.z,
            g_change=dg,
            fiber_error=abs(dg - a * round(dg / a)),
            level_drift=float(np.max(np.abs(lf - log_eps))),
            max_speed_error=speed_err,
            steps=len(traj.samples) - 1,
        ))
    return FibrationReport(a, epsilon, records)
