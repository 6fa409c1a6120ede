"""Plain SVG rendering of a real line arrangement in the plane."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np
from scipy.spatial import HalfspaceIntersection

from .arrangement import Arrangement
from .chambers import Chamber, bounded_chambers
from .lattice import Lattice, build_lattice

PALETTE = ("#e8f0fb", "#fbeee8", "#eefbe8", "#f6e8fb", "#fbf8e8", "#e8fbf8")


def _view_box(lat: Lattice) -> tuple[np.ndarray, np.ndarray]:
    verts = np.array([f.point.real for f in lat.vertices()]) if lat.vertices() else np.zeros((1, 2))
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    pad = 0.25 * float(np.max(hi - lo)) + 1.0
    return lo - pad, hi + pad


def _clip_line(a, c, lo, hi):
    """Endpoints of {a.x + c = 0} inside the box [lo, hi], or None."""
    pts = []
    for k in range(2):
        j = 1 - k
        if abs(a[j]) < 1e-15:
            continue
        for xk in (lo[k], hi[k]):
            xj = -(c + a[k] * xk) / a[j]
            if lo[j] - 1e-12 <= xj <= hi[j] + 1e-12:
                p = np.zeros(2)
                p[k], p[j] = xk, xj
                pts.append(p)
    if len(pts) < 2:
        return None
    pts.sort(key=lambda p: (p[0], p[1]))
    return pts[0], pts[-1]


def chamber_polygon(arr: Arrangement, chamber: Chamber) -> np.ndarray:
    """Vertices of a bounded chamber in counter-clockwise order."""
    A, c = arr.A.real, arr.c.real
    s = np.asarray(chamber.signs, dtype=float)
    # halfspaces in scipy form: H x + b <= 0  <=>  -s (a x + c) <= 0
    halfspaces = np.hstack([-(s[:, None] * A), -(s * c)[:, None]])
    pts = HalfspaceIntersection(halfspaces, np.asarray(chamber.center, dtype=float)).intersections
    mid = pts.mean(axis=0)
    order = np.argsort(np.arctan2(pts[:, 1] - mid[1], pts[:, 0] - mid[0]))
    return pts[order]


def render_svg(arr: Arrangement, critical_points=(), lat: Lattice | None = None,
               size: int = 480, title: str | None = None) -> str:
    """Lines, shaded bounded chambers and critical points (their real parts) as an SVG string."""
    if arr.ambient_dim != 2 or not arr.is_real:
        raise ValueError("SVG output is only defined for real arrangements in the plane")
    lat = lat or build_lattice(arr)
    lo, hi = _view_box(lat)
    span = float(np.max(hi - lo))

    def px(p):
        x = (p[0] - lo[0]) / span * size
        y = size - (p[1] - lo[1]) / span * size
        return x, y

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<rect width="{size}" height="{size}" fill="white"/>']
    if title:
        out.append(f"<title>{escape(title)}</title>")
    if lat.vertices():
        for k, ch in enumerate(bounded_chambers(arr, lat)):
            poly = " ".join("%.2f,%.2f" % px(p) for p in chamber_polygon(arr, ch))
            out.append(f'<polygon class="chamber" points="{poly}" fill="{PALETTE[k % len(PALETTE)]}" '
                       f'stroke="none"><title>{ch.tag}</title></polygon>')
    for i, h in enumerate(arr.hyperplanes):
        seg = _clip_line(h.linear_part.real, float(np.real(h.offset)), lo, hi)
        if seg is None:
            continue
        (x1, y1), (x2, y2) = px(seg[0]), px(seg[1])
        out.append(f'<line class="hyperplane" x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                   f'stroke="black" stroke-width="1.5"><title>H{i + 1}</title></line>')
    for p in critical_points:
        z = getattr(p, "location", p)
        x, y = px(np.real(z))
        out.append(f'<circle class="critical" cx="{x:.2f}" cy="{y:.2f}" r="4" fill="#c0392b"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
