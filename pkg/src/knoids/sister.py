"""Curve-level conjugate data: curvature/torsion exchange, the normal twist
along vertical boundary geodesics, the planar mirror curve with curvature
2H - alpha', and a loop audit based on the total-turning identity.

The twist is measured against the basic frame (the z-independent horizontal
lifts of the chart directions), with the positive sense equal to the
positive orientation of the base (clockwise in the chart) so that solved
sections with downward normal twist positively along their contour
verticals, traversed in the contour direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import hyperbolic as hyp
from .geodesics import CurveSample
from .solver import graph_interpolate
from .spaces import SpaceParams

__all__ = [
    "SisterRelations",
    "sister_curvature",
    "TwistProfile",
    "twist_along_vertical",
    "level_direction_profile",
    "mirror_curve",
    "gauss_bonnet_loop_check",
    "LoopCheck",
]

_FLAT_EPS = 1e-13


@dataclass(frozen=True)
class SisterRelations:
    """Exchange of normal curvature and torsion between conjugate curves."""

    h_mean: float

    def map(self, k, t):
        return -t + self.h_mean, k


def sister_curvature(H, k, t):
    """(k~, t~) = (-t + H, k)."""
    return -np.asarray(t, dtype=float) + H, np.asarray(k, dtype=float)


@dataclass
class TwistProfile:
    """Cumulative normal twist along a vertical geodesic.

    ``params``: arc length along the vertical (in its traversal direction);
    ``alpha``: unwrapped twist angle with alpha[0] = 0; ``alpha_rate``: its
    derivative on the same grid.
    """

    params: np.ndarray
    alpha: np.ndarray
    alpha_rate: np.ndarray
    base_point: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def length(self):
        return float(self.params[-1] - self.params[0])


def _circle_values(graph, center, radius, n_angles=720):
    th = np.linspace(0.0, 2.0 * math.pi, n_angles, endpoint=False)
    pts = np.column_stack([center[0] + radius * np.cos(th),
                           center[1] + radius * np.sin(th)])
    vals = graph_interpolate(graph, pts)
    return th, np.asarray(vals)


def level_direction_profile(graph, base_vertex, levels, radius=None, n_angles=720):
    """Chart angle of the level-set direction at a jump vertex, per level.

    For each height h, the level {u = h} leaves the vertex; its direction is
    located where u crosses h on a small chart circle around the vertex.
    Returns (levels_used, unwrapped chart angles).
    """
    mesh = graph.mesh
    base_vertex = np.asarray(base_vertex, dtype=float)
    if radius is None:
        d = np.hypot(mesh.points[:, 0] - base_vertex[0],
                     mesh.points[:, 1] - base_vertex[1])
        ring = np.sort(d[d > 1e-12])
        radius = 2.5 * float(ring[0])
    th, vals = _circle_values(graph, base_vertex, radius, n_angles)
    # close the circle so the wrap pair is considered, keep NaNs so crossings
    # are only taken between genuinely adjacent in-domain samples
    th = np.concatenate([th, [th[0] + 2.0 * math.pi]])
    vals = np.concatenate([vals, [vals[0]]])
    angles = []
    used = []
    prev = None
    for h in levels:
        diff = vals - h
        with np.errstate(invalid="ignore"):
            pair_ok = np.isfinite(diff[:-1]) & np.isfinite(diff[1:])
            sign_change = diff[:-1] * diff[1:] < 0
        idx = np.where(pair_ok & sign_change)[0]
        cross = []
        for i in idx:
            t0, t1 = th[i], th[i + 1]
            f0, f1 = diff[i], diff[i + 1]
            cross.append(t0 + (t1 - t0) * (-f0) / (f1 - f0))
        if len(cross) == 0:
            continue
        if prev is None:
            ang = cross[int(np.argmin([abs(c) for c in cross]))] if len(cross) > 1 else cross[0]
        else:
            wraps = [c + 2 * math.pi * round((prev - c) / (2 * math.pi)) for c in cross]
            ang = wraps[int(np.argmin([abs(w - prev) for w in wraps]))]
        prev = ang
        angles.append(ang)
        used.append(h)
    return np.asarray(used), np.unwrap(np.asarray(angles))


def twist_along_vertical(space, graph, arc, n_levels=96, trim=0.04, radius=None):
    """Twist profile of the section normal along a contour vertical.

    ``arc`` is a vertical ContourArc; the twist angle is the rotation of the
    level direction at the jump vertex, measured positively in the positive
    base orientation (clockwise chart angles), parametrized by arc length in
    the arc's own direction.
    """
    p0 = arc.points[0]
    p1 = arc.points[-1]
    base_vertex = p0[:2]
    z0, z1 = float(p0[2]), float(p1[2])
    dz = z1 - z0
    span = abs(dz)
    hs = z0 + dz * np.linspace(trim, 1.0 - trim, n_levels)
    used, chart_angles = level_direction_profile(graph, base_vertex, hs, radius)
    if len(used) < 5:
        raise ValueError("level sweep found too few crossings near the vertex")
    t = np.abs(used - z0)
    # clockwise = positive: negate the chart (ccw) angle
    alpha = -(chart_angles - chart_angles[0])
    # mild moving-average smoothing tames the facet noise of PL level lines
    if len(alpha) >= 9:
        kern = np.ones(5) / 5.0
        pad = np.concatenate([[alpha[0]] * 2, alpha, [alpha[-1]] * 2])
        sm = np.convolve(pad, kern, mode="valid")
        rate = np.gradient(sm, t)
    else:
        rate = np.gradient(alpha, t)
    return TwistProfile(params=t, alpha=alpha, alpha_rate=rate,
                        base_point=base_vertex,
                        meta={"z_range": (z0, z1), "levels": used})


def _plane_step_frames(kappa, P, T, k_arr, dt):
    """One RK4 step of the unit-speed Frenet system at curvature kappa<=0.

    Hyperboloid model for kappa<0 (scaled), plain plane for kappa=0.  The
    normal is the counterclockwise rotation of the tangent; positive
    curvature turns counterclockwise in the chart.
    """
    if kappa < -_FLAT_EPS:
        def rhs(state, kg):
            p, t = state
            n = hyp.normal_of(p, t)
            return t, kg * n + p
    else:
        def rhs(state, kg):
            p, t = state
            n = np.array([-t[1], t[0]])
            return t, kg * n
    k0, k_half, k1 = k_arr
    s1 = rhs(( P, T), k0)
    s2 = rhs((P + 0.5 * dt * s1[0], T + 0.5 * dt * s1[1]), k_half)
    s3 = rhs((P + 0.5 * dt * s2[0], T + 0.5 * dt * s2[1]), k_half)
    s4 = rhs((P + dt * s3[0], T + dt * s3[1]), k1)
    Pn = P + dt / 6.0 * (s1[0] + 2 * s2[0] + 2 * s3[0] + s4[0])
    Tn = T + dt / 6.0 * (s1[1] + 2 * s2[1] + 2 * s3[1] + s4[1])
    if kappa < -_FLAT_EPS:
        Pn = Pn / math.sqrt(max(-hyp.mdot(Pn, Pn), 1e-300))
        Tn = Tn + hyp.mdot(Tn, Pn) * Pn
        Tn = Tn / math.sqrt(max(hyp.mdot(Tn, Tn), 1e-300))
    else:
        Tn = Tn / np.hypot(*Tn)
    return Pn, Tn


def mirror_curve(kappa, H, twist, oversample=4, start=None, start_dir=0.0):
    """Unit-speed plane curve with geodesic curvature 2H - alpha'(t).

    Lives in the curvature-``kappa`` plane (the product-side base); the
    parameter is the arc length of the vertical the twist was measured on,
    so conjugate curves are isometric images of their parameters.
    """
    if kappa > _FLAT_EPS:
        raise ValueError("kappa must be <= 0")
    t = np.asarray(twist.params, dtype=float)
    rate = np.asarray(twist.alpha_rate, dtype=float)
    n_steps = (len(t) - 1) * oversample
    tt = np.linspace(t[0], t[-1], n_steps + 1)
    k_tilde = 2.0 * H - np.interp(tt, t, rate)
    scale = math.sqrt(-kappa) if kappa < -_FLAT_EPS else 1.0
    if kappa < -_FLAT_EPS:
        p_chart = np.asarray(start, dtype=float) if start is not None else np.array([0.0, 1.0])
        P = hyp.to_hyperboloid(p_chart)
        T = hyp.dir_to_tangent(p_chart, start_dir)
        k_hat = k_tilde / scale
        dt_hat = np.diff(tt) * scale
    else:
        P = np.asarray(start, dtype=float) if start is not None else np.array([0.0, 0.0])
        T = np.array([math.cos(start_dir), math.sin(start_dir)])
        k_hat = k_tilde
        dt_hat = np.diff(tt)
    out = np.empty((n_steps + 1, 2))
    tans = np.empty((n_steps + 1, 2))

    def chart_of(P_, T_):
        if kappa < -_FLAT_EPS:
            p = hyp.from_hyperboloid(P_)
            a = hyp.tangent_to_dir(p, T_)
            return p, np.array([math.cos(a), math.sin(a)])
        return P_.copy(), T_.copy()

    out[0], tans[0] = chart_of(P, T)
    for i in range(n_steps):
        k_mid = 0.5 * (k_hat[i] + k_hat[i + 1])
        P, T = _plane_step_frames(kappa, P, T, (k_hat[i], k_mid, k_hat[i + 1]),
                                  dt_hat[i])
        out[i + 1], tans[i + 1] = chart_of(P, T)
    return CurveSample(params=tt, points=out, tangents=tans,
                       curvature=k_tilde,
                       twist_rate=np.interp(tt, t, rate),
                       meta={"kappa": kappa, "h_mean": H})


@dataclass
class LoopCheck:
    verdict: str                   # "embedded-consistent" | "contradiction-found"
    loops: list = field(default_factory=list)


def _segment_intersections(pts, tol=1e-9):
    """Self-intersections of a polyline; returns (i, j, point) with j > i+1."""
    a = pts[:-1]
    b = pts[1:]
    hits = []
    n = len(a)
    for i in range(n):
        d1 = b[i] - a[i]
        js = np.arange(i + 2, n)
        if len(js) == 0:
            continue
        if i == 0:
            js = js[js != n - 1] if np.allclose(pts[0], pts[-1], atol=tol) else js
        d2 = b[js] - a[js]
        r = a[js] - a[i]
        den = d1[0] * d2[:, 1] - d1[1] * d2[:, 0]
        ok = np.abs(den) > 1e-16
        s = np.where(ok, (r[:, 0] * d2[:, 1] - r[:, 1] * d2[:, 0]) / np.where(ok, den, 1.0), -1)
        u = np.where(ok, (r[:, 0] * d1[1] - r[:, 1] * d1[0]) / np.where(ok, den, 1.0), -1)
        hit = ok & (s >= -tol) & (s <= 1 + tol) & (u >= -tol) & (u <= 1 + tol)
        for m in np.where(hit)[0]:
            hits.append((i, int(js[m]), a[i] + s[m] * d1, float(s[m]), float(u[m])))
    return hits


def _loop_area_ccw(kappa, pts):
    """Chart-ccw signed area of a closed polyline in curvature-kappa metric."""
    p0, p1 = pts[:-1], pts[1:]
    dx = p1[:, 0] - p0[:, 0]
    if kappa < -_FLAT_EPS:
        y0 = p0[:, 1]
        dy = p1[:, 1] - p0[:, 1]
        u = dy / y0
        small = np.abs(u) < 1e-8
        phi = np.where(small, 1.0 - u / 2.0 + u * u / 3.0,
                       np.log1p(np.where(small, 0.0, u)) / np.where(small, 1.0, u))
        return float(np.sum(dx * phi / y0) / (-kappa))
    return float(0.5 * np.sum(p0[:, 0] * p1[:, 1] - p1[:, 0] * p0[:, 1]))


def _proximity_closures(pts, prox_tol, min_gap):
    """Parameter-separated near-contacts (catches exact retracing loops).

    Returns hits in the same format as the sweep, with the fractional
    positions of the mutual closest approach of the two segments.
    """
    hits = []
    n = len(pts)
    i = 0
    while i < n - 1:
        d = np.hypot(pts[:, 0] - pts[i, 0], pts[:, 1] - pts[i, 1])
        js = np.where((np.arange(n) > i + min_gap) & (d < prox_tol))[0]
        if len(js):
            j = int(js[np.argmin(d[js])])
            j = min(max(j - 1, i + 2), n - 2)
            a1, b1 = pts[i], pts[i + 1]
            a2, b2 = pts[j], pts[j + 1]
            # closest approach of the two segments (clamped least squares)
            d1 = b1 - a1
            d2 = b2 - a2
            A = np.array([[d1 @ d1, -d1 @ d2], [-d1 @ d2, d2 @ d2]])
            rhs = np.array([d1 @ (a2 - a1), -d2 @ (a2 - a1)])
            try:
                s, u = np.linalg.solve(A, rhs)
            except np.linalg.LinAlgError:
                s, u = 0.0, 0.0
            s = min(max(s, 0.0), 1.0)
            u = min(max(u, 0.0), 1.0)
            hits.append((i, j, a1 + s * d1, float(s), float(u)))
            i = j + min_gap
        else:
            i += 1
        if len(hits) >= 4:
            break
    return hits


def gauss_bonnet_loop_check(curve, kappa, alpha_limit=math.pi,
                            prox_tol=1e-3) -> LoopCheck:
    """Detect loops of a mirror curve and audit them.

    For each self-intersection the enclosed turning identity
    kappa*area - int k~ + phi = 2 pi is evaluated (phi the angle between the
    closing tangents), and the accumulated twist over the loop parameter
    interval is compared against ``alpha_limit``; exceeding it certifies the
    loop cannot bound on a section, which is reported as a contradiction.
    Transversal crossings come from a segment sweep; exactly retracing loops
    are caught by a parameter-separated proximity pass.
    """
    pts = np.asarray(curve.points, dtype=float)
    hits = _segment_intersections(pts)
    if not hits:
        hits = _proximity_closures(pts, prox_tol, min_gap=max(8, len(pts) // 50))
    if not hits:
        return LoopCheck(verdict="embedded-consistent")
    t = curve.params
    k_arr = curve.curvature
    loops = []
    contradiction = False
    for (i, j, xpt, s_i, s_j) in hits[:8]:
        t0 = float(t[i] + s_i * (t[i + 1] - t[i]))
        t1 = float(t[j] + s_j * (t[j + 1] - t[j]))
        x0 = pts[i] + s_i * (pts[i + 1] - pts[i])
        x1 = pts[j] + s_j * (pts[j + 1] - pts[j])
        sub = np.vstack([[x0], pts[i + 1:j + 1], [x1], [x0]])
        A_ccw = _loop_area_ccw(kappa, sub)
        int_k = _fractional_integral(t, k_arr, i, s_i, j, s_j)
        phi = _closing_angle(curve, i, s_i, j, s_j)
        if A_ccw > 0:
            area = A_ccw
            int_k = -int_k
        else:
            area = -A_ccw
        residual = kappa * area - int_k + phi - 2.0 * math.pi
        alpha_span = None
        if curve.twist_rate is not None:
            alpha_span = _fractional_integral(t, curve.twist_rate, i, s_i, j, s_j)
            if alpha_span > alpha_limit:
                contradiction = True
        loops.append({
            "param_range": (t0, t1),
            "area": area, "phi": phi, "residual": residual,
            "alpha_span": alpha_span,
        })
    return LoopCheck(verdict="contradiction-found" if contradiction else "loop-found",
                     loops=loops)


def _fractional_integral(t, f, i, s_i, j, s_j):
    """Trapezoid integral of samples f over [t_i + s_i dt, t_j + s_j dt]."""
    full = np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(t))])

    def at(idx, s):
        if s == 0.0:
            return full[idx]
        fa = f[idx] + s * (f[idx + 1] - f[idx])
        return full[idx] + 0.5 * (f[idx] + fa) * s * (t[idx + 1] - t[idx])

    return float(at(j, s_j) - at(i, s_i))


def _closing_angle(curve, i, s_i, j, s_j):
    T = curve.tangents
    t0 = T[i] + s_i * (T[i + 1] - T[i])
    t1 = T[j] + s_j * (T[j + 1] - T[j])
    t0 = t0 / np.hypot(*t0)
    t1 = t1 / np.hypot(*t1)
    c = float(np.clip(t0 @ t1, -1.0, 1.0))
    return math.acos(c)
