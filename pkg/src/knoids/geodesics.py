"""Geodesics and horizontal lifts in the three models.

The ambient geodesic integrator is a classical fixed-step 4th-order scheme;
the public entry point halves the step until two successive runs agree,
so results are reproducible without hand-tuning step counts.  Base
geodesics (in the fibration base) use closed forms.  Horizontal lifts are
evaluated with per-segment closed-form integrals of the connection form,
exact for chart polylines.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import hyperbolic as hyp
from .spaces import (
    HALF_PLANE,
    DomainError,
    base_conformal_factor,
    check_domain,
    christoffels_many,
    connection_coeffs,
    norm_g,
    polyline_lift_displacements,
)

__all__ = [
    "CurveSample",
    "geodesic",
    "geodesic_many",
    "base_geodesic_points",
    "base_step",
    "horizontal_lift",
    "lift_height_between",
]


@dataclass
class CurveSample:
    """Arc-length sampled curve with optional frame and curvature data.

    ``points`` is (N, 3) for ambient curves or (N, 2) for base/plane curves.
    Optional arrays share the leading dimension.
    """

    params: np.ndarray
    points: np.ndarray
    tangents: np.ndarray | None = None
    normals: np.ndarray | None = None
    conormals: np.ndarray | None = None
    curvature: np.ndarray | None = None
    torsion: np.ndarray | None = None
    twist_rate: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.params)


def _accelerations(space, p, v):
    gamma = christoffels_many(space, p)
    return -np.einsum("...ijk,...j,...k->...i", gamma, v, v)


def _rk4_paths(space, p0, v0, lengths, n):
    """Vectorized fixed-step RK4 for the geodesic equation.

    p0, v0: (M, 3); lengths: (M,).  Returns positions (n+1, M, 3) and
    velocities (n+1, M, 3).
    """
    p = np.array(p0, dtype=float)
    v = np.array(v0, dtype=float)
    h = np.asarray(lengths, dtype=float)[:, None] / n
    P = np.empty((n + 1,) + p.shape)
    V = np.empty_like(P)
    P[0], V[0] = p, v
    for i in range(n):
        k1p, k1v = v, _accelerations(space, p, v)
        p2, v2 = p + 0.5 * h * k1p, v + 0.5 * h * k1v
        k2p, k2v = v2, _accelerations(space, p2, v2)
        p3, v3 = p + 0.5 * h * k2p, v + 0.5 * h * k2v
        k3p, k3v = v3, _accelerations(space, p3, v3)
        p4, v4 = p + h * k3p, v + h * k3v
        k4p, k4v = v4, _accelerations(space, p4, v4)
        p = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        v = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if space.model == HALF_PLANE and np.any(p[:, 1] <= 0.0):
            bad = int(np.argmax(p[:, 1] <= 0.0))
            exit_param = (i + 1) * float(h[bad, 0])
            raise DomainError(
                f"geodesic left the model domain near arc length {exit_param:.6g}"
            )
        P[i + 1], V[i + 1] = p, v
    return P, V


def geodesic_many(space, p0, v0, lengths, steps=256):
    """Integrate several geodesics at once; initial speeds are normalized.

    Returns (positions, velocities) with shape (steps+1, M, 3).
    """
    p0 = np.atleast_2d(np.asarray(p0, dtype=float))
    v0 = np.atleast_2d(np.asarray(v0, dtype=float))
    check_domain(space, p0)
    speed = norm_g(space, p0, v0)
    if np.any(speed == 0.0):
        raise ValueError("geodesic needs a nonzero initial velocity")
    v0 = v0 / speed[:, None]
    return _rk4_paths(space, p0, v0, lengths, steps)


def geodesic(space, p, v, length, steps=None, tol=1e-9, max_steps=1 << 16):
    """Unit-speed geodesic from p with initial direction v.

    With ``steps=None`` the step count doubles until the endpoints of two
    successive runs differ by less than ``tol``.
    """
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    if steps is not None:
        if steps < 2:
            raise ValueError("steps must be >= 2")
        P, V = geodesic_many(space, p[None], v[None], [length], steps)
        return CurveSample(
            params=np.linspace(0.0, length, steps + 1),
            points=P[:, 0], tangents=V[:, 0],
        )
    n = 64
    P, V = geodesic_many(space, p[None], v[None], [length], n)
    while True:
        P2, V2 = geodesic_many(space, p[None], v[None], [length], 2 * n)
        if np.linalg.norm(P2[-1] - P[-1]) < tol or 2 * n > max_steps:
            return CurveSample(
                params=np.linspace(0.0, length, 2 * n + 1),
                points=P2[:, 0], tangents=V2[:, 0],
            )
        n *= 2
        P, V = P2, V2


def base_step(space, p, theta, dist):
    """Walk in the base surface: point and forward chart angle after dist."""
    if space.model == HALF_PLANE:
        s = np.sqrt(-space.kappa_e)
        q, th = hyp.step(np.asarray(p, dtype=float), theta, dist * s)
        return q, th
    p = np.asarray(p, dtype=float)
    q = p + dist * np.array([np.cos(theta), np.sin(theta)])
    return q, theta


def base_geodesic_points(space, p, theta, length, n):
    """n+1 arc-length samples of the base geodesic from p in direction theta."""
    if space.model == HALF_PLANE:
        s = np.sqrt(-space.kappa_e)
        return hyp.geodesic_points(np.asarray(p, dtype=float), theta, length * s, n)
    p = np.asarray(p, dtype=float)
    t = np.linspace(0.0, length, n + 1)
    return p[None, :] + t[:, None] * np.array([np.cos(theta), np.sin(theta)])[None, :]


def base_geodesic_with_angles(space, p, theta, length, n):
    """Like base_geodesic_points but also returns exact forward chart angles."""
    p = np.asarray(p, dtype=float)
    if space.model == HALF_PLANE:
        s = np.sqrt(-space.kappa_e)
        P = hyp.to_hyperboloid(p)
        U = hyp.dir_to_tangent(p, theta)
        t = np.linspace(0.0, length * s, n + 1)
        Q, V = hyp.flow(P[None, :], U[None, :], t)
        pts = hyp.from_hyperboloid(Q)
        angles = hyp.tangent_to_dir(pts, V)
        return pts, angles
    t = np.linspace(0.0, length, n + 1)
    pts = p[None, :] + t[:, None] * np.array([np.cos(theta), np.sin(theta)])[None, :]
    return pts, np.full(n + 1, float(theta))


def base_geodesic_between(space, p, q, n):
    """Arc-length samples of the base geodesic segment from p to q."""
    p = np.asarray(p, dtype=float)[:2]
    q = np.asarray(q, dtype=float)[:2]
    if space.model == HALF_PLANE:
        theta = hyp.direction_angle(p, q)
        d = float(hyp.distance(p, q))
        pts = hyp.geodesic_points(p, theta, d, n)
        pts[-1] = q
        return pts
    t = np.linspace(0.0, 1.0, n + 1)
    return p[None, :] + t[:, None] * (q - p)[None, :]


def horizontal_lift(space, base_points, start_height=0.0, params=None):
    """Horizontal lift of a sampled base curve.

    ``base_points``: (N, 2) chart samples (dense for smooth curves; segment
    integrals are exact on polylines).  Returns a CurveSample with ambient
    points, horizontal unit tangents, and arc-length params equal to the
    base arc length.
    """
    base_points = np.asarray(base_points, dtype=float)
    check_domain(space, base_points)
    dz = polyline_lift_displacements(space, base_points)
    z = start_height + np.concatenate([[0.0], np.cumsum(dz)])
    pts = np.column_stack([base_points, z])
    # tangents: horizontalized chord directions, normalized in g
    chord = np.gradient(base_points, axis=0)
    w = connection_coeffs(space, base_points)
    tan = np.column_stack([chord, w[:, 0] * chord[:, 0] + w[:, 1] * chord[:, 1]])
    nrm = norm_g(space, pts, tan)
    tan = tan / np.where(nrm > 0, nrm, 1.0)[:, None]
    if params is None:
        mu = np.sqrt(base_conformal_factor(space, base_points))
        seg = np.hypot(*np.diff(base_points, axis=0).T)
        seg_len = seg * 0.5 * (mu[:-1] + mu[1:])
        params = np.concatenate([[0.0], np.cumsum(seg_len)])
    return CurveSample(params=np.asarray(params, dtype=float), points=pts, tangents=tan)


def lift_height_between(space, p, q, z_p=0.0):
    """Height reached by the horizontal lift along the base geodesic p -> q.

    Closed form in every model: along half-plane geodesics the connection
    integral is -2 H c [atan((x - c0)/y)] between the endpoints (c0 the
    euclidean center of the chart semicircle), and flat-base geodesics are
    single straight segments.
    """
    p = np.asarray(p, dtype=float)[..., :2]
    q = np.asarray(q, dtype=float)[..., :2]
    if space.model != HALF_PLANE:
        seg = np.stack([p, q], axis=-2)
        if seg.ndim == 2:
            return z_p + float(polyline_lift_displacements(space, seg)[0])
        dx = q[..., 0] - p[..., 0]
        dy = q[..., 1] - p[..., 1]
        return z_p + space.tau * (p[..., 1] * dx - p[..., 0] * dy)
    check_domain(space, p)
    check_domain(space, q)
    dx = q[..., 0] - p[..., 0]
    c = 1.0 / (-space.kappa_e)
    small = np.abs(dx) < 1e-14 * (1.0 + np.abs(p[..., 0]))
    dx_safe = np.where(small, 1.0, dx)
    c0 = (np.sum(q * q, axis=-1) - np.sum(p * p, axis=-1)) / (2.0 * dx_safe)
    val = np.arctan2(q[..., 0] - c0, q[..., 1]) - np.arctan2(p[..., 0] - c0, p[..., 1])
    out = np.where(small, 0.0, -2.0 * space.h_mean * c * val)
    if out.ndim == 0:
        return z_p + float(out)
    return z_p + out
