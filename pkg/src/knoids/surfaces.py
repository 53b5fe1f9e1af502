"""Closed-form reference and barrier surfaces: vertical planes, umbrellas,
horizontal slices, and the one-parameter helicoid family about a fiber.

Each builder returns a :class:`Patch` with a pointwise sampler; the grid
builders integrate whole families of geodesics at once, which keeps the
mean-curvature audits fast.  Rotation rates (helicoid pitch, twist) are
measured in the same sense as the oriented-area convention of
:mod:`knoids.spaces`: positive means clockwise in the chart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geodesics import (
    base_geodesic_points,
    base_geodesic_with_angles,
    geodesic_many,
    horizontal_lift,
    lift_height_between,
)
from .spaces import (
    EUCLIDEAN,
    HALF_PLANE,
    christoffels_many,
    connection_coeffs,
    horizontal_vector,
    metric_many,
    norm_g,
)

__all__ = [
    "Patch",
    "vertical_plane",
    "umbrella_patch",
    "slice_patch",
    "helicoid_patch",
    "umbrella_grid",
    "slice_grid",
    "helicoid_grid",
    "vertical_plane_grid",
    "umbrella_height",
    "mean_curvature",
    "mean_curvature_field",
    "mean_curvature_field_richardson",
    "patch_grid",
]

_GEO_STEPS = 192


@dataclass
class Patch:
    """Parametrized surface patch with sampler (u, v) -> ambient point."""

    space: object
    sample: Callable
    u_range: tuple
    v_range: tuple
    name: str = ""
    meta: dict = field(default_factory=dict)

    def grid(self, nu, nv):
        us = np.linspace(*self.u_range, nu)
        vs = np.linspace(*self.v_range, nv)
        out = np.empty((nu, nv, 3))
        for i, u in enumerate(us):
            for j, v in enumerate(vs):
                out[i, j] = self.sample(u, v)
        return us, vs, out


def _orthonormal_horizontal_frame(space, p):
    """Horizontal unit vectors (h1, h2) at p, h2 obtained from the chart +y."""
    p = np.asarray(p, dtype=float)
    h1 = horizontal_vector(space, p[:2], np.array([1.0, 0.0]))
    h2 = horizontal_vector(space, p[:2], np.array([0.0, 1.0]))
    g = metric_many(space, p)
    n1 = math.sqrt(h1 @ g @ h1)
    h1 = h1 / n1
    h2 = h2 - (h2 @ g @ h1) * h1
    h2 = h2 / math.sqrt(h2 @ g @ h2)
    return h1, h2


def vertical_plane(space, base_point, base_dir, extents=(1.0, 1.0)):
    """Preimage of a base geodesic under the fibration."""
    base_point = np.asarray(base_point, dtype=float)[:2]

    def sample(u, v):
        if u == 0.0:
            q = base_point
        else:
            theta = base_dir if u > 0 else base_dir + math.pi
            q = base_geodesic_points(space, base_point, theta, abs(u), 1)[-1]
        return np.array([q[0], q[1], v])

    return Patch(space, sample, (-extents[0], extents[0]), (-extents[1], extents[1]),
                 name="vertical-plane",
                 meta={"base_point": base_point, "base_dir": base_dir})


def umbrella_patch(space, p, radius):
    """Exponential of the horizontal tangent plane at the ambient point p."""
    p = np.asarray(p, dtype=float)
    h1, h2 = _orthonormal_horizontal_frame(space, p)

    def sample(u, v):
        # u: radius in [0, radius]; v: direction angle
        if u == 0.0:
            return p.copy()
        d = math.cos(v) * h1 + math.sin(v) * h2
        P, _ = geodesic_many(space, p[None], d[None], [u], steps=_GEO_STEPS)
        return P[-1, 0]

    return Patch(space, sample, (0.0, radius), (0.0, 2.0 * math.pi),
                 name="umbrella", meta={"center": p})


def slice_patch(space, axis_point, axis_dir, extents=(1.0, 1.0)):
    """Horizontal-helicoid slice: horizontal geodesic axis with perpendicular
    horizontal rulings.  In product spaces this is a height slice."""
    axis_point = np.asarray(axis_point, dtype=float)
    base_pt = axis_point[:2]
    z0 = axis_point[2] if len(axis_point) > 2 else 0.0

    lu = extents[0]

    def sample(u, v):
        theta = axis_dir if u >= 0 else axis_dir + math.pi
        pts, angs = base_geodesic_with_angles(space, base_pt, theta, max(abs(u), 1e-15), 1)
        q = pts[-1]
        ang = angs[-1] if u >= 0 else angs[-1] + math.pi
        zq = lift_height_between(space, base_pt, q, z0)
        c = np.array([q[0], q[1], zq])
        perp = np.array([-math.sin(ang), math.cos(ang)])
        w = horizontal_vector(space, q, perp)
        w = w / norm_g(space, c, w)
        if v == 0.0:
            return c
        d = w if v > 0 else -w
        P, _ = geodesic_many(space, c[None], d[None], [abs(v)], steps=_GEO_STEPS)
        return P[-1, 0]

    return Patch(space, sample, (-lu, lu), (-extents[1], extents[1]), name="slice",
                 meta={"axis_point": axis_point, "axis_dir": axis_dir})


def helicoid_patch(space, pitch, axis_base=None, extents=(1.0, 1.0)):
    """Ruled surface about a fiber whose horizontal rulings rotate at constant
    speed ``pitch`` per unit fiber length, measured against a fiber-parallel
    frame.  ``pitch == tau`` is a vertical plane; ``pitch = +-inf`` gives the
    umbrella about the axis point.
    """
    if axis_base is None:
        axis_base = (0.0, 1.0) if space.model == HALF_PLANE else (0.0, 0.0)
    axis_base = np.asarray(axis_base, dtype=float)
    if math.isinf(pitch):
        return umbrella_patch(space, np.array([axis_base[0], axis_base[1], 0.0]),
                              extents[0])

    # chart rotation rate of the rulings: a fiber-parallel frame rotates at
    # rate tau in the positive (clockwise) sense, and the ruling family is
    # classified by its rate relative to that frame, so (pitch - tau)
    # counterclockwise in the chart keeps pitch = tau a vertical plane.
    rate_ccw = pitch - space.tau

    def sample(u, v):
        # u: distance along ruling (signed); v: height along the axis
        p = np.array([axis_base[0], axis_base[1], v])
        phi = rate_ccw * v
        d = horizontal_vector(space, axis_base, np.array([math.cos(phi), math.sin(phi)]))
        d = d / norm_g(space, p, d)
        if u == 0.0:
            return p
        dd = d if u > 0 else -d
        P, _ = geodesic_many(space, p[None], dd[None], [abs(u)], steps=_GEO_STEPS)
        return P[-1, 0]

    return Patch(space, sample, (-extents[0], extents[0]), (-extents[1], extents[1]),
                 name="helicoid", meta={"pitch": pitch, "axis_base": axis_base})


def umbrella_grid(space, p, radius, nr=40, ntheta=48):
    """Sampled umbrella as a (nr+1, ntheta, 3) grid; one batched integration.

    Rows index the radius (spacing radius/nr), columns the direction angle
    (spacing 2 pi / (ntheta - 1), endpoint included).
    """
    p = np.asarray(p, dtype=float)
    h1, h2 = _orthonormal_horizontal_frame(space, p)
    thetas = np.linspace(0.0, 2.0 * math.pi, ntheta)
    dirs = np.cos(thetas)[:, None] * h1[None, :] + np.sin(thetas)[:, None] * h2[None, :]
    P, _ = geodesic_many(space, np.tile(p, (ntheta, 1)), dirs,
                         np.full(ntheta, radius), steps=nr)
    return np.transpose(P, (0, 1, 2)), radius / nr, thetas[1] - thetas[0]


def slice_grid(space, axis_point, axis_dir, extents=(1.0, 1.0), nu=41, nv=40):
    """Sampled slice surface as a (nu, 2*nv+1, 3) grid (axis x ruling)."""
    axis_point = np.asarray(axis_point, dtype=float)
    base_pt = axis_point[:2]
    z0 = axis_point[2] if len(axis_point) > 2 else 0.0
    lu, lv = extents
    m = (nu - 1) // 2
    fwd, a_fwd = base_geodesic_with_angles(space, base_pt, axis_dir, lu, m)
    bwd, a_bwd = base_geodesic_with_angles(space, base_pt, axis_dir + math.pi, lu, m)
    base_all = np.vstack([bwd[::-1], fwd[1:]])
    ang = np.concatenate([a_bwd[::-1] + math.pi, a_fwd[1:]])
    z_axis = lift_height_between(space, np.tile(base_pt, (len(base_all), 1)),
                                 base_all, z0)
    n_ax = len(base_all)
    perp = np.column_stack([-np.sin(ang), np.cos(ang)])
    w = np.array([horizontal_vector(space, base_all[i], perp[i]) for i in range(n_ax)])
    c = np.column_stack([base_all, z_axis])
    w = w / norm_g(space, c, w)[:, None]
    Pp, _ = geodesic_many(space, c, w, np.full(n_ax, lv), steps=nv)
    Pm, _ = geodesic_many(space, c, -w, np.full(n_ax, lv), steps=nv)
    grid = np.concatenate([Pm[::-1][:-1], Pp], axis=0)  # (2 nv + 1, n_ax, 3)
    return np.transpose(grid, (1, 0, 2)), (2 * lu) / (n_ax - 1), lv / nv


def helicoid_grid(space, pitch, axis_base=None, extents=(1.0, 1.0), nu=40, nv=41):
    """Sampled helicoid as a (2*nu+1, nv, 3) grid (ruling x height)."""
    if axis_base is None:
        axis_base = (0.0, 1.0) if space.model == HALF_PLANE else (0.0, 0.0)
    axis_base = np.asarray(axis_base, dtype=float)
    if math.isinf(pitch):
        pts, du, dv = umbrella_grid(space, np.array([axis_base[0], axis_base[1], 0.0]),
                                    extents[0], nr=2 * nu, ntheta=nv)
        return pts, du, dv
    rate_ccw = pitch - space.tau
    lu, lv = extents
    heights = np.linspace(-lv, lv, nv)
    phis = rate_ccw * heights
    base = np.tile(axis_base, (nv, 1))
    dirs2 = np.column_stack([np.cos(phis), np.sin(phis)])
    dirs = np.array([horizontal_vector(space, axis_base, d) for d in dirs2])
    starts = np.column_stack([base, heights])
    dirs = dirs / norm_g(space, starts, dirs)[:, None]
    Pp, _ = geodesic_many(space, starts, dirs, np.full(nv, lu), steps=nu)
    Pm, _ = geodesic_many(space, starts, -dirs, np.full(nv, lu), steps=nu)
    grid = np.concatenate([Pm[::-1][:-1], Pp], axis=0)
    return grid, lu / nu, (2 * lv) / (nv - 1)


def vertical_plane_grid(space, base_point, base_dir, extents=(1.0, 1.0), nu=41, nv=41):
    """Sampled vertical plane as a (nu, nv, 3) grid (base arc x height)."""
    base_point = np.asarray(base_point, dtype=float)[:2]
    lu, lv = extents
    m = (nu - 1) // 2
    fwd = base_geodesic_points(space, base_point, base_dir, lu, m)
    bwd = base_geodesic_points(space, base_point, base_dir + math.pi, lu, m)
    base_all = np.vstack([bwd[::-1], fwd[1:]])
    heights = np.linspace(-lv, lv, nv)
    grid = np.empty((len(base_all), nv, 3))
    grid[:, :, 0] = base_all[:, 0][:, None]
    grid[:, :, 1] = base_all[:, 1][:, None]
    grid[:, :, 2] = heights[None, :]
    return grid, (2 * lu) / (len(base_all) - 1), heights[1] - heights[0]


def umbrella_height(space, base_point, q):
    """Height over q of the umbrella through (base_point, 0), as a section.

    Equals the vertical displacement of the horizontal lift of the radial
    base geodesic from base_point to q (closed form in every model).
    """
    return lift_height_between(space, np.asarray(base_point, float)[:2],
                               np.asarray(q, float)[:2], 0.0)


def patch_grid(patch, nu, nv, shrink=0.0):
    """Sample a patch on a regular parameter grid, optionally shrinking the
    parameter box by a relative margin (to stay inside open domains)."""
    u0, u1 = patch.u_range
    v0, v1 = patch.v_range
    du = (u1 - u0) * shrink
    dv = (v1 - v0) * shrink
    us = np.linspace(u0 + du, u1 - du, nu)
    vs = np.linspace(v0 + dv, v1 - dv, nv)
    pts = np.empty((nu, nv, 3))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            pts[i, j] = patch.sample(u, v)
    return us, vs, pts


def _jet(patch, u, v, h):
    f = lambda a, b: np.asarray(patch.sample(a, b), dtype=float)
    f0 = f(u, v)
    fu = (f(u + h, v) - f(u - h, v)) / (2 * h)
    fv = (f(u, v + h) - f(u, v - h)) / (2 * h)
    fuu = (f(u + h, v) - 2 * f0 + f(u - h, v)) / h**2
    fvv = (f(u, v + h) - 2 * f0 + f(u, v - h)) / h**2
    fuv = (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (4 * h**2)
    return f0, fu, fv, fuu, fuv, fvv


def _mean_curvature_from_jet(space, f0, fu, fv, fuu, fuv, fvv, normal_sign=1.0):
    g = metric_many(space, f0)
    gam = christoffels_many(space, f0)
    E = fu @ g @ fu
    F = fu @ g @ fv
    G = fv @ g @ fv
    det1 = E * G - F * F
    if det1 <= 0:
        raise ValueError("degenerate immersion at the requested parameters")
    # covector annihilating f_u, f_v; raise with g^{-1} and normalize
    n_cov = np.cross(fu, fv)
    N = np.linalg.solve(g, n_cov)
    N = normal_sign * N / math.sqrt(N @ g @ N)
    Duu = fuu + np.einsum("ijk,j,k->i", gam, fu, fu)
    Duv = fuv + np.einsum("ijk,j,k->i", gam, fu, fv)
    Dvv = fvv + np.einsum("ijk,j,k->i", gam, fv, fv)
    L = Duu @ g @ N
    M = Duv @ g @ N
    Nn = Dvv @ g @ N
    return 0.5 * (L * G - 2 * M * F + Nn * E) / det1


def mean_curvature(space, patch, uv, normal_sign=1.0, h=2.5e-4):
    """Mean curvature of a patch at (u, v) for the positively oriented normal
    (flip with ``normal_sign=-1``)."""
    u, v = uv
    jet = _jet(patch, u, v, h)
    return float(_mean_curvature_from_jet(space, *jet, normal_sign=normal_sign))


def mean_curvature_field_richardson(space, points, du, dv, normal_sign=1.0):
    """Mean curvature field with one Richardson step (O(h^4) in the spacings).

    ``points`` must have odd shape in both directions; the result lives on
    the interior nodes of the coarse (stride-2) grid.
    """
    P = np.asarray(points, dtype=float)
    fine = mean_curvature_field(space, P, du, dv, normal_sign)
    coarse = mean_curvature_field(space, P[::2, ::2], 2 * du, 2 * dv, normal_sign)
    # fine field at the coarse interior nodes: rows 2,4,... of P are rows 1,2,.. of coarse
    fine_at_coarse = fine[1::2, 1::2]
    return (4.0 * fine_at_coarse - coarse) / 3.0


def mean_curvature_field(space, points, du, dv, normal_sign=1.0):
    """Mean curvature on the interior of a sampled grid ``points`` (nu, nv, 3)
    with parameter spacings du, dv.  Vectorized; used by the minimality audits.
    """
    P = np.asarray(points, dtype=float)
    f0 = P[1:-1, 1:-1]
    fu = (P[2:, 1:-1] - P[:-2, 1:-1]) / (2 * du)
    fv = (P[1:-1, 2:] - P[1:-1, :-2]) / (2 * dv)
    fuu = (P[2:, 1:-1] - 2 * f0 + P[:-2, 1:-1]) / du**2
    fvv = (P[1:-1, 2:] - 2 * f0 + P[1:-1, :-2]) / dv**2
    fuv = (P[2:, 2:] - P[2:, :-2] - P[:-2, 2:] + P[:-2, :-2]) / (4 * du * dv)
    shp = f0.shape[:2]
    flat = lambda a: a.reshape(-1, 3)
    f0f, fuf, fvf = flat(f0), flat(fu), flat(fv)
    fuuf, fuvf, fvvf = flat(fuu), flat(fuv), flat(fvv)
    g = metric_many(space, f0f)
    gam = christoffels_many(space, f0f)
    dot = lambda a, b: np.einsum("ni,nij,nj->n", a, g, b)
    E, F, G = dot(fuf, fuf), dot(fuf, fvf), dot(fvf, fvf)
    det1 = E * G - F * F
    n_cov = np.cross(fuf, fvf)
    N = np.linalg.solve(g, n_cov[..., None])[..., 0]
    N = normal_sign * N / np.sqrt(dot(N, N))[:, None]
    chr2 = lambda a, b: np.einsum("nijk,nj,nk->ni", gam, a, b)
    L = dot(fuuf + chr2(fuf, fuf), N)
    M = dot(fuvf + chr2(fuf, fvf), N)
    Nn = dot(fvvf + chr2(fvf, fvf), N)
    H = 0.5 * (L * G - 2 * M * F + Nn * E) / det1
    return H.reshape(shp)
