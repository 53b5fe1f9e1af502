"""Coordinate models of the fibered homogeneous 3-spaces.

Three models, selected by the sign of ``kappa_e = kappa + 4 H^2``:

* half-plane (``kappa_e < 0``):  points (x, y, z) with y > 0 and

      ds^2 = lam^2 (dx^2 + dy^2) + (2 H y lam^2 dx + dz)^2,
      lam  = 1 / (sqrt(-kappa_e) * y)

* heisenberg (``kappa_e = 0``, H != 0):

      ds^2 = dx^2 + dy^2 + (dz - H (y dx - x dy))^2

* euclidean (``kappa_e = 0``, H = 0):  flat R^3.

In every model the projection (x, y, z) -> (x, y) is a Riemannian fibration
over the complete surface of curvature kappa_e, the fibers are the z-lines,
and xi = d/dz is a unit vertical field.  Horizontal lifts of closed base
loops are displaced vertically by ``2 * tau * area`` (tau = H), where the
oriented area is taken positive for loops that run *clockwise* in the chart.
That orientation convention is fixed here once and used by every other
module (contours, twist rates, helicoid pitches).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HALF_PLANE = "half-plane"
HEISENBERG = "heisenberg"
EUCLIDEAN = "euclidean"

_FLAT_EPS = 1e-13


class DomainError(ValueError):
    """A point or curve left the coordinate domain of the selected model."""


class UnsupportedSpaceError(ValueError):
    """Parameter pair (kappa, H) outside the supported range."""


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its target accuracy."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class SpaceParams:
    """The pair (kappa, H) fixing both sister ambient spaces.

    ``kappa``: curvature of the base of the product space carrying the
    constant-mean-curvature sister (<= 0).  ``h_mean``: the target mean
    curvature H in [0, 1/2].  The minimal-graph side lives over the base of
    curvature ``kappa_e = kappa + 4 H^2`` with bundle curvature ``tau = H``.
    """

    kappa: float
    h_mean: float

    def __post_init__(self):
        if self.kappa > _FLAT_EPS:
            raise UnsupportedSpaceError(f"kappa must be <= 0, got {self.kappa}")
        if not 0.0 <= self.h_mean <= 0.5:
            raise UnsupportedSpaceError(f"H must lie in [0, 1/2], got {self.h_mean}")
        if self.kappa + 4.0 * self.h_mean ** 2 > _FLAT_EPS:
            raise UnsupportedSpaceError(
                f"kappa + 4 H^2 must be <= 0, got {self.kappa + 4 * self.h_mean ** 2}"
            )

    @property
    def kappa_e(self) -> float:
        ke = self.kappa + 4.0 * self.h_mean ** 2
        return 0.0 if abs(ke) <= _FLAT_EPS else ke

    @property
    def tau(self) -> float:
        return self.h_mean

    @property
    def model(self) -> str:
        if self.kappa_e < 0.0:
            return HALF_PLANE
        return HEISENBERG if self.tau != 0.0 else EUCLIDEAN


def check_domain(space, pts):
    """Raise DomainError if any point is outside the model domain."""
    if space.model == HALF_PLANE:
        y = np.asarray(pts, dtype=float)[..., 1]
        if np.any(y <= 0.0):
            raise DomainError("half-plane model requires y > 0")


def lam(space, y):
    """Conformal factor of the half-plane model, lam = 1/(sqrt(-kappa_e) y)."""
    if space.model != HALF_PLANE:
        raise UnsupportedSpaceError("lam is defined in the half-plane model only")
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0.0):
        raise DomainError("half-plane model requires y > 0")
    return 1.0 / (math.sqrt(-space.kappa_e) * y)


def metric_many(space, pts):
    """Metric coefficient matrices at chart points.

    ``pts``: (..., 2) or (..., 3) array; the metric depends on (x, y) only.
    Returns (..., 3, 3).
    """
    pts = np.asarray(pts, dtype=float)
    x = pts[..., 0]
    y = pts[..., 1]
    g = np.zeros(x.shape + (3, 3))
    m = space.model
    if m == EUCLIDEAN:
        g[..., 0, 0] = g[..., 1, 1] = g[..., 2, 2] = 1.0
        return g
    if m == HEISENBERG:
        t = space.tau
        g[..., 0, 0] = 1.0 + (t * y) ** 2
        g[..., 1, 1] = 1.0 + (t * x) ** 2
        g[..., 2, 2] = 1.0
        g[..., 0, 1] = g[..., 1, 0] = -(t ** 2) * x * y
        g[..., 0, 2] = g[..., 2, 0] = -t * y
        g[..., 1, 2] = g[..., 2, 1] = t * x
        return g
    check_domain(space, pts)
    H = space.h_mean
    c = 1.0 / (-space.kappa_e)
    lam2 = c / y ** 2
    g[..., 0, 0] = lam2 + (2.0 * H * y * lam2) ** 2
    g[..., 1, 1] = lam2
    g[..., 2, 2] = 1.0
    g[..., 0, 2] = g[..., 2, 0] = 2.0 * H * y * lam2
    return g


def metric_at(space, p):
    """Metric coefficient matrix (3x3) at a single chart point."""
    return metric_many(space, np.asarray(p, dtype=float))


def dmetric_many(space, pts):
    """Coordinate derivatives d_k g_ij of the metric; shape (..., 3, 3, 3).

    Index order: ``dg[..., k, i, j]`` is the k-derivative of g_ij.  The
    expressions are hand-derived per model so that downstream consumers
    (Christoffel symbols, geodesics) avoid numerical differentiation.
    """
    pts = np.asarray(pts, dtype=float)
    x = pts[..., 0]
    y = pts[..., 1]
    dg = np.zeros(x.shape + (3, 3, 3))
    m = space.model
    if m == EUCLIDEAN:
        return dg
    if m == HEISENBERG:
        t = space.tau
        # d/dx
        dg[..., 0, 1, 1] = 2.0 * t ** 2 * x
        dg[..., 0, 0, 1] = dg[..., 0, 1, 0] = -(t ** 2) * y
        dg[..., 0, 1, 2] = dg[..., 0, 2, 1] = t
        # d/dy
        dg[..., 1, 0, 0] = 2.0 * t ** 2 * y
        dg[..., 1, 0, 1] = dg[..., 1, 1, 0] = -(t ** 2) * x
        dg[..., 1, 0, 2] = dg[..., 1, 2, 0] = -t
        return dg
    check_domain(space, pts)
    H = space.h_mean
    c = 1.0 / (-space.kappa_e)
    # g_xx = (c + 4 H^2 c^2)/y^2, g_yy = c/y^2, g_xz = 2 H c / y
    dg[..., 1, 0, 0] = -2.0 * (c + 4.0 * H ** 2 * c ** 2) / y ** 3
    dg[..., 1, 1, 1] = -2.0 * c / y ** 3
    dg[..., 1, 0, 2] = dg[..., 1, 2, 0] = -2.0 * H * c / y ** 2
    return dg


def christoffels_many(space, pts):
    """Levi-Civita connection coefficients Gamma^i_{jk}; shape (..., 3, 3, 3)."""
    g = metric_many(space, pts)
    dg = dmetric_many(space, pts)
    gi = np.linalg.inv(g)
    # Gamma^i_{jk} = 1/2 g^{il} (d_j g_{lk} + d_k g_{lj} - d_l g_{jk})
    dj_glk = np.einsum("...jlk->...ljk", dg)
    dk_glj = np.einsum("...klj->...ljk", dg)
    dl_gjk = dg
    gamma = 0.5 * np.einsum("...il,...ljk->...ijk", gi, dj_glk + dk_glj - dl_gjk)
    return gamma


def christoffels(space, p):
    """Connection coefficients at a single point; Gamma[i, j, k] = Gamma^i_{jk}."""
    return christoffels_many(space, np.asarray(p, dtype=float))


def connection_coeffs(space, pts):
    """Coefficients (w1, w2) with dz = w1 dx + w2 dy along horizontal lifts.

    Equivalently w = (-g_xz, -g_yz); returns shape (..., 2).
    """
    pts = np.asarray(pts, dtype=float)
    x = pts[..., 0]
    y = pts[..., 1]
    w = np.zeros(x.shape + (2,))
    m = space.model
    if m == EUCLIDEAN:
        return w
    if m == HEISENBERG:
        w[..., 0] = space.tau * y
        w[..., 1] = -space.tau * x
        return w
    check_domain(space, pts)
    c = 1.0 / (-space.kappa_e)
    w[..., 0] = -2.0 * space.h_mean * c / y
    return w


def horizontal_vector(space, p, vxy):
    """Horizontal lift at p of a base vector (vx, vy); returns (..., 3)."""
    p = np.asarray(p, dtype=float)
    vxy = np.asarray(vxy, dtype=float)
    w = connection_coeffs(space, p)
    out = np.zeros(vxy.shape[:-1] + (3,))
    out[..., 0] = vxy[..., 0]
    out[..., 1] = vxy[..., 1]
    out[..., 2] = w[..., 0] * vxy[..., 0] + w[..., 1] * vxy[..., 1]
    return out


def vertical_part(space, p, v):
    """g(xi, v) at p: the metric component of v along the unit fiber field."""
    v = np.asarray(v, dtype=float)
    w = connection_coeffs(space, p)
    return v[..., 2] - w[..., 0] * v[..., 0] - w[..., 1] * v[..., 1]


def base_conformal_factor(space, pts):
    """mu^2 with base metric mu^2 (dx^2 + dy^2); shape like pts[..., 0]."""
    pts = np.asarray(pts, dtype=float)
    if space.model == HALF_PLANE:
        check_domain(space, pts)
        return 1.0 / ((-space.kappa_e) * pts[..., 1] ** 2)
    return np.ones_like(pts[..., 0])


def norm_g(space, p, v):
    g = metric_many(space, p)
    v = np.asarray(v, dtype=float)
    return np.sqrt(np.einsum("...i,...ij,...j->...", v, g, v))


def _log1p_over(u):
    """log(1+u)/u, stable through u = 0."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = np.abs(u) < 1e-8
    us = u[small]
    out[small] = 1.0 - us / 2.0 + us * us / 3.0
    ub = u[~small]
    out[~small] = np.log1p(ub) / ub
    return out


def polyline_lift_displacements(space, pts):
    """Per-segment vertical displacement of the horizontal lift of a polyline.

    ``pts``: (N, 2) chart points; the integral of the connection form is
    evaluated in closed form on each straight chart segment, so the result
    is exact for polylines.  Returns (N-1,).
    """
    pts = np.asarray(pts, dtype=float)
    p0, p1 = pts[:-1], pts[1:]
    dx = p1[:, 0] - p0[:, 0]
    dy = p1[:, 1] - p0[:, 1]
    m = space.model
    if m == EUCLIDEAN:
        return np.zeros(len(dx))
    if m == HEISENBERG:
        return space.tau * (p0[:, 1] * dx - p0[:, 0] * dy)
    check_domain(space, pts)
    c = 1.0 / (-space.kappa_e)
    y0 = p0[:, 1]
    return -2.0 * space.h_mean * c * dx * _log1p_over(dy / y0) / y0


def oriented_area(space, pts, closed=True):
    """Signed base area enclosed by a chart polyline.

    Positive for loops running clockwise in the chart; with that sign the
    vertical holonomy of the horizontal lift is exactly ``2 tau area`` for
    polyline loops.  Exact for straight chart segments.
    """
    pts = np.asarray(pts, dtype=float)
    if closed and not np.allclose(pts[0], pts[-1]):
        pts = np.vstack([pts, pts[0]])
    p0, p1 = pts[:-1], pts[1:]
    dx = p1[:, 0] - p0[:, 0]
    dy = p1[:, 1] - p0[:, 1]
    if space.model == HALF_PLANE:
        check_domain(space, pts)
        c = 1.0 / (-space.kappa_e)
        y0 = p0[:, 1]
        return float(np.sum(-c * dx * _log1p_over(dy / y0) / y0))
    return float(0.5 * np.sum(p0[:, 1] * dx - p0[:, 0] * dy))


def base_distance(space, p, q):
    """Distance in the base surface of curvature kappa_e between chart points."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if space.model == HALF_PLANE:
        check_domain(space, p[..., :2])
        check_domain(space, q[..., :2])
        arg = 1.0 + ((p[..., 0] - q[..., 0]) ** 2 + (p[..., 1] - q[..., 1]) ** 2) / (
            2.0 * p[..., 1] * q[..., 1]
        )
        return np.arccosh(arg) / math.sqrt(-space.kappa_e)
    return np.hypot(p[..., 0] - q[..., 0], p[..., 1] - q[..., 1])
