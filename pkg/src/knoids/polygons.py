"""Geodesic polygons in the fibration base: hinge closure, areas, containment."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import hyperbolic as hyp
from .spaces import SpaceParams, UnsupportedSpaceError

__all__ = [
    "BasePolygon",
    "base_polygon_from_hinge",
    "polygon_area_quadrature",
    "point_in_polygon",
    "flat_space",
]

_FLAT_EPS = 1e-13


def flat_space(kappa_base):
    """A SpaceParams whose fibration base has curvature ``kappa_base`` (tau=0)."""
    return SpaceParams(kappa=float(kappa_base), h_mean=0.0)


@dataclass
class BasePolygon:
    """Geodesic polygon in the curvature-``kappa`` base surface.

    ``vertices`` are chart points in traversal order; edge i joins vertex i
    to vertex i+1 (mod n).  ``oriented_area`` is positive when the stored
    traversal runs clockwise in the chart (the convention under which
    horizontal lifts of positively traversed loops climb by 2*tau*area).
    """

    kappa: float
    vertices: np.ndarray
    side_lengths: np.ndarray
    interior_angles: np.ndarray
    oriented_area: float
    labels: dict = field(default_factory=dict)

    @property
    def n(self):
        return len(self.vertices)

    def edge(self, i):
        return self.vertices[i], self.vertices[(i + 1) % self.n]

    def vertex(self, name):
        return self.vertices[self.labels[name]]


def _edge_direction(kappa, p, q):
    """Chart angle at p of the geodesic toward q."""
    if kappa < -_FLAT_EPS:
        return float(hyp.direction_angle(p, q))
    d = q - p
    return math.atan2(d[1], d[0])


def _distance(kappa, p, q):
    if kappa < -_FLAT_EPS:
        return float(hyp.distance(p, q)) / math.sqrt(-kappa)
    return float(np.hypot(*(q - p)))


def _step(kappa, p, theta, dist):
    if kappa < -_FLAT_EPS:
        q, th = hyp.step(p, theta, dist * math.sqrt(-kappa))
        return q, th
    return p + dist * np.array([math.cos(theta), math.sin(theta)]), theta


def geodesic_edge_points(kappa, p, q, n):
    """n+1 arc-length samples of the geodesic segment from p to q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if kappa < -_FLAT_EPS:
        th = float(hyp.direction_angle(p, q))
        d = float(hyp.distance(p, q))
        pts = hyp.geodesic_points(p, th, d, n)
        pts[-1] = q
        return pts
    t = np.linspace(0.0, 1.0, n + 1)
    return p[None, :] + t[:, None] * (q - p)[None, :]


def _chart_orientation_sign(kappa, vertices, samples=64):
    """+1 if the traversal is clockwise in the chart (positive convention)."""
    ring = []
    n = len(vertices)
    for i in range(n):
        ring.append(geodesic_edge_points(kappa, vertices[i], vertices[(i + 1) % n], samples)[:-1])
    ring = np.vstack(ring + [vertices[:1]])
    p0, p1 = ring[:-1], ring[1:]
    shoelace_ccw = 0.5 * np.sum(p0[:, 0] * p1[:, 1] - p1[:, 0] * p0[:, 1])
    return 1.0 if shoelace_ccw < 0 else -1.0


def _polygon_from_vertices(kappa, vertices, labels=None):
    vertices = np.asarray(vertices, dtype=float)
    n = len(vertices)
    lengths = np.array(
        [_distance(kappa, vertices[i], vertices[(i + 1) % n]) for i in range(n)]
    )
    sign = _chart_orientation_sign(kappa, vertices)
    angles = np.empty(n)
    for i in range(n):
        a_prev = _edge_direction(kappa, vertices[i], vertices[(i - 1) % n])
        a_next = _edge_direction(kappa, vertices[i], vertices[(i + 1) % n])
        # interior angle, reflex-aware: sweep from the outgoing to the
        # incoming direction through the interior side of the traversal
        angles[i] = (sign * (a_next - a_prev)) % (2.0 * math.pi)
    if kappa < -_FLAT_EPS:
        area = (((n - 2) * math.pi) - float(np.sum(angles))) / (-kappa)
    else:
        v = vertices
        area = 0.5 * abs(
            float(np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1]))
        )
    return BasePolygon(
        kappa=float(kappa),
        vertices=vertices,
        side_lengths=lengths,
        interior_angles=angles,
        oriented_area=sign * area,
        labels=labels or {},
    )


def base_polygon_from_hinge(kappa_base, lengths, angles, start=None, start_dir=0.0,
                            labels=None, positive=True):
    """Close a geodesic hinge into a polygon.

    ``lengths`` (m of them) and ``angles`` (m-1 interior angles at the
    intermediate vertices) describe a geodesic path; the final geodesic back
    to the start closes the polygon.  Vertices are returned in path order.
    With ``positive=True`` the turning sense is chosen so the traversal is
    positively oriented (clockwise in the chart).
    """
    lengths = [float(v) for v in np.atleast_1d(lengths)]
    angles = [float(v) for v in np.atleast_1d(angles)]
    if len(angles) != len(lengths) - 1:
        raise ValueError("need one interior angle per intermediate vertex")
    if any(l <= 0 for l in lengths):
        raise ValueError("hinge lengths must be positive")
    if any(not 0.0 < a < math.pi for a in angles):
        raise ValueError("hinge angles must lie in (0, pi)")
    if kappa_base > _FLAT_EPS:
        raise UnsupportedSpaceError("base curvature must be <= 0")

    def walk(turn):
        p = np.asarray(
            start if start is not None else ((0.0, 1.0) if kappa_base < -_FLAT_EPS else (0.0, 0.0)),
            dtype=float,
        )
        theta = start_dir
        verts = [p]
        for i, L in enumerate(lengths):
            p, theta = _step(kappa_base, p, theta, L)
            verts.append(p)
            if i < len(angles):
                theta = theta + turn * (math.pi - angles[i])
        return np.asarray(verts)

    verts = walk(+1.0)
    poly = _polygon_from_vertices(kappa_base, verts, labels)
    if positive and poly.oriented_area < 0 or (not positive and poly.oriented_area > 0):
        verts = walk(-1.0)
        poly = _polygon_from_vertices(kappa_base, verts, labels)
    return poly


def polygon_from_vertices(kappa, vertices, labels=None):
    """Polygon with the given chart vertices joined by geodesics."""
    return _polygon_from_vertices(kappa, vertices, labels)


def _triangle_area_quad(kappa, tri, depth):
    """Area of a geodesic triangle by subdivision + midpoint quadrature."""
    tris = [tuple(map(np.asarray, tri))]
    mid = (lambda p, q: hyp.midpoint(p, q)) if kappa < -_FLAT_EPS else (
        lambda p, q: 0.5 * (p + q)
    )
    for _ in range(depth):
        nxt = []
        for a, b, c in tris:
            mab, mbc, mca = mid(a, b), mid(b, c), mid(c, a)
            nxt += [(a, mab, mca), (mab, b, mbc), (mca, mbc, c), (mab, mbc, mca)]
        tris = nxt
    A = np.array([t[0] for t in tris])
    B = np.array([t[1] for t in tris])
    C = np.array([t[2] for t in tris])
    cent = (A + B + C) / 3.0
    chart = 0.5 * np.abs(
        (B[:, 0] - A[:, 0]) * (C[:, 1] - A[:, 1])
        - (C[:, 0] - A[:, 0]) * (B[:, 1] - A[:, 1])
    )
    if kappa < -_FLAT_EPS:
        mu2 = 1.0 / ((-kappa) * cent[:, 1] ** 2)
    else:
        mu2 = np.ones(len(cent))
    return float(np.sum(chart * mu2))


def polygon_area_quadrature(polygon, depth=6, fan_vertex=0):
    """Unsigned polygon area by triangulated numerical integration.

    Fans the polygon from one vertex, subdivides each geodesic triangle
    ``depth`` times, applies midpoint quadrature, and Richardson-extrapolates
    one level.  Independent of the angle-defect formula, so it serves as an
    area oracle.
    """
    v = polygon.vertices
    tris = [
        (v[fan_vertex], v[i], v[(i + 1) % len(v)])
        for i in range(len(v))
        if i != fan_vertex and (i + 1) % len(v) != fan_vertex
    ]
    a_d = sum(_triangle_area_quad(polygon.kappa, t, depth) for t in tris)
    a_d1 = sum(_triangle_area_quad(polygon.kappa, t, depth + 1) for t in tris)
    return (4.0 * a_d1 - a_d) / 3.0


def point_in_polygon(polygon, q, samples=128):
    """Winding-number membership test against densely sampled geodesic edges."""
    q = np.asarray(q, dtype=float)
    ring = []
    n = polygon.n
    for i in range(n):
        a, b = polygon.edge(i)
        ring.append(geodesic_edge_points(polygon.kappa, a, b, samples)[:-1])
    ring = np.vstack(ring)
    x = ring[:, 0] - q[0]
    y = ring[:, 1] - q[1]
    x2 = np.roll(x, -1)
    y2 = np.roll(y, -1)
    ang = np.arctan2(x * y2 - y * x2, x * x2 + y * y2)
    return bool(abs(np.sum(ang)) > math.pi)
