"""Conforming triangulations of geodesic polygons by midpoint subdivision.

Root triangles (with geodesic edges) are split recursively: each level
replaces a triangle by four children using geodesic edge midpoints, which
keeps every boundary node on its geodesic edge and makes refinements and
families of growing domains exactly nested (shared roots subdivide to
bitwise-identical vertices).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import hyperbolic as hyp
from .polygons import BasePolygon, geodesic_edge_points
from .spaces import SpaceParams

__all__ = ["Mesh", "RootTriangle", "mesh_from_roots", "triangulate",
           "roots_from_polygon", "refine"]

_FLAT_EPS = 1e-13


@dataclass
class RootTriangle:
    """Geodesic triangle with per-edge boundary markers.

    ``vertices``: (3, 2) chart points; edge i joins vertex i to vertex i+1.
    ``edge_marks[i]`` is a hashable boundary-edge id or None for interior
    edges (diagonals shared by two roots).
    """

    vertices: np.ndarray
    edge_marks: tuple


@dataclass
class Mesh:
    kappa: float
    points: np.ndarray            # (nv, 2)
    triangles: np.ndarray         # (nt, 3), counterclockwise in the chart
    node_marks: list              # per node: frozenset of boundary-edge ids
    corner_ids: dict              # polygon-vertex chart point -> node id
    depth: int = 0
    roots: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def n_points(self):
        return len(self.points)

    def boundary_nodes(self):
        return np.array([i for i, m in enumerate(self.node_marks) if m])

    def interior_nodes(self):
        return np.array([i for i, m in enumerate(self.node_marks) if not m])

    def nodes_on_edge(self, edge_id):
        return np.array([i for i, m in enumerate(self.node_marks) if edge_id in m])

    def edges(self):
        e = set()
        for t in self.triangles:
            for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                e.add((min(a, b), max(a, b)))
        return e

    def vertex_rings(self):
        """1-ring adjacency as a list of sets."""
        rings = [set() for _ in range(self.n_points)]
        for t in self.triangles:
            for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                rings[a].add(b)
                rings[b].add(a)
        return rings

    def boundary_layers(self):
        """Graph distance of each node from the boundary (0 on the boundary)."""
        rings = self.vertex_rings()
        dist = np.full(self.n_points, -1, dtype=int)
        frontier = [i for i, m in enumerate(self.node_marks) if m]
        for i in frontier:
            dist[i] = 0
        level = 0
        while frontier:
            nxt = []
            for i in frontier:
                for j in rings[i]:
                    if dist[j] < 0:
                        dist[j] = level + 1
                        nxt.append(j)
            frontier = nxt
            level += 1
        return dist


def _midpoint(kappa, p, q):
    if kappa < -_FLAT_EPS:
        return hyp.midpoint(p, q)
    return 0.5 * (p + q)


def _tri_chart_ccw(pts, tri):
    a, b, c = pts[tri[0]], pts[tri[1]], pts[tri[2]]
    return (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]) > 0


def mesh_from_roots(kappa, roots, depth, meta=None) -> Mesh:
    """Subdivide root triangles ``depth`` times into a conforming mesh."""
    key_of = {}
    points = []
    marks = []

    def node(p, mark_set):
        key = (round(float(p[0]), 12), round(float(p[1]), 12))
        if key in key_of:
            i = key_of[key]
            marks[i] = marks[i] | mark_set
            return i
        key_of[key] = len(points)
        points.append(np.asarray(p, dtype=float))
        marks.append(frozenset(mark_set))
        return len(points) - 1

    triangles = []

    def subdivide(v0, v1, v2, m01, m12, m20, level):
        # vi: (point, markset-of-the-point); mij: edge marker or None
        if level == 0:
            ids = [node(*v0), node(*v1), node(*v2)]
            triangles.append(ids)
            return
        e01 = frozenset([m01] if m01 is not None else [])
        e12 = frozenset([m12] if m12 is not None else [])
        e20 = frozenset([m20] if m20 is not None else [])
        m_a = (_midpoint(kappa, v0[0], v1[0]), e01)
        m_b = (_midpoint(kappa, v1[0], v2[0]), e12)
        m_c = (_midpoint(kappa, v2[0], v0[0]), e20)
        subdivide(v0, m_a, m_c, m01, None, m20, level - 1)
        subdivide(m_a, v1, m_b, m01, m12, None, level - 1)
        subdivide(m_c, m_b, v2, None, m12, m20, level - 1)
        subdivide(m_a, m_b, m_c, None, None, None, level - 1)

    corner_ids = {}
    for root in roots:
        vs = np.asarray(root.vertices, dtype=float)
        ms = root.edge_marks
        vmarks = []
        for i in range(3):
            inc = {ms[i], ms[(i - 1) % 3]} - {None}
            vmarks.append(frozenset(inc))
        subdivide((vs[0], vmarks[0]), (vs[1], vmarks[1]), (vs[2], vmarks[2]),
                  ms[0], ms[1], ms[2], depth)
        for i in range(3):
            key = (round(float(vs[i][0]), 12), round(float(vs[i][1]), 12))
            corner_ids[key] = key_of[key]

    pts = np.asarray(points)
    tris = np.asarray(triangles, dtype=int)
    flip = np.array([not _tri_chart_ccw(pts, t) for t in tris])
    tris[flip] = tris[flip][:, [0, 2, 1]]
    return Mesh(kappa=float(kappa), points=pts, triangles=tris,
                node_marks=marks, corner_ids=corner_ids, depth=depth,
                roots=list(roots), meta=meta or {})


def _edge_subdivision_midpoint_consistency(kappa, roots):
    # midpoints of a shared edge agree because the midpoint depends only on
    # the two endpoints; nothing to do, kept as documentation of the invariant
    return True


def roots_from_polygon(polygon, diagonals=None):
    """Root triangles for a polygon: a triangle directly, a quadrilateral via
    its stored diagonal (corner, diag_end), other polygons by chart ear cuts.
    """
    v = polygon.vertices
    n = len(v)
    if n == 3:
        return [RootTriangle(np.array([v[0], v[1], v[2]]), (0, 1, 2))]
    if n == 4 and diagonals is None and "corner" in polygon.labels:
        c = polygon.labels["corner"]
        diagonals = [(c, (c + 2) % 4)]
    if diagonals:
        a, b = diagonals[0]
        r1 = RootTriangle(np.array([v[a], v[(a + 1) % n], v[b]]),
                          (a, (a + 1) % n, None))
        r2 = RootTriangle(np.array([v[a], v[b], v[(b + 1) % n]]),
                          (None, b, (b + 1) % n))
        if n != 4:
            raise ValueError("diagonal splitting implemented for quadrilaterals")
        return [r1, r2]
    return _ear_cut_roots(polygon)


def _ear_cut_roots(polygon):
    """Chart-space ear cutting (adequate for mildly curved small polygons)."""
    v = [tuple(p) for p in polygon.vertices]
    idx = list(range(len(v)))
    pts = polygon.vertices

    def area2(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])

    ccw = 0.0
    for i in range(len(v)):
        a, b = pts[i], pts[(i + 1) % len(v)]
        ccw += (b[0] - a[0]) * (b[1] + a[1])
    orient = -1.0 if ccw > 0 else 1.0

    roots = []
    guard = 0
    while len(idx) > 3 and guard < 10000:
        guard += 1
        n = len(idx)
        for j in range(n):
            i0, i1, i2 = idx[(j - 1) % n], idx[j], idx[(j + 1) % n]
            a, b, c = pts[i0], pts[i1], pts[i2]
            if orient * area2(a, b, c) <= 0:
                continue
            ok = True
            for m in idx:
                if m in (i0, i1, i2):
                    continue
                p = pts[m]
                d1 = orient * area2(a, b, p)
                d2 = orient * area2(b, c, p)
                d3 = orient * area2(c, a, p)
                if d1 >= 0 and d2 >= 0 and d3 >= 0:
                    ok = False
                    break
            if ok:
                marks = (i0 if (i0 + 1) % len(v) == i1 else None,
                         i1 if (i1 + 1) % len(v) == i2 else None,
                         i2 if (i2 + 1) % len(v) == i0 else None)
                roots.append(RootTriangle(np.array([a, b, c]), marks))
                idx.pop(j)
                break
        else:
            raise ValueError("ear cutting failed; polygon may be non-simple")
    i0, i1, i2 = idx
    marks = (i0 if (i0 + 1) % len(v) == i1 else None,
             i1 if (i1 + 1) % len(v) == i2 else None,
             i2 if (i2 + 1) % len(v) == i0 else None)
    roots.append(RootTriangle(np.array([pts[i0], pts[i1], pts[i2]]), marks))
    return roots


def _root_max_edge(kappa, root):
    v = root.vertices
    if kappa < -_FLAT_EPS:
        d = [float(hyp.distance(v[i], v[(i + 1) % 3])) / math.sqrt(-kappa)
             for i in range(3)]
    else:
        d = [float(np.hypot(*(v[(i + 1) % 3] - v[i]))) for i in range(3)]
    return max(d)


def _check_simple(polygon, samples=24):
    pts = []
    seg_edge = []
    n = polygon.n
    for i in range(n):
        a, b = polygon.edge(i)
        e = geodesic_edge_points(polygon.kappa, a, b, samples)
        pts.append(e[:-1])
        seg_edge += [i] * samples
    ring = np.vstack(pts)
    seg_edge = np.array(seg_edge)
    a = ring
    b = np.vstack([ring[1:], ring[:1]])
    m = len(a)
    for i in range(m):
        d1 = b[i] - a[i]
        js = np.arange(i + 2, m if i > 0 else m - 1)
        if len(js) == 0:
            continue
        d2 = b[js] - a[js]
        r = a[js] - a[i]
        den = d1[0] * d2[:, 1] - d1[1] * d2[:, 0]
        ok = np.abs(den) > 1e-15
        s = np.where(ok, (r[:, 0] * d2[:, 1] - r[:, 1] * d2[:, 0]) / np.where(ok, den, 1.0), -1)
        u = np.where(ok, (r[:, 0] * d1[1] - r[:, 1] * d1[0]) / np.where(ok, den, 1.0), -1)
        hit = ok & (s >= -1e-9) & (s <= 1 + 1e-9) & (u >= -1e-9) & (u <= 1 + 1e-9)
        hit &= seg_edge[js] != seg_edge[i]
        # segments meeting at a polygon corner are legitimate contacts
        shared = (np.hypot(*(a[js] - b[i]).T) < 1e-12) | (np.hypot(*(b[js] - a[i]).T) < 1e-12)
        hit &= ~shared
        if np.any(hit):
            raise ValueError("polygon boundary is self-intersecting")


def triangulate(polygon, h=None, depth=None, diagonals=None) -> Mesh:
    """Conforming triangulation of a geodesic polygon.

    ``h``: target metric edge length (converted to a uniform subdivision
    depth); or give ``depth`` directly.  Jump vertices (polygon corners) are
    mesh vertices by construction and boundary nodes lie on the geodesic
    edges.  Self-intersecting input is rejected.
    """
    _check_simple(polygon)
    roots = roots_from_polygon(polygon, diagonals)
    if depth is None:
        if h is None or h <= 0:
            raise ValueError("give a positive mesh size h or a depth")
        longest = max(_root_max_edge(polygon.kappa, r) for r in roots)
        depth = max(0, math.ceil(math.log2(longest / h)))
    mesh = mesh_from_roots(polygon.kappa, roots, depth, meta={"polygon": polygon})
    return mesh


def refine(mesh) -> Mesh:
    """Uniform refinement: re-subdivide the stored roots one level deeper."""
    return mesh_from_roots(mesh.kappa, mesh.roots, mesh.depth + 1, meta=mesh.meta)
