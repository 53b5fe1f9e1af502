import math

import numpy as np
import pytest

from knoids.contours import NoidSpec, knoid_triangle, noid2k_quad
from knoids.meshing import RootTriangle, mesh_from_roots, refine, triangulate
from knoids.polygons import polygon_from_vertices
from knoids.spaces import SpaceParams


def _all_ccw(mesh):
    p = mesh.points
    t = mesh.triangles
    d1 = p[t[:, 1]] - p[t[:, 0]]
    d2 = p[t[:, 2]] - p[t[:, 0]]
    return bool(np.all(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0] > 0))


def test_unit_square_counts_and_orientation():
    sq = polygon_from_vertices(0.0, np.array([[0, 0], [0, 1], [1, 1], [1, 0]], float))
    m = triangulate(sq, h=0.5)
    assert len(m.triangles) >= 8
    assert _all_ccw(m)
    # conforming: each interior edge shared by exactly two triangles
    from collections import Counter

    cnt = Counter()
    for t in m.triangles:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            cnt[(min(a, b), max(a, b))] += 1
    assert set(cnt.values()) <= {1, 2}


def test_nonconvex_quad_respects_reflex_vertex():
    s = SpaceParams(0.0, 0.0)
    quad = noid2k_quad(NoidSpec(s, k=2, truncation=10.0, d=1.0, alpha=math.pi / 8))
    assert not quad.labels["convex"]
    m = triangulate(quad, h=1.0)
    assert _all_ccw(m)
    # all triangle centroids lie inside the polygon
    from knoids.polygons import point_in_polygon

    cents = m.points[m.triangles].mean(axis=1)
    for c in cents[:: max(1, len(cents) // 40)]:
        assert point_in_polygon(quad, c)


def test_refinement_boundary_superset():
    tri = knoid_triangle(NoidSpec(SpaceParams(-1.0, 0.0), k=3, truncation=2.0, a=1.0))
    m1 = triangulate(tri, depth=3)
    m2 = refine(m1)
    b1 = {tuple(np.round(m1.points[i], 12)) for i in m1.boundary_nodes()}
    b2 = {tuple(np.round(m2.points[i], 12)) for i in m2.boundary_nodes()}
    assert b1 <= b2
    assert len(m2.triangles) == 4 * len(m1.triangles)


def test_boundary_nodes_on_geodesic_edges():
    from knoids import hyperbolic as hyp

    tri = knoid_triangle(NoidSpec(SpaceParams(-1.0, 0.3), k=2, truncation=2.0, a=1.0))
    m = triangulate(tri, depth=4)
    for i in m.boundary_nodes():
        marks = m.node_marks[i]
        e = sorted(marks)[0]
        a, b = tri.edge(e)
        # distance from the node to the geodesic through the edge endpoints
        side = hyp.side_of_geodesic(a, b, m.points[i])
        P = hyp.to_hyperboloid(m.points[i])
        A = hyp.to_hyperboloid(a)
        B = hyp.to_hyperboloid(b)
        T = B + hyp.mdot(B, A) * A
        T = T / math.sqrt(hyp.mdot(T, T))
        N = hyp.normal_of(A, T)
        assert abs(hyp.mdot(N, P)) < 1e-9  # sinh(dist) to the geodesic


def test_truncation_family_nesting():
    from knoids.solver import knoid_family

    spec = NoidSpec(SpaceParams(-1.0, 0.0), k=3, truncation=2.0, a=1.0)
    probs = knoid_family(spec, [2.0, 3.0, 4.0], depth=3)
    keys = [{tuple(np.round(p, 12)) for p in pr["mesh"].points} for pr in probs]
    assert keys[0] <= keys[1] <= keys[2]


def test_self_intersecting_polygon_rejected():
    bow = polygon_from_vertices(0.0, np.array([[0, 0], [1, 1], [1, 0], [0, 1]], float))
    with pytest.raises(ValueError):
        triangulate(bow, h=0.4)


def test_jump_vertices_are_mesh_corners():
    spec = NoidSpec(SpaceParams(-1.0, 0.5), k=2, truncation=2.0, a=1.0)
    tri = knoid_triangle(spec)
    m = triangulate(tri, depth=3)
    for v in tri.vertices:
        key = (round(float(v[0]), 12), round(float(v[1]), 12))
        assert key in m.corner_ids
