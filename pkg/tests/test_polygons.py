import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knoids.polygons import (
    base_polygon_from_hinge,
    point_in_polygon,
    polygon_area_quadrature,
    polygon_from_vertices,
)


def test_flat_right_triangle():
    tri = base_polygon_from_hinge(0.0, [3.0, 4.0], [math.pi / 2])
    assert sorted(np.round(tri.side_lengths, 10)) == [3.0, 4.0, 5.0]
    assert tri.oriented_area == pytest.approx(6.0)


def test_hyperbolic_angle_defect_area():
    # right angle + pi/4 + pi/6 triangle has area pi/12; realize it by solving
    # for the hinge: angles fix the triangle up to isometry, so build from the
    # standard side lengths (hyperbolic law of cosines for angles)
    A, B, C = math.pi / 2, math.pi / 4, math.pi / 6
    # side c (opposite C): cos C = -cos A cos B + sin A sin B cosh c
    cosh_c = (math.cos(C) + math.cos(A) * math.cos(B)) / (math.sin(A) * math.sin(B))
    cosh_b = (math.cos(B) + math.cos(A) * math.cos(C)) / (math.sin(A) * math.sin(C))
    c = math.acosh(cosh_c)
    b = math.acosh(cosh_b)
    tri = base_polygon_from_hinge(-1.0, [b, c], [A])
    assert abs(tri.oriented_area) == pytest.approx(math.pi / 12, abs=1e-10)
    assert sorted(tri.interior_angles) == pytest.approx(sorted([A, B, C]), abs=1e-9)


def test_hinge_closure_law_of_cosines():
    a, r, ang = 1.0, 1.0, math.pi / 2
    tri = base_polygon_from_hinge(-1.0, [a, r], [ang])
    oracle = math.acosh(math.cosh(a) * math.cosh(r)
                        - math.sinh(a) * math.sinh(r) * math.cos(ang))
    assert tri.side_lengths[2] == pytest.approx(oracle, abs=1e-8)


def test_area_defect_vs_quadrature_oracle():
    tri = base_polygon_from_hinge(-1.0, [1.0, 10.0], [math.pi / 3])
    q = polygon_area_quadrature(tri, depth=7)
    assert abs(tri.oriented_area) == pytest.approx(q, abs=1e-6)


def test_scaled_curvature_area():
    tri1 = base_polygon_from_hinge(-1.0, [0.8, 1.2], [math.pi / 4])
    tri2 = base_polygon_from_hinge(-0.25, [1.6, 2.4], [math.pi / 4])
    # doubling lengths at quarter curvature scales area by 4
    assert tri2.oriented_area == pytest.approx(4.0 * tri1.oriented_area, rel=1e-10)


def test_degenerate_hinge_rejected():
    with pytest.raises(ValueError):
        base_polygon_from_hinge(-1.0, [0.0, 1.0], [math.pi / 3])
    with pytest.raises(ValueError):
        base_polygon_from_hinge(-1.0, [1.0, 1.0], [0.0])


def test_positive_orientation_and_membership():
    tri = base_polygon_from_hinge(-1.0, [1.0, 2.0], [math.pi / 3])
    assert tri.oriented_area > 0
    centroid = np.mean(tri.vertices, axis=0)
    assert point_in_polygon(tri, centroid)
    assert not point_in_polygon(tri, centroid + np.array([5.0, 0.0]))


def test_reflex_quad_interior_angles():
    # arrowhead quadrilateral: one reflex vertex at the notch
    quad = polygon_from_vertices(0.0, np.array(
        [[0.0, 0.0], [2.0, 1.0], [4.0, 0.0], [2.0, 3.0]], float))
    assert np.sum(quad.interior_angles > math.pi) == 1
    assert abs(quad.oriented_area) == pytest.approx(4.0)
    assert np.sum(quad.interior_angles) == pytest.approx(2 * math.pi)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.3, 2.5), st.floats(0.3, 2.5), st.floats(0.3, 2.6))
def test_hinge_closure_random(a, r, ang):
    tri = base_polygon_from_hinge(-1.0, [a, r], [ang])
    oracle = math.acosh(math.cosh(a) * math.cosh(r)
                        - math.sinh(a) * math.sinh(r) * math.cos(ang))
    assert tri.side_lengths[2] == pytest.approx(oracle, abs=1e-8)
    assert tri.interior_angles[1] == pytest.approx(ang, abs=1e-8)
    assert tri.oriented_area > 0
