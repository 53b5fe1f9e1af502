import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knoids import hyperbolic as hyp
from knoids.contours import NoidSpec
from knoids.meshing import triangulate
from knoids.polygons import polygon_from_vertices
from knoids.sister import (
    SisterRelations,
    TwistProfile,
    gauss_bonnet_loop_check,
    mirror_curve,
    sister_curvature,
    twist_along_vertical,
)
from knoids.solver import DiscreteGraph, knoid_family, solve_family
from knoids.spaces import SpaceParams


def test_sister_curvature_trivials():
    kt, tt = sister_curvature(0.5, 0.0, 0.0)
    assert (kt, tt) == (0.5, 0.0)
    kt, tt = sister_curvature(0.0, 2.0, 3.0)
    assert (kt, tt) == (-3.0, 2.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 0.5))
def test_sister_relations_algebra(k, t, H):
    kt, tt = SisterRelations(H).map(k, t)
    assert kt == -t + H
    assert tt == k


def test_alpha_rate_on_unit_speed_geodesics():
    # differentiating the integral identity alpha = int t + H l: on a curve
    # with constant torsion the rate is t + H
    H, torsion = 0.3, 0.7
    length = np.linspace(0.0, 2.0, 101)
    alpha = torsion * length + H * length
    rate = np.gradient(alpha, length)
    assert np.allclose(rate, torsion + H, atol=1e-12)


def _synthetic_twist(rate, length, n=201):
    t = np.linspace(0.0, length, n)
    return TwistProfile(params=t, alpha=rate * t, alpha_rate=np.full(n, rate),
                        base_point=np.array([0.0, 1.0]))


def test_mirror_geodesic_when_rate_is_2H():
    H = 0.3
    mc = mirror_curve(-1.0, H, _synthetic_twist(2 * H, 2.0))
    assert np.max(np.abs(mc.curvature)) < 1e-14
    d = float(hyp.distance(mc.points[0], mc.points[-1]))
    assert d == pytest.approx(2.0, abs=1e-9)


def test_mirror_horocycle_self_distance_oracle():
    # kappa=-1, H=0, alpha'=1: constant curvature -1, horocycle type;
    # unit-speed horocycle satisfies d(c(0), c(T)) = 2 asinh(T/2)
    mc = mirror_curve(-1.0, 0.0, _synthetic_twist(1.0, 3.0), oversample=8)
    for frac in (0.3, 0.6, 1.0):
        i = int(frac * (len(mc.points) - 1))
        T = mc.params[i]
        d = float(hyp.distance(mc.points[0], mc.points[i]))
        assert d == pytest.approx(2.0 * math.asinh(T / 2.0), abs=1e-7)


def test_mirror_hypercycle_unbounded_embedded():
    mc = mirror_curve(-1.0, 0.0, _synthetic_twist(0.5, 12.0, 241), oversample=4)
    dists = [float(hyp.distance(mc.points[0], p)) for p in mc.points[::40]]
    assert np.all(np.diff(dists) > 0)
    assert gauss_bonnet_loop_check(mc, -1.0).verdict == "embedded-consistent"


def test_mirror_arclength_matches_twist_interval():
    tw = _synthetic_twist(0.8, 1.7)
    mc = mirror_curve(-1.0, 0.2, tw)
    assert mc.params[-1] - mc.params[0] == pytest.approx(1.7)
    # unit speed in the curvature -1 metric
    mids = 0.5 * (mc.points[1:] + mc.points[:-1])
    seg = np.hypot(*np.diff(mc.points, axis=0).T) / mids[:, 1]
    assert np.max(np.abs(seg - np.diff(mc.params))) < 1e-6


def test_gauss_bonnet_circle_control():
    rho, H = 0.8, 0.25
    k_tilde = -1.0 / math.tanh(rho)
    rate = 2 * H - k_tilde
    L = 2.0 * math.pi * math.sinh(rho)
    tw = _synthetic_twist(rate, 1.02 * L, 4001)
    mc = mirror_curve(-1.0, H, tw, oversample=8)
    chk = gauss_bonnet_loop_check(mc, -1.0)
    assert chk.verdict == "contradiction-found"
    loop = chk.loops[0]
    assert loop["area"] == pytest.approx(2 * math.pi * (math.cosh(rho) - 1), abs=1e-6)
    assert abs(loop["residual"]) < 1e-6
    # the identity alpha = 2 pi - phi + 2 H l - kappa area on the loop
    ident = 2 * math.pi - loop["phi"] + 2 * H * L + loop["area"]
    assert loop["alpha_span"] == pytest.approx(ident, abs=2e-3)
    assert loop["alpha_span"] > math.pi


def test_geodesic_has_no_loops():
    mc = mirror_curve(-1.0, 0.3, _synthetic_twist(0.6, 2.0))
    assert gauss_bonnet_loop_check(mc, -1.0).verdict == "embedded-consistent"


def test_twist_of_vertical_plane_ruling_field():
    # the section over a straight base line is its own vertical plane; level
    # directions never rotate
    s = SpaceParams(-1.0, 0.5)
    tri = polygon_from_vertices(0.0, np.array([[0, 0], [2.4, 0], [1.2, 1.9]], float))
    m = triangulate(tri, depth=4)
    heights = 3.0 * m.points[:, 1]  # level lines parallel to the x-axis
    graph = DiscreteGraph(space=s, mesh=m, heights=heights,
                          dirichlet_mask=np.zeros(m.n_points, bool))

    class Arc:
        points = np.array([[1.2, 0.95, 0.5], [1.2, 0.95, 5.2]])

    tw = twist_along_vertical(s, graph, Arc, n_levels=32)
    assert np.max(np.abs(tw.alpha_rate)) < 1e-9


def test_twist_of_helicoid_pitch_rate():
    s = SpaceParams(0.0, 0.0)
    hexa = polygon_from_vertices(0.0, np.array(
        [[1.1 * math.cos(a), 1.1 * math.sin(a)]
         for a in np.linspace(0, 2 * math.pi, 9)[:-1]]))
    m = triangulate(hexa, depth=5)
    h_pitch = 0.7
    theta_cw = -np.arctan2(m.points[:, 1], m.points[:, 0])
    graph = DiscreteGraph(space=s, mesh=m, heights=h_pitch * theta_cw,
                          dirichlet_mask=np.zeros(m.n_points, bool))

    class Arc:
        points = np.array([[0.0, 0.0, -0.3 * h_pitch * math.pi],
                           [0.0, 0.0, 0.3 * h_pitch * math.pi]])

    tw = twist_along_vertical(s, graph, Arc, n_levels=48)
    total_rate = (tw.alpha[-1] - tw.alpha[0]) / (tw.params[-1] - tw.params[0])
    assert total_rate == pytest.approx(1.0 / h_pitch, rel=2e-2)


def test_twist_positive_on_solved_piece_and_mirror_embedded():
    s = SpaceParams(-1.0, 0.5)
    spec = NoidSpec(s, k=2, truncation=2.0, a=1.0)
    prob = knoid_family(spec, [2.0], depth=5)[0]
    graph, rep = solve_family([prob])[0]
    assert rep.converged
    graph.contour = prob["contour"]
    for arc in graph.contour.arcs:
        if arc.kind != "vertical":
            continue
        tw = twist_along_vertical(s, graph, arc, n_levels=64)
        assert np.all(tw.alpha_rate > 0)
        assert np.all(np.diff(tw.alpha) > 0)
        mc = mirror_curve(s.kappa, s.h_mean, tw, oversample=4)
        assert np.max(mc.curvature) < 2 * s.h_mean
        assert gauss_bonnet_loop_check(mc, s.kappa).verdict == "embedded-consistent"


def test_mirror_curve_rejects_positive_curvature_plane():
    with pytest.raises(ValueError):
        mirror_curve(0.5, 0.1, _synthetic_twist(0.1, 1.0))
