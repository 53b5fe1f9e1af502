import math

import numpy as np
import pytest

from knoids.contours import NoidSpec, knoid_triangle
from knoids.meshing import triangulate
from knoids.polygons import geodesic_edge_points, polygon_from_vertices
from knoids.scherk import ScherkParams, mce_residual, scherk_graph_height_fn, scherk_jet
from knoids.solver import (
    DiscreteGraph,
    SolverOptions,
    convergence_ladder,
    dirichlet_from_contour,
    discrete_graph_area,
    graph_interpolate,
    graph_mce_residuals,
    knoid_family,
    maximum_principle_check,
    noid2k_family,
    reflect_extend,
    solve_family,
    solve_graph,
    vertical_tangency_check,
)
from knoids.spaces import SpaceParams


def _square_mesh(depth=2):
    sq = polygon_from_vertices(0.0, np.array([[0, 0], [0, 1], [1, 1], [1, 0]], float))
    return triangulate(sq, depth=depth)


def test_flat_graph_area_and_gradient():
    s = SpaceParams(0.0, 0.0)
    m = _square_mesh()
    z = np.zeros(m.n_points)
    a, g = discrete_graph_area(s, m, z, need_grad=True)
    assert a == pytest.approx(1.0, abs=1e-14)
    assert np.max(np.abs(g)) < 1e-14


def test_tilted_plane_area():
    s = SpaceParams(0.0, 0.0)
    m = _square_mesh()
    assert discrete_graph_area(s, m, m.points[:, 0].copy()) == pytest.approx(
        math.sqrt(2.0), abs=1e-13)


def test_gradient_and_hessian_fd_oracle():
    s = SpaceParams(-1.0, 0.3)
    tri = polygon_from_vertices(s.kappa_e, np.array([[0, 1.0], [0.5, 1.5], [-0.4, 1.8]]))
    m = triangulate(tri, depth=3)
    rng = np.random.default_rng(0)
    z = 0.3 * rng.standard_normal(m.n_points)
    a, g, H = discrete_graph_area(s, m, z, True, True)
    eps = 1e-6
    for i in rng.choice(m.n_points, 10, replace=False):
        zp, zm = z.copy(), z.copy()
        zp[i] += eps
        zm[i] -= eps
        fd = (discrete_graph_area(s, m, zp) - discrete_graph_area(s, m, zm)) / (2 * eps)
        assert fd == pytest.approx(g[i], rel=1e-6, abs=1e-10)
        _, gp = discrete_graph_area(s, m, zp, True)
        _, gm = discrete_graph_area(s, m, zm, True)
        hcol = np.asarray(H[:, i].todense()).ravel()
        assert np.max(np.abs((gp - gm) / (2 * eps) - hcol)) < 1e-6 * max(
            1.0, np.max(np.abs(hcol)))


def test_constant_dirichlet_gives_constant_solution():
    s = SpaceParams(-1.0, 0.3)
    tri = polygon_from_vertices(s.kappa_e, np.array([[0, 1.0], [0.6, 1.4], [-0.4, 1.7]]))
    m = triangulate(tri, depth=3)
    values = np.full(m.n_points, 2.5)
    free = np.array([not bool(mk) for mk in m.node_marks])
    graph, rep = solve_graph(s, m, values, free)
    assert rep.converged
    assert np.max(np.abs(graph.heights - 2.5)) < 1e-7
    assert maximum_principle_check(graph, slack=1e-7)


def test_solver_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(newton_tol=0.0)


def test_knoid_solutions_below_translated_scherk_barrier():
    s = SpaceParams(-1.0, 0.0)
    spec = NoidSpec(s, k=3, truncation=2.0, a=1.0)
    probs = knoid_family(spec, [2.0, 3.0], depth=4)
    sols = solve_family(probs)
    poly0 = probs[0]["polygon"]
    par = ScherkParams(s, geodesic=(tuple(poly0.vertex("a_end")),
                                    tuple(poly0.vertex("r_end"))),
                       side_point=tuple(poly0.vertex("hinge")))
    S = scherk_graph_height_fn(par)
    mesh0 = probs[0]["mesh"]
    hinge_nodes = [i for i, mk in enumerate(mesh0.node_marks) if mk and mk <= {0, 1}]
    sval = np.array([float(S(mesh0.points[i])) for i in hinge_nodes])
    C = float(np.max(sols[0][0].heights[hinge_nodes] - sval))
    for graph, _ in sols:
        index = {tuple(np.round(p, 12)): i for i, p in enumerate(graph.mesh.points)}
        for i, p in enumerate(mesh0.points):
            u = graph.heights[index[tuple(np.round(p, 12))]]
            assert u <= float(S(p)) + C + 1e-8


def test_euclid_knoid_below_helicoid_barrier():
    # flat base: the ruled graph y~ tan(x~/h) over the strip bounded by the
    # closing edge line dominates after a boundary shift
    s = SpaceParams(0.0, 0.0)
    spec = NoidSpec(s, k=3, truncation=2.0, a=1.5)
    probs = knoid_family(spec, [2.0, 3.0], depth=4)
    sols = solve_family(probs)
    poly0 = probs[0]["polygon"]
    va, vr = poly0.vertex("a_end"), poly0.vertex("r_end")
    hinge = poly0.vertex("hinge")
    # strip coordinates: x~ grows toward the closing line, zero at the far side
    nrm = np.array([-(vr - va)[1], (vr - va)[0]])
    nrm = nrm / np.hypot(*nrm)
    if np.dot(hinge - va, nrm) > 0:
        nrm = -nrm  # x~ increases away from the hinge vertex
    d_hinge = -float(np.dot(hinge - va, nrm))

    def barrier(q):
        x_t = d_hinge + float(np.dot(np.asarray(q) - va, nrm))  # 0 at hinge line
        y_t = float(np.dot(np.asarray(q) - va, (vr - va) / np.hypot(*(vr - va))))
        hpar = 2.0 * d_hinge / math.pi * 1.02
        return (y_t + 2.0) * math.tan(min(x_t, d_hinge * 1.015) / hpar)

    mesh0 = probs[0]["mesh"]
    hinge_nodes = [i for i, mk in enumerate(mesh0.node_marks) if mk and mk <= {0, 1}]
    bval = np.array([barrier(mesh0.points[i]) for i in hinge_nodes])
    C = float(np.max(sols[0][0].heights[hinge_nodes] - bval))
    for graph, _ in sols:
        index = {tuple(np.round(p, 12)): i for i, p in enumerate(graph.mesh.points)}
        for i, p in enumerate(mesh0.points):
            u = graph.heights[index[tuple(np.round(p, 12))]]
            assert u <= barrier(p) + C + 1e-8


def test_mce_residual_refinement_order():
    s = SpaceParams(-1.0, 0.0)
    spec = NoidSpec(s, k=3, truncation=2.0, a=1.0)
    tri = knoid_triangle(spec)
    from knoids import hyperbolic as hyp

    ring = np.vstack([geodesic_edge_points(-1.0, *tri.edge(i), 128)[:-1]
                      for i in range(3)])
    stats = []
    for depth in (4, 5, 6):
        graph, rep = solve_family(knoid_family(spec, [2.0], depth=depth))[0]
        assert rep.converged
        res = graph_mce_residuals(graph, min_layers=3)
        d = np.array([float(np.min(hyp.distance(np.broadcast_to(p, ring.shape), ring)))
                      for p in graph.mesh.points])
        vals = np.abs([v for i, v in res.items() if d[i] > 0.25])
        stats.append(float(np.sqrt(np.mean(np.square(vals)))))
    orders = [math.log2(stats[i] / stats[i + 1]) for i in range(2)]
    assert min(orders) >= 1.5


def test_ladder_2k_monotone_and_cauchy():
    s = SpaceParams(-1.0, 0.0)
    spec = NoidSpec(s, k=2, truncation=2.0, d=1.0, alpha=math.pi / 8)
    sols = solve_family(noid2k_family(spec, [2.0, 3.0, 4.0], depth=4))
    lad = convergence_ladder(sols, margin=0.5)
    assert lad.monotone
    assert lad.decreasing
    assert lad.limit_estimate is not None


def test_ladder_constant_family_is_flat():
    # constant Dirichlet data at every truncation: the ladder is constant
    s = SpaceParams(-1.0, 0.0)
    spec = NoidSpec(s, k=2, truncation=2.0, d=1.0, alpha=math.pi / 8)
    probs = noid2k_family(spec, [2.0, 3.0], depth=3)
    sols = []
    for prob in probs:
        values = np.full(prob["mesh"].n_points, 1.0)
        free = np.array([not bool(mk) for mk in prob["mesh"].node_marks])
        g, r = solve_graph(spec.space, prob["mesh"], values, free)
        g.meta["truncation"] = prob["spec"].truncation
        g.meta["polygon"] = prob["polygon"]
        g.meta["moving_edges"] = (1, 2)
        g.mesh.meta["polygon"] = prob["polygon"]
        sols.append((g, r))
    lad = convergence_ladder(sols, margin=0.3)
    assert lad.monotone and lad.sup_differences[0] < 1e-7


def test_vertical_tangency():
    s = SpaceParams(-1.0, 0.0)
    spec = NoidSpec(s, k=3, truncation=2.0, a=1.0)
    graph, _ = solve_family(knoid_family(spec, [2.0], depth=4))[0]
    ok, gmax, loc = vertical_tangency_check(graph, cap=1e3, exclude_radius=0.2)
    assert ok
    # synthetic fold: enormous gradient fails the cap
    bad = DiscreteGraph(space=s, mesh=graph.mesh,
                        heights=1e5 * graph.mesh.points[:, 0],
                        dirichlet_mask=graph.dirichlet_mask)
    ok2, gmax2, _ = vertical_tangency_check(bad, cap=1e3)
    assert not ok2


def test_gradient_grows_toward_jump_vertex():
    s = SpaceParams(-1.0, 0.0)
    spec = NoidSpec(s, k=3, truncation=2.0, a=1.0)
    graph, _ = solve_family(knoid_family(spec, [2.0], depth=5))[0]
    _, g_int, _ = vertical_tangency_check(graph, exclude_radius=0.3)
    _, g_all, loc = vertical_tangency_check(graph, exclude_radius=None)
    assert g_all > 2.0 * g_int
    # the max sits near a jump corner
    poly = graph.mesh.meta["polygon"]
    d = min(np.hypot(*(loc - poly.vertex("a_end"))),
            np.hypot(*(loc - poly.vertex("r_end"))))
    assert d < 0.2


def test_reflect_slice_across_horizontal_geodesic_is_same_slice():
    s = SpaceParams(-1.0, 0.0)
    tri = polygon_from_vertices(-1.0, np.array([[0, 1.0], [0.6, 1.4], [-0.4, 1.7]]))
    m = triangulate(tri, depth=3)
    graph = DiscreteGraph(space=s, mesh=m, heights=np.zeros(m.n_points),
                          dirichlet_mask=np.zeros(m.n_points, bool))
    img = reflect_extend(graph, ("horizontal", ((0.0, 1.0), (0.5, 1.3), 0.0)))
    assert np.max(np.abs(img.heights)) < 1e-12


def test_reflect_fan_closes_at_axis():
    # half-turns about the two hinge rays of an angle pi/k piece tile 2 pi
    s = SpaceParams(-1.0, 0.5)
    spec = NoidSpec(s, k=2, truncation=2.0, a=1.0)
    prob = knoid_family(spec, [2.0], depth=3)[0]
    graph, _ = solve_family([prob])[0]
    poly = prob["polygon"]
    hinge = poly.vertex("hinge")
    g1 = reflect_extend(graph, ("vertical", hinge))
    g2 = reflect_extend(g1, ("vertical", hinge))
    # rotation by pi twice = identity
    assert np.max(np.abs(g2.mesh.points - graph.mesh.points)) < 1e-9
    assert np.max(np.abs(g2.heights - graph.heights)) < 1e-9
    # the image heights still satisfy the fixed-fiber condition at the hinge
    i = np.argmin(np.hypot(*(graph.mesh.points - hinge).T))
    assert abs(g1.heights[i] - graph.heights[i]) < 1e-9


def test_reflect_vertical_preserves_continuity_on_axis_fiber():
    s = SpaceParams(-1.0, 0.3)
    spec = NoidSpec(s, k=2, truncation=2.0, a=1.0)
    prob = knoid_family(spec, [2.0], depth=3)[0]
    graph, _ = solve_family([prob])[0]
    v = prob["polygon"].vertex("a_end")
    img = reflect_extend(graph, ("vertical", v))
    # nodes on the axis fiber are fixed pointwise
    on_axis = np.where(np.hypot(*(graph.mesh.points - v).T) < 1e-10)[0]
    assert len(on_axis) >= 1
    for i in on_axis:
        assert np.allclose(img.mesh.points[i], graph.mesh.points[i], atol=1e-12)
        assert img.heights[i] == pytest.approx(graph.heights[i], abs=1e-12)


def test_reflect_isometry_invariance_of_residual():
    # analytic route: transform the wedge graph by the fiber rotation and
    # compare the graph-equation residual at matched points
    s = SpaceParams(-1.0, 0.3)
    par = ScherkParams(s)
    from knoids.isometries import ambient_rotation_about_fiber

    iso = ambient_rotation_about_fiber(s, np.array([0.5, 1.2]), math.pi)
    base_map = iso.base_map
    pt = np.array([0.8, 1.1])
    jet = scherk_jet(par, *pt)
    r0 = mce_residual(s, jet, pt)
    # transformed sampler: u'(q) = u(phi^{-1} q) + f(phi^{-1} q); residual at
    # phi(pt) must match r0 to isometry-invariance accuracy
    img = base_map(pt)

    def height(q):
        q = np.atleast_2d(np.asarray(q, float))
        back = base_map(q)  # the half-turn is an involution
        out = np.array([scherk_jet(par, *b)[0] for b in back])
        return out + iso.shift(back)

    from knoids.scherk import mce_residual_from_fn

    r1 = mce_residual_from_fn(s, lambda q: float(height(q)[0]), img, h=1e-5)
    assert r1 == pytest.approx(r0, abs=5e-5)


def test_graph_interpolate_inside_and_outside():
    s = SpaceParams(0.0, 0.0)
    m = _square_mesh()
    graph = DiscreteGraph(space=s, mesh=m, heights=m.points[:, 0] + 2 * m.points[:, 1],
                          dirichlet_mask=np.zeros(m.n_points, bool))
    assert graph_interpolate(graph, [[0.3, 0.4]]) == pytest.approx(1.1, abs=1e-12)
    assert math.isnan(graph_interpolate(graph, [[3.0, 3.0]]))
