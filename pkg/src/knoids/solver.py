"""Discrete area minimization for sections over triangulated base polygons.

The unknowns are nodal heights of a piecewise-linear section; the energy is
the ambient area of the PL surface, integrated per triangle with a midpoint
quadrature rule whose gradient and Hessian in the heights are assembled
analytically.  A damped Newton iteration (with a Levenberg fallback when
the Hessian loses definiteness) drives the gradient to zero.  Dirichlet
data comes from lifted contours; vertices where vertical contour edges
project (jump vertices) are left free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from .contours import (
    NoidSpec,
    boundary_heights,
    knoid_contour,
    knoid_triangle,
    noid2k_contour,
    noid2k_quad,
)
from .meshing import Mesh, RootTriangle, mesh_from_roots, triangulate
from .polygons import base_polygon_from_hinge, polygon_from_vertices
from .scherk import mce_residual
from .spaces import (
    NumericalError,
    base_conformal_factor,
    metric_many,
)

__all__ = [
    "SolverOptions",
    "SolveReport",
    "DiscreteGraph",
    "discrete_graph_area",
    "solve_graph",
    "dirichlet_from_contour",
    "knoid_family",
    "noid2k_family",
    "solve_family",
    "convergence_ladder",
    "LadderReport",
    "vertical_tangency_check",
    "graph_mce_residuals",
    "maximum_principle_check",
    "reflect_extend",
    "graph_interpolate",
]


@dataclass
class SolverOptions:
    newton_tol: float = 1e-10
    max_iter: int = 80
    armijo: float = 1e-4
    min_step: float = 1e-14
    levenberg0: float = 1e-8
    trust_unguarded: float = 1e-5

    def __post_init__(self):
        if self.newton_tol <= 0:
            raise ValueError("newton_tol must be positive")


@dataclass
class SolveReport:
    area: float
    grad_norm: float
    iterations: int
    converged: bool
    max_principle_ok: bool = True
    interior_range: tuple = (math.nan, math.nan)
    boundary_range: tuple = (math.nan, math.nan)
    mce_stats: dict = field(default_factory=dict)
    barrier: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)


@dataclass
class DiscreteGraph:
    space: object
    mesh: Mesh
    heights: np.ndarray
    dirichlet_mask: np.ndarray    # True where the height is prescribed
    contour: object = None
    meta: dict = field(default_factory=dict)


def _triangle_quantities(space, mesh):
    """Per-triangle, per-quadrature-point geometry reused by the assembly."""
    pts = mesh.points
    tris = mesh.triangles
    p0 = pts[tris[:, 0]]
    p1 = pts[tris[:, 1]]
    p2 = pts[tris[:, 2]]
    # midpoint rule on the reference triangle
    qpts = [0.5 * (p0 + p1), 0.5 * (p1 + p2), 0.5 * (p2 + p0)]
    e1 = p1 - p0
    e2 = p2 - p0
    B = []
    V = []
    for q in qpts:
        g = metric_many(space, q)
        g2 = g[:, :2, :2]
        gz = g[:, :2, 2]
        b11 = np.einsum("ni,nij,nj->n", e1, g2, e1)
        b12 = np.einsum("ni,nij,nj->n", e1, g2, e2)
        b22 = np.einsum("ni,nij,nj->n", e2, g2, e2)
        v1 = np.einsum("ni,ni->n", e1, gz)
        v2 = np.einsum("ni,ni->n", e2, gz)
        B.append((b11, b12, b22))
        V.append((v1, v2))
    return B, V


def discrete_graph_area(space, mesh, heights, need_grad=False, need_hess=False,
                        cache=None):
    """Ambient area of the PL section, optionally with gradient and Hessian.

    The area of each triangle is integrated with the 3-point midpoint rule;
    since the quadrature points project to fixed base points, the metric
    factors are constants and the integrand is an explicit algebraic
    function of the three nodal heights, differentiated exactly.
    """
    if cache is None:
        cache = _triangle_quantities(space, mesh)
    B, V = cache
    tris = mesh.triangles
    z0 = heights[tris[:, 0]]
    z1 = heights[tris[:, 1]]
    z2 = heights[tris[:, 2]]
    dz1 = z1 - z0
    dz2 = z2 - z0

    area = 0.0
    grad_loc = np.zeros((len(tris), 3))
    hess_loc = np.zeros((len(tris), 3, 3))
    Jt = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])  # d(dz)/d(z0,z1,z2)

    for (b11, b12, b22), (v1, v2) in zip(B, V):
        m1 = v1 + dz1
        m2 = v2 + dz2
        G11 = b11 + 2.0 * v1 * dz1 + dz1 * dz1
        G12 = b12 + v1 * dz2 + v2 * dz1 + dz1 * dz2
        G22 = b22 + 2.0 * v2 * dz2 + dz2 * dz2
        D = G11 * G22 - G12 * G12
        D = np.maximum(D, 1e-300)
        F = np.sqrt(D)
        area += np.sum(F) / 6.0
        if not (need_grad or need_hess):
            continue
        D1 = 2.0 * (m1 * G22 - G12 * m2)
        D2 = 2.0 * (m2 * G11 - G12 * m1)
        F1 = D1 / (2.0 * F)
        F2 = D2 / (2.0 * F)
        grad_loc[:, 0] += (-F1 - F2) / 6.0
        grad_loc[:, 1] += F1 / 6.0
        grad_loc[:, 2] += F2 / 6.0
        if need_hess:
            D11 = 2.0 * (G22 - m2 * m2)
            D22 = 2.0 * (G11 - m1 * m1)
            D12 = 2.0 * (m1 * m2 - G12)
            H11 = (2.0 * D11 * D - D1 * D1) / (4.0 * D * F)
            H22 = (2.0 * D22 * D - D2 * D2) / (4.0 * D * F)
            H12 = (2.0 * D12 * D - D1 * D2) / (4.0 * D * F)
            # chain to (z0, z1, z2) through dz = J^T z
            Hzeta = np.empty((len(tris), 2, 2))
            Hzeta[:, 0, 0] = H11
            Hzeta[:, 0, 1] = Hzeta[:, 1, 0] = H12
            Hzeta[:, 1, 1] = H22
            hess_loc += np.einsum("ai,nij,bj->nab", Jt, Hzeta, Jt) / 6.0

    out = [float(area)]
    if need_grad or need_hess:
        grad = np.zeros(mesh.n_points)
        np.add.at(grad, tris[:, 0], grad_loc[:, 0])
        np.add.at(grad, tris[:, 1], grad_loc[:, 1])
        np.add.at(grad, tris[:, 2], grad_loc[:, 2])
        out.append(grad)
    if need_hess:
        rows = np.repeat(tris, 3, axis=1).ravel()
        cols = np.tile(tris, (1, 3)).ravel()
        vals = hess_loc.reshape(len(tris), 9).ravel()
        H = sparse.coo_matrix((vals, (rows, cols)),
                              shape=(mesh.n_points, mesh.n_points)).tocsc()
        out.append(H)
    return out[0] if len(out) == 1 else tuple(out)


def _laplace_initial(mesh, values, free):
    """Chart Dirichlet-energy minimizer as the Newton starting guess."""
    pts = mesh.points
    tris = mesh.triangles
    p0, p1, p2 = pts[tris[:, 0]], pts[tris[:, 1]], pts[tris[:, 2]]
    d1 = p1 - p0
    d2 = p2 - p0
    det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    area = 0.5 * np.abs(det)
    # P1 stiffness: grad of barycentric functions
    g0 = np.column_stack([p1[:, 1] - p2[:, 1], p2[:, 0] - p1[:, 0]])
    g1 = np.column_stack([p2[:, 1] - p0[:, 1], p0[:, 0] - p2[:, 0]])
    g2 = np.column_stack([p0[:, 1] - p1[:, 1], p1[:, 0] - p0[:, 0]])
    rows, cols, vals = [], [], []
    gs = [g0, g1, g2]
    for a in range(3):
        for b in range(3):
            rows.append(tris[:, a])
            cols.append(tris[:, b])
            vals.append(np.einsum("ni,ni->n", gs[a], gs[b]) / (4.0 * area))
    K = sparse.coo_matrix((np.concatenate(vals),
                           (np.concatenate(rows), np.concatenate(cols))),
                          shape=(mesh.n_points, mesh.n_points)).tocsc()
    z = values.copy()
    fixed = ~free
    rhs = -K[:, fixed] @ z[fixed]
    Kff = K[free][:, free]
    z[free] = spsolve(Kff, rhs[free])
    return z


def solve_graph(space, mesh, values, free, opts=None, return_graph=True):
    """Damped Newton minimization of the discrete area.

    ``values``: nodal array with Dirichlet data on ~free nodes (entries at
    free nodes are ignored); ``free``: boolean mask of unknowns (interior
    nodes plus jump vertices).
    """
    opts = opts or SolverOptions()
    cache = _triangle_quantities(space, mesh)
    z = _laplace_initial(mesh, values, free)
    idx = np.where(free)[0]

    def fg(zv, hess=False):
        if hess:
            a, g, H = discrete_graph_area(space, mesh, zv, True, True, cache)
            return a, g[idx], H[idx][:, idx]
        a, g = discrete_graph_area(space, mesh, zv, True, False, cache)
        return a, g[idx]

    area, g = fg(z)
    converged = False
    it = 0
    notes = []
    for it in range(1, opts.max_iter + 1):
        gn = float(np.max(np.abs(g))) if len(g) else 0.0
        if gn <= opts.newton_tol:
            converged = True
            break
        _, _, H = fg(z, hess=True)
        lev = 0.0
        d = None
        for attempt in range(30):
            try:
                Hs = H + lev * sparse.identity(H.shape[0], format="csc") if lev else H
                d = spsolve(Hs, -g)
            except Exception:
                d = None
            if d is not None and np.all(np.isfinite(d)) and float(d @ g) < 0:
                break
            lev = opts.levenberg0 if lev == 0.0 else 10.0 * lev
            d = None
        if d is None:
            d = -g
            notes.append(f"iter {it}: fell back to gradient descent")
        gd = float(g @ d)
        if gn < opts.trust_unguarded:
            # near the minimum the Armijo test drowns in the evaluation noise
            # of the area sum; plain Newton steps are locally contractive
            z_try = z.copy()
            z_try[idx] = z[idx] + d
            a_try, g_try = fg(z_try)
            if np.max(np.abs(g_try)) < gn:
                z, area, g = z_try, a_try, g_try
                continue
            notes.append(f"iter {it}: stagnated at gradient {gn:.2e}")
            break
        t = 1.0
        while t > opts.min_step:
            z_try = z.copy()
            z_try[idx] = z[idx] + t * d
            a_try, g_try = fg(z_try)
            if a_try <= area + opts.armijo * t * gd:
                z, area, g = z_try, a_try, g_try
                break
            t *= 0.5
        else:
            notes.append(f"iter {it}: line search stalled")
            break
    gn = float(np.max(np.abs(g))) if len(g) else 0.0
    report = SolveReport(area=area, grad_norm=gn, iterations=it,
                         converged=converged or gn <= opts.newton_tol,
                         notes=notes)
    if not report.converged:
        report.notes.append("newton did not reach tolerance")
    graph = DiscreteGraph(space=space, mesh=mesh, heights=z,
                          dirichlet_mask=~free) if return_graph else None
    _fill_ranges(report, mesh, z, free)
    return (graph, report) if return_graph else report


def _fill_ranges(report, mesh, z, free):
    fixed = ~free
    if np.any(fixed):
        report.boundary_range = (float(np.min(z[fixed])), float(np.max(z[fixed])))
    if np.any(free):
        report.interior_range = (float(np.min(z[free])), float(np.max(z[free])))
    lo, hi = report.boundary_range
    report.max_principle_ok = bool(
        report.interior_range[0] >= lo - 1e-9 and report.interior_range[1] <= hi + 1e-9
    )


def maximum_principle_check(graph, slack=1e-9):
    z = graph.heights
    fixed = graph.dirichlet_mask
    lo, hi = np.min(z[fixed]), np.max(z[fixed])
    free = ~fixed
    return bool(np.all(z[free] >= lo - slack) and np.all(z[free] <= hi + slack))


def dirichlet_from_contour(mesh, contour, edge_key=None):
    """Nodal Dirichlet values and the free mask from a lifted contour.

    Boundary nodes on a single polygon edge take the lifted height.  At a
    corner where a vertical contour arc projects (a height jump), the
    conforming PL section cannot carry both one-sided traces; the node is
    pinned to their midpoint, which lies on the vertical arc it represents
    and keeps the discrete maximum principle exact.  (Leaving the node free
    lets skinny corner fans park it at an artifact height.)
    """
    bd = boundary_heights(contour)
    n = mesh.n_points
    values = np.zeros(n)
    free = np.ones(n, dtype=bool)
    for i, marks in enumerate(mesh.node_marks):
        if not marks:
            continue
        edges = sorted(marks)
        if len(edges) == 1:
            values[i] = float(bd.edge_height[edges[0]](mesh.points[i]))
            free[i] = False
        else:
            jump = _vertex_jump(bd, mesh.points[i])
            if jump is not None:
                values[i] = 0.5 * (jump[0] + jump[1])
            else:
                values[i] = float(bd.edge_height[edges[0]](mesh.points[i]))
            free[i] = False
    return values, free


def _vertex_jump(bd, point):
    for vi, pair in bd.jumps.items():
        v = bd.polygon.vertices[vi]
        if np.allclose(v, point, atol=1e-9):
            return pair
    return None


def knoid_family(spec, truncations, depth):
    """Nested meshes, contours, and Dirichlet data for the hinge family.

    All truncations share the root triangle of the smallest one, extended by
    pivot triangles at the a-end, so common mesh nodes coincide bitwise.
    Returns a list of problem dicts ordered by truncation.
    """
    base = spec
    specs = [NoidSpec(base.space, base.k, float(r), a=base.a) for r in truncations]
    tris = [knoid_triangle(s) for s in specs]
    va = tris[0].vertex("a_end")
    vh = tris[0].vertex("hinge")
    ws = [t.vertex("r_end") for t in tris]

    problems = []
    for j, s in enumerate(specs):
        roots = [RootTriangle(np.array([va, vh, ws[0]]),
                              (0, 1, 2 if j == 0 else None))]
        for i in range(1, j + 1):
            roots.append(RootTriangle(np.array([va, ws[i - 1], ws[i]]),
                                      (None, 1, 2 if i == j else None)))
        mesh = mesh_from_roots(s.space.kappa_e, roots, depth,
                               meta={"polygon": tris[j]})
        contour = knoid_contour(s, tri=tris[j])
        values, free = dirichlet_from_contour(mesh, contour)
        problems.append({"spec": s, "polygon": tris[j], "mesh": mesh,
                         "contour": contour, "values": values, "free": free,
                         "moving_edges": (2,)})
    return problems


def noid2k_family(spec, truncations, depth):
    """Nested meshes and data for the quadrilateral family (pivot at the
    diagonal endpoint)."""
    base = spec
    specs = [NoidSpec(base.space, base.k, float(n), d=base.d, alpha=base.alpha)
             for n in truncations]
    quads = [noid2k_quad(s) for s in specs]
    corner = quads[0].vertex("corner")
    diag = quads[0].vertex("diag_end")
    As = [q.vertex("A") for q in quads]
    Bs = [q.vertex("B") for q in quads]

    problems = []
    for j, s in enumerate(specs):
        roots = [
            RootTriangle(np.array([corner, As[0], diag]),
                         (0, 1 if j == 0 else None, None)),
            RootTriangle(np.array([corner, diag, Bs[0]]),
                         (None, 2 if j == 0 else None, 3)),
        ]
        for i in range(1, j + 1):
            roots.append(RootTriangle(np.array([As[i - 1], As[i], diag]),
                                      (0, 1 if i == j else None, None)))
            roots.append(RootTriangle(np.array([Bs[i], Bs[i - 1], diag]),
                                      (3, None, 2 if i == j else None)))
        mesh = mesh_from_roots(s.space.kappa_e, roots, depth,
                               meta={"polygon": quads[j]})
        contour = noid2k_contour(s, quad=quads[j])
        values, free = dirichlet_from_contour(mesh, contour)
        problems.append({"spec": s, "polygon": quads[j], "mesh": mesh,
                         "contour": contour, "values": values, "free": free,
                         "moving_edges": (1, 2)})
    return problems


def solve_family(problems, opts=None):
    out = []
    for prob in problems:
        graph, report = solve_graph(prob["spec"].space, prob["mesh"],
                                    prob["values"], prob["free"], opts)
        graph.contour = prob["contour"]
        graph.meta["truncation"] = prob["spec"].truncation
        graph.meta["polygon"] = prob["polygon"]
        graph.meta["moving_edges"] = prob.get("moving_edges", ())
        out.append((graph, report))
    return out


@dataclass
class LadderReport:
    truncations: list
    node_keys: list
    values: np.ndarray            # (n_trunc, n_nodes) heights at shared nodes
    monotone: bool
    min_increment: float
    sup_differences: list
    decreasing: bool
    limit_estimate: np.ndarray | None = None


def convergence_ladder(solutions, margin=0.5, slack=1e-8, moving_edges=None):
    """Monotonicity and Cauchy audit of a truncation ladder on shared nodes.

    ``solutions``: list of (DiscreteGraph, SolveReport) ordered by
    truncation.  The compact set consists of the smallest truncation's nodes
    at metric distance >= ``margin`` from the polygon edges that move with
    the truncation (and off the shared Dirichlet boundary); those nodes are
    shared bitwise by every mesh of a nested family.
    """
    from .polygons import geodesic_edge_points

    g0 = solutions[0][0]
    poly = g0.mesh.meta.get("polygon") or g0.meta.get("polygon")
    if moving_edges is None:
        moving_edges = g0.meta.get("moving_edges", ())
    pts = g0.mesh.points
    keep_mask = g0.mesh.boundary_layers() >= 2
    if poly is not None and len(moving_edges):
        ring = np.vstack([geodesic_edge_points(poly.kappa, *poly.edge(e), 96)
                          for e in moving_edges])
        if poly.kappa < -1e-13:
            from . import hyperbolic as hyp

            d = np.array([float(np.min(hyp.distance(np.broadcast_to(p, ring.shape), ring)))
                          for p in pts]) / math.sqrt(-poly.kappa)
        else:
            d = np.array([float(np.min(np.hypot(ring[:, 0] - p[0], ring[:, 1] - p[1])))
                          for p in pts])
        keep_mask &= d >= margin
    keep = np.where(keep_mask)[0]
    if len(keep) == 0:
        raise ValueError("compact set is empty; reduce the margin")
    keys = [tuple(np.round(g0.mesh.points[i], 12)) for i in keep]

    vals = np.empty((len(solutions), len(keep)))
    for r, (graph, _) in enumerate(solutions):
        index = {tuple(np.round(p, 12)): i for i, p in enumerate(graph.mesh.points)}
        for c, key in enumerate(keys):
            if key not in index:
                raise NumericalError("ladder meshes are not nested at a node")
            vals[r, c] = graph.heights[index[key]]

    increments = np.diff(vals, axis=0)
    min_inc = float(np.min(increments)) if len(solutions) > 1 else 0.0
    sup_diff = [float(np.max(np.abs(d))) for d in increments]
    decreasing = all(sup_diff[i + 1] <= sup_diff[i] + slack
                     for i in range(len(sup_diff) - 1))
    limit = None
    if len(solutions) >= 3:
        d1 = vals[-2] - vals[-3]
        d2 = vals[-1] - vals[-2]
        denom = d2 - d1
        safe = np.abs(denom) > 1e-15
        limit = vals[-1].copy()
        limit[safe] = vals[-1][safe] - d2[safe] ** 2 / denom[safe]
    return LadderReport(
        truncations=[s[0].meta.get("truncation") for s in solutions],
        node_keys=keys, values=vals,
        monotone=bool(min_inc >= -slack), min_increment=min_inc,
        sup_differences=sup_diff, decreasing=decreasing,
        limit_estimate=limit,
    )


def vertical_tangency_check(graph, cap=1e3, exclude_radius=None):
    """True iff the metric gradient of the section stays below ``cap`` away
    from jump vertices; also returns the max gradient and its location."""
    mesh = graph.mesh
    pts = mesh.points
    tris = mesh.triangles
    z = graph.heights
    p0, p1, p2 = pts[tris[:, 0]], pts[tris[:, 1]], pts[tris[:, 2]]
    z0, z1, z2 = z[tris[:, 0]], z[tris[:, 1]], z[tris[:, 2]]
    d1 = p1 - p0
    d2 = p2 - p0
    det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    gx = ((z1 - z0) * d2[:, 1] - (z2 - z0) * d1[:, 1]) / det
    gy = (-(z1 - z0) * d2[:, 0] + (z2 - z0) * d1[:, 0]) / det
    cent = (p0 + p1 + p2) / 3.0
    mu = np.sqrt(base_conformal_factor(graph.space, cent))
    gn = np.hypot(gx, gy) / mu
    mask = np.ones(len(tris), dtype=bool)
    if exclude_radius is not None and graph.contour is not None:
        bd = boundary_heights(graph.contour)
        for vi in bd.jumps:
            v = bd.polygon.vertices[vi]
            mask &= np.hypot(cent[:, 0] - v[0], cent[:, 1] - v[1]) > exclude_radius
    if not np.any(mask):
        return True, 0.0, None
    sub = np.where(mask)[0]
    i = sub[np.argmax(gn[sub])]
    return bool(gn[sub].max() < cap), float(gn[sub].max()), cent[i]


def _quadratic_fit_jet(mesh, z, node, rings):
    """Local weighted quadratic least-squares jet at an interior node."""
    ring1 = rings[node]
    ring2 = set(ring1)
    for j in ring1:
        ring2 |= rings[j]
    ring2.discard(node)
    ids = np.array(sorted(ring2))
    if len(ids) < 6:
        raise NumericalError("stencil too small for a quadratic fit")
    dp = mesh.points[ids] - mesh.points[node]
    du = z[ids] - z[node]
    scale = np.mean(np.hypot(dp[:, 0], dp[:, 1]))
    dp = dp / scale
    A = np.column_stack([
        dp[:, 0], dp[:, 1],
        0.5 * dp[:, 0] ** 2, dp[:, 0] * dp[:, 1], 0.5 * dp[:, 1] ** 2,
    ])
    w = 1.0 / (1.0 + np.hypot(dp[:, 0], dp[:, 1]) ** 2)
    sol, *_ = np.linalg.lstsq(A * w[:, None], du * w, rcond=None)
    ux, uy = sol[0] / scale, sol[1] / scale
    uxx, uxy, uyy = sol[2] / scale**2, sol[3] / scale**2, sol[4] / scale**2
    return z[node], ux, uy, uxx, uxy, uyy


def graph_mce_residuals(graph, min_layers=3):
    """Graph-equation residuals at deep-interior nodes of a solved section.

    Jets are recovered by weighted quadratic fits over two neighbor rings;
    only applicable in the half-plane model.
    """
    mesh = graph.mesh
    layers = mesh.boundary_layers()
    rings = mesh.vertex_rings()
    nodes = np.where(layers >= min_layers)[0]
    out = {}
    for i in nodes:
        jet = _quadratic_fit_jet(mesh, graph.heights, i, rings)
        out[i] = mce_residual(graph.space, jet, mesh.points[i])
    return out


def graph_interpolate(graph, pts):
    """PL interpolation of the section at chart points (nan outside)."""
    mesh = graph.mesh
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    tp = mesh.points[mesh.triangles]
    out = np.full(len(pts), np.nan)
    for n, q in enumerate(pts):
        d1 = tp[:, 1] - tp[:, 0]
        d2 = tp[:, 2] - tp[:, 0]
        rhs = q[None, :] - tp[:, 0]
        det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
        l1 = (rhs[:, 0] * d2[:, 1] - rhs[:, 1] * d2[:, 0]) / det
        l2 = (d1[:, 0] * rhs[:, 1] - d1[:, 1] * rhs[:, 0]) / det
        l0 = 1.0 - l1 - l2
        ok = (l0 >= -1e-12) & (l1 >= -1e-12) & (l2 >= -1e-12)
        if not np.any(ok):
            continue
        t = int(np.argmax(ok))
        zt = graph.heights[mesh.triangles[t]]
        out[n] = l0[t] * zt[0] + l1[t] * zt[1] + l2[t] * zt[2]
    return out if len(out) > 1 else float(out[0])


def reflect_extend(graph, edge):
    """Extend a solved section by a half-turn about a boundary geodesic.

    ``edge`` is either ("vertical", chart_point) for the fiber over a base
    point, or ("horizontal", (a, b, z_a)) for the horizontal lift through
    height z_a over the base geodesic a -> b.  Returns a new DiscreteGraph
    whose mesh and heights are the isometric image of the input.
    """
    from .isometries import (
        ambient_rotation_about_fiber,
        ambient_rotation_about_horizontal,
    )

    kind = edge[0]
    if kind == "vertical":
        iso = ambient_rotation_about_fiber(graph.space, np.asarray(edge[1], float),
                                           math.pi)
    elif kind == "horizontal":
        a, b, z_a = edge[1]
        iso = ambient_rotation_about_horizontal(graph.space, np.asarray(a, float),
                                                np.asarray(b, float), z_a)
    else:
        raise ValueError("edge kind must be 'vertical' or 'horizontal'")
    pts3 = np.column_stack([graph.mesh.points, graph.heights])
    img = iso.apply_points(pts3)
    new_mesh = Mesh(
        kappa=graph.mesh.kappa,
        points=img[:, :2],
        triangles=(graph.mesh.triangles[:, [0, 2, 1]]
                   if iso.base_map.orientation < 0 else graph.mesh.triangles.copy()),
        node_marks=list(graph.mesh.node_marks),
        corner_ids={},
        depth=graph.mesh.depth,
        meta={"reflected_from": graph.mesh.meta},
    )
    return DiscreteGraph(space=graph.space, mesh=new_mesh, heights=img[:, 2],
                         dirichlet_mask=graph.dirichlet_mask.copy(),
                         meta={"isometry": iso})
