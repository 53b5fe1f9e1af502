"""Boundary contours for the two surface families.

The first family is built over a hinge triangle: two geodesic edges of
lengths a and r enclosing the angle pi/k, closed by a third geodesic.  Its
contour lifts the hinge horizontally, inserts a vertical edge of length
s = r^2 at the end of the a-edge, lifts the closing geodesic, and closes
with a vertical edge whose signed length is s - 2 tau area (positive, so
the contour is embedded).

The second family is built over a geodesic quadrilateral: two edges of
length n enclosing pi/k at one corner, with the diagonal from that corner
of length d at angle alpha to one side.  The whole quadrilateral boundary
is lifted from the diagonal endpoint in the positive direction, the first
and last lifted edges are translated by -n and +n along the fiber, and
three vertical edges close the heptagon p1..p7 (six right angles, one
angle pi/k).  The vertical edge over the diagonal endpoint has length
2 H area + 2 n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geodesics import lift_height_between
from .polygons import (
    BasePolygon,
    base_polygon_from_hinge,
    geodesic_edge_points,
    point_in_polygon,
    polygon_from_vertices,
)
from .spaces import SpaceParams, UnsupportedSpaceError, connection_coeffs, metric_many
from .surfaces import umbrella_height

__all__ = [
    "NoidSpec",
    "ContourArc",
    "Contour",
    "knoid_triangle",
    "knoid_contour",
    "noid2k_quad",
    "noid2k_contour",
    "boundary_heights",
    "BoundaryData",
    "tangent_cone_angle",
    "tangent_cone_sup",
    "contour_closure_error",
    "contour_angles",
    "measured_vertical_gap",
    "slab_clearance_translation",
]

_ARC_SAMPLES = 256


@dataclass(frozen=True)
class NoidSpec:
    """Parameters of one truncated boundary problem.

    Exactly one of ``a`` (hinge family) or ``(d, alpha)`` (quadrilateral
    family) is set; ``truncation`` is r for the hinge family and n for the
    quadrilateral family.
    """

    space: SpaceParams
    k: int
    truncation: float
    a: float | None = None
    d: float | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.truncation <= 0:
            raise ValueError("truncation must be positive")
        if (self.a is None) == (self.d is None):
            raise ValueError("give either a (hinge family) or d (quad family)")
        if self.a is not None and self.a <= 0:
            raise ValueError("a must be positive")
        if self.d is not None:
            if self.d <= 0:
                raise ValueError("d must be positive")
            if self.alpha is None or not 0.0 < self.alpha <= math.pi / (2 * self.k):
                raise ValueError("alpha must lie in (0, pi/(2k)]")

    @property
    def phi(self):
        return math.pi / self.k

    @property
    def delta(self):
        if self.alpha is None:
            return None
        return self.phi / 2.0 - self.alpha


@dataclass
class ContourArc:
    kind: str                  # "horizontal" | "vertical"
    points: np.ndarray         # (N, 3) samples in traversal order
    label: str = ""
    base_edge: tuple | None = None  # (vertex_from, vertex_to) chart points

    @property
    def start(self):
        return self.points[0]

    @property
    def end(self):
        return self.points[-1]


@dataclass
class Contour:
    space: SpaceParams
    polygon: BasePolygon
    arcs: list
    vertices: dict = field(default_factory=dict)
    closed: bool = True
    meta: dict = field(default_factory=dict)


def _lift_edge(space, a, b, z_start, n=_ARC_SAMPLES):
    """Sampled horizontal lift of the geodesic edge a -> b starting at height
    z_start; heights at the samples use the closed-form displacement."""
    kappa = space.kappa_e
    pts = geodesic_edge_points(kappa, np.asarray(a, float), np.asarray(b, float), n)
    z = lift_height_between(space, np.broadcast_to(pts[0], pts.shape), pts, z_start)
    return np.column_stack([pts, z])


def _vertical_arc(p, dz, n=2):
    p = np.asarray(p, dtype=float)
    z = np.linspace(p[2], p[2] + dz, max(n, 2))
    out = np.empty((len(z), 3))
    out[:, 0] = p[0]
    out[:, 1] = p[1]
    out[:, 2] = z
    return out


def knoid_triangle(spec) -> BasePolygon:
    """Hinge triangle: edges a and r from the hinge vertex at angle pi/k.

    Vertices in order (a_end, hinge, r_end); the traversal is positively
    oriented (clockwise in the chart), so ``oriented_area`` > 0.
    """
    if spec.a is None:
        raise ValueError("knoid_triangle needs the hinge family (a set)")
    return base_polygon_from_hinge(
        spec.space.kappa_e, [spec.a, spec.truncation], [spec.phi],
        labels={"a_end": 0, "hinge": 1, "r_end": 2},
    )


def knoid_contour(spec, tri=None) -> Contour:
    """Jordan contour over the hinge triangle with verticals s = r^2 and
    s - 2 tau area."""
    tri = tri if tri is not None else knoid_triangle(spec)
    space = spec.space
    s_len = spec.truncation ** 2
    v_a = tri.vertex("a_end")
    v_h = tri.vertex("hinge")
    v_r = tri.vertex("r_end")

    h_r = _lift_edge(space, v_r, v_h, 0.0)            # r-edge, reversed
    h_a = _lift_edge(space, v_h, v_a, h_r[-1, 2])     # a-edge, reversed
    v_s = _vertical_arc(h_a[-1], s_len)
    h_g = _lift_edge(space, v_a, v_r, v_s[-1, 2])     # closing geodesic
    gap = h_g[-1, 2]
    v_close = _vertical_arc(h_g[-1], -gap)

    arcs = [
        ContourArc("horizontal", h_r, "r-edge", (v_r, v_h)),
        ContourArc("horizontal", h_a, "a-edge", (v_h, v_a)),
        ContourArc("vertical", v_s, "s-vertical"),
        ContourArc("horizontal", h_g, "gamma-edge", (v_a, v_r)),
        ContourArc("vertical", v_close, "closure-vertical"),
    ]
    # anchor heights at the hinge vertex so truncations of one family share
    # their hinge-edge lifts exactly
    z_hinge = h_r[-1, 2]
    for arc in arcs:
        arc.points[:, 2] -= z_hinge
    vertices = {
        "start": h_r[0], "hinge": h_r[-1],
        "a_low": h_a[-1], "a_high": v_s[-1],
        "r_high": h_g[-1],
    }
    return Contour(space, tri, arcs, vertices,
                   meta={"s": s_len, "gap": gap, "spec": spec})


def noid2k_quad(spec) -> BasePolygon:
    """Geodesic quadrilateral (corner, A, diag_end, B) of the second family.

    Two edges of length n from the corner enclose pi/k; the diagonal of
    length d from the corner makes angle alpha with the corner -> A edge.
    Positively oriented; ``labels['convex']`` reports convexity.
    """
    if spec.d is None:
        raise ValueError("noid2k_quad needs the quadrilateral family (d set)")
    space = spec.space
    ke = space.kappa_e
    n = spec.truncation
    start = np.array([0.0, 1.0]) if ke < 0 else np.array([0.0, 0.0])

    def build(sgn):
        from .polygons import _step  # hinge walking primitive

        th0 = 0.0
        A, _ = _step(ke, start, th0, n)
        P, _ = _step(ke, start, th0 + sgn * spec.alpha, spec.d)
        B, _ = _step(ke, start, th0 + sgn * spec.phi, n)
        return polygon_from_vertices(
            ke, np.array([start, A, P, B]),
            labels={"corner": 0, "A": 1, "diag_end": 2, "B": 3},
        )

    quad = build(+1.0)
    if quad.oriented_area < 0:
        quad = build(-1.0)
    quad.labels["convex"] = bool(np.all(quad.interior_angles < math.pi - 1e-12))
    quad.labels["delta"] = spec.delta
    return quad


def noid2k_contour(spec, quad=None, c4=0.0, c5=0.0) -> Contour:
    """Heptagon contour p1..p7 over the quadrilateral.

    The quadrilateral boundary is lifted from the diagonal endpoint in the
    positive direction; the final lifted edge is raised by n + c4, the first
    lowered by n + c5, and three vertical edges close the curve.
    """
    quad = quad if quad is not None else noid2k_quad(spec)
    space = spec.space
    n = spec.truncation
    v_c = quad.vertex("corner")
    v_p = quad.vertex("diag_end")
    # positive traversal starting at diag_end: follow the stored cycle
    order = ["corner", "A", "diag_end", "B"]
    i0 = order.index("diag_end")
    cyc = [quad.vertex(order[(i0 + j) % 4]) for j in range(5)]
    # cyc: diag_end -> B -> corner -> A -> diag_end

    e1 = _lift_edge(space, cyc[0], cyc[1], 0.0)
    e2 = _lift_edge(space, cyc[1], cyc[2], e1[-1, 2])
    e3 = _lift_edge(space, cyc[2], cyc[3], e2[-1, 2])
    e4 = _lift_edge(space, cyc[3], cyc[4], e3[-1, 2])

    e1_dn = e1.copy()
    e1_dn[:, 2] -= n + c5
    e4_up = e4.copy()
    e4_up[:, 2] += n + c4

    p1 = e2[-1]
    p2 = e3[-1]
    p3 = e4_up[0]
    p4 = e4_up[-1]
    p5 = e1_dn[0]
    p6 = e1_dn[-1]
    p7 = e2[0]

    arc_p2p3 = _vertical_arc(p2, p3[2] - p2[2])
    arc_p4p5 = _vertical_arc(p4, p5[2] - p4[2])
    arc_p6p7 = _vertical_arc(p6, p7[2] - p6[2])

    arcs = [
        ContourArc("horizontal", e3, "p1p2", (cyc[2], cyc[3])),
        ContourArc("vertical", arc_p2p3, "p2p3"),
        ContourArc("horizontal", e4_up, "p3p4", (cyc[3], cyc[4])),
        ContourArc("vertical", arc_p4p5, "p4p5"),
        ContourArc("horizontal", e1_dn, "p5p6", (cyc[0], cyc[1])),
        ContourArc("vertical", arc_p6p7, "p6p7"),
        ContourArc("horizontal", e2, "p7p1", (cyc[1], cyc[2])),
    ]
    # anchor heights at p1 so the heptagons of one family share the lifts of
    # their corner rays exactly; the vertex rows alias the arc arrays and are
    # shifted with them
    z_p1 = float(p1[2])
    for arc in arcs:
        arc.points[:, 2] -= z_p1
    ps = [p1, p2, p3, p4, p5, p6, p7]
    vertices = {f"p{i}": v.copy() for i, v in enumerate(ps, 1)}
    return Contour(space, quad, arcs, vertices,
                   meta={"spec": spec, "c4": c4, "c5": c5,
                         "gap": p4[2] - p5[2]})


def contour_closure_error(contour):
    """Max ambient coordinate mismatch between consecutive arcs (and closure)."""
    worst = 0.0
    arcs = contour.arcs
    for i, arc in enumerate(arcs):
        nxt = arcs[(i + 1) % len(arcs)]
        worst = max(worst, float(np.max(np.abs(arc.end - nxt.start))))
    return worst


def _away_tangent(space, arc, at_start):
    """Unit tangent of an arc pointing away from the chosen endpoint."""
    if arc.kind == "vertical":
        sgn = 1.0 if arc.points[-1, 2] > arc.points[0, 2] else -1.0
        t = np.array([0.0, 0.0, sgn])
        return t if at_start else -t
    p = arc.points[0] if at_start else arc.points[-1]
    far = arc.base_edge[1] if at_start else arc.base_edge[0]
    if space.model == "half-plane":
        from . import hyperbolic as hyp

        ang = float(hyp.direction_angle(p[:2], np.asarray(far, float)))
        base = np.array([math.cos(ang), math.sin(ang)])
    else:
        base = np.asarray(far, float) - p[:2]
        base = base / np.hypot(*base)
    w = connection_coeffs(space, p[:2])
    t = np.array([base[0], base[1], w[0] * base[0] + w[1] * base[1]])
    g = metric_many(space, p)
    return t / math.sqrt(t @ g @ t)


def contour_angles(contour):
    """Interior angle at each arc junction, in the ambient metric."""
    arcs = contour.arcs
    out = []
    for i, arc in enumerate(arcs):
        nxt = arcs[(i + 1) % len(arcs)]
        p = arc.end
        t1 = _away_tangent(contour.space, arc, at_start=False)
        t2 = _away_tangent(contour.space, nxt, at_start=True)
        g = metric_many(contour.space, p)
        c = float(t1 @ g @ t2)
        out.append(math.acos(max(-1.0, min(1.0, c))))
    return np.array(out)


def measured_vertical_gap(contour, label):
    """Signed height run of the named vertical arc (end minus start)."""
    for arc in contour.arcs:
        if arc.label == label:
            return float(arc.points[-1, 2] - arc.points[0, 2])
    raise KeyError(label)


@dataclass
class BoundaryData:
    """Dirichlet data on the projected polygon boundary.

    ``edge_height[i]`` maps a chart point on polygon edge i to the height of
    the lifted contour over it.  ``jumps[v]`` holds the two one-sided limits
    (before, after, in traversal order) at polygon vertex v where a vertical
    arc projects.
    """

    polygon: BasePolygon
    edge_height: dict
    jumps: dict

    def height_at(self, edge_index, q):
        return self.edge_height[edge_index](np.asarray(q, dtype=float))


def boundary_heights(contour) -> BoundaryData:
    """Convert a closed contour into per-edge height functions plus jumps."""
    space = contour.space
    poly = contour.polygon
    verts = poly.vertices
    nv = len(verts)

    edge_fns = {}
    jumps = {}
    horizontals = [a for a in contour.arcs if a.kind == "horizontal"]
    for arc in horizontals:
        va, vb = arc.base_edge
        # find the polygon edge this arc projects to (either direction)
        for i in range(nv):
            p, q = poly.edge(i)
            if (np.allclose(p, va, atol=1e-9) and np.allclose(q, vb, atol=1e-9)):
                direction = +1
            elif (np.allclose(p, vb, atol=1e-9) and np.allclose(q, va, atol=1e-9)):
                direction = -1
            else:
                continue
            anchor = arc.points[0]
            edge_fns[i] = _edge_height_fn(space, anchor)
            break
    for i in range(nv):
        v = verts[i]
        before = after = None
        for arc in contour.arcs:
            if arc.kind != "vertical":
                continue
            if np.allclose(arc.points[0, :2], v, atol=1e-9):
                before, after = arc.points[0, 2], arc.points[-1, 2]
        if before is not None and abs(before - after) > 1e-13:
            jumps[i] = (before, after)
    return BoundaryData(polygon=poly, edge_height=edge_fns, jumps=jumps)


def _edge_height_fn(space, anchor):
    a = np.asarray(anchor, dtype=float)

    def fn(q):
        q = np.asarray(q, dtype=float)[..., :2]
        return lift_height_between(space, np.broadcast_to(a[:2], q.shape), q, a[2])

    return fn


def tangent_cone_angle(h_plus, h_minus, delta, phi, epsilon, beta_plus, beta_minus,
                       k=None):
    """Opening angle of the cone between the two tilted barrier pieces.

    psi = beta_plus(m) + beta_minus(m) + delta at the midheight
    m = (h_plus - h_minus)/2.  Returns (psi, psi < pi).  The profiles must
    satisfy 0 <= beta < pi - phi/2 - epsilon.
    """
    if h_plus < 0 or h_minus < 0:
        raise ValueError("heights must be nonnegative")
    m = 0.5 * (h_plus - h_minus)
    bp = float(beta_plus(m))
    bm = float(beta_minus(m))
    bound = math.pi - phi / 2.0 - epsilon
    for b in (bp, bm):
        if not 0.0 <= b < bound:
            raise ValueError(f"profile value {b:.6f} outside [0, {bound:.6f})")
    psi = bp + bm + delta
    return psi, psi < math.pi


def tangent_cone_sup(phi, epsilon, delta):
    """Upper bound 2 (pi - phi - epsilon) + delta for the opening angle."""
    return 2.0 * (math.pi - phi - epsilon) + delta


def slab_clearance_translation(contour, margin=1e-9, c_init=1e-3, max_doublings=40):
    """Raise/lower the slab umbrellas until the contour clears them.

    Checks that the umbrella sections through p4 (above) and p5 (below) meet
    the contour only along the verticals over the diagonal endpoint; if not,
    doubles the translation until they do.  Returns (contour, c4, c5) with
    the possibly re-translated contour.
    """
    spec = contour.meta["spec"]
    space = contour.space
    base_pt = contour.polygon.vertex("diag_end")

    def violations(cont):
        p4 = cont.vertices["p4"]
        p5 = cont.vertices["p5"]
        worst_hi = worst_lo = 0.0
        for arc in cont.arcs:
            if arc.label in ("p3p4", "p4p5", "p5p6"):
                continue
            pts = arc.points
            prof = np.array([umbrella_height(space, base_pt, p[:2]) for p in pts[:: max(1, len(pts)//32)]])
            sub = pts[:: max(1, len(pts)//32)]
            hi = np.max(sub[:, 2] - (p4[2] + prof))
            lo = np.max((p5[2] + prof) - sub[:, 2])
            worst_hi = max(worst_hi, float(hi))
            worst_lo = max(worst_lo, float(lo))
        return worst_hi, worst_lo

    c4 = c5 = 0.0
    cont = contour
    for _ in range(max_doublings):
        hi, lo = violations(cont)
        if hi <= margin and lo <= margin:
            return cont, c4, c5
        if hi > margin:
            c4 = c_init if c4 == 0.0 else 2.0 * c4
        if lo > margin:
            c5 = c_init if c5 == 0.0 else 2.0 * c5
        cont = noid2k_contour(spec, quad=cont.polygon, c4=c4, c5=c5)
    raise RuntimeError("slab clearance search did not terminate")
