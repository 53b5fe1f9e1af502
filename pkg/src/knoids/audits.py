"""Mean-convexity audits of solved sections: the umbrella slab and vertical
halfspaces that enclose the heptagon problem, and the tangent-cone opening
angle computed from level-direction profiles of a solved symmetric piece."""

from __future__ import annotations

import math

import numpy as np

from . import hyperbolic as hyp
from .contours import NoidSpec, tangent_cone_angle
from .sister import level_direction_profile
from .solver import knoid_family, solve_family
from .spaces import HALF_PLANE
from .surfaces import umbrella_height

__all__ = [
    "slab_containment",
    "vertical_halfspace_containment",
    "beta_profile_from_knoid",
    "tangent_cone_audit",
]


def slab_containment(graph, contour, slack=1e-9):
    """Check the solved section lies between the umbrella sections through
    the endpoints of the long vertical (above p5's umbrella, below p4's)."""
    space = graph.space
    base_pt = contour.polygon.vertex("diag_end")
    z4 = contour.vertices["p4"][2]
    z5 = contour.vertices["p5"][2]
    prof = np.array([umbrella_height(space, base_pt, p) for p in graph.mesh.points])
    hi_violation = float(np.max(graph.heights - (z4 + prof)))
    lo_violation = float(np.max((z5 + prof) - graph.heights))
    return {
        "inside": hi_violation <= slack and lo_violation <= slack,
        "above_upper_umbrella": hi_violation,
        "below_lower_umbrella": lo_violation,
    }


def _flat_side(a, d, q):
    return (q[..., 0] - a[0]) * d[1] - (q[..., 1] - a[1]) * d[0]


def vertical_halfspace_containment(graph, contour, slack=1e-9):
    """Check the projected solution lies inside the two vertical halfspaces
    bounded by the planes over the corner-ray geodesics."""
    poly = contour.polygon
    corner = poly.vertex("corner")
    pts = graph.mesh.points
    report = {}
    inside = True
    for name in ("A", "B"):
        other = poly.vertex(name)
        inner = poly.vertex("diag_end")
        if graph.space.model == HALF_PLANE:
            side_ref = hyp.side_of_geodesic(corner, other, inner)
            sides = hyp.side_of_geodesic(np.broadcast_to(corner, pts.shape),
                                         np.broadcast_to(other, pts.shape), pts)
            worst = float(np.min(side_ref * sides))
            ok = worst >= -slack
        else:
            d = other - corner
            ref = float(_flat_side(corner, d, inner))
            vals = _flat_side(corner, d, pts) * np.sign(ref)
            worst = float(np.min(vals))
            ok = worst >= -abs(slack) * (1.0 + np.abs(vals).max())
        inside &= ok
        report[f"edge_{name}"] = worst
    report["inside"] = bool(inside)
    return report


def beta_profile_from_knoid(space, d, two_k, truncation=3.0, depth=5, n_levels=96):
    """Level-direction angle profile of the symmetric piece used as the
    tilted barrier: heights h >= 0 against the angle, at the axis vertex,
    between the level direction and the horizontal edge of length d.

    Returns a callable h -> beta(h), clamped to the sampled range, using the
    reflected piece's symmetry beta(-h) = beta(h).
    """
    spec = NoidSpec(space, k=two_k, truncation=truncation, a=d)
    prob = knoid_family(spec, [truncation], depth)[0]
    graph, report = solve_family([prob])[0]
    if not report.converged:
        raise RuntimeError("barrier piece solve did not converge")
    graph.contour = prob["contour"]
    poly = prob["polygon"]
    v_axis = poly.vertex("a_end")
    v_hinge = poly.vertex("hinge")
    if space.model == HALF_PLANE:
        edge_dir = float(hyp.direction_angle(v_axis, v_hinge))
    else:
        dd = v_hinge - v_axis
        edge_dir = math.atan2(dd[1], dd[0])
    arc = [a for a in graph.contour.arcs if a.label == "s-vertical"][0]
    z0, z1 = arc.points[0, 2], arc.points[-1, 2]
    hs = np.linspace(z0 + 0.02 * (z1 - z0), z0 + 0.98 * (z1 - z0), n_levels)
    used, angles = level_direction_profile(graph, v_axis, hs)
    heights = used - z0
    beta = np.abs(np.unwrap(angles) - edge_dir)
    beta = np.minimum(beta, 2.0 * math.pi - beta)
    order = np.argsort(heights)
    heights, beta = heights[order], beta[order]

    def profile(h):
        return float(np.interp(abs(h), heights, beta))

    return profile, {"heights": heights, "beta": beta, "graph": graph}


def tangent_cone_audit(space, spec, h_plus=0.05, h_minus=0.6, epsilon=0.0,
                       depth=5):
    """Opening angle of the tilted-barrier cone for a heptagon instance.

    The two profiles come from one solved symmetric piece with 2k ends and
    horizontal edge length d, shifted by +-h; the audit returns psi and the
    flag psi < pi.
    """
    phi = spec.phi
    delta = spec.delta
    profile, info = beta_profile_from_knoid(space, spec.d, 2 * spec.k, depth=depth)
    beta_plus = lambda m: profile(m - h_plus)
    beta_minus = lambda m: profile(m + h_minus)
    psi, ok = tangent_cone_angle(h_plus, h_minus, delta, phi, epsilon,
                                 beta_plus, beta_minus, k=spec.k)
    return {"psi": psi, "flag": ok, "delta": delta, "phi": phi,
            "beta_mid": profile((h_plus + h_minus) / 2.0)}
