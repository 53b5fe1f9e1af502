"""Ambient isometries built from base isometries.

Every isometry used here has the form (q, z) -> (phi(q), eps z + f(q)) with
phi a base isometry, eps = +1 when phi preserves the base orientation and
-1 when it reverses it, and f the fiber shift that keeps the horizontal
distribution invariant: df = phi^* omega - eps omega.  The form is closed,
so f is a well-defined path integral; evaluating it along base geodesics
makes it exact (the lift displacement along geodesics is in closed form).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import hyperbolic as hyp
from .geodesics import lift_height_between
from .spaces import HALF_PLANE, SpaceParams

__all__ = [
    "BaseIsometry",
    "mobius_map",
    "rotation_about",
    "reflection_across",
    "lift_shift_fn",
    "AmbientIsometry",
    "ambient_rotation_about_fiber",
    "ambient_rotation_about_horizontal",
]


@dataclass
class BaseIsometry:
    """Chart isometry of the fibration base with known orientation sign."""

    apply: Callable
    orientation: int

    def __call__(self, pts):
        return self.apply(np.asarray(pts, dtype=float))


def mobius_map(M):
    return BaseIsometry(lambda p: hyp.mobius_apply(M, p), +1)


def _mobius_conj_map(M):
    def apply(p):
        p = np.asarray(p, dtype=float)
        q = p.copy()
        q[..., 0] = -q[..., 0]  # -conj(z) reflects across the y-axis
        return hyp.mobius_apply(M, q)

    return apply


def rotation_about(space, center, angle):
    """Base rotation by ``angle`` about a chart point (positive = ccw chart)."""
    center = np.asarray(center, dtype=float)
    if space.model == HALF_PLANE:
        T = np.array([[1.0, -center[0]], [0.0, center[1]]])
        Tinv = np.array([[center[1], center[0]], [0.0, 1.0]])
        c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
        R = np.array([[c, s], [-s, c]])
        return mobius_map(Tinv @ R @ T)
    c, s = math.cos(angle), math.sin(angle)
    Rm = np.array([[c, -s], [s, c]])

    def apply(p):
        p = np.asarray(p, dtype=float)
        return (p - center) @ Rm.T + center

    return BaseIsometry(apply, +1)


def reflection_across(space, a, b):
    """Base reflection across the geodesic through chart points a, b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if space.model == HALF_PLANE:
        ia, ib = hyp.ideal_endpoints(a, b)
        if math.isinf(ib) or math.isinf(ia):
            x0 = a[0]

            def apply(p):
                p = np.asarray(p, dtype=float)
                q = p.copy()
                q[..., 0] = 2.0 * x0 - q[..., 0]
                return q

            return BaseIsometry(apply, -1)
        c0 = 0.5 * (ia + ib)
        r = 0.5 * abs(ib - ia)

        def apply(p):
            # inversion in the circle |z - c0| = r
            p = np.asarray(p, dtype=float)
            dx = p[..., 0] - c0
            dy = p[..., 1]
            s = r * r / (dx * dx + dy * dy)
            q = np.empty_like(p)
            q[..., 0] = c0 + s * dx
            q[..., 1] = s * dy
            return q

        return BaseIsometry(apply, -1)
    d = b - a
    d = d / np.hypot(*d)

    def apply(p):
        p = np.asarray(p, dtype=float)
        rel = p - a
        comp = rel[..., 0] * d[0] + rel[..., 1] * d[1]
        proj = a + np.multiply.outer(comp, d)
        return 2.0 * proj - p

    return BaseIsometry(apply, -1)


def lift_shift_fn(space, base_map, eps, anchor, f_anchor=0.0):
    """Fiber shift f with df = phi^* omega - eps omega and f(anchor) given.

    Evaluated exactly along base geodesics from the anchor.
    """
    anchor = np.asarray(anchor, dtype=float)[:2]
    phi = base_map.apply if isinstance(base_map, BaseIsometry) else base_map
    img_anchor = np.asarray(phi(anchor), dtype=float)

    def f(q):
        q = np.asarray(q, dtype=float)[..., :2]
        img = np.asarray(phi(q), dtype=float)
        d_img = lift_height_between(space, np.broadcast_to(img_anchor, img.shape), img, 0.0)
        d_dir = lift_height_between(space, np.broadcast_to(anchor, q.shape), q, 0.0)
        return f_anchor + d_img - eps * d_dir

    return f


@dataclass
class AmbientIsometry:
    """(q, z) -> (phi(q), eps z + f(q)); maps graphs to graphs."""

    space: SpaceParams
    base_map: BaseIsometry
    eps: int
    shift: Callable

    def apply_points(self, pts):
        pts = np.asarray(pts, dtype=float)
        base = self.base_map(pts[..., :2])
        z = self.eps * pts[..., 2] + self.shift(pts[..., :2])
        return np.concatenate([base, z[..., None]], axis=-1)

    def __call__(self, pts):
        return self.apply_points(pts)


def ambient_rotation_about_fiber(space, base_point, angle, fixed_height=0.0):
    """Rotation about the fiber over ``base_point``; fixes the fiber pointwise."""
    bm = rotation_about(space, base_point, angle)
    f = lift_shift_fn(space, bm, +1, anchor=base_point, f_anchor=0.0)
    return AmbientIsometry(space, bm, +1, f)


def ambient_rotation_about_horizontal(space, a, b, z_of_point):
    """Half-turn about the horizontal lift of the base geodesic through a, b.

    ``z_of_point``: height of the lifted geodesic at chart point ``a`` (the
    lift is then determined along the geodesic); the axis is fixed pointwise.
    """
    bm = reflection_across(space, a, b)
    f = lift_shift_fn(space, bm, -1, anchor=a, f_anchor=2.0 * float(z_of_point))
    return AmbientIsometry(space, bm, -1, f)
