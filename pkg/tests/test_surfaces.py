import math

import numpy as np
import pytest

from knoids.spaces import SpaceParams, metric_many, vertical_part
from knoids.surfaces import (
    Patch,
    helicoid_grid,
    helicoid_patch,
    mean_curvature,
    mean_curvature_field,
    mean_curvature_field_richardson,
    slice_grid,
    slice_patch,
    umbrella_grid,
    umbrella_patch,
    vertical_plane,
    vertical_plane_grid,
)

SPACES = [SpaceParams(-1.0, 0.0), SpaceParams(-1.0, 0.3),
          SpaceParams(-1.0, 0.5), SpaceParams(0.0, 0.0)]


def _center(space):
    return np.array([0.0, 1.0, 0.0]) if space.model == "half-plane" else np.zeros(3)


def test_cylinder_inward_mean_curvature():
    s = SpaceParams(0.0, 0.0)
    cyl = Patch(s, lambda u, v: np.array([math.cos(u), math.sin(u), v]),
                (0.0, 2 * math.pi), (-1.0, 1.0))
    assert mean_curvature(s, cyl, (0.7, 0.2), normal_sign=-1) == pytest.approx(0.5, abs=1e-6)


def test_slice_is_height_slice_in_products():
    s = SpaceParams(-1.0, 0.0)
    sl = slice_patch(s, [0.0, 1.0, 0.0], 0.0, extents=(0.6, 0.6))
    pts = [sl.sample(u, v) for u in (-0.4, 0.2) for v in (-0.5, 0.3)]
    assert max(abs(p[2]) for p in pts) < 1e-12


def test_umbrella_coincides_with_slice_in_product():
    s = SpaceParams(-1.0, 0.0)
    um = umbrella_patch(s, [0.0, 1.0, 0.0], 0.8)
    zs = [abs(um.sample(r, th)[2]) for r in (0.2, 0.5, 0.75) for th in (0.3, 2.0, 4.4)]
    assert max(zs) < 1e-10


def test_umbrella_tangent_horizontal_only_at_center():
    s = SpaceParams(-1.0, 0.5)
    P, du, dv = umbrella_grid(s, _center(s), 0.8, nr=24, ntheta=25)
    # normal direction vs the fiber at a few interior grid points
    g = metric_many(s, P[12, 5])
    fu = (P[13, 5] - P[11, 5])
    fv = (P[12, 6] - P[12, 4])
    n_cov = np.cross(fu, fv)
    N = np.linalg.solve(g, n_cov)
    N = N / math.sqrt(N @ g @ N)
    vert = abs(vertical_part(s, P[12, 5][:2], N))
    assert vert < 0.999  # tilted normal away from the center
    # at the center the tangent plane is horizontal: the first ring is flat
    assert np.max(np.abs(P[0, :, 2] - P[0, 0, 2])) < 1e-12


@pytest.mark.parametrize("space", SPACES, ids=lambda s: f"k{s.kappa}_H{s.h_mean}")
def test_reference_families_minimal(space):
    center = _center(space)
    worst = {}
    P, du, dv = umbrella_grid(space, center, 0.8, nr=80, ntheta=121)
    worst["umbrella"] = np.max(np.abs(mean_curvature_field_richardson(space, P[8:], du, dv)))
    P, du, dv = slice_grid(space, center, 0.0, extents=(0.7, 0.7), nu=81, nv=40)
    worst["slice"] = np.max(np.abs(mean_curvature_field_richardson(space, P, du, dv)))
    P, du, dv = vertical_plane_grid(space, center[:2], 0.7, extents=(0.7, 0.7),
                                    nu=81, nv=81)
    worst["vplane"] = np.max(np.abs(mean_curvature_field_richardson(space, P, du, dv)))
    for s_rot in (0.0, space.tau, 1.0, 4.0, -4.0):
        nv = 2 * int(40 * (1 + abs(s_rot - space.tau))) + 1
        P, du, dv = helicoid_grid(space, s_rot, None, extents=(0.7, 0.35),
                                  nu=40, nv=nv)
        worst[f"helicoid{s_rot}"] = np.max(np.abs(
            mean_curvature_field_richardson(space, P, du, dv)))
    assert max(worst.values()) < 1e-5, worst


def test_helicoid_tau_is_vertical_plane():
    s = SpaceParams(-1.0, 0.5)
    hel = helicoid_patch(s, s.tau, axis_base=(0.0, 0.0), extents=(0.8, 0.8))
    pts = np.array([hel.sample(u, v) for u in (-0.6, 0.3, 0.7)
                    for v in (-0.5, 0.0, 0.6)])
    # rulings stay over the x-axis line: the vertical plane over that geodesic
    assert np.max(np.abs(pts[:, 1])) < 1e-8


def test_helicoid_infinite_pitch_is_umbrella():
    s = SpaceParams(-1.0, 0.3)
    hel = helicoid_patch(s, math.inf, axis_base=(0.0, 1.0), extents=(0.6, 0.6))
    assert hel.name == "umbrella"
    P, du, dv = helicoid_grid(s, math.inf, (0.0, 1.0), extents=(0.6, 0.6),
                              nu=40, nv=161)
    H = mean_curvature_field_richardson(s, P[4:], du, dv)
    assert np.max(np.abs(H)) < 1e-5


def test_vertical_plane_over_tilted_geodesic_minimal():
    s = SpaceParams(-1.0, 0.3)
    vp = vertical_plane(s, [0.2, 1.1], 0.8, extents=(0.6, 0.6))
    for uv in ((0.3, -0.2), (-0.4, 0.5)):
        assert abs(mean_curvature(s, vp, uv)) < 1e-6
