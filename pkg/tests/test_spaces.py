import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knoids.spaces import (
    EUCLIDEAN,
    HALF_PLANE,
    HEISENBERG,
    DomainError,
    SpaceParams,
    UnsupportedSpaceError,
    christoffels,
    connection_coeffs,
    dmetric_many,
    metric_at,
    metric_many,
    oriented_area,
    polyline_lift_displacements,
    vertical_part,
)


def test_model_selection():
    assert SpaceParams(-1.0, 0.0).model == HALF_PLANE
    assert SpaceParams(-1.0, 0.3).model == HALF_PLANE
    assert SpaceParams(-1.0, 0.5).model == HEISENBERG
    assert SpaceParams(0.0, 0.0).model == EUCLIDEAN


def test_invalid_params():
    with pytest.raises(UnsupportedSpaceError):
        SpaceParams(0.5, 0.0)
    with pytest.raises(UnsupportedSpaceError):
        SpaceParams(-1.0, 0.6)
    with pytest.raises(UnsupportedSpaceError):
        SpaceParams(-0.5, 0.5)  # kappa + 4H^2 = 0.5 > 0


def test_metric_examples():
    s = SpaceParams(-1.0, 0.0)
    assert np.allclose(metric_at(s, [0.0, 1.0, 0.0]), np.eye(3))
    assert np.allclose(metric_at(s, [0.0, 2.0, 0.0]), np.diag([0.25, 0.25, 1.0]))
    sh = SpaceParams(-1.0, 0.5)
    assert np.allclose(metric_at(sh, [0.0, 0.0, 0.0]), np.eye(3))


def test_metric_domain_error():
    s = SpaceParams(-1.0, 0.2)
    with pytest.raises(DomainError):
        metric_at(s, [0.0, -1.0, 0.0])


def test_unit_vertical_field_and_positivity():
    rng = np.random.default_rng(7)
    for s in (SpaceParams(-1.0, 0.0), SpaceParams(-1.0, 0.3),
              SpaceParams(-1.0, 0.5), SpaceParams(0.0, 0.0)):
        pts = rng.uniform(-2.0, 2.0, size=(10_000, 3))
        if s.model == HALF_PLANE:
            pts[:, 1] = rng.uniform(0.1, 3.0, size=len(pts))
        g = metric_many(s, pts)
        assert np.allclose(g[:, 2, 2], 1.0)
        eig = np.linalg.eigvalsh(g)
        assert np.all(eig > 0)


def test_christoffel_half_plane_block():
    s = SpaceParams(-1.0, 0.0)
    G = christoffels(s, [0.3, 2.0, 0.0])
    assert G[0, 0, 1] == pytest.approx(-0.5)   # -1/y
    assert G[1, 0, 0] == pytest.approx(0.5)    # 1/y
    assert G[1, 1, 1] == pytest.approx(-0.5)


def test_christoffel_euclidean_zero():
    s = SpaceParams(0.0, 0.0)
    assert np.allclose(christoffels(s, [0.4, -0.2, 1.0]), 0.0)


def test_christoffel_finite_difference_oracle():
    rng = np.random.default_rng(11)
    for s in (SpaceParams(-1.0, 0.3), SpaceParams(-1.0, 0.5)):
        for _ in range(12):
            p = np.array([rng.uniform(-1, 1), rng.uniform(0.5, 2.0), rng.uniform(-1, 1)])
            G = christoffels(s, p)
            d = 1e-5
            dg = np.zeros((3, 3, 3))
            for kk in range(3):
                e = np.zeros(3)
                e[kk] = d
                dg[kk] = (metric_at(s, p + e) - metric_at(s, p - e)) / (2 * d)
            gi = np.linalg.inv(metric_at(s, p))
            ref = np.zeros((3, 3, 3))
            for i in range(3):
                for j in range(3):
                    for kk in range(3):
                        acc = 0.0
                        for l in range(3):
                            acc += gi[i, l] * (dg[j][l, kk] + dg[kk][l, j] - dg[l][j, kk])
                        ref[i, j, kk] = 0.5 * acc
            assert np.max(np.abs(G - ref)) < 1e-6


def test_analytic_metric_derivatives():
    rng = np.random.default_rng(3)
    for s in (SpaceParams(-1.0, 0.25), SpaceParams(-1.0, 0.5)):
        p = np.array([0.7, 1.3, -0.2])
        dg = dmetric_many(s, p)
        d = 1e-6
        for kk in range(3):
            e = np.zeros(3)
            e[kk] = d
            fd = (metric_at(s, p + e) - metric_at(s, p - e)) / (2 * d)
            assert np.max(np.abs(dg[kk] - fd)) < 1e-7


def test_horizontality_coefficients():
    s = SpaceParams(-1.0, 0.3)
    p = np.array([0.2, 1.5])
    w = connection_coeffs(s, p)
    v = np.array([1.0, -0.4, w[0] * 1.0 + w[1] * (-0.4)])
    assert vertical_part(s, p, v) == pytest.approx(0.0, abs=1e-15)


def test_clockwise_square_lift():
    # positively oriented (clockwise) unit square, tau = 1/2: displacement 1
    sh = SpaceParams(-1.0, 0.5)
    sq = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0], [0.0, 0.0]])
    dz = float(np.sum(polyline_lift_displacements(sh, sq)))
    assert dz == pytest.approx(1.0, abs=1e-12)
    assert oriented_area(sh, sq) == pytest.approx(1.0, abs=1e-12)


def test_circle_lift_heisenberg():
    sh = SpaceParams(-1.0, 0.5)
    th = np.linspace(0.0, 2.0 * math.pi, 40001)[::-1]  # clockwise
    loop = np.column_stack([np.cos(th), np.sin(th)])
    dz = float(np.sum(polyline_lift_displacements(sh, loop)))
    assert dz == pytest.approx(math.pi, abs=1e-7)


@settings(max_examples=25, deadline=None)
@given(st.floats(-1.0, -0.1), st.floats(0.0, 0.45))
def test_space_params_hypothesis(kappa, h):
    if kappa + 4 * h * h > 0:
        with pytest.raises(UnsupportedSpaceError):
            SpaceParams(kappa, h)
    else:
        s = SpaceParams(kappa, h)
        assert s.kappa_e <= 0
        assert s.tau == h
