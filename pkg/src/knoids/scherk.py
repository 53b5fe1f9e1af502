"""The wedge graph that diverges along a base geodesic, its first integral,
and the graph-equation residual.

In polar coordinates (r, s) on the half-plane chart (x = r cos s,
y = r sin s), the section u = u(s) over the quadrant 0 < s < pi/2 is
minimal iff

    u'(s) = (-2 H +- Q(s)) / kappa_e,
    Q(s)  = sqrt(4 H^2 cos^2 s - kappa_e) / cos s,

which integrates to u(s) = (-2 H s +- int_0^s Q) / kappa_e and satisfies
the first integral (2 H + kappa_e u')^2 / w = -kappa_e with

    w(s) = 1 - 4 H^2/kappa_e - 4 H sin^2(s) u' - kappa_e sin^2(s) u'^2.

The branch with the minus sign in u' has u >= 0, u(0) = 0 and u -> +inf
as s -> pi/2, i.e. the graph vanishes on the ideal boundary and blows up
along the geodesic bounding the quadrant.  Q has an integrable endpoint
structure: Q = sqrt(-kappa_e) sec t plus a bounded remainder, and the
secant part integrates in closed form, so the quadrature stays accurate
arbitrarily close to s = pi/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import hyperbolic as hyp
from .spaces import (
    HALF_PLANE,
    DomainError,
    NumericalError,
    SpaceParams,
    UnsupportedSpaceError,
    lam,
)

__all__ = [
    "ScherkParams",
    "scherk_height",
    "scherk_slope",
    "scherk_conservation_residual",
    "polar_w",
    "scherk_jet",
    "scherk_graph_height_fn",
    "mce_residual",
    "mce_residual_from_fn",
]


@dataclass(frozen=True)
class ScherkParams:
    """Branch and placement of the wedge graph.

    ``sign=+1`` selects the nonnegative branch (zero on the ideal boundary,
    +inf along the geodesic).  ``geodesic``/``side_point`` place the graph
    against an arbitrary base geodesic via an orientation-preserving chart
    isometry; None keeps the model position (divergence along the chart
    y-axis, graph over the quadrant x > 0).
    """

    space: SpaceParams
    sign: int = 1
    geodesic: tuple | None = None
    side_point: tuple | None = None

    def __post_init__(self):
        if self.space.kappa_e >= 0.0:
            raise UnsupportedSpaceError(
                "the wedge graph requires kappa + 4 H^2 < 0"
            )
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +-1")


def _q_regular(params, t):
    """Q(t) - sqrt(-ke) sec t: the bounded part of the slope integrand."""
    H = params.space.h_mean
    ke = params.space.kappa_e
    beta = math.sqrt(-ke)
    c = np.cos(t)
    return 4.0 * H * H * c / (np.sqrt(4.0 * H * H * c * c - ke) + beta)


def scherk_slope(params, s):
    """u'(s) of the selected branch."""
    H = params.space.h_mean
    ke = params.space.kappa_e
    s = np.asarray(s, dtype=float)
    Q = np.sqrt(4.0 * H * H * np.cos(s) ** 2 - ke) / np.cos(s)
    return (-2.0 * H - params.sign * Q) / ke


def _slope_derivative(params, s):
    H = params.space.h_mean
    ke = params.space.kappa_e
    s = np.asarray(s, dtype=float)
    A = 4.0 * H * H * np.cos(s) ** 2 - ke
    dA = -8.0 * H * H * np.cos(s) * np.sin(s)
    dQ = (dA / (2.0 * np.sqrt(A))) / np.cos(s) + np.sqrt(A) * np.sin(s) / np.cos(s) ** 2
    return -params.sign * dQ / ke


def scherk_height(params, s, tol=1e-12):
    """u(s) for s in [0, pi/2); exact secant part plus adaptive quadrature.

    Raises NumericalError (carrying the estimate) if the quadrature reports
    trouble.
    """
    s = float(s)
    if not 0.0 <= s < math.pi / 2.0:
        raise DomainError("s must lie in [0, pi/2)")
    if s == 0.0:
        return 0.0
    H = params.space.h_mean
    ke = params.space.kappa_e
    beta = math.sqrt(-ke)
    sec_part = beta * math.log(1.0 / math.cos(s) + math.tan(s))
    reg, err, info = integrate.quad(lambda t: _q_regular(params, t), 0.0, s,
                                    epsabs=tol, epsrel=tol, limit=200,
                                    full_output=1)[:3]
    if err > max(100.0 * tol, 1e-9) * (1.0 + abs(reg)):
        raise NumericalError(
            f"slope quadrature did not converge (err={err:.2e})",
            estimate=(-2.0 * H * s - params.sign * (sec_part + reg)) / ke,
        )
    return (-2.0 * H * s - params.sign * (sec_part + reg)) / ke


def polar_w(params, s):
    """w(s) along the rotational solution (rederived from the chart w)."""
    H = params.space.h_mean
    ke = params.space.kappa_e
    s = np.asarray(s, dtype=float)
    up = scherk_slope(params, s)
    sin2 = np.sin(s) ** 2
    return 1.0 - 4.0 * H * H / ke - 4.0 * H * sin2 * up - ke * sin2 * up ** 2


def scherk_conservation_residual(params, s):
    """(2H + kappa_e u')^2 / w - (-kappa_e); vanishes along the solution."""
    H = params.space.h_mean
    ke = params.space.kappa_e
    s = np.asarray(s, dtype=float)
    up = scherk_slope(params, s)
    return (2.0 * H + ke * up) ** 2 / polar_w(params, s) - (-ke)


def scherk_jet(params, x, y):
    """(u, u_x, u_y, u_xx, u_xy, u_yy) of the rotational solution at (x, y).

    The model placement is used (divergence along the y-axis); x > 0, y > 0.
    """
    if x <= 0.0 or y <= 0.0:
        raise DomainError("the model wedge graph lives over x > 0, y > 0")
    r2 = x * x + y * y
    s = math.atan2(y, x)
    u = scherk_height(params, s)
    up = float(scherk_slope(params, s))
    upp = float(_slope_derivative(params, s))
    sx = -y / r2
    sy = x / r2
    sxx = 2.0 * x * y / r2 ** 2
    sxy = (y * y - x * x) / r2 ** 2
    syy = -2.0 * x * y / r2 ** 2
    ux = up * sx
    uy = up * sy
    uxx = upp * sx * sx + up * sxx
    uxy = upp * sx * sy + up * sxy
    uyy = upp * sy * sy + up * syy
    return u, ux, uy, uxx, uxy, uyy


def scherk_graph_height_fn(params):
    """Height function q -> u(q) of the wedge graph placed against a geodesic.

    For ``params.geodesic = (p, q)`` (two chart points on the target
    geodesic) and ``side_point`` selecting a side, the model solution is
    pulled back by an orientation-preserving chart isometry T, corrected by
    the fiber shift of the lifted isometry, so the result is again a minimal
    graph.  Without a placement the model height u(s(q)) is returned.
    """
    space = params.space
    if params.geodesic is None:
        def height(q):
            q = np.asarray(q, dtype=float)
            s = np.arctan2(q[..., 1], q[..., 0])
            return _heights_of_angles(params, s)
        return height
    a, b = hyp.ideal_endpoints(np.asarray(params.geodesic[0], float),
                               np.asarray(params.geodesic[1], float))
    side = np.asarray(params.side_point, dtype=float)
    M = hyp.mobius_to_positive_quadrant(a, b, side)

    from .isometries import lift_shift_fn

    shift = lift_shift_fn(space, lambda q: hyp.mobius_apply(M, q), +1,
                          anchor=side)

    def height(q):
        q = np.asarray(q, dtype=float)
        w = hyp.mobius_apply(M, q)
        s = np.arctan2(w[..., 1], w[..., 0])
        return _heights_of_angles(params, s) - shift(q)

    return height


def _heights_of_angles(params, s):
    s = np.asarray(s, dtype=float)
    flat = np.ravel(s)
    out = np.array([scherk_height(params, min(max(v, 0.0), math.pi / 2 - 1e-12))
                    for v in flat])
    return out.reshape(s.shape) if s.shape else float(out[0])


def mce_residual(space, jet, point):
    """Residual of the graph equation at a chart point from a height jet.

    ``jet`` = (u, u_x, u_y, u_xx, u_xy, u_yy).  Returns
    2 w (u_xx + u_yy) - ((2H/(y(-4H^2-kappa)) + u_x) w_x + u_y w_y) with
    w = 1 + (u_x/lam + 2 H lam y)^2 + (u_y/lam)^2.
    """
    if space.model != HALF_PLANE:
        raise UnsupportedSpaceError("graph-equation residual needs kappa_e < 0")
    H = space.h_mean
    ke = space.kappa_e
    x, y = float(point[0]), float(point[1])
    u, ux, uy, uxx, uxy, uyy = jet
    lv = float(lam(space, y))
    a = ux / lv + 2.0 * H * lv * y           # 2 H lam y is y-independent
    b = uy / lv
    w = 1.0 + a * a + b * b
    # lam_y = -lam / y, and (2 H lam y) is constant in both x and y
    ax = uxx / lv
    ay = uxy / lv + ux / (lv * y)
    bx = uxy / lv
    by = uyy / lv + uy / (lv * y)
    wx = 2.0 * a * ax + 2.0 * b * bx
    wy = 2.0 * a * ay + 2.0 * b * by
    return 2.0 * w * (uxx + uyy) - ((2.0 * H / (y * (-ke)) + ux) * wx + uy * wy)


def mce_residual_from_fn(space, height_fn, point, h=1e-5):
    """Graph-equation residual of a black-box height function by central
    differences (testing helper; analytic jets are preferred)."""
    x, y = float(point[0]), float(point[1])
    f = lambda a, b: float(height_fn(np.array([a, b])))
    u = f(x, y)
    ux = (f(x + h, y) - f(x - h, y)) / (2 * h)
    uy = (f(x, y + h) - f(x, y - h)) / (2 * h)
    uxx = (f(x + h, y) - 2 * u + f(x - h, y)) / h ** 2
    uyy = (f(x, y + h) - 2 * u + f(x, y - h)) / h ** 2
    uxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h ** 2)
    return mce_residual(space, (u, ux, uy, uxx, uxy, uyy), point)
