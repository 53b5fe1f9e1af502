"""Hyperbolic-plane kernel on the upper half-plane chart.

All routines work at curvature -1; callers handle curvature scaling
(lengths scale by sqrt(-kappa), the chart is shared by every negative
curvature).  Points travel as chart pairs (x, y); internally everything is
done in the hyperboloid model X^2 + Y^2 - Z^2 = -1, Z > 0, which gives
stable geodesic stepping, exact midpoints, parallel transport along
geodesics and side-of-geodesic tests.

Chart angles: directions at a point are measured as ordinary plane angles
(the chart is conformal), counterclockwise from the +x axis.
"""

from __future__ import annotations

import math

import numpy as np


def to_hyperboloid(p):
    p = np.asarray(p, dtype=float)
    x, y = p[..., 0], p[..., 1]
    s = x * x + y * y
    P = np.empty(p.shape[:-1] + (3,))
    P[..., 0] = x / y
    P[..., 1] = (s - 1.0) / (2.0 * y)
    P[..., 2] = (s + 1.0) / (2.0 * y)
    return P


def from_hyperboloid(P):
    P = np.asarray(P, dtype=float)
    denom = P[..., 2] - P[..., 1]
    out = np.empty(P.shape[:-1] + (2,))
    out[..., 1] = 1.0 / denom
    out[..., 0] = P[..., 0] / denom
    return out


def mdot(a, b):
    """Minkowski inner product with signature (+, +, -)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2]


def chart_frame(p):
    """Unit hyperboloid tangents (Ux, Uy) at chart point p along the chart axes."""
    p = np.asarray(p, dtype=float)
    x, y = p[..., 0], p[..., 1]
    s = x * x + y * y
    Ux = np.empty(p.shape[:-1] + (3,))
    Ux[..., 0] = 1.0
    Ux[..., 1] = x
    Ux[..., 2] = x
    Uy = np.empty(p.shape[:-1] + (3,))
    Uy[..., 0] = -x / y
    Uy[..., 1] = (y * y - x * x + 1.0) / (2.0 * y)
    Uy[..., 2] = (y * y - x * x - 1.0) / (2.0 * y)
    return Ux, Uy


def dir_to_tangent(p, theta):
    Ux, Uy = chart_frame(p)
    theta = np.asarray(theta, dtype=float)
    return np.cos(theta)[..., None] * Ux + np.sin(theta)[..., None] * Uy


def tangent_to_dir(p, U):
    Ux, Uy = chart_frame(p)
    return np.arctan2(mdot(U, Uy), mdot(U, Ux))


def normal_of(P, U):
    """Unit tangent at P obtained by rotating U counterclockwise by pi/2."""
    P = np.asarray(P, dtype=float)
    U = np.asarray(U, dtype=float)
    c = np.cross(P, U)
    c[..., 2] = -c[..., 2]
    return c


def flow(P, U, t):
    """Geodesic flow: position and transported unit tangent after distance t."""
    t = np.asarray(t, dtype=float)[..., None]
    ch, sh = np.cosh(t), np.sinh(t)
    return P * ch + U * sh, P * sh + U * ch


def step(p, theta, dist):
    """Walk distance ``dist`` from chart point p in chart direction theta.

    Returns (q, theta_out) with theta_out the forward direction at q.
    """
    P = to_hyperboloid(p)
    U = dir_to_tangent(p, theta)
    Q, V = flow(P, U, dist)
    q = from_hyperboloid(Q)
    return q, tangent_to_dir(q, V)


def geodesic_points(p, theta, dist, n):
    """n+1 equally spaced chart samples along a geodesic arc of length dist."""
    P = to_hyperboloid(p)
    U = dir_to_tangent(p, theta)
    t = np.linspace(0.0, dist, n + 1)
    Q, _ = flow(P[None, :], U[None, :], t)
    return from_hyperboloid(Q)


def distance(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    arg = 1.0 + ((p[..., 0] - q[..., 0]) ** 2 + (p[..., 1] - q[..., 1]) ** 2) / (
        2.0 * p[..., 1] * q[..., 1]
    )
    return np.arccosh(np.maximum(arg, 1.0))


def midpoint(p, q):
    P = to_hyperboloid(p) + to_hyperboloid(q)
    P = P / np.sqrt(np.maximum(-mdot(P, P), 1e-300))[..., None]
    return from_hyperboloid(P)


def direction_angle(p, q):
    """Chart angle at p of the geodesic from p toward q."""
    P = to_hyperboloid(p)
    Q = to_hyperboloid(q)
    T = Q + mdot(Q, P)[..., None] * P
    nrm = np.sqrt(np.maximum(mdot(T, T), 1e-300))
    return tangent_to_dir(p, T / nrm[..., None])


def side_of_geodesic(a, b, q):
    """+1 on the left of the oriented geodesic a -> b, -1 on the right."""
    A = to_hyperboloid(a)
    B = to_hyperboloid(b)
    T = B + mdot(B, A)[..., None] * A
    T = T / np.sqrt(np.maximum(mdot(T, T), 1e-300))[..., None]
    N = normal_of(A, T)
    return np.sign(mdot(N, to_hyperboloid(q)))


def ideal_endpoints(p, q):
    """Ideal boundary points (a, b) of the geodesic through chart points p, q.

    Returned as real numbers on the x-axis; a vertical geodesic returns
    (x0, math.inf).  Order: b is on the q-side of p.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    dx = q[0] - p[0]
    if abs(dx) < 1e-14 * (1.0 + abs(p[0])):
        if q[1] > p[1]:
            return p[0], math.inf
        return math.inf, p[0]
    # euclidean center on the x-axis: |p - c|^2 = |q - c|^2
    c = (np.dot(q, q) - np.dot(p, p)) / (2.0 * dx)
    r = math.hypot(p[0] - c, p[1])
    if dx > 0:
        return c - r, c + r
    return c + r, c - r


def mobius_apply(M, p):
    """Apply a real 2x2 Moebius matrix to chart points (acting on x + i y)."""
    p = np.asarray(p, dtype=float)
    z = p[..., 0] + 1j * p[..., 1]
    w = (M[0, 0] * z + M[0, 1]) / (M[1, 0] * z + M[1, 1])
    out = np.empty_like(p)
    out[..., 0] = w.real
    out[..., 1] = w.imag
    return out


def mobius_to_positive_quadrant(a, b, side_point):
    """Orientation-preserving Moebius matrix sending the geodesic with ideal
    endpoints (a, b) to the imaginary axis with ``side_point`` mapped into
    {x > 0} (polar angle in (0, pi/2)).
    """
    if math.isinf(b):
        M = np.array([[1.0, -a], [0.0, 1.0]])  # z -> z - a
    elif math.isinf(a):
        M = np.array([[0.0, 1.0], [-1.0, b]])  # z -> 1/(b - z), det = 1
    else:
        M = np.array([[1.0, -a], [-1.0, b]])  # z -> (z - a)/(b - z), det = b - a
        if b - a < 0:
            M = np.array([[-1.0, a], [1.0, -b]])
    w = mobius_apply(M, np.asarray(side_point, dtype=float))
    if w[0] < 0.0:
        flip = np.array([[0.0, -1.0], [1.0, 0.0]])  # z -> -1/z swaps the sides
        M = flip @ M
    return M
