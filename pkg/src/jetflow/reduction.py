"""Reduced two-degree-of-freedom system at a fixed vertical momentum level.

Fixing the conserved vertical momenta at a covector mu = (a_1..a_6)
closes the geodesic flow on (x, y, p_x, p_y) with Hamiltonian

    H_mu = (p_x^2 + p_y^2 + phi_mu(x, y)) / 2

where the potential is a sum of three squared affine margins,

    phi_mu = (a1 + a4 x + (x^2/2) a6)^2
           + (a2 + a5 x + a4 y + a6 x y)^2
           + (a3 + a5 y + (y^2/2) a6)^2,

a nonnegative polynomial of total degree at most four.  Distinguished
levels: mu = 0 is free motion, mu = (0,0,0,c,0,0) the isotropic harmonic
oscillator c^2 (x^2 + y^2) (the integrable contrast), and
mu = (0,0,0,0,0,a) the homogeneous quartic a^2 (x^4/4 + x^2 y^2 + y^4/4)
used as the chaos benchmark.

Reduced states are length-4 float arrays (x, y, p_x, p_y).  The vertical
coordinates lost in the reduction are recovered by `reconstruct_vertical`,
a quadrature of the theta-rates along a reduced trajectory.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import cumulative_simpson

from .carnot import pair_alpha


def margins(mu, x, y):
    """The three affine margins of the potential at (x, y).

    These are the alpha rows contracted with mu; they equal the
    second-layer-generating frame momentum functions evaluated at
    vertical momenta mu.
    """
    return pair_alpha(mu, float(x), float(y))


def phi(mu, x, y):
    """Reduced potential: sum of the squared margins.  Nonnegative."""
    m1, m2, m3 = pair_alpha(mu, float(x), float(y))
    return m1 * m1 + m2 * m2 + m3 * m3


def phi_grad(mu, x, y):
    """Exact gradient of the potential.

    With margins (A, B, C) and their coordinate derivatives
    A_x = B_y = a4 + a6 x, B_x = C_y = a5 + a6 y, A_y = C_x = 0:

        phi_x = 2 (A A_x + B B_x),  phi_y = 2 (B B_y + C C_y).
    """
    x = float(x)
    y = float(y)
    a4, a5, a6 = float(mu[3]), float(mu[4]), float(mu[5])
    ma, mb, mc = pair_alpha(mu, x, y)
    ax = a4 + a6 * x
    bx = a5 + a6 * y
    return np.array([2.0 * (ma * ax + mb * bx), 2.0 * (mb * ax + mc * bx)])


def phi_hess(mu, x, y):
    """Exact symmetric Hessian of the potential.

    Second margin derivatives: A_xx = a6 (from (x^2/2) a6), B_xy = a6,
    C_yy = a6; all others vanish.  Hence

        phi_xx = 2 (A_x^2 + A a6 + B_x^2)
        phi_xy = 2 (B_y B_x + B a6)
        phi_yy = 2 (B_y^2 + C_y^2 + C a6).
    """
    x = float(x)
    y = float(y)
    a4, a5, a6 = float(mu[3]), float(mu[4]), float(mu[5])
    ma, mb, mc = pair_alpha(mu, x, y)
    ax = a4 + a6 * x
    bx = a5 + a6 * y
    hxx = 2.0 * (ax * ax + ma * a6 + bx * bx)
    hxy = 2.0 * (ax * bx + mb * a6)
    hyy = 2.0 * (ax * ax + bx * bx + mc * a6)
    return np.array([[hxx, hxy], [hxy, hyy]])


def h_mu(mu, s):
    """Reduced Hamiltonian at a reduced state (x, y, p_x, p_y)."""
    s = np.asarray(s, dtype=float)
    px, py = float(s[2]), float(s[3])
    return 0.5 * (px * px + py * py + phi(mu, s[0], s[1]))


def reduced_vector_field(mu, s):
    """Canonical equations of the reduced Hamiltonian.

    (x, y, p_x, p_y) evolves by (p_x, p_y, -phi_x/2, -phi_y/2).
    """
    s = np.asarray(s, dtype=float)
    gx, gy = phi_grad(mu, s[0], s[1])
    return np.array([s[2], s[3], -0.5 * gx, -0.5 * gy])


def momentum_on_shell(mu, x, y, p_y, energy):
    """Positive p_x putting (x, y, ., p_y) on the given energy level.

    Raises ValueError when the requested point is outside the
    energetically allowed region.
    """
    rad = 2.0 * energy - float(p_y) ** 2 - phi(mu, x, y)
    if rad < 0.0:
        raise ValueError(
            f"no real p_x on shell: 2E - p_y^2 - phi = {rad:.6g} < 0")
    return math.sqrt(rad)


def theta_rates(mu, states):
    """Vertical rates (theta-dot, 6 columns) along reduced samples.

    Row t is the alpha-transport of the margins at (x(t), y(t)):

        th1' = P20, th2' = P11, th3' = P02,
        th4' = x P20 + y P11, th5' = x P11 + y P02,
        th6' = (x^2/2) P20 + x y P11 + (y^2/2) P02

    with (P20, P11, P02) = margins(mu, x, y).
    """
    states = np.asarray(states, dtype=float)
    n = states.shape[0]
    rates = np.empty((n, 6))
    for i in range(n):
        x = float(states[i, 0])
        y = float(states[i, 1])
        p20, p11, p02 = pair_alpha(mu, x, y)
        rates[i, 0] = p20
        rates[i, 1] = p11
        rates[i, 2] = p02
        rates[i, 3] = x * p20 + y * p11
        rates[i, 4] = x * p11 + y * p02
        rates[i, 5] = 0.5 * x * x * p20 + x * y * p11 + 0.5 * y * y * p02
    return rates


def reconstruct_vertical(mu, times, states):
    """Vertical coordinates along a reduced trajectory, by quadrature.

    Composite Simpson integration of `theta_rates` on the sample grid,
    with theta(0) = 0 (any other offset is a group translation).

    Parameters
    ----------
    mu : array_like, shape (6,)
    times : array_like, shape (n,)
        Strictly increasing sample times.
    states : array_like, shape (n, 4)
        Reduced states at the sample times.

    Returns
    -------
    ndarray, shape (n, 6)

    Raises
    ------
    ValueError
        If the sample times are not strictly increasing.
    """
    times = np.asarray(times, dtype=float)
    states = np.asarray(states, dtype=float)
    if times.ndim != 1 or states.shape != (times.size, 4):
        raise ValueError("need matching 1-d times and (n, 4) states")
    if times.size >= 2 and not np.all(np.diff(times) > 0.0):
        raise ValueError("sample times must be strictly increasing")
    rates = theta_rates(mu, states)
    if times.size < 2:
        return np.zeros((times.size, 6))
    return cumulative_simpson(rates, x=times, axis=0, initial=0.0)
