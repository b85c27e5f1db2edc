"""Geodesic Hamiltonian on the cotangent bundle of the jet-space group.

A cotangent state is a length-16 float array

    index   0  1  2..7          8    9    10..15
    field   x  y  theta_1..6    p_x  p_y  p_1..p_6

pairing the second-kind coordinates with their conjugate momenta.  The
fiber-linear momentum functions of the horizontal frame are

    P1  = p_x
    P2  = p_y
    P20 = p_1 + p_4 x + (x^2/2) p_6
    P11 = p_2 + p_5 x + p_4 y + p_6 x y
    P02 = p_3 + p_5 y + (y^2/2) p_6

(the last three are the alpha rows contracted with (p_1..p_6)), and the
geodesic energy is H = (P1^2 + P2^2 + P20^2 + P11^2 + P02^2) / 2.

The theta's are cyclic, so p_1..p_6 are first integrals; together they
form the momentum map onto the dual of the vertical ideal.  Hamilton's
equations close on (x, y, p_x, p_y) once that level is fixed, which is
what the reduction module exploits.
"""

from __future__ import annotations

import numpy as np

from .carnot import pair_alpha

STATE_DIM = 16

# Slices of the 16-dim cotangent layout.
SLICE_BASE = slice(0, 8)
SLICE_THETA = slice(2, 8)
SLICE_PXY = slice(8, 10)
SLICE_PVERT = slice(10, 16)


def cotangent_state(base, p_xy, p_vert):
    """Assemble a cotangent state from base point and momentum blocks."""
    s = np.empty(STATE_DIM)
    s[SLICE_BASE] = np.asarray(base, dtype=float)
    s[SLICE_PXY] = np.asarray(p_xy, dtype=float)
    s[SLICE_PVERT] = np.asarray(p_vert, dtype=float)
    return s


def _as_state(s):
    s = np.asarray(s, dtype=float)
    if s.shape != (STATE_DIM,):
        raise ValueError(f"need a {STATE_DIM}-component cotangent state, "
                         f"got shape {s.shape}")
    return s


def reduced_block(s):
    """The (x, y, p_x, p_y) sub-state of a cotangent state."""
    s = _as_state(s)
    return np.array([s[0], s[1], s[8], s[9]])


def momentum_five(s):
    """Frame momentum functions (P1, P2, P20, P11, P02) at a state."""
    s = _as_state(s)
    x, y = float(s[0]), float(s[1])
    p20, p11, p02 = pair_alpha(s[SLICE_PVERT], x, y)
    return np.array([s[8], s[9], p20, p11, p02])


def energy(s):
    """Geodesic Hamiltonian, half the sum of squared frame momenta."""
    s = _as_state(s)
    x, y = float(s[0]), float(s[1])
    px, py = float(s[8]), float(s[9])
    p20, p11, p02 = pair_alpha(s[SLICE_PVERT], x, y)
    return 0.5 * (px * px + py * py + (p20 * p20 + p11 * p11 + p02 * p02))


def momentum_map(s):
    """Conserved vertical momenta (p_1..p_6) as a dual-ideal covector."""
    s = _as_state(s)
    return s[SLICE_PVERT].copy()


def full_vector_field(s):
    """Canonical Hamilton equations of the geodesic energy, 16 components.

    Hand-derived from the quadratic Hamiltonian; the theta-rates are the
    alpha rows (transposed) applied to (P20, P11, P02), the vertical
    momenta are exactly constant, and the (p_x, p_y) rates carry the
    x- and y-derivatives of the momentum functions:

        dp_x/dt = -[P20 (p_4 + x p_6) + P11 (p_5 + y p_6)]
        dp_y/dt = -[P11 (p_4 + x p_6) + P02 (p_5 + y p_6)]
    """
    s = _as_state(s)
    x, y = float(s[0]), float(s[1])
    px, py = float(s[8]), float(s[9])
    p4, p5, p6 = float(s[13]), float(s[14]), float(s[15])
    p20, p11, p02 = pair_alpha(s[SLICE_PVERT], x, y)

    out = np.zeros(STATE_DIM)
    out[0] = px
    out[1] = py
    out[2] = p20
    out[3] = p11
    out[4] = p02
    out[5] = x * p20 + y * p11
    out[6] = x * p11 + y * p02
    out[7] = 0.5 * x * x * p20 + x * y * p11 + 0.5 * y * y * p02
    out[8] = -(p20 * (p4 + x * p6) + p11 * (p5 + y * p6))
    out[9] = -(p11 * (p4 + x * p6) + p02 * (p5 + y * p6))
    # out[10:16] stay exactly zero: the theta's are cyclic.
    return out
