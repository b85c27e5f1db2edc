"""Frozen benchmark inputs and pinned regression values.

Everything here is deliberately hard-coded: the chaos and conservation
regressions are pinned to these exact seeds and settings, so changing
any of them invalidates the pinned numbers below.

Measured context for the pinned values (leapfrog, quartic level,
energy 1/2 unless noted):

* channel seed (0, 0, sqrt(2E), 0): runs along the invariant line
  y = p_y = 0 and is transversally unstable; its exponent converges to
  a plateau within 0.02% of the final value, moves by under 0.1% when
  the step or the renormalization interval is halved, and reverses to
  under 1e-3 absolute difference.  This is the pinned regression
  benchmark.
* layer seed (0.6, 0, shell, 0.05): lives in the chaotic layer around
  the channel; sticky transport makes its exponent resolution-dependent
  (0.03-0.05), so only the floor MLE >= 0.01 is asserted for it.
* island seed (0.1, 0, shell, 0.3): sits on a regular island despite
  the chaotic surroundings; kept as the documented mixed-phase-space
  contrast (its exponent stays below the integrable-case bound).
* conservation seed (0.3, 0, shell, 0.0125) at energy 1/32: leapfrog
  energy wobble at step 1e-3 is 2.0e-9 (it would be 1.3e-7 at energy
  1/2: the amplitude scales like E^1.5, so the documented conservation
  audit lives on the lower shell).
"""

from __future__ import annotations

import math

import numpy as np

from .reduction import momentum_on_shell

FREE_MU = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
HARMONIC_MU = (0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
QUARTIC_MU = (0.0, 0.0, 0.0, 0.0, 0.0, 1.0)

BENCHMARK_ENERGY = 0.5
CONSERVATION_ENERGY = 1.0 / 32.0

# Pinned channel-orbit exponent at energy 1/2 (leapfrog step 1e-2,
# renormalization interval 1.0, T = 1e4), frozen after the first
# verified run; enforced within +/-10%.  The estimator is fully
# deterministic (fixed start tangent, no RNG), so reruns reproduce
# this digit for digit on the same platform.
MLE_PINNED = 0.235861555522211
MLE_SETTINGS = {"step": 1e-2, "t_final": 1e4, "renorm_interval": 1.0}

# Floor for the chaotic-layer exponent (measured 0.03-0.05 across step
# and horizon variations; asserted with ~3x margin).
MLE_LAYER_FLOOR = 0.01

# Integrable-contrast bound at T = 1e4 (free case measures 8.864e-4,
# harmonic ~4e-10 with the fixed Benettin start direction).
MLE_INTEGRABLE_BOUND = 1e-3


def seed_on_shell(mu, x, y, p_y, energy):
    """Reduced seed (x, y, p_x, p_y) on the given energy shell."""
    return np.array([x, y, momentum_on_shell(mu, x, y, p_y, energy), p_y])


def channel_seed(energy=BENCHMARK_ENERGY):
    """Seed on the invariant channel y = p_y = 0 of the quartic level."""
    return np.array([0.0, 0.0, math.sqrt(2.0 * energy), 0.0])


def layer_seed(energy=BENCHMARK_ENERGY):
    """Documented seed inside the chaotic layer of the quartic level."""
    return seed_on_shell(QUARTIC_MU, 0.6, 0.0, 0.05, energy)


def island_seed(energy=BENCHMARK_ENERGY):
    """Documented regular-island seed of the quartic level."""
    return seed_on_shell(QUARTIC_MU, 0.1, 0.0, 0.3, energy)


def conservation_seed():
    """Documented seed for the step-1e-3 conservation audit (energy 1/32)."""
    return seed_on_shell(QUARTIC_MU, 0.3, 0.0, 0.0125, CONSERVATION_ENERGY)


# Five documented reduced seeds for the full-vs-reduced projection check
# (quartic level, T = 10, step 1e-3).
PROJECTION_SEEDS = (
    (0.1, 0.0, 0.9, 0.3),
    (0.3, -0.2, 0.4, 0.1),
    (-0.5, 0.4, 0.2, -0.3),
    (0.0, 0.0, 0.7, 0.0),
    (0.6, 0.1, -0.3, 0.5),
)


def section_seeds(energy=BENCHMARK_ENERGY):
    """Eight documented section seeds at the benchmark energy.

    A mix of regular orbits (large p_y) tracing closed curves and
    chaotic-layer orbits (small p_y) filling a scattered band.
    """
    pairs = (
        (0.0, 0.8), (0.0, 0.4), (0.2, 0.6), (0.4, 0.3),
        (0.6, 0.05), (0.8, 0.15), (0.9, 0.1), (0.3, 0.7),
    )
    return [seed_on_shell(QUARTIC_MU, x, 0.0, p_y, energy) for x, p_y in pairs]
