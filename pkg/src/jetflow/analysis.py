"""Dynamics diagnostics: Poincare sections, Lyapunov exponents, drift audits.

Together these provide the numerical face of the integrable/chaotic
contrast across momentum levels: free and harmonic levels show vanishing
maximal Lyapunov exponent and closed section curves, while the quartic
level carries a transversally unstable channel orbit and a chaotic layer
with positive exponent and scattered section points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import reduction
from .integrators import (FlowEscapeError, IntegratorConfig, Trajectory,
                          _leapfrog_reduced, leapfrog_tangent_chunk)

SECTION_TOLERANCE = 1e-10
SHELL_TOLERANCE = 1e-10

# Fixed Benettin start direction (normalized in lyapunov_mle): a generic
# mix of position and momentum components, so no invariant subspace of
# any of the benchmark flows can trap it.  Fixed so runs are reproducible.
_BENETTIN_START = (1.0, 1.0, 1.0, 1.0)


@dataclass(frozen=True)
class SectionPoint:
    """One refined upward crossing of the plane {y = 0, p_y > 0}."""

    x: float
    p_x: float
    crossing_time: float
    crossing_index: int


@dataclass
class LyapunovEstimate:
    """Benettin output: final estimate plus its convergence history.

    history rows are (time, running estimate); the final history value
    equals mle.  converged records the plateau criterion: relative
    deviation of the running estimate below 1% over the last 20% of the
    integration time.
    """

    mle: float
    history: np.ndarray
    renorm_interval: float
    converged: bool

    def __post_init__(self):
        self.history = np.asarray(self.history, dtype=float)
        if self.history.ndim != 2 or self.history.shape[1] != 2:
            raise ValueError("history must be an (n, 2) array of (t, estimate)")
        if self.history.shape[0] >= 2 and \
                not np.all(np.diff(self.history[:, 0]) > 0.0):
            raise ValueError("history times must be strictly increasing")
        if self.history.size and self.history[-1, 1] != self.mle:
            raise ValueError("mle must equal the final history value")


@dataclass
class ConservationReport:
    """Deterministic first-integral drift maxima over a trajectory.

    Angular momentum is audited only at isotropic harmonic levels
    (mu = (0,0,0,c,0,0) with c != 0), where it is a first integral.
    The split-halves energy maxima expose secular trends: a symplectic
    scheme keeps them comparable, a drifting one does not.
    """

    max_energy_drift: float
    energy_drift_first_half: float
    energy_drift_second_half: float
    max_momentum_drift: np.ndarray
    max_angular_momentum_drift: float | None


def _bisect_crossing(mu, state_a, t_a, h, tol, max_iter=200):
    """Refine a bracketed upward crossing by bisection on one substep.

    The flow between grid points is re-integrated as a single leapfrog
    substep of size tau in (0, h] from the bracketing state; tau is
    bisected until the substep lands within tol of the plane.
    """
    lo, hi = 0.0, h
    best = None
    for _ in range(max_iter):
        tau = 0.5 * (lo + hi)
        if tau == lo or tau == hi:
            break
        _t, states = _leapfrog_reduced(mu, state_a, tau, 1, 1)
        s = states[-1]
        best = (tau, s)
        if abs(s[1]) < tol:
            break
        if s[1] < 0.0:
            lo = tau
        else:
            hi = tau
    if best is None:
        return None
    tau, s = best
    if abs(s[1]) >= tol or s[3] <= 0.0:
        return None
    return t_a + tau, s


def poincare_section(mu, energy, seeds, cfg, max_crossings,
                     tol=SECTION_TOLERANCE):
    """Upward crossings of {y = 0, p_y > 0} for each seed on one shell.

    Crossings are detected by sign change of y between consecutive
    integrator steps (strictly after t = 0, so a seed lying on the plane
    is not its own crossing) and refined to |y| < tol by bisection on a
    short-step re-integration.  Seeds that never cross within t_final
    simply yield an empty list.

    Parameters
    ----------
    mu : array_like, shape (6,)
    energy : float
        Shell value; every seed must satisfy |h_mu(seed) - energy| < 1e-10.
    seeds : sequence of reduced states
    cfg : IntegratorConfig
        Supplies step and t_final for the underlying leapfrog scan.
    max_crossings : int
        Per-seed cap.

    Returns
    -------
    list of list of SectionPoint

    Raises
    ------
    ValueError
        If a seed is off the energy shell (the offending index is named).
    """
    mu = np.asarray(mu, dtype=float)
    results = []
    for k, seed in enumerate(seeds):
        seed = np.asarray(seed, dtype=float)
        off = abs(reduction.h_mu(mu, seed) - energy)
        if off >= SHELL_TOLERANCE:
            raise ValueError(
                f"seed {k} is off the energy shell: |h_mu - energy| = {off:.3e}")
        results.append(_section_single(mu, seed, cfg, max_crossings, tol))
    return results


def _section_single(mu, seed, cfg, max_crossings, tol):
    h = cfg.step
    n_total = cfg.n_steps
    chunk = 65536
    points = []
    state = np.asarray(seed, dtype=float)
    done = 0
    while done < n_total and len(points) < max_crossings:
        n = min(chunk, n_total - done)
        _times, states = _leapfrog_reduced(mu, state, h, n, 1)
        ys = states[:, 1]
        hits = np.nonzero((ys[:-1] < 0.0) & (ys[1:] >= 0.0))[0]
        for i in hits:
            refined = _bisect_crossing(mu, states[i], (done + i) * h, h, tol)
            if refined is None:
                continue
            t_star, s_star = refined
            points.append(SectionPoint(float(s_star[0]), float(s_star[2]),
                                       t_star, len(points)))
            if len(points) >= max_crossings:
                break
        state = states[-1]
        done += n
    return points


def lyapunov_mle(mu, s0, cfg, renorm_interval):
    """Maximal Lyapunov exponent by Benettin renormalization.

    Co-integrates one tangent vector with the leapfrog flow,
    renormalizing every renorm_interval (rounded to whole steps) and
    accumulating the log stretch factors; the running estimate after
    time t is (sum of logs)/t.  The start tangent is a fixed generic
    direction, so results are reproducible without any seed input.

    Raises FlowEscapeError on trajectory escape, with the partial
    history attached as a `history` attribute.
    """
    mu = np.asarray(mu, dtype=float)
    s = np.asarray(s0, dtype=float)
    if not np.all(np.isfinite(s)):
        raise ValueError("initial state must be finite")
    if not (renorm_interval > 0.0 and math.isfinite(renorm_interval)):
        raise ValueError(f"renorm_interval must be positive, got {renorm_interval}")

    n_sub = max(1, int(round(renorm_interval / cfg.step)))
    interval = n_sub * cfg.step
    n_chunks = max(1, int(round(cfg.t_final / interval)))

    v = np.array(_BENETTIN_START)
    v /= np.linalg.norm(v)
    log_sum = 0.0
    history = np.empty((n_chunks, 2))
    for k in range(n_chunks):
        try:
            s, v = leapfrog_tangent_chunk(mu, s, v, cfg.step, n_sub)
        except FlowEscapeError as err:
            err.history = history[:k].copy()
            raise
        r = math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3])
        log_sum += math.log(r)
        v /= r
        t = (k + 1) * interval
        history[k] = (t, log_sum / t)

    mle = float(history[-1, 1])
    t_end = history[-1, 0]
    tail = history[history[:, 0] >= 0.8 * t_end]
    scale = max(abs(mle), 1e-300)
    converged = bool(np.max(np.abs(tail[:, 1] - mle)) / scale < 0.01)
    return LyapunovEstimate(mle, history, interval, converged)


def is_harmonic(mu):
    """True for isotropic harmonic levels mu = (0,0,0,c,0,0), c != 0."""
    mu = np.asarray(mu, dtype=float)
    return mu[3] != 0.0 and not np.any(mu[[0, 1, 2, 4, 5]])


def conservation_report(traj: Trajectory):
    """Max drifts of energy, vertical momenta, and (harmonic) angular momentum."""
    energies = traj.energies
    de = np.abs(energies - energies[0])
    t_mid = 0.5 * (traj.times[0] + traj.times[-1])
    first = traj.times <= t_mid
    d_first = float(np.max(de[first])) if np.any(first) else 0.0
    d_second = float(np.max(de[~first])) if np.any(~first) else 0.0

    dp = np.max(np.abs(traj.momenta - traj.momenta[0]), axis=0)

    dl = None
    if is_harmonic(traj.mu):
        if traj.is_full:
            x, y = traj.states[:, 0], traj.states[:, 1]
            px, py = traj.states[:, 8], traj.states[:, 9]
        else:
            x, y, px, py = (traj.states[:, 0], traj.states[:, 1],
                            traj.states[:, 2], traj.states[:, 3])
        ell = x * py - y * px
        dl = float(np.max(np.abs(ell - ell[0])))

    return ConservationReport(float(np.max(de)), d_first, d_second, dp, dl)
