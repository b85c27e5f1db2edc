"""Time-steppers for the reduced, full, and tangent (variational) flows.

The production scheme is a hand-written kick-drift-kick leapfrog for the
separable reduced Hamiltonian (force -grad(phi)/2), which is symplectic
and time-reversible; an adaptive embedded explicit Runge-Kutta scheme
(DOP853 via scipy) is available purely as a cross-check oracle.  The
full 16-dimensional flow rides on the reduced kernel: its (x, y, p_x,
p_y) block is bit-for-bit the reduced trajectory, the vertical
coordinates are synchronized Simpson quadrature of the theta-rates, and
the vertical momenta are held exactly constant, which is what the exact
flow does.

All kernels run in plain Python floats (cheapest at these state sizes)
and detect non-finite states every step, failing fast with the last
finite state attached to the raised error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import hamiltonian, reduction

SCHEME_LEAPFROG = "symplectic-leapfrog"
SCHEME_RK = "embedded-explicit-RK"
SCHEMES = (SCHEME_LEAPFROG, SCHEME_RK)


@dataclass(frozen=True)
class IntegratorConfig:
    """Validated integration settings.

    step/t_final are in flow time units; t_final is rounded to a whole
    number of steps.  rk_tolerance applies only to the reference scheme.
    """

    step: float
    t_final: float
    scheme: str = SCHEME_LEAPFROG
    rk_tolerance: float = 1e-12
    sample_stride: int = 1

    def __post_init__(self):
        if not (self.step > 0.0 and math.isfinite(self.step)):
            raise ValueError(f"step must be positive and finite, got {self.step}")
        if not (self.t_final > 0.0 and math.isfinite(self.t_final)):
            raise ValueError(f"t_final must be positive and finite, got {self.t_final}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not (0.0 < self.rk_tolerance <= 1e-3):
            raise ValueError(
                f"rk_tolerance must lie in (0, 1e-3], got {self.rk_tolerance}")
        if not (isinstance(self.sample_stride, int) and self.sample_stride >= 1):
            raise ValueError(
                f"sample_stride must be a positive integer, got {self.sample_stride}")

    @property
    def n_steps(self):
        return max(1, int(round(self.t_final / self.step)))


@dataclass
class Trajectory:
    """Sampled flow output with per-sample conservation diagnostics.

    states has one row per sample: 4 columns for reduced trajectories
    (x, y, p_x, p_y), 16 for full ones.  energies holds the Hamiltonian
    at each sample and momenta the vertical momentum covector (constant
    parameter for reduced runs, the carried momentum block for full
    runs).
    """

    times: np.ndarray
    states: np.ndarray
    energies: np.ndarray
    momenta: np.ndarray
    mu: np.ndarray = field(default=None)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        self.energies = np.asarray(self.energies, dtype=float)
        self.momenta = np.asarray(self.momenta, dtype=float)
        n = self.times.size
        if self.states.shape[0] != n or self.energies.size != n \
                or self.momenta.shape[0] != n:
            raise ValueError("trajectory arrays must share their sample count")
        if n >= 2 and not np.all(np.diff(self.times) > 0.0):
            raise ValueError("sample times must be strictly increasing")
        if self.mu is None:
            self.mu = self.momenta[0].copy()
        else:
            self.mu = np.asarray(self.mu, dtype=float)

    @property
    def is_full(self):
        return self.states.shape[1] == hamiltonian.STATE_DIM


class FlowEscapeError(RuntimeError):
    """A state went non-finite; carries the last finite state seen.

    Attributes: time (of the last finite state), state, and the samples
    recorded so far as (partial_times, partial_states).
    """

    def __init__(self, time, state, partial_times, partial_states):
        super().__init__(
            f"flow escaped to a non-finite state after t = {time:.6g}")
        self.time = time
        self.state = np.asarray(state, dtype=float)
        self.partial_times = np.asarray(partial_times, dtype=float)
        self.partial_states = np.asarray(partial_states, dtype=float)


class TangentOverflowError(RuntimeError):
    """Tangent norm exceeded the overflow guard; renormalize and resume.

    Carries the state, tangent, and time at the guard trip so the
    caller can rescale the tangent and continue.
    """

    def __init__(self, time, state, tangent):
        super().__init__(
            f"tangent vector overflow at t = {time:.6g}; renormalization required")
        self.time = time
        self.state = np.asarray(state, dtype=float)
        self.tangent = np.asarray(tangent, dtype=float)


_TANGENT_GUARD = 1e250


def _sample_count(n_steps, stride):
    n = n_steps // stride + 1
    if n_steps % stride != 0:
        n += 1
    return n


def _leapfrog_reduced(mu, s0, h, n_steps, stride):
    """Leapfrog kernel; returns (times, states) sampled every stride steps."""
    a1, a2, a3, a4, a5, a6 = (float(mu[0]), float(mu[1]), float(mu[2]),
                              float(mu[3]), float(mu[4]), float(mu[5]))
    x, y = float(s0[0]), float(s0[1])
    px, py = float(s0[2]), float(s0[3])
    half = 0.5 * h

    times = np.empty(_sample_count(n_steps, stride))
    states = np.empty((times.size, 4))
    times[0] = 0.0
    states[0] = (x, y, px, py)
    n_rec = 1

    ma = a1 + a4 * x + 0.5 * x * x * a6
    mb = a2 + a5 * x + a4 * y + a6 * x * y
    mc = a3 + a5 * y + 0.5 * y * y * a6
    ax = a4 + a6 * x
    bx = a5 + a6 * y
    fx = -(ma * ax + mb * bx)
    fy = -(mb * ax + mc * bx)

    for i in range(1, n_steps + 1):
        px += half * fx
        py += half * fy
        x += h * px
        y += h * py
        ma = a1 + a4 * x + 0.5 * x * x * a6
        mb = a2 + a5 * x + a4 * y + a6 * x * y
        mc = a3 + a5 * y + 0.5 * y * y * a6
        ax = a4 + a6 * x
        bx = a5 + a6 * y
        fx = -(ma * ax + mb * bx)
        fy = -(mb * ax + mc * bx)
        px += half * fx
        py += half * fy
        if not math.isfinite(x + y + px + py):
            raise FlowEscapeError((i - 1) * h, states[n_rec - 1],
                                  times[:n_rec], states[:n_rec])
        if i % stride == 0 or i == n_steps:
            times[n_rec] = i * h
            states[n_rec] = (x, y, px, py)
            n_rec += 1
    return times[:n_rec], states[:n_rec]


def _leapfrog_tangent(mu, s0, v0, h, n_steps, stride):
    """Leapfrog with exact tangent co-evolution.

    The tangent map is the derivative of the discrete step itself: each
    kick applies minus half-step times (Hess(phi)/2) to the position
    components of the tangent.  The state arithmetic is literally that
    of `_leapfrog_reduced`, so state output is bit-identical.

    Returns (times, states, tangents) sampled every stride steps.
    """
    a1, a2, a3, a4, a5, a6 = (float(mu[0]), float(mu[1]), float(mu[2]),
                              float(mu[3]), float(mu[4]), float(mu[5]))
    x, y = float(s0[0]), float(s0[1])
    px, py = float(s0[2]), float(s0[3])
    vx, vy = float(v0[0]), float(v0[1])
    vpx, vpy = float(v0[2]), float(v0[3])
    half = 0.5 * h

    times = np.empty(_sample_count(n_steps, stride))
    states = np.empty((times.size, 4))
    tangents = np.empty((times.size, 4))
    times[0] = 0.0
    states[0] = (x, y, px, py)
    tangents[0] = (vx, vy, vpx, vpy)
    n_rec = 1

    ma = a1 + a4 * x + 0.5 * x * x * a6
    mb = a2 + a5 * x + a4 * y + a6 * x * y
    mc = a3 + a5 * y + 0.5 * y * y * a6
    ax = a4 + a6 * x
    bx = a5 + a6 * y
    fx = -(ma * ax + mb * bx)
    fy = -(mb * ax + mc * bx)
    jxx = ax * ax + ma * a6 + bx * bx
    jxy = ax * bx + mb * a6
    jyy = ax * ax + bx * bx + mc * a6

    for i in range(1, n_steps + 1):
        px += half * fx
        py += half * fy
        vpx -= half * (jxx * vx + jxy * vy)
        vpy -= half * (jxy * vx + jyy * vy)
        x += h * px
        y += h * py
        vx += h * vpx
        vy += h * vpy
        ma = a1 + a4 * x + 0.5 * x * x * a6
        mb = a2 + a5 * x + a4 * y + a6 * x * y
        mc = a3 + a5 * y + 0.5 * y * y * a6
        ax = a4 + a6 * x
        bx = a5 + a6 * y
        fx = -(ma * ax + mb * bx)
        fy = -(mb * ax + mc * bx)
        jxx = ax * ax + ma * a6 + bx * bx
        jxy = ax * bx + mb * a6
        jyy = ax * ax + bx * bx + mc * a6
        px += half * fx
        py += half * fy
        vpx -= half * (jxx * vx + jxy * vy)
        vpy -= half * (jxy * vx + jyy * vy)
        if not math.isfinite(x + y + px + py):
            raise FlowEscapeError((i - 1) * h, states[n_rec - 1],
                                  times[:n_rec], states[:n_rec])
        if abs(vx) + abs(vy) + abs(vpx) + abs(vpy) > _TANGENT_GUARD:
            raise TangentOverflowError(i * h, (x, y, px, py),
                                       (vx, vy, vpx, vpy))
        if i % stride == 0 or i == n_steps:
            times[n_rec] = i * h
            states[n_rec] = (x, y, px, py)
            tangents[n_rec] = (vx, vy, vpx, vpy)
            n_rec += 1
    return times[:n_rec], states[:n_rec], tangents[:n_rec]


def _rk_reduced(mu, s0, cfg):
    """Reference trajectory on the leapfrog sample grid (oracle scheme)."""
    mu = np.asarray(mu, dtype=float)
    n_steps = cfg.n_steps
    t_end = n_steps * cfg.step
    idx = np.arange(0, n_steps + 1, cfg.sample_stride)
    if idx[-1] != n_steps:
        idx = np.append(idx, n_steps)
    t_eval = idx * cfg.step

    def rhs(_t, z):
        return reduction.reduced_vector_field(mu, z)

    sol = solve_ivp(rhs, (0.0, t_end), np.asarray(s0, dtype=float),
                    method="DOP853", rtol=cfg.rk_tolerance,
                    atol=cfg.rk_tolerance, t_eval=t_eval)
    if not sol.success or not np.all(np.isfinite(sol.y)):
        n_ok = sol.y.shape[1]
        last = sol.y[:, n_ok - 1] if n_ok else np.asarray(s0, dtype=float)
        raise FlowEscapeError(sol.t[n_ok - 1] if n_ok else 0.0, last,
                              sol.t[:n_ok], sol.y[:, :n_ok].T)
    return sol.t, sol.y.T


def _reduced_diagnostics(mu, times, states):
    energies = np.array([reduction.h_mu(mu, s) for s in states])
    momenta = np.tile(np.asarray(mu, dtype=float), (times.size, 1))
    return energies, momenta


def integrate_reduced(mu, s0, cfg):
    """Integrate the reduced flow at momentum level mu from s0.

    Returns a Trajectory sampled every cfg.sample_stride steps (plus the
    endpoint).  Raises FlowEscapeError when the state goes non-finite.
    """
    mu = np.asarray(mu, dtype=float)
    s0 = np.asarray(s0, dtype=float)
    if cfg.scheme == SCHEME_LEAPFROG:
        times, states = _leapfrog_reduced(mu, s0, cfg.step, cfg.n_steps,
                                          cfg.sample_stride)
    else:
        times, states = _rk_reduced(mu, s0, cfg)
    energies, momenta = _reduced_diagnostics(mu, times, states)
    return Trajectory(times, states, energies, momenta, mu=mu)


def integrate_full(s0, cfg):
    """Integrate the full 16-dimensional geodesic flow from a cotangent state.

    The (x, y, p_x, p_y) block is exactly an integrate_reduced run at
    the state's own momentum level (shared kernel, bit-identical); the
    vertical coordinates are Simpson quadrature of the theta-rates on
    the same sample grid; the vertical momenta are exactly constant.
    """
    s0 = np.asarray(s0, dtype=float)
    if s0.shape != (hamiltonian.STATE_DIM,):
        raise ValueError("full flow needs a 16-component cotangent state")
    mu = hamiltonian.momentum_map(s0)
    try:
        red = integrate_reduced(mu, hamiltonian.reduced_block(s0), cfg)
    except FlowEscapeError as err:
        times = np.asarray(err.partial_times, dtype=float)
        states = _assemble_full(s0, mu, times,
                                np.asarray(err.partial_states, dtype=float))
        last = states[-1] if states.shape[0] else s0
        raise FlowEscapeError(err.time, last, times, states) from err
    states = _assemble_full(s0, mu, red.times, red.states)
    energies = np.array([hamiltonian.energy(s) for s in states])
    momenta = states[:, 10:16].copy()
    return Trajectory(red.times, states, energies, momenta, mu=mu)


def _assemble_full(s0, mu, times, reduced_states):
    theta = s0[hamiltonian.SLICE_THETA] + reduction.reconstruct_vertical(
        mu, times, reduced_states)
    n = times.size
    states = np.empty((n, hamiltonian.STATE_DIM))
    states[:, 0] = reduced_states[:, 0]
    states[:, 1] = reduced_states[:, 1]
    states[:, 2:8] = theta
    states[:, 8] = reduced_states[:, 2]
    states[:, 9] = reduced_states[:, 3]
    states[:, 10:16] = mu
    return states


def integrate_with_tangent(mu, s0, v0, cfg):
    """Co-evolve the reduced flow and one tangent (variational) vector.

    The tangent map is the exact derivative of the leapfrog step, built
    from the analytic Hessian of the potential; under the reference
    scheme the joint state+variational system is integrated instead.

    Returns (Trajectory, tangents) with tangents sampled on the
    trajectory grid.  Raises TangentOverflowError when the tangent norm
    passes the overflow guard (caller renormalizes and resumes).
    """
    mu = np.asarray(mu, dtype=float)
    s0 = np.asarray(s0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if not np.any(v0 != 0.0):
        raise ValueError("tangent start vector must be nonzero")
    if cfg.scheme == SCHEME_LEAPFROG:
        times, states, tangents = _leapfrog_tangent(
            mu, s0, v0, cfg.step, cfg.n_steps, cfg.sample_stride)
    else:
        def rhs(_t, z):
            s, v = z[:4], z[4:]
            hess = reduction.phi_hess(mu, s[0], s[1])
            dv = np.array([
                v[2], v[3],
                -0.5 * (hess[0, 0] * v[0] + hess[0, 1] * v[1]),
                -0.5 * (hess[1, 0] * v[0] + hess[1, 1] * v[1]),
            ])
            return np.concatenate([reduction.reduced_vector_field(mu, s), dv])

        n_steps = cfg.n_steps
        idx = np.arange(0, n_steps + 1, cfg.sample_stride)
        if idx[-1] != n_steps:
            idx = np.append(idx, n_steps)
        sol = solve_ivp(rhs, (0.0, n_steps * cfg.step),
                        np.concatenate([s0, v0]), method="DOP853",
                        rtol=cfg.rk_tolerance, atol=cfg.rk_tolerance,
                        t_eval=idx * cfg.step)
        if not sol.success or not np.all(np.isfinite(sol.y)):
            n_ok = sol.y.shape[1]
            raise FlowEscapeError(sol.t[n_ok - 1] if n_ok else 0.0,
                                  sol.y[:4, n_ok - 1] if n_ok else s0,
                                  sol.t[:n_ok], sol.y[:4, :n_ok].T)
        times, states, tangents = sol.t, sol.y[:4].T, sol.y[4:].T
    energies, momenta = _reduced_diagnostics(mu, times, states)
    return Trajectory(times, states, energies, momenta, mu=mu), tangents


def leapfrog_tangent_chunk(mu, s, v, h, n_steps):
    """Endpoint-only state+tangent advance (building block for Benettin).

    Same kernel as integrate_with_tangent's leapfrog route, recording
    nothing but the endpoint; returns (state, tangent) as 4-arrays.
    """
    _times, states, tangents = _leapfrog_tangent(mu, s, v, h, n_steps,
                                                 max(1, n_steps))
    return states[-1], tangents[-1]
