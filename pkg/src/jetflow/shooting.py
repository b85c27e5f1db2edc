"""Two-point geodesic boundary solver on the reduced plane.

Given a momentum level mu, a start point, a target point, and a horizon
T, the solver finds initial momenta (p_x, p_y) steering the reduced flow
from start to target in time T.  It runs damped Newton iteration on the
endpoint map

    F(p) = position(flow_T(start, p)) - target,

with the 2x2 Jacobian assembled from two variational (tangent) columns
rather than finite differences.  Solutions are normal geodesics of the
ambient group by construction and extend to full group geodesics via the
vertical reconstruction quadrature.

Only the reduced endpoint is targeted; prescribing the remaining group
coordinates would additionally require selecting a momentum level per
endpoint, a genuinely harder inverse problem that is out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .integrators import (FlowEscapeError, IntegratorConfig,
                          integrate_reduced, integrate_with_tangent)

_DEFAULT_STEP = 2e-4


@dataclass(frozen=True)
class ShootingProblem:
    """Validated boundary-value problem statement."""

    mu: tuple
    start: tuple
    target: tuple
    horizon: float
    initial_guess: tuple
    tolerance: float = 1e-9
    max_iterations: int = 25

    def __post_init__(self):
        for name, value, length in (("mu", self.mu, 6),
                                    ("start", self.start, 2),
                                    ("target", self.target, 2),
                                    ("initial_guess", self.initial_guess, 2)):
            arr = np.asarray(value, dtype=float)
            if arr.shape != (length,):
                raise ValueError(f"{name} must have {length} components, "
                                 f"got shape {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
        if not (self.horizon > 0.0 and math.isfinite(self.horizon)):
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if not (self.tolerance > 0.0 and math.isfinite(self.tolerance)):
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class ShootingResult:
    """Solver outcome: best momenta found and the iteration record.

    history rows are (p_x, p_y, residual_norm) per Newton iterate,
    starting with the initial guess.  converged means the residual bound
    was met within the iteration budget.
    """

    momenta: np.ndarray
    residual: float
    iterations: int
    converged: bool
    history: np.ndarray


def _endpoint(mu, start, p, cfg):
    s0 = np.array([start[0], start[1], p[0], p[1]])
    traj = integrate_reduced(mu, s0, cfg)
    return traj.states[-1, :2]


def _endpoint_with_jacobian(mu, start, p, cfg):
    """Endpoint and its 2x2 derivative w.r.t. the initial momenta."""
    s0 = np.array([start[0], start[1], p[0], p[1]])
    traj, tang_px = integrate_with_tangent(mu, s0, (0.0, 0.0, 1.0, 0.0), cfg)
    _traj2, tang_py = integrate_with_tangent(mu, s0, (0.0, 0.0, 0.0, 1.0), cfg)
    jac = np.column_stack([tang_px[-1, :2], tang_py[-1, :2]])
    return traj.states[-1, :2], jac


def shoot(problem, cfg=None):
    """Solve the boundary problem by damped Newton on the endpoint map.

    Parameters
    ----------
    problem : ShootingProblem
    cfg : IntegratorConfig, optional
        Settings for the underlying flow; t_final is overridden by the
        problem horizon.  Defaults to leapfrog at step 2e-4.

    Returns
    -------
    ShootingResult
        converged=False results carry the best iterate and residual
        (iteration budget exhausted, singular Jacobian, or escape that
        damping could not avoid).
    """
    if cfg is None:
        cfg = IntegratorConfig(step=_DEFAULT_STEP, t_final=problem.horizon)
    else:
        cfg = replace(cfg, t_final=problem.horizon)
    mu = np.asarray(problem.mu, dtype=float)
    target = np.asarray(problem.target, dtype=float)
    p = np.asarray(problem.initial_guess, dtype=float).copy()

    try:
        res = _endpoint(mu, problem.start, p, cfg) - target
    except FlowEscapeError:
        return ShootingResult(p, math.inf, 0, False,
                              np.array([[p[0], p[1], math.inf]]))
    res_norm = float(np.linalg.norm(res))
    history = [(p[0], p[1], res_norm)]

    iterations = 0
    while res_norm >= problem.tolerance and iterations < problem.max_iterations:
        try:
            _end, jac = _endpoint_with_jacobian(mu, problem.start, p, cfg)
            delta = np.linalg.solve(jac, -res)
        except (FlowEscapeError, np.linalg.LinAlgError):
            break

        # Damping: halve the update until the residual actually drops.
        lam = 1.0
        improved = False
        for _ in range(12):
            trial = p + lam * delta
            try:
                trial_res = _endpoint(mu, problem.start, trial, cfg) - target
            except FlowEscapeError:
                lam *= 0.5
                continue
            trial_norm = float(np.linalg.norm(trial_res))
            if trial_norm < res_norm:
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
        p, res, res_norm = trial, trial_res, trial_norm
        iterations += 1
        history.append((p[0], p[1], res_norm))

    return ShootingResult(p, res_norm, iterations,
                          res_norm < problem.tolerance, np.array(history))
