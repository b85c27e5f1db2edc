"""Geodesic flow on the planar 2-jet Carnot group.

Library layout:

- `carnot`: the step-3 nilpotent Lie algebra/group (brackets, BCH
  product, left-invariant frame, dual frame).
- `hamiltonian`: the full 16-dimensional cotangent flow and its
  conserved vertical momentum map.
- `reduction`: the 2-degree-of-freedom reduced Hamiltonian with
  polynomial potential, plus vertical-coordinate reconstruction.
- `integrators`: Stormer-Verlet and reference Runge-Kutta integration,
  with exact tangent (variational) co-evolution.
- `analysis`: Poincare sections, Benettin Lyapunov estimates,
  conservation audits.
- `shooting`: two-point geodesic boundary problems by Newton shooting.
- `verify`: deterministic structure/consistency check suites.
- `config`, `cli`: TOML experiment configs and the `jetflow` command.
"""

__version__ = "0.1.0"

from .analysis import (LyapunovEstimate, SectionPoint, conservation_report,
                       lyapunov_mle, poincare_section)
from .carnot import (alpha_at, bch, bracket, frame_at, group_inverse,
                     group_multiply, pair_alpha)
from .config import ConfigError, ExperimentConfig, load_config
from .hamiltonian import energy, full_vector_field, momentum_five, momentum_map
from .integrators import (FlowEscapeError, IntegratorConfig, Trajectory,
                          integrate_full, integrate_reduced,
                          integrate_with_tangent)
from .reduction import (h_mu, phi, phi_grad, phi_hess, reconstruct_vertical,
                        reduced_vector_field)
from .shooting import ShootingProblem, ShootingResult, shoot
from .verify import format_report, run_structure_suite

__all__ = [
    "__version__",
    "alpha_at", "bch", "bracket", "frame_at", "group_inverse",
    "group_multiply", "pair_alpha",
    "energy", "full_vector_field", "momentum_five", "momentum_map",
    "h_mu", "phi", "phi_grad", "phi_hess", "reconstruct_vertical",
    "reduced_vector_field",
    "FlowEscapeError", "IntegratorConfig", "Trajectory", "integrate_full",
    "integrate_reduced", "integrate_with_tangent",
    "LyapunovEstimate", "SectionPoint", "conservation_report",
    "lyapunov_mle", "poincare_section",
    "ShootingProblem", "ShootingResult", "shoot",
    "ConfigError", "ExperimentConfig", "load_config",
    "format_report", "run_structure_suite",
]
