"""Quadratic limit-cycle manifold reduction for 3-D coupled oscillators."""

from .analysis import (AnalysisReport, analyze, averaged_radial_root, base_radius,
                       count_radial_oscillations, estimate_mean_radius,
                       measure_angular_velocity, predicted_angular_velocity, predicted_period,
                       predicted_radius, vdp_averaged_radius, vdp_modified_radius)
from .dynamics import (IntegratorConfig, PolarSeries, Trajectory, integrate, polar_rhs,
                       reduced_rhs, to_polar)
from .errors import (DomainError, InsufficientDataError, IntegrationError, LCManifoldError,
                     SingularSystemError)
from .manifold import (ManifoldQuadratic, manifold_eval, manifold_residual,
                       solve_lambda_omega_manifold, solve_lienard_manifold, solve_manifold)
from .model import (LienardClass, SystemKind, SystemSpec, VdpSpec, classify_lienard, full_rhs,
                    vdp_rhs)

__version__ = "0.1.0"
