"""Mean-field dynamics of a single driven three-mode block."""

from .dynamics import (SteadyKind, SteadyState, Trajectory, classify_steady_state,
                       integrate, mean_transmission, run, transmission)
from .fixed_points import (Branch, ClassicalState, FixedPoint, Stability, branch_count,
                           classify_stability, cubic_factor, fixed_points, jacobian,
                           region_III_boundary, residual, rhs, rhs_array,
                           stationary_transmission, threshold_powers)
from .params import ClassicalParams, Direction, ForcingProtocol, drive_power, renormalize

__all__ = [
    "Branch", "ClassicalParams", "ClassicalState", "Direction", "FixedPoint",
    "ForcingProtocol", "Stability", "SteadyKind", "SteadyState", "Trajectory",
    "branch_count", "classify_stability", "classify_steady_state", "cubic_factor",
    "drive_power", "fixed_points", "integrate", "jacobian", "mean_transmission",
    "region_III_boundary", "renormalize", "residual", "rhs", "rhs_array", "run",
    "stationary_transmission", "threshold_powers", "transmission",
]
