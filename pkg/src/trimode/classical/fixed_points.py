"""Equilibria, saddle-node thresholds and linear stability of the block."""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import BackwardThresholdUndefined, NotApplicable
from ._dopri import rhs_into
from .params import ClassicalParams, Direction

#: Eigenvalue real parts inside this band are reported as marginal.
STABILITY_MARGIN = 1e-9
#: Squared displacement below which a nonzero branch merges with X0.
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class ClassicalState:
    """Mode amplitudes and mechanical coordinates (or their derivatives)."""

    alpha1: complex
    alpha2: complex
    X: float
    V: float

    def to_array(self):
        return np.array([self.alpha1.real, self.alpha1.imag,
                         self.alpha2.real, self.alpha2.imag, self.X, self.V])

    @classmethod
    def from_array(cls, y):
        y = np.asarray(y, dtype=float)
        return cls(complex(y[0], y[1]), complex(y[2], y[3]), float(y[4]), float(y[5]))


ORIGIN = ClassicalState(0j, 0j, 0.0, 0.0)


class Branch(enum.Enum):
    X0 = "X0"
    XPLUS = "XPlus"
    XMINUS = "XMinus"


class Stability(enum.Enum):
    STABLE_SPIRAL = "StableSpiral"
    SADDLE = "Saddle"
    UNSTABLE_SPIRAL = "UnstableSpiral"
    MARGINAL = "Marginal"


@dataclass(frozen=True)
class FixedPoint:
    """A stationary state of the mean-field flow.

    ``degenerate`` marks a nonzero branch whose displacement has collapsed
    onto ``X0`` within :data:`DEGENERATE_TOL`.
    """

    branch: Branch
    X: float
    alpha1: complex
    alpha2: complex
    eigenvalues: np.ndarray = field(default=None, compare=False, repr=False)
    stability: Stability = None
    degenerate: bool = False

    @property
    def state(self):
        return ClassicalState(self.alpha1, self.alpha2, self.X, 0.0)

    @property
    def max_real(self):
        return float(np.max(self.eigenvalues.real)) if self.eigenvalues is not None else math.nan


def rhs_array(y, params, force=0.0):
    """Time derivative of the packed state ``(Re a1, Im a1, Re a2, Im a2, X, V)``."""
    y = np.ascontiguousarray(y, dtype=float)
    out = np.empty(6)
    # ramp of 1 evaluated at t = 0 returns the force unchanged
    rhs_into(0.0, y, out, params.P, params.Delta, params.kappa, params.gamma,
             params.backward, float(force), 1.0)
    return out


def rhs(state, params, force=0.0):
    """Right-hand side of the mean-field equations.

    Parameters
    ----------
    state : ClassicalState
    params : ClassicalParams
    force : float
        External force on the mechanical velocity.

    Returns
    -------
    ClassicalState
        The time derivative, packed in the same record type.
    """
    return ClassicalState.from_array(rhs_array(state.to_array(), params, force))


def jacobian(y, params):
    """Analytic 6x6 Jacobian of :func:`rhs_array` at packed state ``y``."""
    ar1, ai1, ar2, ai2, X, _ = np.asarray(y, dtype=float)
    h = 0.5 * params.kappa
    d1, d2 = params.Delta, 1.0 + params.Delta
    P2 = 2.0 * params.P
    return np.array([
        [-h, d1, 0.0, X, ai2, 0.0],
        [-d1, -h, -X, 0.0, -ar2, 0.0],
        [0.0, X, -h, d2, ai1, 0.0],
        [-X, 0.0, -d2, -h, -ar1, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        [-P2 * ar2, -P2 * ai2, -P2 * ar1, -P2 * ai1, -1.0, -params.gamma],
    ])


def _coeffs(params):
    D, k = params.Delta, params.kappa
    A = D * D + D - k * k / 4
    B = k * (D + 0.5)
    c = (D + 1) / 2 if params.direction is Direction.FORWARD else D / 2
    return A, B, c


def cubic_factor(X, params):
    """Bracketed factor whose zeros give the nonzero equilibria.

    Equilibria satisfy ``X * cubic_factor(X) = 0``.
    """
    A, B, c = _coeffs(params)
    return (X * X - A) ** 2 + B * B - c * params.P


def amplitudes(X, params):
    """Stationary optical amplitudes for a given displacement."""
    k, D = params.kappa, params.Delta
    den = 2 * (X * X + k * k / 4 - D * D - D + 1j * k * (D + 0.5))
    if params.direction is Direction.FORWARD:
        return (k / 2 + 1j * (D + 1)) / den, -1j * X / den
    return -1j * X / den, (k / 2 + 1j * D) / den


def classify_stability(fp, params):
    """Linear stability of an equilibrium.

    Parameters
    ----------
    fp : FixedPoint or ClassicalState
    params : ClassicalParams

    Returns
    -------
    stability : Stability
    eigenvalues : ndarray of complex, shape (6,)
        Sorted by decreasing real part.
    """
    y = fp.state.to_array() if isinstance(fp, FixedPoint) else fp.to_array()
    ev = np.linalg.eigvals(jacobian(y, params))
    ev = ev[np.argsort(-ev.real, kind="stable")]
    top = ev[0].real
    if abs(top) <= STABILITY_MARGIN:
        return Stability.MARGINAL, ev
    if top < 0:
        return Stability.STABLE_SPIRAL, ev
    unstable = ev[ev.real > STABILITY_MARGIN]
    if np.any(np.abs(unstable.imag) <= 1e-12 * np.maximum(1.0, np.abs(unstable))):
        return Stability.SADDLE, ev
    return Stability.UNSTABLE_SPIRAL, ev


def _make(branch, X, params, with_stability, degenerate=False):
    a1, a2 = amplitudes(X, params)
    fp = FixedPoint(branch, X, complex(a1), complex(a2), degenerate=degenerate)
    if not with_stability:
        return fp
    stab, ev = classify_stability(fp, params)
    return FixedPoint(branch, X, fp.alpha1, fp.alpha2, ev, stab, degenerate)


def fixed_points(params, with_stability=True):
    """All equilibria with nonnegative displacement.

    The flow is symmetric under ``(a2, X, V) -> (-a2, -X, -V)`` (forward
    drive; ``a1`` for backward), so mirror images at negative ``X`` are not
    listed separately.

    Parameters
    ----------
    params : ClassicalParams
    with_stability : bool
        Fill eigenvalues and stability class.

    Returns
    -------
    list of FixedPoint
        ``X0`` first, then ``XPLUS`` and ``XMINUS`` when they exist.
    """
    out = [_make(Branch.X0, 0.0, params, with_stability)]
    A, B, c = _coeffs(params)
    rad = c * params.P - B * B
    if rad < 0:
        return out
    root = math.sqrt(rad)
    for branch, u in ((Branch.XPLUS, A + root), (Branch.XMINUS, A - root)):
        if abs(u) < DEGENERATE_TOL:
            out.append(_make(branch, 0.0, params, with_stability, degenerate=True))
        elif u > 0:
            out.append(_make(branch, math.sqrt(u), params, with_stability))
    return out


def branch_count(params):
    """Number of distinct equilibria, ignoring degenerate branches."""
    return sum(1 for fp in fixed_points(params, with_stability=False) if not fp.degenerate)


def residual(fp, params):
    """Norm of the right-hand side at an equilibrium (zero force)."""
    return float(np.linalg.norm(rhs_array(fp.state.to_array(), params)))


def _threshold(A, B, denom):
    sgn = int(A > 0) - int(A < 0)
    return (2 * B * B - (sgn - 1) * A * A) / denom


def threshold_powers(Delta, kappa):
    """Saddle-node drive strengths for forward and backward drive.

    Parameters
    ----------
    Delta, kappa : float

    Returns
    -------
    P_forward, P_backward : float

    Raises
    ------
    NotApplicable
        If ``Delta <= -1`` (no forward threshold).
    BackwardThresholdUndefined
        If ``Delta <= 0``; the forward value is attached to the exception.
    """
    A = Delta * Delta + Delta - kappa * kappa / 4
    B = kappa * (2 * Delta + 1) / 2
    if Delta + 1 <= 0:
        raise NotApplicable(f"no forward threshold for Delta={Delta}, kappa={kappa}")
    P_fwd = _threshold(A, B, Delta + 1)
    if Delta <= 0:
        raise BackwardThresholdUndefined(
            f"backward threshold undefined for Delta={Delta}, kappa={kappa}: "
            "no backward transmission at any power", P_forward=P_fwd)
    return P_fwd, _threshold(A, B, Delta)


def region_III_boundary(Delta, kappa, direction=Direction.FORWARD):
    """Drive strength at which ``X-`` reaches zero and disappears."""
    direction = Direction.parse(direction)
    A = Delta * Delta + Delta - kappa * kappa / 4
    B = kappa * (Delta + 0.5)
    denom = Delta + 1 if direction is Direction.FORWARD else Delta
    if A <= 0 or denom <= 0:
        raise NotApplicable(f"X- is never real for Delta={Delta}, kappa={kappa}, {direction.value}")
    return 2 * (A * A + B * B) / denom


def stationary_transmission(fp, params):
    """Transmission ``4 kappa^2 |a_out|^2`` at an equilibrium."""
    a = fp.alpha2 if params.direction is Direction.FORWARD else fp.alpha1
    return 4 * params.kappa ** 2 * abs(a) ** 2


__all__ = [
    "Branch", "ClassicalParams", "ClassicalState", "FixedPoint", "ORIGIN",
    "Stability", "amplitudes", "branch_count", "classify_stability",
    "cubic_factor", "fixed_points", "jacobian", "region_III_boundary",
    "residual", "rhs", "rhs_array", "stationary_transmission",
    "threshold_powers",
]
