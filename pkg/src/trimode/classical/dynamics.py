"""Time integration of the mean-field flow and steady-state classification."""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import argrelmax

from ..errors import DivergenceError, InsufficientData, NumericalError, StepSizeUnderflow
from . import _dopri
from .fixed_points import ClassicalState, FixedPoint
from .params import Direction, ForcingProtocol

#: Minimum tail length for classification, in mechanical periods.
MIN_TAIL_PERIODS = 50


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the mean-field flow.

    Attributes
    ----------
    t : ndarray, shape (n,)
    y : ndarray, shape (n, 6)
        Packed states ``(Re a1, Im a1, Re a2, Im a2, X, V)``.
    params : ClassicalParams
    forcing : ForcingProtocol or None
    """

    t: np.ndarray
    y: np.ndarray
    params: object
    forcing: object = None

    def __post_init__(self):
        self.t.setflags(write=False)
        self.y.setflags(write=False)

    @property
    def alpha1(self):
        return self.y[:, 0] + 1j * self.y[:, 1]

    @property
    def alpha2(self):
        return self.y[:, 2] + 1j * self.y[:, 3]

    @property
    def X(self):
        return self.y[:, 4]

    @property
    def V(self):
        return self.y[:, 5]

    def state(self, i):
        return ClassicalState.from_array(self.y[i])

    def tail(self, discard=0.8):
        """Samples after the first ``discard`` fraction of the time span."""
        t0 = self.t[0] + discard * (self.t[-1] - self.t[0])
        i = int(np.searchsorted(self.t, t0))
        return self.t[i:], self.y[i:]


def _describe(params, forcing):
    f = "none" if forcing is None else f"f={forcing.f}, T={forcing.T}"
    return (f"P={params.P}, Delta={params.Delta}, kappa={params.kappa}, "
            f"gamma={params.gamma}, direction={params.direction.value}, forcing {f}")


def integrate(params, forcing=None, t_end=5e4, dt_out=0.5, rtol=1e-9, atol=1e-12,
              bound=1e6, max_steps=50_000_000, initial=None):
    """Integrate from the origin with adaptive Dormand-Prince 5(4) steps.

    Parameters
    ----------
    params : ClassicalParams
    forcing : ForcingProtocol or None
        Kick on the mechanical velocity; ``None`` means no force.
    t_end : float
        Final time.
    dt_out : float
        Spacing of the dense-output samples.
    rtol, atol : float
        Local error tolerances.
    bound : float
        Abort with :class:`DivergenceError` if any component exceeds this.
    initial : ClassicalState, optional
        Starting state, the origin by default.

    Returns
    -------
    Trajectory
    """
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if not dt_out > 0:
        raise ValueError(f"dt_out must be positive, got {dt_out}")
    n = int(math.floor(t_end / dt_out + 1e-9)) + 1
    t_out = dt_out * np.arange(n, dtype=float)
    out = np.empty((n, 6))
    y = np.zeros(6) if initial is None else initial.to_array()
    f, ramp = (0.0, 1.0) if forcing is None else (float(forcing.f), float(forcing.T))

    # split at the end of the ramp so no step straddles the kink in F(t)
    edges = [0.0, t_end] if (forcing is None or ramp >= t_end) else [0.0, ramp, t_end]
    k, h = 0, 1e-3
    for t0, t1 in zip(edges[:-1], edges[1:]):
        status, y, k, h, _ = _dopri.dopri_segment(
            y, t0, t1, t_out, out, k, params.P, params.Delta, params.kappa,
            params.gamma, params.backward, f, ramp, rtol, atol, bound, h, max_steps)
        if status == _dopri.STATUS_DIVERGED:
            raise DivergenceError(f"integrate diverged beyond {bound} ({_describe(params, forcing)})")
        if status == _dopri.STATUS_UNDERFLOW:
            raise StepSizeUnderflow(f"integrate step size underflow ({_describe(params, forcing)})")
        if status == _dopri.STATUS_MAXSTEPS:
            raise NumericalError(f"integrate exceeded {max_steps} steps ({_describe(params, forcing)})")
        h = max(h, 1e-6)
    out[k:] = y  # only reachable through rounding at t_end
    return Trajectory(t_out, out, params, forcing)


def run(params, t_end=5e4, dt_out=0.5, forcing="default", **kw):
    """Integrate with the default kick unless ``forcing`` is given."""
    if isinstance(forcing, str) and forcing == "default":
        forcing = ForcingProtocol.default(params)
    return integrate(params, forcing, t_end=t_end, dt_out=dt_out, **kw)


def transmission(obj, params=None):
    """Power transmission ``4 kappa^2 |a_j|^2`` into the non-driven port.

    Parameters
    ----------
    obj : ClassicalState, FixedPoint, Trajectory or ndarray
        An ndarray is read as packed states with shape ``(..., 6)``.
    params : ClassicalParams, optional
        Taken from ``obj`` for trajectories.

    Returns
    -------
    float or ndarray
    """
    if isinstance(obj, Trajectory):
        params = obj.params if params is None else params
        obj = obj.y
    fwd = params.direction is Direction.FORWARD
    if isinstance(obj, (ClassicalState, FixedPoint)):
        a = obj.alpha2 if fwd else obj.alpha1
        return 4 * params.kappa ** 2 * abs(a) ** 2
    y = np.asarray(obj, dtype=float)
    re, im = (y[..., 2], y[..., 3]) if fwd else (y[..., 0], y[..., 1])
    return 4 * params.kappa ** 2 * (re * re + im * im)


def mean_transmission(traj, discard=0.8):
    """Time-averaged transmission over the trajectory tail."""
    _, y = traj.tail(discard)
    return float(np.mean(transmission(y, traj.params)))


class SteadyKind(enum.Enum):
    FIXED_POINT = "FixedPoint"
    LIMIT_CYCLE = "LimitCycle"
    PERIOD_DOUBLED = "PeriodDoubled"
    IRREGULAR = "Irregular"


@dataclass(frozen=True)
class SteadyState:
    """Asymptotic regime of a trajectory with its dominant period (or None)."""

    kind: SteadyKind
    period: float = None


def _refined_maxima(t, x):
    i = argrelmax(x)[0]
    i = i[(i > 0) & (i < len(x) - 1)]
    if len(i) == 0:
        return np.empty(0), np.empty(0)
    ym, y0, yp = x[i - 1], x[i], x[i + 1]
    curv = ym - 2 * y0 + yp
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(curv != 0, 0.5 * (ym - yp) / curv, 0.0)
    d = np.clip(d, -0.5, 0.5)
    dt = t[1] - t[0]
    return t[i] + d * dt, y0 - 0.25 * (ym - yp) * d


def classify_steady_state(series, discard=0.8, level_tol=0.01, flat_tol=1e-6):
    """Label the asymptotic regime of a trajectory.

    Parameters
    ----------
    series : Trajectory or tuple of (t, X)
        A full trajectory (the first ``discard`` fraction is dropped) or an
        already-trimmed tail given as uniformly sampled times and ``X``.
    discard : float
        Transient fraction dropped from a :class:`Trajectory`.
    level_tol : float
        Allowed spread of a maximum level relative to the peak-to-peak ``X``.
    flat_tol : float
        Peak-to-peak ``X`` below which the tail counts as stationary.

    Returns
    -------
    SteadyState
    """
    if isinstance(series, Trajectory):
        t, y = series.tail(discard)
        x = y[:, 4]
    else:
        t, x = (np.asarray(a, dtype=float) for a in series)
    if len(t) < 3 or t[-1] - t[0] < MIN_TAIL_PERIODS * 2 * math.pi:
        raise InsufficientData(
            f"tail spans {t[-1] - t[0] if len(t) else 0:.3g} time units, "
            f"need {MIN_TAIL_PERIODS} mechanical periods")
    span = float(np.ptp(x))
    if span < flat_tol:
        return SteadyState(SteadyKind.FIXED_POINT)
    tm, xm = _refined_maxima(t, x)
    if len(xm) < 6:
        raise InsufficientData(f"only {len(xm)} maxima in the tail")
    if np.ptp(xm) <= level_tol * span:
        return SteadyState(SteadyKind.LIMIT_CYCLE, float(np.median(np.diff(tm))))
    even, odd = xm[0::2], xm[1::2]
    if (np.ptp(even) <= level_tol * span and np.ptp(odd) <= level_tol * span
            and abs(even.mean() - odd.mean()) > level_tol * span):
        return SteadyState(SteadyKind.PERIOD_DOUBLED, float(np.median(tm[2:] - tm[:-2])))
    return SteadyState(SteadyKind.IRREGULAR, float(np.median(np.diff(tm))))
