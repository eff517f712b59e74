"""Grid and ray sweeps with deterministic, optionally parallel evaluation.

Each cell is an independent pure evaluation.  Results are returned in grid
order no matter which worker finished first, and cells that fail carry the
exception class name in their ``status`` field instead of being dropped.
"""

import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy.optimize import bisect

from .classical import (Branch, ClassicalParams, Direction, Stability, classify_stability,
                        fixed_points, threshold_powers)
from .errors import NoSignChange, TrimodeError, ValidationError
from .full import sideband_point
from .rwa import (NetworkParams, metrics, optimal_Jm, optimize_asymmetric, spectrum,
                  symmetric_network)

WORKERS_ENV = "TRIMODE_WORKERS"


def worker_count(workers=None):
    """Requested worker count, else ``$TRIMODE_WORKERS``, else the CPU count."""
    if workers is None:
        env = os.environ.get(WORKERS_ENV, "").strip()
        if env:
            try:
                workers = int(env)
            except ValueError:
                raise ValidationError(WORKERS_ENV, f"{WORKERS_ENV} must be an integer, got {env!r}") from None
        else:
            workers = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count()
    if workers < 1:
        raise ValidationError("workers", f"worker count must be >= 1, got {workers}")
    return workers


def _guarded(fn, item):
    try:
        return fn(item), "ok"
    except TrimodeError as exc:
        return None, type(exc).__name__


def ordered_map(fn, items, workers=None):
    """Apply ``fn`` to every item, returning ``(value, status)`` pairs in input order.

    ``fn`` must be picklable when more than one worker is used.
    """
    items = list(items)
    n = worker_count(workers)
    g = partial(_guarded, fn)
    if n == 1 or len(items) < 2:
        return [g(it) for it in items]
    chunk = max(1, math.ceil(len(items) / (4 * n)))
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(g, items, chunksize=chunk))


class Region(enum.Enum):
    I = "I"      # X0 only
    II = "II"    # X0, X+, X-
    III = "III"  # X0, X+


_REGION_BY_COUNT = {1: Region.I, 3: Region.II, 2: Region.III}


@dataclass(frozen=True)
class RegionCell:
    """Fixed-point census of one ``(P, Delta)`` cell.

    ``hopf_crossed`` is true when ``X+`` exists and is an unstable spiral.
    """

    P: float
    Delta: float
    region: Region
    n_fixed_points: int
    hopf_crossed: bool
    status: str = "ok"


def region_cell(P, Delta, kappa, gamma, direction):
    params = ClassicalParams(P, Delta, kappa, gamma, direction)
    fps = [fp for fp in fixed_points(params, with_stability=False) if not fp.degenerate]
    crossed = False
    for fp in fps:
        if fp.branch is Branch.XPLUS:
            crossed = classify_stability(fp, params)[0] is Stability.UNSTABLE_SPIRAL
    return RegionCell(P, Delta, _REGION_BY_COUNT[len(fps)], len(fps), crossed)


def _region_task(args):
    return region_cell(*args)


def region_map(P_values, Delta_values, kappa, gamma, direction=Direction.FORWARD, workers=None):
    """Fixed-point regions over a ``(P, Delta)`` grid.

    Returns
    -------
    list of RegionCell
        Row-major with ``Delta`` as the slow index.
    """
    direction = Direction.parse(direction)
    cells = [(float(P), float(D), kappa, gamma, direction) for D in Delta_values for P in P_values]
    out = []
    for (val, status), c in zip(ordered_map(_region_task, cells, workers), cells):
        out.append(val if val is not None else RegionCell(c[0], c[1], None, 0, False, status))
    return out


def xplus_max_real(P, Delta, kappa, gamma, direction=Direction.FORWARD):
    """Largest eigenvalue real part at ``X+``; NaN where ``X+`` does not exist."""
    params = ClassicalParams(P, Delta, kappa, gamma, direction)
    for fp in fixed_points(params):
        if fp.branch is Branch.XPLUS and not fp.degenerate:
            return fp.max_real
    return math.nan


def hopf_trace(Delta, kappa, gamma, direction=Direction.FORWARD, P_range=None, n_scan=200,
               xtol=1e-12):
    """Drive strength where ``X+`` loses stability through a complex pair.

    The range is scanned on a logarithmic grid for the first change of sign
    of the leading real part, which is then bisected.

    Parameters
    ----------
    P_range : tuple of float, optional
        Defaults to ``(P_threshold * (1 + 1e-6), 1.0)``.

    Raises
    ------
    NoSignChange
        If no crossing from stable to unstable is bracketed.
    """
    direction = Direction.parse(direction)
    if P_range is None:
        pf, pb = threshold_powers(Delta, kappa)
        p0 = pf if direction is Direction.FORWARD else pb
        P_range = (p0 * (1 + 1e-6), 1.0)
    lo, hi = P_range
    g = lambda P: xplus_max_real(P, Delta, kappa, gamma, direction)
    grid = np.geomspace(lo, hi, n_scan)
    vals = np.array([g(P) for P in grid])
    for i in range(n_scan - 1):
        if vals[i] < 0 < vals[i + 1]:
            return bisect(g, grid[i], grid[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps)
    raise NoSignChange(f"hopf_trace: no stability change of X+ for P in [{lo}, {hi}] "
                       f"(Delta={Delta}, kappa={kappa}, gamma={gamma}, {direction.value})")


@dataclass(frozen=True)
class HopfRow:
    Delta: float
    P_hopf: float
    max_re_eig: float
    status: str = "ok"


def _hopf_task(args):
    Delta, kappa, gamma, direction, P_range = args
    P = hopf_trace(Delta, kappa, gamma, direction, P_range)
    return HopfRow(Delta, P, xplus_max_real(P, Delta, kappa, gamma, direction))


def hopf_curve(Delta_values, kappa, gamma, direction=Direction.FORWARD, P_range=None, workers=None):
    """:func:`hopf_trace` for each detuning."""
    direction = Direction.parse(direction)
    cells = [(float(D), kappa, gamma, direction, P_range) for D in Delta_values]
    return [v if v is not None else HopfRow(c[0], math.nan, math.nan, s)
            for (v, s), c in zip(ordered_map(_hopf_task, cells, workers), cells)]


@dataclass(frozen=True)
class GammaRow:
    Gamma: float
    Jm_opt: float
    bandwidth: float
    insertion_loss_db: float
    isolation_db: float
    omega_peak: float
    status: str = "ok"


def gamma_point(Gamma, kappa=1.0, kappad=5.0):
    """Optimal symmetric design and its metrics at one damping."""
    params, _ = symmetric_network(Gamma, kappa, kappad=kappad)
    m = metrics(params)
    return GammaRow(Gamma, params.Jm, m.bandwidth, m.insertion_loss_db, m.isolation_db, m.omega_peak)


def _gamma_task(args):
    return gamma_point(*args)


def gamma_sweep(Gamma_values, kappa=1.0, kappad=5.0, workers=None):
    """One :class:`GammaRow` per damping value."""
    for G in Gamma_values:
        if not 0 < G <= kappa / 2:
            raise ValidationError("Gamma", f"Gamma must lie in (0, kappa/2], got {G}")
    cells = [(float(G), kappa, kappad) for G in Gamma_values]
    nan = math.nan
    return [v if v is not None else GammaRow(c[0], nan, nan, nan, nan, nan, s)
            for (v, s), c in zip(ordered_map(_gamma_task, cells, workers), cells)]


@dataclass(frozen=True)
class AsymCell:
    Gamma1: float
    Gamma2: float
    bandwidth: float
    insertion_loss_db: float
    isolation_db: float
    G1: float
    G2: float
    Jm: float
    J0: float
    status: str = "ok"


def asym_point(Gamma1, Gamma2, kappa=1.0, kappad=5.0):
    """Re-optimized asymmetric design and its metrics."""
    p = optimize_asymmetric(Gamma1, Gamma2, kappa, kappad)
    m = metrics(p)
    return AsymCell(Gamma1, Gamma2, m.bandwidth, m.insertion_loss_db, m.isolation_db,
                    p.G1, p.G2, p.Jm, p.J0)


def _asym_task(args):
    return asym_point(*args)


def asym_map(Gamma1_values, Gamma2_values, kappa=1.0, kappad=5.0, workers=None):
    """Metrics over a ``(Gamma1, Gamma2)`` grid, ``Gamma1`` as the slow index."""
    for key, vals in (("Gamma1", Gamma1_values), ("Gamma2", Gamma2_values)):
        for G in vals:
            if not 0 < G <= kappa / 2:
                raise ValidationError(key, f"{key} must lie in (0, kappa/2], got {G}")
    cells = [(float(a), float(b), kappa, kappad) for a in Gamma1_values for b in Gamma2_values]
    nan = math.nan
    return [v if v is not None else AsymCell(c[0], c[1], nan, nan, nan, nan, nan, nan, nan, s)
            for (v, s), c in zip(ordered_map(_asym_task, cells, workers), cells)]


@dataclass(frozen=True)
class SidebandCell:
    ratio: float
    isolation_db: float
    S_vac: float
    S_c1_vac: float
    S_c2_vac: float
    T_forward: float
    T_backward: float
    P2_over_P3: float
    omega: float
    status: str = "ok"


def _sideband_task(args):
    ratio, Gamma, kappa, kappad, theta, Jm = args
    r = sideband_point(ratio, Gamma, kappa, kappad, theta, Jm=Jm)
    return SidebandCell(r.ratio, r.isolation_db, r.S_vac, r.S_c1_vac, r.S_c2_vac,
                        r.T_forward, r.T_backward, r.P2_over_P3, r.omega)


def sideband_table(ratios, Gamma=None, kappa=1.0, kappad=None, theta=math.pi / 2, workers=None):
    """Parallel, status-carrying counterpart of :func:`trimode.full.sideband_sweep`."""
    Gamma = kappa / 25 if Gamma is None else Gamma
    Jm = optimal_Jm(Gamma, kappa)
    cells = [(float(r), Gamma, kappa, kappad, theta, Jm) for r in ratios]
    nan = math.nan
    return [v if v is not None else SidebandCell(c[0], *([nan] * 8), s)
            for (v, s), c in zip(ordered_map(_sideband_task, cells, workers), cells)]


class Task(enum.Enum):
    REGION_MAP = "RegionMap"
    HOPF_TRACE = "HopfTrace"
    GAMMA_SWEEP = "GammaSweep"
    ASYM_MAP = "AsymMap"
    SIDEBAND_SWEEP = "SidebandSweep"
    SPECTRUM_GRID = "SpectrumGrid"


@dataclass(frozen=True)
class Axis:
    """A named parameter range, or an explicit list of values."""

    name: str
    start: float = None
    stop: float = None
    num: int = None
    spacing: str = "linear"
    explicit: tuple = None

    def __post_init__(self):
        if self.explicit is not None:
            if len(self.explicit) < 1:
                raise ValidationError(self.name, f"axis {self.name} has no values")
            return
        if self.num is None or self.num < 2:
            raise ValidationError(self.name, f"axis {self.name} needs at least 2 points")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValidationError(self.name, f"axis {self.name} range must be finite")
        if self.spacing not in ("linear", "log"):
            raise ValidationError(self.name, f"axis {self.name} spacing must be linear or log")
        if self.spacing == "log" and not (self.start > 0 and self.stop > 0):
            raise ValidationError(self.name, f"log axis {self.name} needs positive bounds")

    def values(self):
        if self.explicit is not None:
            return np.asarray(self.explicit, dtype=float)
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.num)
        return np.linspace(self.start, self.stop, self.num)


_TASK_AXES = {
    Task.REGION_MAP: ("P", "Delta"),
    Task.HOPF_TRACE: ("Delta",),
    Task.GAMMA_SWEEP: ("Gamma",),
    Task.ASYM_MAP: ("Gamma1", "Gamma2"),
    Task.SIDEBAND_SWEEP: ("ratio",),
    Task.SPECTRUM_GRID: ("omega",),
}


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep, over which axes, with which fixed parameters."""

    task: Task
    axes: tuple
    base: dict = field(default_factory=dict)

    def __post_init__(self):
        names = tuple(a.name for a in self.axes)
        if not 1 <= len(names) <= 2:
            raise ValidationError("axes", "a sweep has one or two axes")
        if names != _TASK_AXES[self.task]:
            raise ValidationError("axes", f"{self.task.value} sweeps axes {_TASK_AXES[self.task]}, got {names}")


def run_sweep(spec, workers=None):
    """Evaluate a :class:`SweepSpec` and return its rows in grid order."""
    b = dict(spec.base)
    vals = [a.values() for a in spec.axes]
    if spec.task is Task.REGION_MAP:
        return region_map(vals[0], vals[1], b["kappa"], b["gamma"], b.get("direction", "forward"), workers)
    if spec.task is Task.HOPF_TRACE:
        rng = (b["P_min"], b["P_max"]) if "P_min" in b else None
        return hopf_curve(vals[0], b["kappa"], b["gamma"], b.get("direction", "forward"), rng, workers)
    if spec.task is Task.GAMMA_SWEEP:
        return gamma_sweep(vals[0], b.get("kappa", 1.0), b.get("kappad", 5.0), workers)
    if spec.task is Task.ASYM_MAP:
        return asym_map(vals[0], vals[1], b.get("kappa", 1.0), b.get("kappad", 5.0), workers)
    if spec.task is Task.SIDEBAND_SWEEP:
        return sideband_table(vals[0], b.get("Gamma"), b.get("kappa", 1.0), b.get("kappad"),
                              b.get("theta", math.pi / 2), workers)
    sp = spectrum(NetworkParams(**b), vals[0])
    return list(zip(sp.omega, sp.Tplus, sp.Tminus, sp.contrast))
