"""Parameter records for the single three-mode block."""

import enum
import math
from dataclasses import dataclass

from scipy.constants import hbar

from ..errors import UnitError, ValidationError


class Direction(enum.Enum):
    """Which port receives the strong drive."""

    FORWARD = "forward"    # drive into mode a1
    BACKWARD = "backward"  # drive into mode a2

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValidationError("direction", f"direction must be 'forward' or 'backward', got {value!r}") from None


@dataclass(frozen=True)
class ClassicalParams:
    """Dimensionless parameters of the mean-field flow.

    All rates are in units of the mechanical frequency and time is in units
    of its inverse.

    Parameters
    ----------
    P : float
        Drive strength ``4 g^2 kappa alpha_in^2 / omega_m^4``.
    Delta : float
        Drive detuning from mode a1 over ``omega_m``.
    kappa : float
        Optical decay rate (both optical modes).
    gamma : float
        Mechanical decay rate.
    direction : Direction
        Drive port.
    """

    P: float
    Delta: float
    kappa: float
    gamma: float
    direction: Direction = Direction.FORWARD

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction.parse(self.direction))
        for key in ("P", "Delta", "kappa", "gamma"):
            v = getattr(self, key)
            if not math.isfinite(v):
                raise ValidationError(key, f"{key} must be finite, got {v!r}")
            object.__setattr__(self, key, float(v))
        if self.P < 0:
            raise ValidationError("P", f"P must be >= 0, got {self.P}")
        if self.kappa <= 0:
            raise ValidationError("kappa", f"kappa must be > 0, got {self.kappa}")
        if self.gamma < 0:
            raise ValidationError("gamma", f"gamma must be >= 0, got {self.gamma}")

    @property
    def backward(self):
        return self.direction is Direction.BACKWARD

    def replace(self, **changes):
        fields = dict(P=self.P, Delta=self.Delta, kappa=self.kappa,
                      gamma=self.gamma, direction=self.direction)
        fields.update(changes)
        return ClassicalParams(**fields)


@dataclass(frozen=True)
class ForcingProtocol:
    """Linearly decaying kick ``F(t) = (1 - t/T) f`` applied for ``t < T``.

    The force acts on the mechanical velocity.
    """

    f: float
    T: float = 1e3

    def __post_init__(self):
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValidationError("T", f"ramp duration must be > 0, got {self.T}")
        if not math.isfinite(self.f):
            raise ValidationError("f", f"force amplitude must be finite, got {self.f}")

    def __call__(self, t):
        return (1.0 - t / self.T) * self.f if t < self.T else 0.0

    @classmethod
    def default(cls, params, T=1e3):
        """Kick of size ``X+`` of the forward branch at ``params``.

        The forward branch is used even for a backward run so both
        directions receive the same perturbation.  When no forward ``X+``
        exists the kick falls back to the saddle-node displacement
        ``sqrt(Delta^2 + Delta - kappa^2/4)`` (or 0 if that is imaginary).
        """
        from .fixed_points import Branch, fixed_points

        fwd = params.replace(direction=Direction.FORWARD)
        for fp in fixed_points(fwd, with_stability=False):
            if fp.branch is Branch.XPLUS:
                return cls(f=fp.X, T=T)
        A = params.Delta ** 2 + params.Delta - params.kappa ** 2 / 4
        return cls(f=math.sqrt(A) if A > 0 else 0.0, T=T)


def _photon_flux(drive_power, omega_l, convention):
    if convention == "angular":
        return drive_power / (hbar * omega_l)
    if convention == "cycle":
        # photon energy written as h * omega_l, a 2*pi larger denominator
        return drive_power / (2 * math.pi * hbar * omega_l)
    raise ValidationError("convention", f"unknown flux convention {convention!r}")


def renormalize(g, kappa, gamma, omega_m, Delta, drive_power, omega_l,
                direction=Direction.FORWARD, convention="angular"):
    """Convert physical parameters into :class:`ClassicalParams`.

    Parameters
    ----------
    g, kappa, gamma, omega_m, Delta, omega_l : float
        Angular rates in rad/s.  ``g`` is the single-photon coupling and
        ``omega_l`` the drive laser frequency.
    drive_power : float
        Input power in watts.
    convention : {"angular", "cycle"}
        How the input photon flux is obtained from power.  ``"angular"`` uses
        ``P_in / (hbar omega_l)``; ``"cycle"`` divides by a further ``2 pi``.

    Returns
    -------
    ClassicalParams
    """
    for key, v in (("kappa", kappa), ("omega_m", omega_m), ("omega_l", omega_l)):
        if not v > 0:
            raise UnitError(key, f"{key} must be a positive frequency, got {v!r}")
    if gamma < 0:
        raise UnitError("gamma", f"gamma must be nonnegative, got {gamma!r}")
    if drive_power < 0:
        raise ValidationError("drive_power", f"drive_power must be >= 0, got {drive_power!r}")
    flux = _photon_flux(drive_power, omega_l, convention)
    P = 4 * g ** 2 * kappa * flux / omega_m ** 4
    return ClassicalParams(P=P, Delta=Delta / omega_m, kappa=kappa / omega_m,
                           gamma=gamma / omega_m, direction=direction)


def drive_power(P, g, kappa, omega_m, omega_l, convention="angular"):
    """Input power in watts that produces the dimensionless strength ``P``."""
    if not (g > 0 and kappa > 0 and omega_m > 0 and omega_l > 0):
        raise UnitError("g", "all rates must be positive")
    flux = P * omega_m ** 4 / (4 * g ** 2 * kappa)
    return flux / _photon_flux(1.0, omega_l, convention)
