"""Scattering with counter-rotating terms kept (no rotating-wave approximation).

Operators are ordered ``(c1, c2, b1, b2, d1, d2)`` followed by their
Hermitian conjugates.  Every mode carries ``+i omega_m`` on its diagonal, so
the signal band sits at ``omega_m + omega_opt``.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ValidationError
from .rwa import (NetworkParams, _isolation_db, _resolvent, optimal_design,
                  optimal_Jm)


@dataclass(frozen=True, kw_only=True)
class FullNetworkParams(NetworkParams):
    """Network parameters plus the mechanical frequency ``omega_m``."""

    omega_m: float = 20.0

    def __post_init__(self):
        super().__post_init__()
        if not (math.isfinite(self.omega_m) and self.omega_m > 0):
            raise ValidationError("omega_m", f"omega_m must be > 0, got {self.omega_m!r}")

    @property
    def sideband_ratio(self):
        return self.omega_m / self.kappa1

    @classmethod
    def from_network(cls, params, omega_m):
        return cls(omega_m=omega_m, **{k: getattr(params, k) for k in params.__dataclass_fields__})

    def rotating(self):
        """The same network without ``omega_m``."""
        return NetworkParams(**{k: getattr(self, k) for k in NetworkParams.__dataclass_fields__})


def build_full_matrices(params):
    """12x12 drift matrix ``[[A, B], [B*, A*]]`` and the port-rate matrix.

    ``A`` holds the excitation-conserving couplings and ``B`` the
    counter-rotating ones.
    """
    p = params
    e = np.exp(1j * p.theta)
    wm = 1j * p.omega_m
    A = np.array([
        [p.kappa1 / 2 + wm, 1j * p.J0, 1j * p.G1, 0, 0, 0],
        [1j * p.J0, p.kappa2 / 2 + wm, 0, 1j * p.G2 / e, 0, 0],
        [1j * p.G1, 0, p.gamma1 / 2 + wm, 1j * p.Jm, 1j * p.Gd1, 0],
        [0, 1j * p.G2 * e, 1j * p.Jm, p.gamma2 / 2 + wm, 0, 1j * p.Gd2],
        [0, 0, 1j * p.Gd1, 0, p.kappad1 / 2 + wm, 0],
        [0, 0, 0, 1j * p.Gd2, 0, p.kappad2 / 2 + wm],
    ], dtype=complex)
    # counter-rotating couplings: both pumped beam-splitter phases enter as exp(-i theta)
    B = np.array([
        [0, 0, 1j * p.G1, 0, 0, 0],
        [0, 0, 0, 1j * p.G2 / e, 0, 0],
        [1j * p.G1, 0, 0, 0, 1j * p.Gd1, 0],
        [0, 1j * p.G2 / e, 0, 0, 0, 1j * p.Gd2],
        [0, 0, 1j * p.Gd1, 0, 0, 0],
        [0, 0, 0, 1j * p.Gd2, 0, 0],
    ], dtype=complex)
    M = np.block([[A, B], [B.conj(), A.conj()]])
    rates = np.sqrt([p.kappa1, p.kappa2, p.gamma1, p.gamma2, p.kappad1, p.kappad2])
    L = np.diag(np.concatenate([rates, rates])).astype(complex)
    return M, L


@dataclass(frozen=True)
class NoiseSpectrumPoint:
    """Scattering and added vacuum noise at one frequency.

    ``T_forward = |U21|^2 + |U27|^2`` and ``T_backward = |U12|^2 + |U18|^2``
    (1-based indices), ``S_ci_vac`` is the total weight of conjugate inputs
    in output row ``c_i``.
    """

    omega: float
    T_forward: float
    T_backward: float
    S_c1_vac: float
    S_c2_vac: float
    U: np.ndarray = field(repr=False, default=None)

    @property
    def isolation_db(self):
        return _isolation_db(self.T_forward, self.T_backward)


def full_response(params, omegas):
    """Stack of 12x12 scattering matrices ``L (M - i omega)^-1 L - I``."""
    M, L = build_full_matrices(params)
    inv = _resolvent(M, omegas, f"full_scattering({params})")
    return L @ inv @ L - np.eye(12)


def _assemble(omegas, U):
    A = np.abs(U) ** 2
    return (A[:, 1, 0] + A[:, 1, 6], A[:, 0, 1] + A[:, 0, 7],
            A[:, 0, 6:].sum(axis=1), A[:, 1, 6:].sum(axis=1))


def full_scattering(params, omega):
    """Scattering probabilities and vacuum noise at one frequency."""
    U = full_response(params, [omega])
    tf, tb, s1, s2 = (float(v[0]) for v in _assemble([omega], U))
    return NoiseSpectrumPoint(float(omega), tf, tb, s1, s2, U[0])


def full_spectrum(params, omegas):
    """Columns ``(omega, T_forward, T_backward, S_c1_vac, S_c2_vac)`` on a grid."""
    omegas = np.asarray(omegas, dtype=float)
    U = full_response(params, omegas)
    return (omegas,) + _assemble(omegas, U)


def power_ratio(omega_m, kappa):
    """Control-power ratio ``1 + 4 (omega_m / kappa)^2`` of two-mode to three-mode schemes.

    Evaluated in exact rational arithmetic on the binary values of the inputs.
    """
    if omega_m < 0 or not kappa > 0:
        raise ValidationError("kappa", "omega_m must be >= 0 and kappa > 0")
    r = Fraction(omega_m) / Fraction(kappa)
    return float(1 + 4 * r * r)


@dataclass(frozen=True)
class SidebandRow:
    ratio: float
    isolation_db: float
    S_vac: float
    S_c1_vac: float
    S_c2_vac: float
    T_forward: float
    T_backward: float
    P2_over_P3: float
    omega: float
    Jm: float


def sideband_point(ratio, Gamma=None, kappa=1.0, kappad=None, theta=math.pi / 2,
                   gamma_fraction=0.01, Jm=None):
    """Evaluate the optimal symmetric design at one sideband ratio.

    ``S_vac`` is the noise in the forward output port ``c2``.
    Defaults are ``Gamma = kappa/25`` and ``kappad = 10 kappa``.
    """
    if not ratio >= 1:
        raise ValidationError("ratio", f"sideband ratio must be >= 1, got {ratio!r}")
    Gamma = kappa / 25 if Gamma is None else Gamma
    kappad = 10 * kappa if kappad is None else kappad
    Jm = optimal_Jm(Gamma, kappa) if Jm is None else Jm
    d = optimal_design(Gamma, kappa, Jm)
    base = NetworkParams.from_effective(Gamma, Gamma, kappad1=kappad, gamma_fraction=gamma_fraction,
                                        kappa1=kappa, kappa2=kappa, J0=d.J0, Jm=Jm, G1=d.G,
                                        G2=d.G, theta=theta)
    omega_m = ratio * kappa
    fp = FullNetworkParams.from_network(base, omega_m)
    pt = full_scattering(fp, omega_m + d.omega_opt)
    return SidebandRow(float(ratio), pt.isolation_db, pt.S_c2_vac, pt.S_c1_vac, pt.S_c2_vac,
                       pt.T_forward, pt.T_backward, power_ratio(omega_m, kappa), pt.omega, Jm)


def sideband_sweep(ratios, Gamma=None, kappa=1.0, kappad=None, theta=math.pi / 2,
                   gamma_fraction=0.01):
    """One :class:`SidebandRow` per sideband ratio, couplings re-optimized at each."""
    Gamma = kappa / 25 if Gamma is None else Gamma
    Jm = optimal_Jm(Gamma, kappa)
    return [sideband_point(r, Gamma, kappa, kappad, theta, gamma_fraction, Jm) for r in ratios]
