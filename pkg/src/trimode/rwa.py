"""Frequency-domain scattering of the dual-block network in the rotating frame.

Mode ordering is ``(c1, c2, b1, b2)`` for the reduced model in which the
auxiliary cavities ``d1, d2`` are adiabatically eliminated, and
``(c1, c2, b1, b2, d1, d2)`` for the un-reduced model.  Frequencies are
measured in the same units as ``kappa1``.
"""

import math
import warnings
from dataclasses import dataclass, field, fields, replace

import numpy as np
from scipy.optimize import golden, minimize

from .errors import (NoContrastPeak, NoInteriorMaximum, SingularResponse,
                     ValidationError)

#: Condition number above which a response matrix is refused.
MAX_CONDITION = 1e12
#: Isolation reported when the backward probability underflows.
ISOLATION_CAP_DB = 200.0


class EliminationWarning(UserWarning):
    """Auxiliary cavity is not fast enough for adiabatic elimination."""


@dataclass(frozen=True, kw_only=True)
class NetworkParams:
    """Couplings and rates of the dual-block network.

    The effective mechanical damping ``Gamma_i = gamma_i + 4 Gd_i^2 / kappad_i``
    is derived from the stored rates.  ``theta`` is wrapped into ``[0, 2 pi)``.
    """

    kappa1: float = 1.0
    kappa2: float = 1.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    Gd1: float = 0.0
    Gd2: float = 0.0
    kappad1: float = 5.0
    kappad2: float = 5.0
    J0: float = 0.0
    Jm: float = 0.0
    G1: float = 0.0
    G2: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ValidationError(f.name, f"{f.name} must be finite, got {v!r}")
            if f.name != "theta" and v < 0:
                raise ValidationError(f.name, f"{f.name} must be >= 0, got {v!r}")
            object.__setattr__(self, f.name, float(v))
        for key in ("kappa1", "kappa2", "kappad1", "kappad2"):
            if getattr(self, key) <= 0:
                raise ValidationError(key, f"{key} must be > 0")
        object.__setattr__(self, "theta", self.theta % (2 * math.pi))
        if not self.elimination_valid:
            warnings.warn("auxiliary decay below 10x max(Gd, gamma); "
                          "reduced model may be inaccurate", EliminationWarning, stacklevel=3)

    @property
    def Gamma1(self):
        return self.gamma1 + 4 * self.Gd1 ** 2 / self.kappad1

    @property
    def Gamma2(self):
        return self.gamma2 + 4 * self.Gd2 ** 2 / self.kappad2

    @property
    def elimination_valid(self):
        return (self.kappad1 >= 10 * max(self.Gd1, self.gamma1)
                and self.kappad2 >= 10 * max(self.Gd2, self.gamma2))

    def with_(self, **changes):
        return replace(self, **changes)

    @classmethod
    def from_effective(cls, Gamma1, Gamma2=None, *, kappad1=5.0, kappad2=None,
                       gamma_fraction=0.01, **kw):
        """Build from target effective dampings.

        Intrinsic damping is ``gamma_fraction * Gamma`` and the auxiliary
        coupling is back-solved as ``Gd = sqrt((Gamma - gamma) kappad / 4)``.
        """
        Gamma2 = Gamma1 if Gamma2 is None else Gamma2
        kappad2 = kappad1 if kappad2 is None else kappad2
        if not 0 <= gamma_fraction <= 1:
            raise ValidationError("gamma_fraction", "gamma_fraction must lie in [0, 1]")
        for key, v in (("Gamma1", Gamma1), ("Gamma2", Gamma2)):
            if not v > 0:
                raise ValidationError(key, f"{key} must be > 0, got {v!r}")
        g1, g2 = gamma_fraction * Gamma1, gamma_fraction * Gamma2
        return cls(gamma1=g1, gamma2=g2,
                   Gd1=math.sqrt((Gamma1 - g1) * kappad1 / 4),
                   Gd2=math.sqrt((Gamma2 - g2) * kappad2 / 4),
                   kappad1=kappad1, kappad2=kappad2, **kw)


@dataclass(frozen=True)
class ScatterResult:
    """Scattering at one frequency.

    ``U`` maps inputs of ``(c1, c2, b1, b2)`` to outputs; ``R`` maps the
    auxiliary inputs ``(d1, d2)``.
    """

    omega: float
    U: np.ndarray = field(repr=False)
    R: np.ndarray = field(repr=False)
    Tplus: float
    Tminus: float


@dataclass(frozen=True)
class Spectrum:
    """Forward and backward scattering probabilities on a frequency grid."""

    omega: np.ndarray
    Tplus: np.ndarray
    Tminus: np.ndarray

    @property
    def contrast(self):
        return self.Tplus - self.Tminus


def build_matrices(params, eliminated=True):
    """Drift and coupling matrices.

    Parameters
    ----------
    params : NetworkParams
    eliminated : bool
        Reduced 4-mode model (default) or the 6-mode model with auxiliary
        cavities kept.

    Returns
    -------
    (M, L, N) when ``eliminated`` else (M6, L6)
        The response to inputs is ``(M - i omega)^-1 (L v_in + N d_in)``.
    """
    p = params
    e = np.exp(1j * p.theta)
    if eliminated:
        M = np.array([
            [p.kappa1 / 2, 1j * p.J0, 1j * p.G1, 0],
            [1j * p.J0, p.kappa2 / 2, 0, 1j * p.G2 / e],
            [1j * p.G1, 0, p.Gamma1 / 2, 1j * p.Jm],
            [0, 1j * p.G2 * e, 1j * p.Jm, p.Gamma2 / 2],
        ], dtype=complex)
        L = np.diag(np.sqrt([p.kappa1, p.kappa2, p.gamma1, p.gamma2])).astype(complex)
        N = np.zeros((4, 2), dtype=complex)
        N[2, 0] = -2j * p.Gd1 / math.sqrt(p.kappad1)
        N[3, 1] = -2j * p.Gd2 / math.sqrt(p.kappad2)
        return M, L, N
    M = np.array([
        [p.kappa1 / 2, 1j * p.J0, 1j * p.G1, 0, 0, 0],
        [1j * p.J0, p.kappa2 / 2, 0, 1j * p.G2 / e, 0, 0],
        [1j * p.G1, 0, p.gamma1 / 2, 1j * p.Jm, 1j * p.Gd1, 0],
        [0, 1j * p.G2 * e, 1j * p.Jm, p.gamma2 / 2, 0, 1j * p.Gd2],
        [0, 0, 1j * p.Gd1, 0, p.kappad1 / 2, 0],
        [0, 0, 0, 1j * p.Gd2, 0, p.kappad2 / 2],
    ], dtype=complex)
    L = np.diag(np.sqrt([p.kappa1, p.kappa2, p.gamma1, p.gamma2,
                         p.kappad1, p.kappad2])).astype(complex)
    return M, L


def _resolvent(M, omegas, what):
    """Stack of ``(M - i omega)^-1`` with a conditioning check."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    n = M.shape[0]
    A = M[None, :, :] - 1j * omegas[:, None, None] * np.eye(n)[None]
    cond = np.linalg.cond(A)
    bad = ~(cond <= MAX_CONDITION)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise SingularResponse(f"{what}: condition number {cond[i]:.3g} "
                               f"exceeds {MAX_CONDITION:g} at omega={float(omegas[i])!r}")
    return np.linalg.inv(A)


def response(params, omegas, eliminated=True):
    """Scattering matrices on a grid.

    Returns
    -------
    U : ndarray, shape (n, k, k)
    R : ndarray, shape (n, 4, 2) or None for the 6-mode model
    """
    if eliminated:
        M, L, N = build_matrices(params, True)
        inv = _resolvent(M, omegas, f"scattering_matrix({params})")
        U = L @ inv @ L - np.eye(4)
        return U, L @ inv @ N
    M, L = build_matrices(params, False)
    inv = _resolvent(M, omegas, f"scattering_matrix, 6-mode ({params})")
    return L @ inv @ L - np.eye(6), None


def scattering_matrix(params, omega):
    """Scattering matrices and probabilities at one frequency.

    ``Tplus = |U21|^2`` (c1 to c2) and ``Tminus = |U12|^2`` (c2 to c1).
    """
    U, R = response(params, [omega])
    U, R = U[0], R[0]
    return ScatterResult(float(omega), U, R, float(abs(U[1, 0]) ** 2), float(abs(U[0, 1]) ** 2))


def spectrum(params, omegas, eliminated=True):
    """Forward and backward probabilities over a frequency grid."""
    omegas = np.asarray(omegas, dtype=float)
    U, _ = response(params, omegas, eliminated)
    return Spectrum(omegas, np.abs(U[:, 1, 0]) ** 2, np.abs(U[:, 0, 1]) ** 2)


def analytic_Tpm(params, omega):
    """Closed-form ``(Tplus, Tminus)`` of the reduced model.

    Uses ``zeta_i = kappa_i/2 - i omega`` and ``chi_i = Gamma_i/2 - i omega``.
    The numerator is ``G1 G2 Jm exp(-+i theta) - J0 (Jm^2 + chi1 chi2)`` and
    the denominator is ``det(M - i omega)``.
    """
    p = params
    w = np.asarray(omega, dtype=float)
    z1, z2 = p.kappa1 / 2 - 1j * w, p.kappa2 / 2 - 1j * w
    c1, c2 = p.Gamma1 / 2 - 1j * w, p.Gamma2 / 2 - 1j * w
    g12 = p.G1 * p.G2
    den = (p.J0 ** 2 * p.Jm ** 2 + g12 ** 2 - 2 * p.J0 * p.Jm * g12 * math.cos(p.theta)
           + p.G2 ** 2 * z1 * c1 + p.G1 ** 2 * z2 * c2 + p.J0 ** 2 * c1 * c2
           + p.Jm ** 2 * z1 * z2 + z1 * z2 * c1 * c2)
    common = p.J0 * (p.Jm ** 2 + c1 * c2)
    path = g12 * p.Jm * np.exp(1j * p.theta)
    k = p.kappa1 * p.kappa2
    return k * np.abs((np.conj(path) - common) / den) ** 2, k * np.abs((path - common) / den) ** 2


@dataclass(frozen=True)
class Design:
    """Symmetric operating point: signal frequency, hopping and pump coupling."""

    omega_opt: float
    J0: float
    G: float


def optimal_design(Gamma, kappa, Jm):
    """Couplings that null backward scattering and maximize forward scattering.

    Valid for equal dissipation in both blocks and ``theta = pi/2``.

    Parameters
    ----------
    Gamma, kappa, Jm : float

    Returns
    -------
    Design
    """
    s2 = 4 * Jm ** 2 + Gamma ** 2
    s = math.sqrt(s2)
    G = math.sqrt(Gamma) * (s2 * (s2 + kappa ** 2) / (16 * Jm ** 2 + 8 * Gamma ** 2)) ** 0.25
    return Design(-s / 2, 2 * G * G * Jm / (Gamma * s), G)


def symmetric_network(Gamma, kappa=1.0, Jm=None, theta=math.pi / 2, kappad=5.0,
                      gamma_fraction=0.01):
    """Network at the symmetric design point; ``Jm`` defaults to :func:`optimal_Jm`.

    Returns
    -------
    params : NetworkParams
    design : Design
    """
    if Jm is None:
        Jm = optimal_Jm(Gamma, kappa)
    d = optimal_design(Gamma, kappa, Jm)
    p = NetworkParams.from_effective(Gamma, Gamma, kappad1=kappad * kappa, gamma_fraction=gamma_fraction,
                                     kappa1=kappa, kappa2=kappa, J0=d.J0, Jm=Jm, G1=d.G, G2=d.G,
                                     theta=theta)
    return p, d


def _design_tplus(Gamma, kappa, Jm):
    d = optimal_design(Gamma, kappa, Jm)
    w, z, c = d.omega_opt, kappa / 2 - 1j * d.omega_opt, Gamma / 2 - 1j * d.omega_opt
    # closed form at theta = pi/2 with G1 = G2 and equal rates
    num = -1j * d.G ** 2 * Jm - d.J0 * (Jm ** 2 + c * c)
    den = (d.J0 ** 2 * Jm ** 2 + d.G ** 4 + 2 * d.G ** 2 * z * c + d.J0 ** 2 * c * c
           + Jm ** 2 * z * z + z * z * c * c)
    del w
    return kappa ** 2 * abs(num / den) ** 2


def optimal_Jm(Gamma, kappa=1.0, n_scan=400):
    """Phonon hopping that maximizes forward scattering at the design point.

    A logarithmic pre-scan over ``(0, 5 kappa]`` brackets the maximum, which
    is then refined by golden-section search to relative tolerance 1e-6.

    Raises
    ------
    NoInteriorMaximum
        If the best scan point is at either end of the interval.
    """
    if not (Gamma > 0 and kappa > 0):
        raise ValidationError("Gamma", "Gamma and kappa must be positive")
    grid = np.geomspace(1e-6 * kappa, 5 * kappa, n_scan)
    vals = np.array([_design_tplus(Gamma, kappa, j) for j in grid])
    i = int(np.argmax(vals))
    if i == 0 or i == n_scan - 1:
        raise NoInteriorMaximum(f"optimal_Jm: maximum at search boundary Jm={grid[i]:.6g} "
                                f"(Gamma={Gamma}, kappa={kappa})")
    # golden-section in log(Jm) so the relative tolerance is uniform
    f = lambda u: -_design_tplus(Gamma, kappa, math.exp(u))
    u = golden(f, brack=(math.log(grid[i - 1]), math.log(grid[i]), math.log(grid[i + 1])),
               tol=1e-7)
    return math.exp(u)


def interference_frequency(params):
    """Frequency where backward scattering can vanish, ``-sqrt(Jm^2 + Gamma1 Gamma2 / 4)``."""
    return -math.sqrt(params.Jm ** 2 + params.Gamma1 * params.Gamma2 / 4)


def default_grid(params, n=4096, lo=None, hi=None, n_dense=512):
    """Uniform grid refined logarithmically near the interference point.

    The uniform part covers ``[lo, hi]`` (default ``+-2 kappa``).  Points
    cluster within ``5 Gamma`` of both ``+-interference_frequency``, and the
    two frequencies themselves are included.
    """
    kappa = max(params.kappa1, params.kappa2)
    lo = -2 * kappa if lo is None else lo
    hi = 2 * kappa if hi is None else hi
    w0 = interference_frequency(params)
    width = 5 * max(params.Gamma1, params.Gamma2, 1e-12)
    offs = np.geomspace(width * 1e-6, width, n_dense)
    dense = np.concatenate([c + s * offs for c in (w0, -w0) for s in (-1, 1)] + [[w0, -w0]])
    dense = dense[(dense >= lo) & (dense <= hi)]
    return np.unique(np.concatenate([np.linspace(lo, hi, n), dense]))


@dataclass(frozen=True)
class Metrics:
    """Performance figures at the forward-favoring contrast peak."""

    omega_peak: float
    insertion_loss_db: float
    isolation_db: float
    bandwidth: float
    Tplus: float
    Tminus: float


def _isolation_db(tp, tm):
    if tm <= 0 or tp / tm > 10 ** (ISOLATION_CAP_DB / 10):
        return ISOLATION_CAP_DB
    return 10 * math.log10(tp / tm)


def _half_crossings(w, a, i):
    """Linearly interpolated half-maximum crossings of ``a`` around index ``i``."""
    h = a[i] / 2
    j = i
    while j > 0 and a[j] > h:
        j -= 1
    left = w[j] + (h - a[j]) * (w[j + 1] - w[j]) / (a[j + 1] - a[j]) if a[j] <= h else math.nan
    j = i
    while j < len(a) - 1 and a[j] > h:
        j += 1
    right = w[j - 1] + (h - a[j - 1]) * (w[j] - w[j - 1]) / (a[j] - a[j - 1]) if a[j] <= h else math.nan
    return left, right


def _lobe_bracket(w, a, i):
    h = a[i] / 2
    j = i
    while j > 0 and a[j] > h:
        j -= 1
    k = i
    while k < len(a) - 1 and a[k] > h:
        k += 1
    return max(j - 1, 0), min(k + 1, len(a) - 1)


def metrics(params, omegas=None, refine=True, n_refine=4096):
    """Insertion loss, isolation and contrast bandwidth.

    The operating frequency is the maximum of the signed contrast
    ``I = Tplus - Tminus``; the bandwidth is the full width at half maximum
    of ``|I|`` around that lobe, found by linear interpolation.

    Parameters
    ----------
    params : NetworkParams
    omegas : array_like, optional
        Search grid.  By default 4096 points over ``+-10 kappa`` around the
        interference frequency merged with :func:`default_grid`.
    refine : bool
        Re-sample the lobe on ``n_refine`` points before interpolating.

    Raises
    ------
    NoContrastPeak
        If the forward-favoring contrast never exceeds 1e-6.
    """
    if omegas is None:
        kappa = max(params.kappa1, params.kappa2)
        w0 = interference_frequency(params)
        omegas = np.unique(np.concatenate([
            np.linspace(w0 - 10 * kappa, w0 + 10 * kappa, 4096), default_grid(params)]))
    sp = spectrum(params, omegas)
    I = sp.contrast
    if np.max(np.abs(I)) < 1e-6 or np.max(I) < 1e-6:
        raise NoContrastPeak(f"metrics: max contrast {np.max(I):.3g} below 1e-6 for {params}")
    w, i = sp.omega, int(np.argmax(I))
    if refine:
        lo, hi = _lobe_bracket(w, np.abs(I), i)
        w = np.linspace(w[lo], w[hi], n_refine)
        sp = spectrum(params, w)
        I = sp.contrast
        i = int(np.argmax(I))
    left, right = _half_crossings(w, np.abs(I), i)
    tp, tm = float(sp.Tplus[i]), float(sp.Tminus[i])
    return Metrics(float(w[i]), -10 * math.log10(tp), _isolation_db(tp, tm),
                   float(right - left), tp, tm)


def elimination_error(params, omegas):
    """Largest deviation of ``Tplus``/``Tminus`` between the reduced and 6-mode models."""
    a = spectrum(params, omegas, eliminated=True)
    b = spectrum(params, omegas, eliminated=False)
    return float(max(np.max(np.abs(a.Tplus - b.Tplus)), np.max(np.abs(a.Tminus - b.Tminus))))


def _asym_tplus(Gamma1, Gamma2, kappa, G1, G2, Jm):
    """Forward probability at the backward null for ``theta = pi/2``."""
    w = -math.sqrt(Jm ** 2 + Gamma1 * Gamma2 / 4)
    J0 = 2 * G1 * G2 * Jm / (abs(w) * (Gamma1 + Gamma2))
    p = NetworkParams(kappa1=kappa, kappa2=kappa, gamma1=Gamma1, gamma2=Gamma2,
                      kappad1=1e3, kappad2=1e3, J0=J0, Jm=Jm, G1=G1, G2=G2,
                      theta=math.pi / 2)
    return float(analytic_Tpm(p, w)[0]), J0


def optimize_asymmetric(Gamma1, Gamma2, kappa=1.0, kappad=5.0, gamma_fraction=0.01):
    """Re-optimize couplings for unequal mechanical dampings at ``theta = pi/2``.

    The backward path is nulled exactly by choosing the signal frequency
    ``-sqrt(Jm^2 + Gamma1 Gamma2 / 4)`` and the hopping
    ``J0 = 2 G1 G2 Jm / (|omega| (Gamma1 + Gamma2))``.  The remaining
    couplings ``(G1, G2, Jm)`` maximize forward scattering there, by
    Nelder-Mead in log space from several starts including the symmetric
    design at the mean damping.

    Returns
    -------
    NetworkParams
    """
    for key, v in (("Gamma1", Gamma1), ("Gamma2", Gamma2)):
        if not v > 0:
            raise ValidationError(key, f"{key} must be > 0, got {v!r}")
    Gm = 0.5 * (Gamma1 + Gamma2)
    try:
        jm = optimal_Jm(Gm, kappa)
        sym = [optimal_design(Gm, kappa, jm).G, optimal_design(Gm, kappa, jm).G, jm]
    except NoInteriorMaximum:
        sym = [0.25 * kappa, 0.25 * kappa, 0.2 * kappa]
    seeds = [sym] + [[a * kappa, b * kappa, c * kappa] for a, b, c in
                     ((0.25, 0.27, 0.22), (0.2, 0.5, 0.2), (0.5, 0.2, 0.2), (0.1, 0.6, 0.1))]
    obj = lambda x: -_asym_tplus(Gamma1, Gamma2, kappa, *np.exp(x))[0]
    best = None
    for s in seeds:
        r = minimize(obj, np.log(s), method="Nelder-Mead",
                     options=dict(xatol=1e-10, fatol=1e-14, maxiter=20000))
        if best is None or r.fun < best.fun:
            best = r
    G1, G2, Jm = (float(v) for v in np.exp(best.x))
    _, J0 = _asym_tplus(Gamma1, Gamma2, kappa, G1, G2, Jm)
    return NetworkParams.from_effective(Gamma1, Gamma2, kappad1=kappad * kappa,
                                        gamma_fraction=gamma_fraction, kappa1=kappa,
                                        kappa2=kappa, J0=J0, Jm=Jm, G1=G1, G2=G2,
                                        theta=math.pi / 2)
