import math

import pytest

from trimode.classical import ClassicalParams, Direction, ForcingProtocol, drive_power, renormalize
from trimode.classical.fixed_points import threshold_powers
from trimode.errors import UnitError, ValidationError

TWO_PI = 2 * math.pi
# resonator used for the milliwatt window
G0, KAPPA, WM, WL = TWO_PI * 1e6, TWO_PI * 250e6, TWO_PI * 5e9, TWO_PI * 200e12


def test_renormalized_rates():
    p = renormalize(G0, KAPPA, TWO_PI * 1e3, WM, WM / 2, 1e-3, WL)
    assert p.kappa == pytest.approx(0.05, rel=1e-15)
    assert p.Delta == pytest.approx(0.5, rel=1e-15)
    assert p.gamma == pytest.approx(2e-7, rel=1e-12)


def test_zero_coupling_means_zero_drive():
    assert renormalize(0.0, KAPPA, 1.0, WM, 0.0, 5.0, WL).P == 0.0


def test_drive_power_inverts_renormalize():
    for conv in ("angular", "cycle"):
        pw = drive_power(0.004, G0, KAPPA, WM, WL, convention=conv)
        p = renormalize(G0, KAPPA, 1.0, WM, WM / 2, pw, WL, convention=conv)
        assert p.P == pytest.approx(0.004, rel=1e-12)


def test_milliwatt_window():
    pf, pb = threshold_powers(0.5, 0.05)
    # cycle convention reproduces the quoted 10.9 mW and 32.7 mW window
    lo = drive_power(pf, G0, KAPPA, WM, WL, convention="cycle") * 1e3
    hi = drive_power(pb, G0, KAPPA, WM, WL, convention="cycle") * 1e3
    assert lo == pytest.approx(10.9, abs=0.05)
    assert hi == pytest.approx(32.7, abs=0.05)
    # the angular convention differs by exactly 2 pi
    ang = drive_power(pf, G0, KAPPA, WM, WL) * 1e3
    assert lo / ang == pytest.approx(TWO_PI, rel=1e-12)


@pytest.mark.parametrize("key", ["kappa", "omega_m", "omega_l"])
def test_nonpositive_frequency_rejected(key):
    kw = dict(g=G0, kappa=KAPPA, gamma=1.0, omega_m=WM, Delta=0.0, drive_power=1e-3, omega_l=WL)
    kw[key] = 0.0
    with pytest.raises(UnitError):
        renormalize(**kw)


def test_params_validation():
    with pytest.raises(ValidationError) as e:
        ClassicalParams(0.1, 0.5, -1.0, 0.0)
    assert e.value.key == "kappa"
    with pytest.raises(ValidationError):
        ClassicalParams(-0.1, 0.5, 0.05, 0.0)
    with pytest.raises(ValidationError):
        ClassicalParams(0.1, 0.5, 0.05, -1e-3)
    with pytest.raises(ValidationError):
        ClassicalParams(0.1, 0.5, 0.05, 0.0, "sideways")
    assert ClassicalParams(0.1, 0.5, 0.05, 0.0, "Backward").direction is Direction.BACKWARD


def test_forcing_ramp():
    f = ForcingProtocol(2.0, 100.0)
    assert f(0.0) == 2.0
    assert f(50.0) == pytest.approx(1.0)
    assert f(100.0) == 0.0
    assert f(99.999999) == pytest.approx(0.0, abs=1e-7)
    with pytest.raises(ValidationError):
        ForcingProtocol(1.0, 0.0)


def test_default_forcing_uses_forward_xplus():
    p = ClassicalParams(0.005, 0.5, 0.05, 1e-3, "backward")
    f = ForcingProtocol.default(p)
    assert f.f == pytest.approx(0.885850, abs=1e-6)
    assert f.T == 1e3
    # region I: falls back to the saddle-node displacement
    q = ClassicalParams(0.002, 0.5, 0.05, 1e-3)
    assert ForcingProtocol.default(q).f == pytest.approx(math.sqrt(0.75 - 0.000625))
