import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trimode.errors import ValidationError
from trimode.full import (FullNetworkParams, build_full_matrices, full_response, full_scattering,
                          full_spectrum, power_ratio, sideband_point, sideband_sweep)
from trimode.rwa import build_matrices, response, symmetric_network


def fig8(ratio):
    p, d = symmetric_network(1 / 25, kappad=10.0)
    return FullNetworkParams.from_network(p, ratio), d


def test_doubling_structure():
    p, _ = fig8(20.0)
    M, L = build_full_matrices(p.with_(theta=1.1))
    A, B = M[:6, :6], M[:6, 6:]
    assert np.array_equal(M[6:, 6:], A.conj())
    assert np.array_equal(M[6:, :6], B.conj())
    assert np.array_equal(np.diag(L)[:6], np.diag(L)[6:])


def test_rotating_block_matches_rwa():
    p, _ = fig8(20.0)
    M, _ = build_full_matrices(p.with_(theta=1.1))
    M6, _ = build_matrices(p.rotating().with_(theta=1.1), eliminated=False)
    assert np.allclose(M[:6, :6] - 1j * 20.0 * np.eye(6), M6, atol=0, rtol=0)


def test_uncoupled_is_diagonal():
    p = FullNetworkParams(gamma1=0.01, gamma2=0.02, omega_m=7.0)
    M, _ = build_full_matrices(p)
    assert np.count_nonzero(M - np.diag(np.diag(M))) == 0
    assert M[0, 0] == 0.5 + 7j and M[6, 6] == 0.5 - 7j
    assert M[3, 3] == 0.01 + 7j


def test_counter_rotating_entries_share_pump_phase():
    p = FullNetworkParams(G2=0.3, theta=math.pi / 2, omega_m=5.0)
    M, _ = build_full_matrices(p)
    # c2 -> b2^dagger and b2 -> c2^dagger carry the same phase
    assert M[1, 9] == pytest.approx(0.3)
    assert M[3, 7] == pytest.approx(0.3)


full_network = st.builds(
    FullNetworkParams,
    gamma1=st.floats(1e-3, 0.2), gamma2=st.floats(1e-3, 0.2),
    Gd1=st.floats(0, 0.8), Gd2=st.floats(0, 0.8),
    kappad1=st.floats(2, 20), kappad2=st.floats(2, 20),
    J0=st.floats(0, 0.6), Jm=st.floats(0, 0.4), G1=st.floats(0, 0.4), G2=st.floats(0, 0.4),
    theta=st.floats(0, 2 * math.pi), omega_m=st.floats(5, 200))


@settings(max_examples=100, deadline=None)
@given(full_network, st.floats(-3, 3))
def test_symplectic_rows(p, dw):
    U = full_response(p, [p.omega_m + dw])[0]
    A = np.abs(U) ** 2
    d = A[:, :6].sum(axis=1) - A[:, 6:].sum(axis=1)
    assert np.allclose(d[:6], 1.0, atol=1e-9)
    assert np.allclose(d[6:], -1.0, atol=1e-9)
    pt = full_scattering(p, p.omega_m + dw)
    assert min(pt.T_forward, pt.T_backward, pt.S_c1_vac, pt.S_c2_vac) >= 0


def test_spectrum_matches_points():
    p, d = fig8(20.0)
    w = 20.0 + np.linspace(-1, 1, 7)
    cols = full_spectrum(p, w)
    for i, wi in enumerate(w):
        pt = full_scattering(p, wi)
        assert (cols[1][i], cols[2][i], cols[3][i], cols[4][i]) == pytest.approx(
            (pt.T_forward, pt.T_backward, pt.S_c1_vac, pt.S_c2_vac), rel=1e-12)


def test_power_ratio():
    assert power_ratio(85.0, 1.0) == 28901
    assert power_ratio(20.0, 1.0) == 1601
    assert power_ratio(0.0, 3.0) == 1
    assert power_ratio(170.0, 2.0) == 28901
    with pytest.raises(ValidationError):
        power_ratio(1.0, 0.0)


def test_rwa_limit_at_operating_point():
    p, d = fig8(500.0)
    pt = full_scattering(p, 500.0 + d.omega_opt)
    U6, _ = response(p.rotating(), [d.omega_opt], eliminated=False)
    assert abs(pt.T_forward - abs(U6[0, 1, 0]) ** 2) < 1e-4
    assert abs(pt.T_backward - abs(U6[0, 0, 1]) ** 2) < 1e-4


def test_rwa_deviation_shrinks_like_inverse_ratio():
    dev = []
    for r in (50.0, 500.0):
        p, d = fig8(r)
        w = np.linspace(-0.6, 0.6, 121)
        cols = full_spectrum(p, r + w)
        U6, _ = response(p.rotating(), w, eliminated=False)
        dev.append(np.max(np.abs(cols[1] - np.abs(U6[:, 1, 0]) ** 2)))
    assert dev[0] / dev[1] == pytest.approx(10, rel=0.2)


def test_sideband_trends():
    ratios = [10, 20, 50, 85, 100, 200]
    rows = sideband_sweep(ratios)
    iso = [r.isolation_db for r in rows]
    s = [r.S_vac for r in rows]
    assert all(np.diff(iso) > 0)
    assert all(np.diff(s) < 0)
    assert [r.P2_over_P3 for r in rows] == [1 + 4 * r * r for r in ratios]


def test_noise_scaling():
    ratios = np.array([50.0, 100.0, 200.0, 500.0])
    rows = sideband_sweep(ratios)
    for attr in ("S_c1_vac", "S_c2_vac"):
        slope = np.polyfit(np.log(ratios), np.log([getattr(r, attr) for r in rows]), 1)[0]
        assert slope == pytest.approx(-2, abs=0.2)
    assert rows[-1].S_vac < 1e-5


def test_sideband_point_validation():
    with pytest.raises(ValidationError):
        sideband_point(0.5)
    with pytest.raises(ValidationError):
        FullNetworkParams(omega_m=0.0)
