import math

import pytest

import rfcorr


def test_version():
    assert rfcorr.__version__


def test_steady_state_fraction():
    atom = rfcorr.AtomParams(v=2.0, delta=0.0, gamma=1.0)
    r12, r21, r22 = rfcorr.steady_state(atom)
    assert r22.real == pytest.approx(1.0 / 3.0, rel=1e-12)
    assert r21 == r12.conjugate()


def test_q_roots_resonant():
    atom = rfcorr.AtomParams(v=10.0)
    roots, degenerate = rfcorr.q_roots(atom)
    assert not degenerate
    om = math.sqrt(99.75)
    expected = {complex(-1.0, 0.0), complex(-1.5, om), complex(-1.5, -om)}
    for e in expected:
        assert min(abs(r - e) for r in roots) < 1e-10


def test_spectrum_triplet_peak():
    atom = rfcorr.AtomParams(v=10.0, delta=2.0)
    s_side = rfcorr.physical_spectrum(0.1, 10.0, atom)
    s_off = rfcorr.physical_spectrum(0.1, 6.0, atom)
    assert s_side > 3 * s_off
    assert rfcorr.physical_spectrum(0.5, 3.0, rfcorr.AtomParams(v=0.0)) == 0.0


def test_g22_symmetry_and_oracle():
    atom = rfcorr.AtomParams(v=10.0, delta=2.0)
    a = rfcorr.g22_zero(1.0, 3.0, -7.0, atom)
    b = rfcorr.g22_zero(1.0, -7.0, 3.0, atom)
    assert a == pytest.approx(b, rel=1e-10)
    bf = rfcorr.brute_force_g22_zero(1.0, 3.0, -7.0, atom)
    assert bf.real == pytest.approx(a, rel=1e-4)
    assert abs(bf.imag) < 1e-10 * abs(a)


def test_g_nm_matches_spectrum():
    atom = rfcorr.AtomParams(v=100.0)
    g11 = rfcorr.g_nm([("+", 0.4, 30.0), ("-", 0.4, 30.0)], atom)
    s = rfcorr.physical_spectrum(0.4, 30.0, atom)
    assert g11.real == pytest.approx(0.4 * s, rel=1e-12)


def test_delay_boundary_and_normalization():
    atom = rfcorr.AtomParams(v=20.0)
    z = rfcorr.g22_tau(6.0, 0.0, 20.0, 0.0, atom)
    assert z == pytest.approx(rfcorr.g22_zero(6.0, 0.0, 20.0, atom), rel=1e-10)
    g2_long = rfcorr.g2_normalized(6.0, 0.0, 20.0, 30.0, atom)
    assert g2_long == pytest.approx(1.0, abs=1e-3)


def test_secular_landmarks():
    atom = rfcorr.AtomParams(v=200.0)
    dp = rfcorr.dressed_params(atom)
    assert dp.gamma1 == pytest.approx(1.0, rel=1e-12)
    assert rfcorr.secular_g2("RR", 0.1, atom, 20.0) == 1.0
    assert rfcorr.secular_g2("TT", 0.0, atom, 20.0) == 0.0
    g2_rr = rfcorr.g2_normalized(20.0, 0.0, 0.0, 0.0, atom)
    assert abs(g2_rr - 1.0) < 0.05


def test_delta_g2_resonance_structure():
    atom = rfcorr.AtomParams(v=100.0)
    on_peak = abs(rfcorr.delta_g2(0.4, 100.0, -100.0, atom))
    off_peak = abs(rfcorr.delta_g2(0.4, 50.0, -50.0, atom))
    assert on_peak > 100 * off_peak


def test_errors_surface_as_python_exceptions():
    with pytest.raises(rfcorr.ZeroIntensityError):
        rfcorr.g2_normalized(1.0, 0.0, 0.0, 0.1, rfcorr.AtomParams(v=0.0))
    with pytest.raises(rfcorr.CapExceededError):
        rfcorr.g_nm([("+", 1.0, 0.0)] * 5 + [("-", 1.0, 0.0)] * 5, rfcorr.AtomParams(v=5.0))
    with pytest.raises(ValueError):
        rfcorr.AtomParams(v=1.0, gamma=-1.0)
