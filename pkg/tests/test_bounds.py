import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import dhkrylov as dk
from dhkrylov.errors import DefinitenessError

from support import random_hs_system, random_spd


def test_widlund_bound_zero_lambda():
    for k in (1, 2, 10):
        assert dk.widlund_bound(0.0, k) == 0.0


def test_widlund_bound_frozen_value():
    # 2*(sqrt(2)-1)/(sqrt(2)+1) evaluated at 50 digits
    assert abs(dk.widlund_bound(1.0, 1) - 0.34314575050761975) <= 1e-15


def test_rapoport_bound_empty_product():
    assert dk.rapoport_bound(0.0, 0) == 2.0
    assert dk.rapoport_bound(3.7, 0) == 2.0


def test_convergence_factors_match_reported_values():
    # at lambda = 0.239 the two factors agree with the reported Stokes-run
    # values 0.0139 / 0.1179 at print precision
    lam = 0.239
    root = np.sqrt(1 + lam**2)
    assert abs((root - 1) / (root + 1) - 0.0139) <= 1.5e-5
    assert abs(lam / (root + 1) - 0.1179) <= 6.0e-5


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 50.0), st.integers(1, 40))
def test_bounds_monotone_in_k(lam, k):
    assert dk.widlund_bound(lam, k + 1) < dk.widlund_bound(lam, k)
    assert dk.rapoport_bound(lam, k + 1) < dk.rapoport_bound(lam, k)


def test_bounds_match_50_digit_closed_forms():
    import mpmath as mp

    mp.mp.dps = 50
    rng = np.random.default_rng(17)
    for _ in range(20):
        lam = float(10.0 ** rng.uniform(-3, 2))
        k = int(rng.integers(1, 31))
        lam_mp = mp.mpf(repr(lam))
        root = mp.sqrt(1 + lam_mp**2)
        wid = 2 * ((root - 1) / (root + 1)) ** k
        rap = 2 * (lam_mp / (root + 1)) ** k
        assert abs(dk.widlund_bound(lam, k) - float(wid)) <= 1e-14 * float(wid)
        assert abs(dk.rapoport_bound(lam, k) - float(rap)) <= 1e-14 * float(rap)


def test_spectral_interval_zero_skew():
    sysm = dk.HsSplitSystem.from_matrix(np.diag([1.0, 2.0]))
    si = dk.spectral_interval(sysm)
    assert si.lam == 0.0


def test_spectral_interval_2x2():
    for s_val in (0.5, -3.0, 7.25):
        a = np.eye(2) + np.array([[0.0, s_val], [-s_val, 0.0]])
        si = dk.spectral_interval(dk.HsSplitSystem.from_matrix(a))
        assert abs(si.lam - abs(s_val)) <= 1e-12 * abs(s_val)


def test_spectral_interval_requires_pd():
    sysm = dk.HsSplitSystem.from_matrix(np.diag([1.0, 0.0]))
    with pytest.raises(DefinitenessError):
        dk.spectral_interval(sysm)


def test_spectral_interval_imaginary_axis_sanity():
    rng = np.random.default_rng(23)
    for seed in range(4):
        sysm = random_hs_system(np.random.default_rng(seed), 30, cond_h=1e3, lam=2.0)
        si = dk.spectral_interval(sysm)
        assert si.max_real_part <= 1e-10 * max(si.lam, 1e-12)


def test_spectral_interval_congruence_scaling_invariant():
    # (H, S) -> (c H, c S) leaves K = H^{-1} S unchanged
    rng = np.random.default_rng(31)
    sysm = random_hs_system(rng, 20, cond_h=100.0, lam=1.3)
    lam0 = dk.spectral_interval(sysm).lam
    for c in (1e-3, 7.0, 250.0):
        scaled = dk.HsSplitSystem.from_matrix(c * sysm.a)
        lam_c = dk.spectral_interval(scaled).lam
        assert abs(lam_c - lam0) <= 1e-12 * lam0


def test_spectral_interval_mechanical_linear_in_tau():
    model = dk.from_descriptor(
        {"name": "mechanical", "params": {"n": 8, "seed": 4, "damping": 0.0}}
    )
    lam1 = dk.spectral_interval(dk.midpoint_system(model, 1e-2).sys).lam
    lam2 = dk.spectral_interval(dk.midpoint_system(model, 1e-3).sys).lam
    assert abs(lam1 / lam2 - 10.0) <= 1e-10 * 10.0


def test_kappa_y_estimate():
    rng = np.random.default_rng(2)
    h = random_spd(rng, 15, cond=400.0)
    sysm = dk.HsSplitSystem.from_matrix(h)
    assert abs(dk.kappa_y_estimate(sysm) - np.sqrt(400.0)) <= 1e-6 * np.sqrt(400.0)


def test_convergence_bound_objects():
    cb_w = dk.ConvergenceBound(lam=0.5, method=dk.BoundMethod.WIDLUND)
    cb_r = dk.ConvergenceBound(lam=0.5, method=dk.BoundMethod.RAPOPORT)
    cb_l = dk.ConvergenceBound(lam=0.5, method=dk.BoundMethod.LGMRES, kappa_y=3.0)
    assert cb_w.evaluate(4) == dk.widlund_bound(0.5, 4)
    assert cb_r.evaluate(4) == dk.rapoport_bound(0.5, 4)
    assert cb_l.evaluate(4) == 3.0 * dk.rapoport_bound(0.5, 4)
    assert 0 < cb_r.evaluate(1) <= 2.0


def test_bendixson_degenerate_segment():
    h = np.diag([1.0, 4.0])
    rect = dk.bendixson_rectangle(dk.HsSplitSystem.from_matrix(h))
    assert rect.im_min == rect.im_max == 0.0
    assert rect.re_min == pytest.approx(1.0)
    assert rect.re_max == pytest.approx(4.0)
    assert rect.contained


def test_bendixson_positive_real_when_h_pd():
    rng = np.random.default_rng(7)
    for seed in range(5):
        sysm = random_hs_system(np.random.default_rng(seed), 25, cond_h=50.0, lam=4.0)
        rect = dk.bendixson_rectangle(sysm)
        assert rect.contained
        assert rect.re_min > 0
        assert np.all(rect.eigenvalues.real > 0)


def test_bendixson_containment_random():
    rng = np.random.default_rng(40)
    for _ in range(10):
        a = rng.standard_normal((40, 40))
        rect = dk.bendixson_rectangle(dk.HsSplitSystem.from_matrix(a))
        assert rect.contained, rect.max_violation
