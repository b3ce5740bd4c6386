import math

import numpy as np
import pytest

from cosmobranch import (
    Coupling,
    InflationEpoch,
    ModeTriplet,
    RadiationEpoch,
    gauge_coupling_map,
    horizon_crossing_time,
    kinetic_weight,
    kinetic_weight_log_deriv,
    scale_factor,
)


def test_scale_factor_matches_at_transition():
    for tau_f in (-1e-2, -0.37):
        for H in (1.0, 2.5):
            inf = InflationEpoch(tau_f=tau_f, hubble_rate=H)
            rad = RadiationEpoch(tau_f=tau_f, hubble_rate=H)
            a_end = scale_factor(inf, tau_f)
            a_start = scale_factor(rad, 0.0)
            assert a_end == pytest.approx(a_start, rel=1e-14)
            # C^1: one-sided finite-difference slopes agree
            h = 1e-7 * abs(tau_f)
            slope_inf = (a_end - scale_factor(inf, tau_f - h)) / h
            slope_rad = (scale_factor(rad, h) - a_start) / h
            assert slope_inf == pytest.approx(slope_rad, rel=1e-5)


def test_kinetic_weight_is_a2H2_and_H_independent():
    for H in (1.0, 3.0):
        inf = InflationEpoch(tau_f=-1e-3, hubble_rate=H)
        rad = RadiationEpoch(tau_f=-1e-3, hubble_rate=H)
        for t in (-2.0, -0.01):
            a = scale_factor(inf, t)
            assert kinetic_weight(inf, t) == pytest.approx(a * a * H * H, rel=1e-13)
        for t in (0.0, 0.4, 7.0):
            a = scale_factor(rad, t)
            assert kinetic_weight(rad, t) == pytest.approx(a * a * H * H, rel=1e-13)
    # with H scaled out, s depends only on conformal time
    assert kinetic_weight(InflationEpoch(hubble_rate=1.0), -0.3) == pytest.approx(
        kinetic_weight(InflationEpoch(hubble_rate=9.0), -0.3), rel=1e-14
    )


def test_kinetic_weight_log_deriv_matches_finite_difference():
    inf = InflationEpoch(tau_f=-1e-3)
    rad = RadiationEpoch(tau_f=-1e-3)
    for epoch, t in ((inf, -0.8), (inf, -0.02), (rad, 0.3), (rad, 5.0)):
        h = 1e-6 * max(abs(t), 1e-3)
        fd = (
            math.log(kinetic_weight(epoch, t + h))
            - math.log(kinetic_weight(epoch, t - h))
        ) / (2 * h)
        assert kinetic_weight_log_deriv(epoch, t) == pytest.approx(fd, rel=1e-7)


def test_epoch_domains_enforced():
    inf = InflationEpoch(tau_f=-1e-3)
    rad = RadiationEpoch(tau_f=-1e-3)
    with pytest.raises(ValueError):
        scale_factor(inf, 0.1)
    with pytest.raises(ValueError):
        scale_factor(rad, -0.1)
    with pytest.raises(ValueError):
        kinetic_weight(inf, 0.0)
    with pytest.raises(ValueError):
        InflationEpoch(tau_f=0.0)
    with pytest.raises(ValueError):
        RadiationEpoch(tau_f=1e-3)


def test_horizon_crossing():
    assert horizon_crossing_time(4.0) == -0.25
    tc = horizon_crossing_time(0.37)
    assert abs(0.37 * tc) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        horizon_crossing_time(0.0)


def test_coupling_validation():
    c = Coupling(g=0.01, g_tilde=-0.02)
    assert c.g_plus == pytest.approx(-0.01)
    with pytest.raises(ValueError):
        Coupling(g=1.0, g_tilde=0.0)
    with pytest.warns(UserWarning):
        Coupling(g=0.3, g_tilde=0.0)
    # exact gauge-map coefficients may exceed 1 (zeta has g_tilde = 3/2)
    # but never 2
    Coupling(g=-0.5, g_tilde=1.5, normalization="zeta_L")
    with pytest.raises(ValueError):
        Coupling(g=2.5, g_tilde=0.0, normalization="zeta_L")


def test_mode_triplet_validation():
    ModeTriplet(k=1.0, k_prime=1.0, q=0.5, q_parallel=-0.3)
    with pytest.raises(ValueError):
        ModeTriplet(k=1.0, k_prime=1.0, q=3.0)
    with pytest.raises(ValueError):
        ModeTriplet(k=5.0, k_prime=1.0, q=0.5)
    with pytest.raises(ValueError):
        ModeTriplet(k=1.0, k_prime=1.0, q=0.5, q_parallel=0.6)
    with pytest.raises(ValueError):
        ModeTriplet(k=-1.0, k_prime=1.0, q=0.5)


def test_mode_triplet_closure_against_vector_arithmetic():
    rng = np.random.default_rng(7)
    for _ in range(200):
        k = rng.uniform(0.1, 5.0)
        q = rng.uniform(0.0, 2.0)
        mu = rng.uniform(-1.0, 1.0)
        trip = ModeTriplet.from_k_and_q(k, q, q_parallel=mu * q)
        # build explicit vectors: k along z, q at polar angle arccos(mu)
        kv = np.array([0.0, 0.0, k])
        qv = np.array([q * math.sqrt(max(1 - mu * mu, 0.0)), 0.0, q * mu])
        assert trip.k_prime == pytest.approx(np.linalg.norm(kv + qv), rel=1e-12)
        assert trip.k_squared_sum == pytest.approx(k * k + trip.k_prime**2 + q * q)


def test_gauge_coupling_maps():
    zeta = gauge_coupling_map("zeta")
    assert (zeta.g, zeta.g_tilde) == (-0.5, 1.5)
    assert zeta.g_plus == pytest.approx(1.0)

    gen = gauge_coupling_map("generic", c_kin=3.0, c_grad=1.0)
    assert (gen.g, gen.g_tilde) == (zeta.g, zeta.g_tilde)

    eps = 0.02
    infl = gauge_coupling_map("inflaton", epsilon=eps)
    amp = 0.5 * math.sqrt(eps / 2)
    assert infl.g == pytest.approx(-amp)
    assert infl.g_tilde == pytest.approx(-amp)
    # consistent with the generic map for the slow-roll coefficient shifts
    gen2 = gauge_coupling_map(
        "generic", c_kin=-math.sqrt(eps / 2), c_grad=math.sqrt(eps / 2)
    )
    assert gen2.g == pytest.approx(infl.g)
    assert gen2.g_tilde == pytest.approx(infl.g_tilde)

    with pytest.raises(ValueError):
        gauge_coupling_map("inflaton", epsilon=1.5)
    with pytest.raises(ValueError):
        gauge_coupling_map("generic", c_kin=1.0)
    with pytest.raises(ValueError):
        gauge_coupling_map("mystery")
