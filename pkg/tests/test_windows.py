"""Tests for Gaussian-window localized modes: closed forms are checked
against direct k-space quadrature oracles, variances against the
central-mode limits."""

import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from cosmobranch.background import InflationEpoch, RadiationEpoch
from cosmobranch.gaussian import rotated_frame, two_point_from_A
from cosmobranch.cubic import _kernel_A
from cosmobranch.windows import (
    LocalizedMode,
    WindowSpec,
    anomalous_pairing,
    disjointness_hierarchy,
    fourier_window,
    localized_variances,
    radial_window_weight,
    real_space_window,
    support_regions,
    window_commutator,
    window_overlap,
)

INF = InflationEpoch()


def make_spec(x0=(0.0, 0.0, 0.0), k0=(0.0, 0.0, 10.0), sigma=2.0):
    return WindowSpec(x0=x0, k0=k0, sigma=sigma)


# ----------------------------------------------------------------- spec


def test_spec_validation():
    with pytest.raises(ValueError):
        WindowSpec(x0=(0, 0), k0=(0, 0, 10), sigma=1.0)
    with pytest.raises(ValueError):
        WindowSpec(x0=(0, 0, 0), k0=(0, 0, 10), sigma=-1.0)
    with pytest.warns(UserWarning):
        WindowSpec(x0=(0, 0, 0), k0=(0, 0, 1.0), sigma=1.0)  # sigma*k0 = 1


def test_window_normalization_radial():
    spec = make_spec()
    val, _ = quad(lambda r: radial_window_weight(spec, r), 0.0,
                  spec.k0_mag + 14.0 / spec.sigma, epsabs=1e-13, epsrel=1e-12)
    assert abs(val - 1.0) <= 1e-8


def test_radial_weight_matches_angular_quadrature():
    # oracle: integrate |W(k')|^2/(2pi)^3 over the sphere |k'| = r directly
    spec = make_spec(x0=(0.3, -0.2, 1.0))
    k0 = np.array(spec.k0)
    for r in (8.5, 10.0, 11.7):
        def integrand(mu):
            kp = r * np.array([math.sqrt(1 - mu * mu), 0.0, mu])
            # spectrum isotropic; azimuthal integral contributes 2 pi after
            # aligning k0 with the z-axis
            w = fourier_window(WindowSpec(x0=spec.x0, k0=(0, 0, spec.k0_mag),
                                          sigma=spec.sigma), kp)
            return abs(w) ** 2
        ang, _ = quad(integrand, -1.0, 1.0, epsabs=1e-14, epsrel=1e-12)
        oracle = r * r * 2.0 * math.pi * ang / (2.0 * math.pi) ** 3
        assert abs(oracle / radial_window_weight(spec, r) - 1.0) <= 1e-8


def test_real_space_window_value_and_norm():
    spec = make_spec(x0=(1.0, 2.0, 3.0))
    peak = real_space_window(spec, (1.0, 2.0, 3.0))
    assert abs(peak - math.pi ** -0.75 * spec.sigma ** -1.5) <= 1e-14
    s = spec.sigma
    val, _ = quad(
        lambda d: 4.0 * math.pi * d * d * math.pi ** -1.5 * s ** -3
        * math.exp(-d * d / (s * s)),
        0.0, 12.0 * s, epsabs=1e-13, epsrel=1e-12)
    assert abs(val - 1.0) <= 1e-8


def test_real_space_window_is_transform_of_fourier_window():
    # oracle: radial reduction of (2pi)^-3 int W(k') e^{i k'.y} d^3k'
    spec = make_spec(x0=(0.5, 0.0, -0.25), k0=(0.0, 0.0, 12.0), sigma=1.5)
    C = 2.0 ** 1.5 * math.pi ** 0.75 * spec.sigma ** 1.5
    ys = [(0.5, 0.0, -0.25), (0.9, 0.1, 0.0), (0.0, 0.0, 1.0),
          (1.5, -0.5, 0.5), (0.5, 0.0, 0.75)]
    for y in ys:
        d = np.asarray(y) - np.array(spec.x0)
        dmag = float(np.linalg.norm(d))

        def radial(u):
            damp = math.exp(-0.5 * (spec.sigma * u) ** 2)
            if dmag == 0.0:
                sinc = 1.0
            else:
                sinc = math.sin(u * dmag) / (u * dmag)
            return u * u * damp * sinc

        val, _ = quad(radial, 0.0, 14.0 / spec.sigma, epsabs=1e-14,
                      epsrel=1e-12)
        phase = np.exp(-1j * np.dot(spec.k0, d))
        oracle = C * phase * val / (2.0 * math.pi ** 2)
        assert abs(oracle - real_space_window(spec, y)) <= 1e-6 * abs(oracle)


# ----------------------------------------------------------- commutator


def test_commutator_canonical_pair():
    a = make_spec(k0=(0, 0, 10.0))
    b = make_spec(k0=(0, 0, -10.0))
    assert abs(window_commutator(a, b) - 1j) <= 1e-14


def test_commutator_separated_magnitude():
    s = 2.0
    a = WindowSpec(x0=(0, 0, 0), k0=(0, 0, 10.0), sigma=s)
    b = WindowSpec(x0=(0, 0, 10.0 * s), k0=(0, 0, -10.0), sigma=s)
    mag = abs(window_commutator(a, b))
    assert abs(mag / math.exp(-25.0) - 1.0) <= 1e-10


def test_commutator_against_quadrature():
    s = 1.2
    a = WindowSpec(x0=(0.0, 0.0, 0.0), k0=(0.0, 3.0, 9.0), sigma=s)
    b = WindowSpec(x0=(0.7, -0.3, 1.1), k0=(0.5, -2.5, -8.5), sigma=s)
    ka, kb = np.array(a.k0), np.array(b.k0)
    dvec = np.array(a.x0) - np.array(b.x0)
    center = (kb - ka) / 2.0
    C = 2.0 ** 1.5 * math.pi ** 0.75 * s ** 1.5
    pref = C * C * math.exp(-s * s * float(np.dot(ka + kb, ka + kb)) / 4.0)
    dmag = float(np.linalg.norm(dvec))

    def radial(u):
        return u * u * math.exp(-(s * u) ** 2) * math.sin(u * dmag) / (u * dmag)

    val, _ = quad(radial, 0.0, 10.0 / s, epsabs=1e-14, epsrel=1e-12)
    oracle = 1j * pref * np.exp(-1j * np.dot(center, dvec)) * val / (
        2.0 * math.pi ** 2
    )
    closed = window_commutator(a, b)
    assert abs(oracle - closed) <= 1e-8 * abs(closed)


def test_commutator_closure_symmetry():
    # exchanging the windows while negating both wavevectors conjugates and
    # flips the commutator
    a = WindowSpec(x0=(0.0, 0.0, 0.0), k0=(0.0, 3.0, 9.0), sigma=1.2)
    b = WindowSpec(x0=(0.7, -0.3, 1.1), k0=(0.5, -2.5, -8.5), sigma=1.2)
    c1 = window_commutator(a, b)
    a2 = WindowSpec(x0=b.x0, k0=tuple(-c for c in b.k0), sigma=1.2)
    b2 = WindowSpec(x0=a.x0, k0=tuple(-c for c in a.k0), sigma=1.2)
    c2 = window_commutator(a2, b2)
    assert abs(c2 - (-np.conj(c1))) <= 1e-14


def test_commutator_requires_equal_sigma():
    a = make_spec(sigma=1.0)
    b = make_spec(sigma=2.0)
    with pytest.raises(ValueError):
        window_commutator(a, b)


# -------------------------------------------------------------- overlap


def test_overlap_self_is_one():
    spec = make_spec(x0=(1.0, 0.0, 0.0))
    assert abs(window_overlap(spec, spec) - 1.0) <= 1e-14


def test_overlap_against_quadrature():
    s = 1.2
    a = WindowSpec(x0=(0.0, 0.0, 0.0), k0=(0.0, 3.0, 9.0), sigma=s)
    b = WindowSpec(x0=(0.7, -0.3, 1.1), k0=(0.5, 2.5, 8.5), sigma=s)
    ka, kb = np.array(a.k0), np.array(b.k0)
    dvec = np.array(a.x0) - np.array(b.x0)
    C = 2.0 ** 1.5 * math.pi ** 0.75 * s ** 1.5
    pref = C * C * math.exp(-s * s * float(np.dot(ka - kb, ka - kb)) / 4.0)
    dmag = float(np.linalg.norm(dvec))

    def radial(u):
        return u * u * math.exp(-(s * u) ** 2) * math.sin(u * dmag) / (u * dmag)

    val, _ = quad(radial, 0.0, 10.0 / s, epsabs=1e-14, epsrel=1e-12)
    oracle = pref * np.exp(1j * np.dot((ka + kb) / 2.0, dvec)) * val / (
        2.0 * math.pi ** 2
    )
    closed = window_overlap(a, b)
    assert abs(oracle - closed) <= 1e-8 * abs(closed)


def test_locality_tail_gaussian_in_separation():
    s = 2.0
    base = WindowSpec(x0=(0, 0, 0), k0=(0, 0, 10.0), sigma=s)
    for d in (1.0, 4.0, 10.0, 20.0):
        other = WindowSpec(x0=(d, 0, 0), k0=(0, 0, 10.0), sigma=s)
        assert abs(window_overlap(base, other)) <= math.exp(
            -d * d / (4.0 * s * s)
        ) * (1.0 + 1e-12)


# ---------------------------------------------------- localized variances


def test_variances_approach_pure_mode_limit():
    # sigma*k -> infinity reproduces the rotated central-mode variances
    k0 = 1.0
    spec = WindowSpec(x0=(0, 0, 0), k0=(0, 0, k0), sigma=1e3)
    tau = -1e-3
    phi2, pi2, cross = localized_variances(spec, INF, tau)
    frame = rotated_frame(two_point_from_A(_kernel_A(INF, k0, tau), k=k0),
                          k=k0, epoch=INF, time=tau)
    assert cross == 0.0
    assert abs(phi2 / frame.phi2 - 1.0) <= 1e-3
    assert abs(pi2 / frame.pi2 - 1.0) <= 1e-3

    rad = RadiationEpoch(tau_f=-1e-2)
    k0 = 10.0
    spec = WindowSpec(x0=(0, 0, 0), k0=(0, 0, k0), sigma=100.0)
    eta = 7.0
    phi2, pi2, _ = localized_variances(spec, rad, eta)
    frame = rotated_frame(two_point_from_A(_kernel_A(rad, k0, eta), k=k0),
                          k=k0, epoch=rad, time=eta)
    assert abs(phi2 / frame.phi2 - 1.0) <= 1e-3
    assert abs(pi2 / frame.pi2 - 1.0) <= 1e-3


def test_variances_inflation_leading_value():
    # k=100, tau=-1e-3, sigma k = 50: phi2_S ~ (k tau)^2/(2 k^3) = 5e-9
    k0 = 100.0
    spec = WindowSpec(x0=(0, 0, 0), k0=(0, 0, k0), sigma=0.5)
    tau = -1e-3
    phi2, pi2, _ = localized_variances(spec, INF, tau)
    lead_phi = (k0 * tau) ** 2 / (2.0 * k0 ** 3)
    lead_pi = k0 ** 3 / (2.0 * (k0 * tau) ** 2)
    band = 3.0 / (spec.sigma * k0)
    assert abs(phi2 / lead_phi - 1.0) <= band
    assert abs(pi2 / lead_pi - 1.0) <= band
    assert phi2 == pytest.approx(5e-9, rel=band)


def test_variance_product_exceeds_pure_bound():
    rad = RadiationEpoch(tau_f=-1e-2)
    k0, sigma, eta = 10.0, 5.0, 3.0
    phi2, pi2, _ = localized_variances(
        WindowSpec(x0=(0, 0, 0), k0=(0, 0, k0), sigma=sigma), rad, eta)
    prod = phi2 * pi2
    assert prod >= 0.25 * (1.0 - 1e-10)
    assert prod <= 0.25 * (1.0 + 3.0 / (sigma * k0))


def test_variances_warn_inside_horizon():
    spec = WindowSpec(x0=(0, 0, 0), k0=(0, 0, 10.0), sigma=2.0)
    with pytest.warns(UserWarning):
        localized_variances(spec, INF, -1.0)


def test_component_statistics_identical():
    rad = RadiationEpoch(tau_f=-1e-2)
    spec = WindowSpec(x0=(0, 0, 0), k0=(0, 0, 10.0), sigma=1.0)
    eta = 3.0
    re = LocalizedMode(spec, "real").variances(rad, eta)
    im = LocalizedMode(spec, "imaginary").variances(rad, eta)
    for a, b in zip(re, im):
        scale = max(abs(a), abs(b), 1e-300)
        assert abs(a - b) / scale <= 1e-10
    a_phi, a_pi = anomalous_pairing(spec, rad, eta)
    assert abs(a_phi) <= 1e-10 * re[0]
    assert abs(a_pi) <= 1e-10 * re[1]
    with pytest.raises(ValueError):
        LocalizedMode(spec, "complex")


# -------------------------------------------------------------- geometry


def test_support_regions():
    spec = WindowSpec(x0=(1.0, 0.0, 0.0), k0=(10.0, 0.0, 0.0), sigma=1.0)
    cp, cm, flag = support_regions(spec, 0.0)
    assert np.allclose(cp, (1, 0, 0)) and np.allclose(cm, (1, 0, 0))
    assert not flag
    cp, cm, flag = support_regions(spec, 7.0)
    assert np.allclose(cp, (8, 0, 0))
    assert np.allclose(cm, (-6, 0, 0))
    assert not flag  # sigma^2 k0 = 10 > 7
    _, _, flag = support_regions(spec, 10.5)
    assert flag
    with pytest.raises(ValueError):
        support_regions(spec, -1.0)


def test_disjointness_hierarchy():
    assert disjointness_hierarchy(k=1e3, delta_k=10.0, sigma=10.0, eta=1e4)
    assert not disjointness_hierarchy(k=1e3, delta_k=0.0, sigma=10.0, eta=1e4)
    assert not disjointness_hierarchy(k=1e3, delta_k=10.0, sigma=10.0, eta=5.0)
    # slack rescues a marginal spacing
    marginal = disjointness_hierarchy(k=1e3, delta_k=0.5, sigma=10.0, eta=1e4,
                                      slack=3.0)
    strict = disjointness_hierarchy(k=1e3, delta_k=0.5, sigma=10.0, eta=1e4,
                                    slack=1.0)
    assert marginal and not strict
    with pytest.raises(ValueError):
        disjointness_hierarchy(k=-1.0, delta_k=1.0, sigma=1.0, eta=1.0)
