"""Conditional statistics of localized short modes over sampled
long-wavelength backgrounds: coarse-grained fields, conditional second
moments in both epochs, record precision and redundancy counting.

The long background is a Monte Carlo realization of scale-invariant
Gaussian amplitudes on a deterministic quadrature grid (half-sphere
directions x log-spaced radii); every field-space sum below is the
discretized version of int d^3q/(2pi)^3.

All smoothing operations share one normalized Gaussian measure
G_sigma(y) = (pi sigma^2)^{-3/2} e^{-|y|^2/sigma^2}, whose Fourier side is
the e^{-sigma^2 q^2/4} envelope.  That shared measure is what makes the
conditional determinant identities exact: the smoothed square minus the
squared smoothing is a variance under G_sigma, hence nonnegative for
every realization ("squaring and smoothing do not commute").
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .background import Coupling
from .gaussian import gaussian_overlap
from .cubic import sine_integral

__all__ = [
    "LongWavelengthField",
    "ConditionalMoments",
    "RecordAssessment",
    "sample_long_field",
    "smoothed_field",
    "smoothed_squared_field",
    "directional_smoothed_field",
    "directional_pair",
    "conditional_moments_inflation",
    "conditional_moments_radiation",
    "mixedness_ratio",
    "record_precision",
    "perturbativity_flag",
]


@dataclass
class LongWavelengthField:
    """Sampled long-wavelength Gaussian background.

    q_vectors are half-sphere representatives (q_z > 0); the implicit
    partner at -q carries the conjugate amplitude, which keeps every
    reconstructed field value real.  amplitudes have per-mode variance
    1/(2 q^3); weights are the quadrature cell volumes over (2pi)^3, so
    sums of weights approximate int d^3q/(2pi)^3 over the band.
    """

    q_vectors: np.ndarray
    amplitudes: np.ndarray
    weights: np.ndarray
    q_min: float
    q_star: float
    seed: int

    @property
    def q_mags(self):
        return np.linalg.norm(self.q_vectors, axis=1)

    @property
    def n_modes(self):
        return len(self.amplitudes)


@dataclass(frozen=True)
class ConditionalMoments:
    """Second moments of a localized short mode given a long background."""

    phi2: float
    pi2: float
    cross: float
    context: tuple = None

    @property
    def determinant(self):
        return self.phi2 * self.pi2 - self.cross * self.cross


@dataclass(frozen=True)
class RecordAssessment:
    precision: float
    redundancy_estimate: float
    forms_record: bool
    perturbative: bool
    global_condition: bool


def _grid_shape(n_modes):
    n_r = max(2, int(round(n_modes ** (1.0 / 3.0))))
    rest = max(4, n_modes // n_r)
    n_mu = max(2, int(math.sqrt(rest)))
    n_phi = max(2, rest // n_mu)
    return n_r, n_mu, n_phi


def sample_long_field(q_min, q_star, n_modes, seed):
    """Draw one realization of the scale-invariant long-mode band.

    Deterministic per seed.  The actual mode count is the product of the
    radial/angular grid factors nearest the request (at least 8).
    """
    if not 0 < q_min < q_star:
        raise ValueError("need 0 < q_min < q_star")
    if n_modes < 8:
        raise ValueError("n_modes must be at least 8")
    n_r, n_mu, n_phi = _grid_shape(n_modes)
    dln = math.log(q_star / q_min) / n_r
    radii = q_min * np.exp(dln * (np.arange(n_r) + 0.5))
    nodes, glw = np.polynomial.legendre.leggauss(n_mu)
    mu = 0.5 * (nodes + 1.0)          # half sphere: mu in (0, 1)
    w_mu = 0.5 * glw
    phi = 2.0 * math.pi * (np.arange(n_phi) + 0.5) / n_phi
    w_phi = 2.0 * math.pi / n_phi

    qs, ws = [], []
    sin_t = np.sqrt(1.0 - mu * mu)
    for r, in np.nditer([radii]):
        for m, wm in zip(mu, w_mu):
            st = math.sqrt(1.0 - m * m)
            for p in phi:
                qs.append((r * st * math.cos(p), r * st * math.sin(p), r * m))
                ws.append(r**3 * dln * wm * w_phi / (8.0 * math.pi**3))
    q_vectors = np.array(qs)
    weights = np.array(ws)
    q = np.linalg.norm(q_vectors, axis=1)
    rng = np.random.default_rng(seed)
    scale = np.sqrt(1.0 / (4.0 * q**3))   # <|a|^2> = 1/(2 q^3)
    amps = scale * (rng.standard_normal(len(q)) + 1j * rng.standard_normal(len(q)))
    return LongWavelengthField(q_vectors, amps, weights, float(q_min),
                               float(q_star), int(seed))


def _weighted_phases(field, x):
    # sqrt(w) a e^{i q.x} for the half-sphere representatives
    phase = np.exp(1j * field.q_vectors @ np.asarray(x, dtype=float))
    return np.sqrt(field.weights) * field.amplitudes * phase


def smoothed_field(field, x, sigma):
    """phi_sigma(x): the background smoothed with G_sigma."""
    c = _weighted_phases(field, x)
    env = np.exp(-0.25 * (sigma * field.q_mags) ** 2)
    return float(2.0 * np.real(np.sum(c * env)))


def smoothed_squared_field(field, x, sigma, q_star=None):
    """(phi^2)_sigma(x): smooth the *squared* background with G_sigma.

    The double mode sum carries the envelope on |q + q'|, so pairs of
    short modes with nearly opposite momenta contribute at full strength:
    this is why it depends on modes at all scales up to q_star and stays
    large even when phi_sigma itself is small.
    """
    keep = np.ones(field.n_modes, dtype=bool)
    if q_star is not None:
        keep = field.q_mags <= q_star
    c = _weighted_phases(field, x)[keep]
    qv = field.q_vectors[keep]
    Q = np.vstack([qv, -qv])
    C = np.concatenate([c, np.conj(c)])
    q2 = np.sum(Q * Q, axis=1)
    gram = Q @ Q.T
    E = np.exp(-0.25 * sigma * sigma * (q2[:, None] + q2[None, :] + 2.0 * gram))
    return float(np.real(C @ (E @ C)))


def _directional_kernel(q, q_par, eta):
    # [Si((q+q_par) eta) + Si((q-q_par) eta)]/(q eta): -> 2 as q eta -> 0,
    # -> pi/(q eta) once the mode is well inside the horizon
    if eta == 0.0:
        return np.full_like(q, 2.0)
    return (
        sine_integral((q + q_par) * eta) + sine_integral((q - q_par) * eta)
    ) / (q * eta)


def directional_smoothed_field(field, x, k_hat, eta):
    """phi_khat(x, eta): the background as seen by a short mode along k_hat.

    Each long mode enters with the sine-integral kernel accumulated over
    the short mode's propagation history, which smooths on the horizon
    scale eta (with mild direction dependence through q_par = q.k_hat).
    """
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    k_hat = np.asarray(k_hat, dtype=float)
    norm = np.linalg.norm(k_hat)
    if not math.isclose(norm, 1.0, rel_tol=1e-8):
        raise ValueError("k_hat must be a unit vector")
    c = _weighted_phases(field, x)
    q = field.q_mags
    q_par = field.q_vectors @ k_hat
    return float(2.0 * np.real(np.sum(c * _directional_kernel(q, q_par, eta))))


def directional_pair(spec, field, eta):
    """(Phi1, Phi2): the smoothed directional background and its smoothed
    square, sharing the window's Gaussian measure.

    Phi1 = int G_sigma(y) h(x0+y) d^3y with h the directional-kernel field;
    Phi2 = int G_sigma(y) h(x0+y)^2 d^3y, evaluated exactly as a quadratic
    form with the e^{-sigma^2 |q+q'|^2/4} envelope.  Phi2 - Phi1^2 is the
    variance of h under G_sigma: nonnegative for every realization, of
    order (sigma/eta)^2 relative since h varies on the scale eta.
    """
    x = spec.x0
    sigma = spec.sigma
    c = _weighted_phases(field, x)
    q = field.q_mags
    q_par = field.q_vectors @ spec.k0_hat
    kern = _directional_kernel(q, q_par, eta)
    ck = c * kern
    phi1 = float(2.0 * np.real(np.sum(ck * np.exp(-0.25 * (sigma * q) ** 2))))

    qv = field.q_vectors
    Q = np.vstack([qv, -qv])
    C = np.concatenate([ck, np.conj(ck)])
    q2 = np.sum(Q * Q, axis=1)
    gram = Q @ Q.T
    E = np.exp(-0.25 * sigma * sigma * (q2[:, None] + q2[None, :] + 2.0 * gram))
    phi2 = float(np.real(C @ (E @ C)))
    return phi1, phi2


def conditional_moments_inflation(spec, field, tau, coupling):
    """Inflationary conditional moments of the localized mode.

    cross tracks the smoothed field while the conditioned phi2 tracks the
    smoothed *squared* field; for scale-invariant backgrounds the latter
    is dominated by short-mode pairs the window cannot resolve, so the
    determinant stays far above 1/4 and no precise record of the
    background forms.
    """
    k = spec.k0_mag
    if abs(k * tau) > 0.3:
        warnings.warn(
            "central mode not superhorizon; inflationary conditional "
            "moments assume |k tau| << 1",
            stacklevel=2,
        )
    g = coupling.g
    phi_s = smoothed_field(field, spec.x0, spec.sigma)
    phi2_s = smoothed_squared_field(field, spec.x0, spec.sigma)
    # entanglement with the unconditioned band above q_star keeps the
    # baseline variance well above the free-theory value
    q_uv = 0.5 * k
    base_entangle = math.log(q_uv / field.q_star) / (4.0 * math.pi**2) \
        if q_uv > field.q_star else 0.0
    baseline = (k * tau) ** 2 / (2.0 * k**3) + (2.0 * g * g / k**3) * base_entangle
    phi2 = baseline + (2.0 * g * g / k**3) * phi2_s
    pi2 = k**3 / (2.0 * (k * tau) ** 2)
    cross = (g / (k * tau)) * phi_s
    return ConditionalMoments(phi2, pi2, cross, context=(spec, tau, coupling))


def _radiation_moments_from_pair(spec, eta, coupling, tau_f, phi1, phi2_form):
    k = spec.k0_mag
    gp = coupling.g_plus
    ktf4 = (k * tau_f) ** 4
    phi2 = ktf4**2 / (2.0 * k**3) + (gp * gp * (k * eta) ** 2 / (8.0 * k**3)) * phi2_form
    pi2 = k**3 / (2.0 * ktf4**2)
    cross = (gp / 4.0) * (k * eta / ktf4) * phi1
    return ConditionalMoments(phi2, pi2, cross,
                              context=(spec, eta, coupling))


def conditional_moments_radiation(spec, field, eta, coupling, tau_f):
    """Radiation-era conditional moments of the localized mode.

    cross = ((g+g~)/4) (k eta/(k tau_f)^4) Phi1 rotates the squeezed state
    by an angle linear in the background, while phi2 grows with Phi2.  The
    Phi1^2-proportional parts of phi2*pi2 and cross^2 cancel exactly, so
    the determinant excess over 1/4 is set by Phi2 - Phi1^2 = O(sigma^2/
    eta^2): slight mixing, orientation still sharp -- that is a record.
    """
    k = spec.k0_mag
    if k * eta < 5.0:
        warnings.warn("conditional moments assume k eta >> 1", stacklevel=2)
    if spec.sigma > 0.3 * eta:
        warnings.warn("conditional moments assume sigma << eta", stacklevel=2)
    if abs(k * tau_f) > 0.3:
        warnings.warn("conditional moments assume |k tau_f| << 1", stacklevel=2)
    phi1, phi2_form = directional_pair(spec, field, eta)
    return _radiation_moments_from_pair(spec, eta, coupling, tau_f, phi1,
                                        phi2_form)


def mixedness_ratio(moments):
    """(phi2 pi2 - cross^2)/(phi2 pi2): 1 for an unentangled mode oriented
    by nothing, O(sigma^2/eta^2) deep in the record regime."""
    prod = moments.phi2 * moments.pi2
    return moments.determinant / prod


def perturbativity_flag(k, eta, coupling, safety=1.0):
    """True while the three-point phase stays small: O(g, g~) k eta < 1."""
    amp = max(abs(coupling.g), abs(coupling.g_tilde))
    return bool(amp * k * eta * safety < 1.0)


def _overlap_at_shift(spec, eta, coupling, tau_f, phi1, phi2_form, delta):
    # uniform background shift h -> h + delta: Phi1 -> Phi1 + delta,
    # Phi2 -> Phi2 + 2 delta Phi1 + delta^2 (exact under the shared measure)
    m0 = _radiation_moments_from_pair(spec, eta, coupling, tau_f, phi1,
                                      phi2_form)
    m1 = _radiation_moments_from_pair(
        spec, eta, coupling, tau_f, phi1 + delta,
        phi2_form + 2.0 * delta * phi1 + delta * delta)
    return gaussian_overlap(m0, m1, dof="single", normalized=True)


def _precision_for_field(spec, eta, coupling, tau_f, field, threshold):
    phi1, phi2_form = directional_pair(spec, field, eta)

    def overlap(delta):
        return _overlap_at_shift(spec, eta, coupling, tau_f, phi1, phi2_form,
                                 delta)

    hi = spec.sigma / eta
    for _ in range(200):
        if overlap(hi) < threshold:
            break
        hi *= 2.0
    else:
        return math.inf
    lo = 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if overlap(mid) < threshold:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def record_precision(spec, eta, coupling, tau_f, field_ensemble,
                     overlap_threshold=0.01, global_threshold=10.0,
                     slack=3.0):
    """Assess record formation for a window over a background ensemble.

    precision is the median background shift at which the conditional
    states become distinguishable (normalized overlap below the
    threshold); it comes out proportional to sigma/eta.  forms_record is
    the per-mode condition (g+g~) k eta >= (k tau_f)^4; global_condition
    asks whether even the longest modes get recorded by the time they
    re-enter, (g+g~)^{1/4}/|q_min tau_f| above threshold.  redundancy
    counts disjoint solid-angle cells of size (slack*sigma/eta)^2, and
    perturbativity is assessed at the record formation time (records form
    on re-entry, long before the secular phase leaves the perturbative
    regime).
    """
    fields = list(field_ensemble)
    if not fields:
        raise ValueError("field_ensemble must be nonempty")
    k = spec.k0_mag
    gp = abs(coupling.g_plus)
    forms = bool(gp * k * eta >= (k * tau_f) ** 4)
    if forms:
        precisions = [
            _precision_for_field(spec, eta, coupling, tau_f, f,
                                 overlap_threshold)
            for f in fields
        ]
        precision = float(np.median(precisions))
    else:
        precision = math.inf
    q_min = fields[0].q_min
    global_cond = bool(
        gp > 0 and gp**0.25 / abs(q_min * tau_f) >= global_threshold
    )
    sigma = spec.sigma
    if eta > sigma and sigma / eta >= 1.0 / (sigma * k) / slack:
        redundancy = 4.0 * math.pi * (eta / sigma) ** 2 / slack**2
    else:
        redundancy = 0.0
    if gp > 0:
        eta_form = max(1.0 / k, (k * tau_f) ** 4 / (gp * k))
    else:
        eta_form = eta
    perturbative = perturbativity_flag(k, min(eta, eta_form), coupling)
    return RecordAssessment(
        precision=precision,
        redundancy_estimate=redundancy,
        forms_record=forms,
        perturbative=perturbative,
        global_condition=global_cond,
    )
