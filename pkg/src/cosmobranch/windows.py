"""Gaussian-window localized modes.

A window W(k'|k0, x0) of width sigma in position space selects field
content near x0 with wavenumbers near -k0, defining a localized mode

    Phi_S = int d^3k'/(2pi)^3 W(k') Phi_{k'},

normalized so that int |W|^2 d^3k'/(2pi)^3 = 1.  For sigma |k0| >> 1 the
localized mode inherits the squeezed statistics of the Fourier mode k0 up
to O(1/(sigma k0)) corrections, while being supported (after re-entry) in
two wavepackets at x0 +- k0_hat eta.  All spectra are isotropic, so 3D
k-space integrals reduce to radial quadrature against an exact angular
weight.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .background import InflationEpoch, RadiationEpoch
from .gaussian import rotated_frame, two_point_from_A
from .cubic import _kernel_A

__all__ = [
    "WindowSpec",
    "LocalizedMode",
    "fourier_window",
    "real_space_window",
    "window_commutator",
    "window_overlap",
    "radial_window_weight",
    "localized_variances",
    "anomalous_pairing",
    "support_regions",
    "disjointness_hierarchy",
]


def _vec3(value, name):
    v = tuple(float(c) for c in value)
    if len(v) != 3:
        raise ValueError(f"{name} must be a 3-vector")
    return v


@dataclass(frozen=True)
class WindowSpec:
    """Gaussian window centered at x0 selecting wavenumbers near -k0.

    sigma is the position-space width; sigma*|k0| >> 1 is required for the
    window to contain many oscillations (warned below 10).
    """

    x0: tuple
    k0: tuple
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "x0", _vec3(self.x0, "x0"))
        object.__setattr__(self, "k0", _vec3(self.k0, "k0"))
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.sigma * self.k0_mag < 10.0:
            warnings.warn(
                f"sigma*|k0| = {self.sigma * self.k0_mag:.3g} < 10; the "
                "window does not cleanly separate scales",
                stacklevel=2,
            )

    @property
    def k0_mag(self):
        return math.sqrt(sum(c * c for c in self.k0))

    @property
    def k0_hat(self):
        m = self.k0_mag
        if m == 0.0:
            raise ValueError("k0 must be nonzero for a direction")
        return np.array(self.k0) / m


@dataclass(frozen=True)
class LocalizedMode:
    """One Hermitian component (real or imaginary part) of a localized mode.

    The two components have identical statistics: the pairing that could
    tell them apart involves W(k')W(-k'), suppressed by e^{-(sigma k0)^2}.
    """

    spec: WindowSpec
    component: str = "real"

    def __post_init__(self):
        if self.component not in ("real", "imaginary"):
            raise ValueError("component must be 'real' or 'imaginary'")

    def variances(self, epoch, time):
        phi2, pi2, cross = localized_variances(self.spec, epoch, time)
        a_phi, a_pi = anomalous_pairing(self.spec, epoch, time)
        sign = 1.0 if self.component == "real" else -1.0
        return (phi2 + sign * a_phi, pi2 + sign * a_pi, cross)


def fourier_window(spec, kprime):
    """W(k') = 2^{3/2} pi^{3/4} sigma^{3/2} e^{-sigma^2|k'+k0|^2/2 - i k'.x0}."""
    kp = np.asarray(kprime, dtype=float)
    s = spec.sigma
    shift = kp + np.array(spec.k0)
    norm = 2.0 ** 1.5 * math.pi ** 0.75 * s ** 1.5
    return norm * np.exp(
        -0.5 * s * s * np.dot(shift, shift) - 1j * np.dot(kp, spec.x0)
    )


def real_space_window(spec, y):
    """W~(y) = pi^{-3/4} sigma^{-3/2} e^{-|x0-y|^2/(2 sigma^2) + i k0.(x0-y)}."""
    d = np.array(spec.x0) - np.asarray(y, dtype=float)
    s = spec.sigma
    norm = math.pi ** -0.75 * s ** -1.5
    return norm * np.exp(-np.dot(d, d) / (2.0 * s * s) + 1j * np.dot(spec.k0, d))


def window_commutator(spec_a, spec_b):
    """[Phi_A, Pi_B] = i int W_A(k') W_B(-k') d^3k'/(2pi)^3, in closed form.

    i e^{-|x-y|^2/(4 s^2) - s^2|k+p|^2/4 + (i/2)(k-p).(x-y)}: the canonical
    i for the self-pair (y=x, p=-k), falling off with both separation and
    wavenumber mismatch.
    """
    if spec_a.sigma != spec_b.sigma:
        raise ValueError("commutator closed form assumes equal window widths")
    s = spec_a.sigma
    d = np.array(spec_a.x0) - np.array(spec_b.x0)
    ksum = np.array(spec_a.k0) + np.array(spec_b.k0)
    kdif = np.array(spec_a.k0) - np.array(spec_b.k0)
    return 1j * np.exp(
        -np.dot(d, d) / (4.0 * s * s)
        - s * s * np.dot(ksum, ksum) / 4.0
        + 0.5j * np.dot(kdif, d)
    )


def window_overlap(spec_a, spec_b):
    """int W_A(k') conj(W_B(k')) d^3k'/(2pi)^3: the change-of-basis overlap.

    e^{-|x-y|^2/(4 s^2) - s^2|k-p|^2/4 + (i/2)(k+p).(x-y)}; this is the
    window-geometry factor controlling how fast correlations between two
    localized modes die off with separation.
    """
    if spec_a.sigma != spec_b.sigma:
        raise ValueError("overlap closed form assumes equal window widths")
    s = spec_a.sigma
    d = np.array(spec_a.x0) - np.array(spec_b.x0)
    kdif = np.array(spec_a.k0) - np.array(spec_b.k0)
    ksum = np.array(spec_a.k0) + np.array(spec_b.k0)
    return np.exp(
        -np.dot(d, d) / (4.0 * s * s)
        - s * s * np.dot(kdif, kdif) / 4.0
        + 0.5j * np.dot(ksum, d)
    )


def radial_window_weight(spec, r):
    """Radial weight of |W|^2 for isotropic spectra (integrates to 1).

    (sigma/(sqrt(pi) k0)) r [e^{-sigma^2 (r-k0)^2} - e^{-sigma^2 (r+k0)^2}]:
    the exact result of the angular integral of |W(k')|^2/(2pi)^3 over the
    sphere |k'| = r.
    """
    s, k0 = spec.sigma, spec.k0_mag
    return (
        s / (math.sqrt(math.pi) * k0)
        * r
        * (np.exp(-(s * (r - k0)) ** 2) - np.exp(-(s * (r + k0)) ** 2))
    )


def _rotated_mode_variances(epoch, r, time):
    A = _kernel_A(epoch, r, time)
    frame = rotated_frame(two_point_from_A(A, k=r), k=r, epoch=epoch, time=time)
    return frame.phi2, frame.pi2


def localized_variances(spec, epoch, time):
    """Second moments (phi2_S, pi2_S, cross) of a localized mode.

    Radial quadrature of the rotated-frame mode variances against the
    |W|^2 weight.  cross vanishes by construction (it is killed mode by
    mode in the rotated frame).  Deviations from the central-mode values
    are the O(1/(sigma k0)) finite-width corrections; the leading behavior
    is (k tau)^2/(2k^3) and k^3/(2 (k tau)^2) during inflation and
    (k tau_f)^8/(2k^3), k^3/(2 (k tau_f)^8) after re-entry.
    """
    if isinstance(epoch, InflationEpoch) and abs(spec.k0_mag * time) > 0.3:
        warnings.warn(
            "central mode not superhorizon; leading-order interpretation "
            "of the localized variances does not apply",
            stacklevel=2,
        )
    s, k0 = spec.sigma, spec.k0_mag
    lo = max(k0 - 12.0 / s, 1e-3 * k0)
    hi = k0 + 12.0 / s

    def make_integrand(idx):
        def f(r):
            return radial_window_weight(spec, r) * _rotated_mode_variances(
                epoch, r, time
            )[idx]

        return f

    out = []
    for idx in (0, 1):
        val, err = quad(make_integrand(idx), lo, hi, epsabs=0.0, epsrel=1e-10,
                        limit=500)
        if not np.isfinite(val) or (val != 0 and err / abs(val) > 1e-6):
            raise RuntimeError("localized variance quadrature did not converge")
        out.append(val)
    return out[0], out[1], 0.0


def anomalous_pairing(spec, epoch, time):
    """The W(k')W(-k') pairing integrals distinguishing real/imaginary parts.

    (4/sqrt(pi)) sigma^3 int r^2 e^{-sigma^2 (r^2+k0^2)} (phi2, pi2)(r) dr:
    suppressed by e^{-(sigma k0)^2} relative to the direct pairing, which
    is why both Hermitian components carry the same statistics.
    """
    s, k0 = spec.sigma, spec.k0_mag
    damp = math.exp(-min((s * k0) ** 2, 700.0))
    if damp == 0.0:
        return 0.0, 0.0
    hi = math.sqrt(700.0) / s

    def make_integrand(idx):
        def f(r):
            w = (4.0 / math.sqrt(math.pi)) * s**3 * r * r * math.exp(
                -(s * r) ** 2
            )
            return w * _rotated_mode_variances(epoch, r, time)[idx]

        return f

    out = []
    with warnings.catch_warnings():
        # the damp factor makes the result negligible wherever it is used;
        # moderate quadrature accuracy is plenty
        warnings.simplefilter("ignore", IntegrationWarning)
        for idx in (0, 1):
            val, _ = quad(make_integrand(idx), 1e-3 * k0, hi, epsabs=0.0,
                          epsrel=1e-6, limit=800)
            out.append(val * damp)
    return out[0], out[1]


def support_regions(spec, eta):
    """Where the localized mode lives after re-entry.

    Two counter-propagating wavepackets at x0 +- k0_hat eta, each of size
    sigma; spread_flag marks eta > sigma^2 |k0|, beyond which transverse
    dispersal broadens the packets and the fixed-size description fails.
    """
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    x0 = np.array(spec.x0)
    shift = spec.k0_hat * eta
    spread = eta > spec.sigma**2 * spec.k0_mag
    return x0 + shift, x0 - shift, bool(spread)


def disjointness_hierarchy(k, delta_k, sigma, eta, slack=3.0):
    """Can neighboring k-windows record independently in disjoint regions?

    Requires |dk|/k >~ sigma/eta >~ 1/(sigma k): windows spaced by dk must
    be distinguishable at the achievable precision, which must itself beat
    the intrinsic window resolution, and the packets must have propagated
    clear of their origin (eta > sigma).  Each >~ is applied with the
    given slack factor.
    """
    if min(k, sigma, eta) <= 0 or delta_k < 0:
        raise ValueError("k, sigma, eta must be positive; delta_k nonnegative")
    r1 = delta_k / k
    r2 = sigma / eta
    r3 = 1.0 / (sigma * k)
    return bool(eta > sigma and r1 >= r2 / slack and r2 >= r3 / slack)
