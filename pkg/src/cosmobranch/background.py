"""Background cosmology: epochs, scale factors, couplings, and mode triplets.

Conventions used throughout the package: hbar = 1, unit comoving volume, and
the inflationary Hubble rate H = 1 unless set otherwise.  Inflation is
parametrized by conformal time tau < 0 with a(tau) = -1/(H tau).  The
radiation era is parametrized by its own conformal time eta >= 0 with

    a(eta) = (eta - tau_f) / (H tau_f**2),

which matches a and a' of the inflationary scale factor at the transition
(eta = 0  <->  tau = tau_f).  All wavenumbers, times and field amplitudes
are dimensionless in these units.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

__all__ = [
    "InflationEpoch",
    "RadiationEpoch",
    "Coupling",
    "ModeTriplet",
    "scale_factor",
    "kinetic_weight",
    "kinetic_weight_log_deriv",
    "horizon_crossing_time",
    "gauge_coupling_map",
]


@dataclass(frozen=True)
class InflationEpoch:
    """De Sitter inflation, conformal time tau < 0, a = -1/(H tau).

    ``tau_f`` is the conformal time at which inflation ends; it only matters
    when matching onto a subsequent RadiationEpoch.
    """

    tau_f: float = -1e-3
    hubble_rate: float = 1.0

    def __post_init__(self):
        if not self.tau_f < 0:
            raise ValueError("tau_f must be negative")
        if not self.hubble_rate > 0:
            raise ValueError("hubble_rate must be positive")

    def contains(self, time) -> bool:
        return time < 0


@dataclass(frozen=True)
class RadiationEpoch:
    """Radiation domination, conformal time eta >= 0.

    a(eta) = (eta - tau_f)/(H tau_f^2) continues the inflationary scale
    factor with continuous a and a' at eta = 0.
    """

    tau_f: float
    hubble_rate: float = 1.0

    def __post_init__(self):
        if not self.tau_f < 0:
            raise ValueError("tau_f must be negative")
        if not self.hubble_rate > 0:
            raise ValueError("hubble_rate must be positive")

    def contains(self, time) -> bool:
        return time >= 0


@dataclass(frozen=True)
class Coupling:
    """Cubic interaction amplitudes (g, g_tilde).

    g multiplies the gradient-type vertex phi (grad phi)^2 and g_tilde the
    kinetic-type vertex phi (phi')^2, both per unit long-wavelength field
    amplitude.  ``normalization`` records what "per unit field" means when a
    gauge map rescales the long field.
    """

    g: float
    g_tilde: float
    normalization: str = "phi_L"

    def __post_init__(self):
        big = max(abs(self.g), abs(self.g_tilde))
        if self.normalization == "phi_L":
            # couplings quoted per unit field amplitude
            if big >= 1.0:
                raise ValueError("couplings must satisfy |g|, |g_tilde| < 1")
            if big > 0.1:
                warnings.warn(
                    "coupling amplitude above 0.1; perturbative results are "
                    "marginal",
                    stacklevel=2,
                )
        elif big >= 2.0:
            # gauge maps carry exact rational coefficients (the zeta gauge
            # has g_tilde = 3/2); beyond 2 the linearized dressing
            # (1 + 2 g_tilde phi_L) is meaningless even for small phi_L
            raise ValueError("mapped couplings must stay below 2")

    @property
    def g_plus(self) -> float:
        return self.g + self.g_tilde


@dataclass(frozen=True)
class ModeTriplet:
    """Magnitudes (k, k', q) of three wavevectors summing to zero.

    q_parallel is the component of the q vector along the direction of k.
    """

    k: float
    k_prime: float
    q: float
    q_parallel: float = 0.0

    def __post_init__(self):
        if self.k <= 0 or self.k_prime <= 0:
            raise ValueError("k and k_prime must be positive")
        if self.q < 0:
            raise ValueError("q must be nonnegative")
        slack = 1e-9 * (self.k + self.k_prime + self.q)
        if abs(self.q_parallel) > self.q + slack:
            raise ValueError("|q_parallel| cannot exceed q")
        # Three vectors can close into a triangle iff each magnitude is
        # bounded by the sum of the other two.
        if (
            self.k > self.k_prime + self.q + slack
            or self.k_prime > self.k + self.q + slack
            or self.q > self.k + self.k_prime + slack
        ):
            raise ValueError("(k, k_prime, q) violate the triangle inequality")

    @classmethod
    def from_k_and_q(cls, k: float, q: float, q_parallel: float) -> "ModeTriplet":
        """Build the closed triplet with k' = |-(k vec + q vec)|."""
        k_prime = math.sqrt(k * k + q * q + 2.0 * k * q_parallel)
        return cls(k=k, k_prime=k_prime, q=q, q_parallel=q_parallel)

    @property
    def k_squared_sum(self) -> float:
        return self.k**2 + self.k_prime**2 + self.q**2


def scale_factor(epoch, time):
    """a(time) for either epoch; positive, C^1 across the transition."""
    if isinstance(epoch, InflationEpoch):
        if time >= 0:
            raise ValueError("inflationary conformal time must be negative")
        return -1.0 / (epoch.hubble_rate * time)
    if isinstance(epoch, RadiationEpoch):
        if time < 0:
            raise ValueError("radiation conformal time must be nonnegative")
        return (time - epoch.tau_f) / (epoch.hubble_rate * epoch.tau_f**2)
    raise TypeError(f"unknown epoch type {type(epoch)!r}")


def kinetic_weight(epoch, time):
    """s(t) = a(t)^2 H^2, the weight of the kinetic term (pi = s dphi/dt).

    Independent of hubble_rate in conformal time: 1/tau^2 during inflation
    and (eta - tau_f)^2/tau_f^4 during radiation domination.
    """
    if isinstance(epoch, InflationEpoch):
        if time >= 0:
            raise ValueError("inflationary conformal time must be negative")
        return 1.0 / time**2
    if isinstance(epoch, RadiationEpoch):
        if time < 0:
            raise ValueError("radiation conformal time must be nonnegative")
        return (time - epoch.tau_f) ** 2 / epoch.tau_f**4
    raise TypeError(f"unknown epoch type {type(epoch)!r}")


def kinetic_weight_log_deriv(epoch, time):
    """d ln s / dt for the same weight s(t) = a^2 H^2."""
    if isinstance(epoch, InflationEpoch):
        if time >= 0:
            raise ValueError("inflationary conformal time must be negative")
        return -2.0 / time
    if isinstance(epoch, RadiationEpoch):
        if time < 0:
            raise ValueError("radiation conformal time must be nonnegative")
        return 2.0 / (time - epoch.tau_f)
    raise TypeError(f"unknown epoch type {type(epoch)!r}")


def horizon_crossing_time(k):
    """Conformal time of horizon exit during inflation: |k tau| = 1."""
    if k <= 0:
        raise ValueError("k must be positive")
    return -1.0 / k


def gauge_coupling_map(gauge, *, epsilon=None, m_planck=1.0, c_kin=None, c_grad=None):
    """Map a gauge choice to the cubic couplings (g, g_tilde).

    A long-wavelength background phi_L shifts the quadratic Lagrangian of the
    short modes to

        (1 + 2 g_tilde phi_L) * kinetic term  -  (1 + ... ) gradient term
        with gradient coefficient (1 - 2 g phi_L),

    so g_tilde is read off the kinetic coefficient and -g off the gradient
    coefficient (both per unit phi_L).

    gauge = "zeta":    kinetic (1 + 3 zeta_L), gradient (1 + zeta_L)
                       -> (g, g_tilde) = (-1/2, 3/2), g + g_tilde = 1.
    gauge = "inflaton": slow-roll scalar; per unit delta_phi_L / M_p the
                       kinetic and gradient coefficients shift by
                       -/+ sqrt(epsilon/2), so g = g_tilde = -sqrt(eps/2)/2.
    gauge = "generic": kinetic (1 + c_kin phi_L), gradient (1 + c_grad phi_L)
                       -> (g, g_tilde) = (-c_grad/2, c_kin/2).
    """
    if gauge == "zeta":
        return Coupling(g=-0.5, g_tilde=1.5, normalization="zeta_L")
    if gauge == "inflaton":
        if epsilon is None or not 0 < epsilon < 1:
            raise ValueError("inflaton gauge requires 0 < epsilon < 1")
        amp = 0.5 * math.sqrt(epsilon / 2.0)
        return Coupling(
            g=-amp,
            g_tilde=-amp,
            normalization=f"delta_phi_L/M_p (M_p={m_planck:g})",
        )
    if gauge == "generic":
        if c_kin is None or c_grad is None:
            raise ValueError("generic gauge requires c_kin and c_grad")
        return Coupling(
            g=-0.5 * c_grad, g_tilde=0.5 * c_kin, normalization="phi_L (matched)"
        )
    raise ValueError(f"unknown gauge {gauge!r}")
