"""Gaussian wavefunction kernel for a massless mode pair (phi_k, phi_-k).

The Schroedinger-picture state is psi ~ exp(-A(t) |phi_k|^2) with a complex
kernel A obeying the Riccati equation

    i dA/dt = A^2 / s(t) - s(t) k^2,          s = a^2 H^2.

Everything observable follows from A: equal-time two-point functions,
squeezing angles, Wigner functions and Gaussian overlaps.  The Riccati
equation linearizes through A = -i s u'/u where the mode function u solves

    u'' + (s'/s) u' + k^2 u = 0,

which is what the numerical integrator actually evolves (no poles when the
state passes through a phase-space rotation where Re A would blow up).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .background import (
    InflationEpoch,
    RadiationEpoch,
    kinetic_weight,
    kinetic_weight_log_deriv,
)

__all__ = [
    "closed_form_A_inflation",
    "closed_form_A_radiation_exact",
    "closed_form_A_radiation_approx",
    "integrate_A",
    "TwoPointSet",
    "two_point_from_A",
    "heisenberg_mode",
    "RotatedFrame",
    "rotated_frame",
    "wigner_gaussian",
    "gaussian_overlap",
    "shifted_phase_A",
]


def closed_form_A_inflation(k, tau):
    """Bunch-Davies kernel during inflation.

    A(k, tau) = k^3 (1 - i/(k tau)) / (1 + k^2 tau^2).

    Deep inside the horizon (|k tau| >> 1) this tends to s k = k/tau^2 * ...
    i.e. the adiabatic vacuum; far outside it freezes to k^3 (1 - i/(k tau)).
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if tau >= 0:
        raise ValueError("tau must be negative during inflation")
    x = k * tau
    return k**3 * (1.0 - 1j / x) / (1.0 + x * x)


def _radiation_v_constants(k, tau_f):
    # u(eta) = v(eta)/(eta - tau_f) with v'' = -k^2 v; the constants carry the
    # Bunch-Davies initial data across the transition at eta = 0.
    v0 = -tau_f * (1.0 - 1j * k * tau_f)
    v0p = 1.0 - 1j * k * tau_f - k * k * tau_f * tau_f
    return v0, v0p


def _cos_minus_sinc(x):
    # cos(x) - sin(x)/x = -x^2/3 + x^4/30 - ...; series below 0.1 avoids the
    # cancellation of the direct difference
    x = np.asarray(x, dtype=float)
    x2 = x * x
    series = x2 * (-1.0 / 3.0 + x2 * (1.0 / 30.0 + x2 * (-1.0 / 840.0 + x2 / 45360.0)))
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = np.where(x == 0.0, 0.0, np.cos(x) - np.sinc(x / np.pi))
    return np.where(np.abs(x) < 0.1, series, direct)


def closed_form_A_radiation_exact(k, eta, tau_f):
    """Exact radiation-era kernel continuing the Bunch-Davies state.

    Writes the mode function as u = v/(eta - tau_f) with v'' = -k^2 v and
    initial data fixed by matching A (and hence u'/u) at the end of
    inflation.  Then A = -i s u'/u with u' = N/(eta - tau_f)^2, where the
    numerator N = v' (eta - tau_f) - v is grouped so the near-transition
    cancellation is done analytically:

        N = (1 - i k tau_f) [k tau_f (eta - tau_f) sin(k eta)
            + eta (cos(k eta) - sinc(k eta))]
            + k tau_f^2 sin(k eta) - k^2 tau_f^2 (eta - tau_f) cos(k eta),

    which reduces to k^2 tau_f^3 at eta = 0 (reproducing the end-of-
    inflation kernel to machine precision).  v never vanishes at real eta
    (|v| ~ |tau_f| at the zeros of the sine), so this form is finite
    everywhere, including the times where the small-|k tau_f| approximation
    blows up.  k may be zero (v is then linear in eta).  Accepts array eta.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if tau_f >= 0:
        raise ValueError("tau_f must be negative")
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < 0):
        raise ValueError("eta must be nonnegative in the radiation era")
    v0, v0p = _radiation_v_constants(k, tau_f)
    T = tau_f
    E = eta - T
    ke = k * eta
    s_, c_ = np.sin(ke), np.cos(ke)
    v = v0 * c_ + v0p * eta * np.sinc(ke / np.pi)
    N = (
        (1.0 - 1j * k * T) * (k * T * E * s_ + eta * _cos_minus_sinc(ke))
        + k * T * T * s_
        - k * k * T * T * E * c_
    )
    A = -1j * E * N / (T**4 * v)
    if A.ndim == 0:
        return complex(A)
    return A


def closed_form_A_radiation_approx(k, eta, tau_f, guard=1e-6):
    """Leading small-|k tau_f| radiation kernel.

    A = k^3 (k eta)^2 / sin^2(k eta) * [ 1 - i (k tau_f)^-4
        * ( sin(k eta) cos(k eta) - sin^2(k eta)/(k eta) ) ]

    Valid for modes far outside the horizon at the transition
    (|k tau_f| << 1) and away from the zeros of sin(k eta), where the
    neglected corrections take over.  Raises if |sin(k eta)| < guard.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if tau_f >= 0:
        raise ValueError("tau_f must be negative")
    if eta <= 0:
        raise ValueError("eta must be positive")
    x = k * tau_f
    if abs(x) > 0.3:
        warnings.warn(
            f"|k tau_f| = {abs(x):.3g} is not small; the approximate kernel "
            "degrades",
            stacklevel=2,
        )
    ke = k * eta
    s = math.sin(ke)
    if abs(s) < guard:
        raise ValueError(
            f"sin(k eta) = {s:.2e} too close to zero for the approximate "
            "kernel; use closed_form_A_radiation_exact"
        )
    c = math.cos(ke)
    re = k**3 * ke * ke / (s * s)
    im_factor = (s * c - s * s / ke) / x**4
    return re * (1.0 - 1j * im_factor)


def _mode_rhs(epoch):
    def rhs(t, y):
        sl = kinetic_weight_log_deriv(epoch, t)
        ur, ui, vr, vi = y
        k2 = rhs.k2
        return [vr, vi, -sl * vr - k2 * ur, -sl * vi - k2 * ui]

    return rhs


def integrate_A(epoch, k, t0, t1, A0, rel_tol=1e-8, method="mode_function"):
    """Evolve the Gaussian kernel from A(t0) = A0 to t1.

    method = "mode_function" (default) integrates the linear mode-function
    equation and reconstructs A = -i s u'/u; this is pole-free.  method =
    "riccati" integrates the nonlinear Riccati equation directly and is kept
    as an independent cross-check (it can step near a pole if the state
    rotates through Re A -> large).

    A0 must have positive real part (normalizable state).
    """
    if k <= 0:
        raise ValueError("k must be positive")
    A0 = complex(A0)
    if A0.real <= 0:
        raise ValueError("A0 must have positive real part")
    for t in (t0, t1):
        if not epoch.contains(t):
            raise ValueError(f"time {t} outside the epoch domain")
    if t0 == t1:
        return A0
    rtol = max(rel_tol * 1e-2, 1e-13)
    atol = max(rel_tol * 1e-4, 1e-14)

    if method == "mode_function":
        s0 = kinetic_weight(epoch, t0)
        up0 = 1j * A0 / s0  # u(t0) = 1
        rhs = _mode_rhs(epoch)
        rhs.k2 = k * k
        sol = solve_ivp(
            rhs,
            (t0, t1),
            [1.0, 0.0, up0.real, up0.imag],
            method="DOP853",
            rtol=rtol,
            atol=atol,
        )
        if not sol.success:
            raise RuntimeError(f"mode-function integration failed: {sol.message}")
        ur, ui, vr, vi = sol.y[:, -1]
        u = complex(ur, ui)
        up = complex(vr, vi)
        if u == 0:
            raise RuntimeError("mode function vanished at the endpoint")
        return -1j * kinetic_weight(epoch, t1) * up / u

    if method == "riccati":

        def rhs(t, y):
            A = complex(y[0], y[1])
            s = kinetic_weight(epoch, t)
            dA = -1j * (A * A / s - s * k * k)
            return [dA.real, dA.imag]

        sol = solve_ivp(
            rhs,
            (t0, t1),
            [A0.real, A0.imag],
            method="DOP853",
            rtol=rtol,
            atol=atol,
        )
        if not sol.success:
            raise RuntimeError(f"Riccati integration failed: {sol.message}")
        return complex(sol.y[0, -1], sol.y[1, -1])

    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class TwoPointSet:
    """Equal-time second moments of (phi_k, pi_k) for one wavenumber.

    phi_phi = <|phi_k|^2>', pi_pi = <|pi_k|^2>', phi_pi = Re<phi_k pi_k*>'
    (primes: the momentum-conserving delta function is stripped).  ``k`` is
    optional metadata used by frame rotations.
    """

    phi_phi: float
    pi_pi: float
    phi_pi: float
    k: Optional[float] = None

    @property
    def determinant(self) -> float:
        return self.phi_phi * self.pi_pi - self.phi_pi**2


def two_point_from_A(A, k=None):
    """Moments of the Gaussian state psi ~ exp(-A |phi_k|^2).

    phi_phi = 1/(2 Re A), pi_pi = |A|^2/(2 Re A), phi_pi = -Im A/(2 Re A);
    the determinant is exactly 1/4 (pure state) for any valid A.
    """
    A = complex(A)
    if A.real <= 0:
        raise ValueError("kernel must have positive real part")
    r = 2.0 * A.real
    return TwoPointSet(
        phi_phi=1.0 / r,
        pi_pi=abs(A) ** 2 / r,
        phi_pi=-A.imag / r,
        k=k,
    )


def heisenberg_mode(k, tau):
    """Heisenberg-picture coefficients (f, g) with phi_k = f a + f* a^dag.

    f = (1 + i k tau) e^{-i k tau} / sqrt(2 k^3)  and the conjugate-momentum
    coefficient g = s df/dtau = (k^2/tau) e^{-i k tau} / sqrt(2 k^3).
    The Wronskian Im(f g*) = 1/2 encodes [phi, pi] = i.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if tau >= 0:
        raise ValueError("tau must be negative during inflation")
    x = k * tau
    norm = 1.0 / math.sqrt(2.0 * k**3)
    phase = np.exp(-1j * x)
    f = (1.0 + 1j * x) * phase * norm
    g = (k * k / tau) * phase * norm
    return f, g


@dataclass(frozen=True)
class RotatedFrame:
    """Principal-axis decomposition of the one-mode covariance.

    theta is the rotation angle in the scaled (phi k^{3/2}, pi k^{-3/2})
    plane (additionally squeeze-conjugated by k eta/(k tau_f)^2 in the
    radiation era), chosen so the rotated cross moment vanishes and Phi is
    the squeezed (small-variance) direction.  phi2 and pi2 are the rotated
    variances mapped back to physical normalization; ``cross`` is the
    residual correlation coefficient of the rotated pair (zero up to
    roundoff); squeeze_ratio is (pi2/phi2)^{1/4} / k^{3/2}, which grows
    like 1/|k tau| outside the horizon during inflation and like
    (k tau_f)^{-4} after re-entry.
    """

    theta: float
    phi2: float
    pi2: float
    cross: float
    squeeze_ratio: float


def rotated_frame(two_point, k=None, epoch=None, time=None):
    """Rotate (phi_k, pi_k) to the decoupled squeezed/antisqueezed pair.

    Works in the dimensionless frame u = phi k^{3/2}, v = pi k^{-3/2}.  For
    a radiation epoch (pass ``epoch`` and ``time``) the pair is first
    squeeze-conjugated by k eta/(k tau_f)^2 -- the stretch accumulated
    between horizon exit and re-entry -- so that the residual rotation
    angle is O(1); the rotated variances are then reported in the
    symmetric normalization Phi = (k tau_f)^2 Phi_frame / k^{3/2},
    Pi = k^{3/2} Pi_frame / (k tau_f)^2 (a canonical pair).  The exact
    angle always satisfies

        tan 2 theta = 2 C_uv / (C_vv - C_uu),

    with the branch chosen so Phi carries the smaller variance.

    The large variance is always well conditioned; the small one is
    recovered from the (frame-invariant) determinant and degrades once the
    squeeze ratio approaches 1/sqrt(machine eps) ~ 1e8, where no
    double-precision moment set can resolve it.
    """
    if k is None:
        k = two_point.k
    if k is None:
        raise ValueError("wavenumber required: pass k or set it on the TwoPointSet")
    if k <= 0:
        raise ValueError("k must be positive")

    scale = 1.0
    back = 1.0
    if isinstance(epoch, RadiationEpoch):
        if time is None:
            raise ValueError("radiation-era rotation needs the evaluation time")
        if time <= 0:
            raise ValueError("radiation-era rotation needs eta > 0")
        # exact comoving stretch a H / k = k(eta - tau_f)/(k tau_f)^2;
        # regular at eta = 0 and reduces to k eta/(k tau_f)^2 for eta >> |tau_f|
        scale = k * (time - epoch.tau_f) / (k * epoch.tau_f) ** 2
        back = (k * epoch.tau_f) ** 2

    k3 = k**3
    c_uu = two_point.phi_phi * k3 * scale * scale
    c_vv = two_point.pi_pi / k3 / (scale * scale)
    c_uv = two_point.phi_pi

    if c_uv == 0.0 and c_vv == c_uu:
        theta = 0.0
    else:
        theta = 0.5 * math.atan2(2.0 * c_uv, c_vv - c_uu)
    c, s = math.cos(theta), math.sin(theta)
    p_large = s * s * c_uu + c * c * c_vv + 2.0 * c * s * c_uv
    det = c_uu * c_vv - c_uv * c_uv
    if det > 0:
        p_small = det / p_large
    else:
        p_small = max(c * c * c_uu + s * s * c_vv - 2.0 * c * s * c_uv, 0.0)
    cross = (c * s * (c_uu - c_vv) + (c * c - s * s) * c_uv) / math.sqrt(c_uu * c_vv)

    phi2 = p_small * back * back / k3
    pi2 = p_large * k3 / (back * back)
    squeeze = (pi2 / phi2) ** 0.25 / k**1.5 if phi2 > 0 else math.inf
    return RotatedFrame(
        theta=theta, phi2=phi2, pi2=pi2, cross=cross, squeeze_ratio=squeeze
    )


def wigner_gaussian(two_point, phi_grid, pi_grid):
    """Wigner function of the (zero-mean) Gaussian state on a grid.

    Returns W with shape (len(phi_grid), len(pi_grid)).  The grid must have
    at least 32 points per axis and cover +-5 standard deviations in both
    directions, so that moments computed from the returned array are
    trustworthy.
    """
    phi_grid = np.asarray(phi_grid, dtype=float)
    pi_grid = np.asarray(pi_grid, dtype=float)
    if phi_grid.size < 32 or pi_grid.size < 32:
        raise ValueError("need at least 32 grid points per axis")
    det = two_point.determinant
    if det <= 0 or two_point.phi_phi <= 0 or two_point.pi_pi <= 0:
        raise ValueError("two-point set is not a valid covariance")
    s_phi = math.sqrt(two_point.phi_phi)
    s_pi = math.sqrt(two_point.pi_pi)
    tol = 1e-9
    if phi_grid.min() > -5 * s_phi + tol or phi_grid.max() < 5 * s_phi - tol:
        raise ValueError("phi grid must span at least +-5 sigma")
    if pi_grid.min() > -5 * s_pi + tol or pi_grid.max() < 5 * s_pi - tol:
        raise ValueError("pi grid must span at least +-5 sigma")
    # inverse covariance
    a = two_point.pi_pi / det
    b = two_point.phi_phi / det
    c = -two_point.phi_pi / det
    P, Q = np.meshgrid(phi_grid, pi_grid, indexing="ij")
    quad = a * P * P + b * Q * Q + 2.0 * c * P * Q
    return np.exp(-0.5 * quad) / (2.0 * math.pi * math.sqrt(det))


def _covariance(two_point):
    cov = np.array(
        [
            [two_point.phi_phi, two_point.phi_pi],
            [two_point.phi_pi, two_point.pi_pi],
        ]
    )
    if cov[0, 0] <= 0 or cov[1, 1] <= 0 or np.linalg.det(cov) <= 0:
        raise ValueError("moments do not form a positive-definite covariance")
    return cov


def gaussian_overlap(moments_a, moments_b, dof="pair", normalized=False):
    """Overlap Tr[rho_A rho_B] of two zero-mean Gaussian states.

    For a single real degree of freedom Tr[rho_A rho_B] =
    1/(2 sqrt(det Sigma_bar)) with Sigma_bar = (Sigma_A + Sigma_B)/2.  A
    field mode phi_k is a *pair* of real degrees of freedom (real and
    imaginary part share the same covariance), so dof="pair" (default)
    squares the single-dof result.  normalized=True divides by the geometric
    mean of the purities, giving 1 for identical states even when mixed;
    for pure states the two conventions coincide.
    """
    cov_a = _covariance(moments_a)
    cov_b = _covariance(moments_b)
    det_bar = np.linalg.det(0.5 * (cov_a + cov_b))
    single = 1.0 / (2.0 * math.sqrt(det_bar))
    if normalized:
        single = single * (np.linalg.det(cov_a) * np.linalg.det(cov_b)) ** 0.25 * 2.0
        # purity of one dof is 1/(2 sqrt(det)); the ratio above equals
        # sqrt(det_a det_b)^(1/2) / sqrt(det_bar)
    if dof == "single":
        return float(single)
    if dof == "pair":
        return float(single * single)
    raise ValueError(f"unknown dof convention {dof!r}")


def shifted_phase_A(A, g, phi_L):
    """Kernel of the short mode conditioned on a long-field amplitude.

    To first order the long background only re-dresses the phase of the
    wavefunction: Im A -> (1 - 2 g phi_L) Im A, with Re A untouched.  Raises
    if |g phi_L| >= 0.5 (the linearized dressing is meaningless there) and
    warns above 0.1.
    """
    A = complex(A)
    if A.real <= 0:
        raise ValueError("kernel must have positive real part")
    x = abs(g * phi_L)
    if x >= 0.5:
        raise ValueError(f"|g phi_L| = {x:.3g} too large for the linearized shift")
    if x >= 0.1:
        warnings.warn(
            f"|g phi_L| = {x:.3g}; linearized phase shift is getting marginal",
            stacklevel=2,
        )
    return complex(A.real, (1.0 - 2.0 * g * phi_L) * A.imag)
