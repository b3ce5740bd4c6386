"""Cubic phase kernel F(k, k', q, t) of the weakly non-Gaussian state.

A cubic interaction phi (grad phi)^2 / phi (phi')^2 dresses the Gaussian
wavefunction with a term F(k, k', q, t) phi_k phi_k' phi_q (plus
permutations).  F obeys the linear, first-order equation

    F' - i alpha F = -i S(t),
    alpha = -(A_k + A_k' + A_q)/s,     s = a^2 H^2,

with a source S from acting the interaction Hamiltonian on the Gaussian
state.  Since i alpha = -(d/dt) ln(u_k u_k' u_q) for the mode functions
u of the Gaussian kernel, the equation is solved either by direct ODE
integration of G = F u_k u_k' u_q (pole-free: G' = -i S u_k u_k' u_q) or
by adaptive quadrature of the explicit solution

    F(t1) = [F(t0) P(t0) + int_{t0}^{t1} -i S(t) P(t) dt] / P(t1),
    P = u_k u_k' u_q.

Im F is the physically interesting piece: a growing relative phase between
wavefunction components at different long-field values, i.e. the seed of
decoherence and records.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad, solve_ivp

from .background import (
    InflationEpoch,
    ModeTriplet,
    RadiationEpoch,
    kinetic_weight,
    kinetic_weight_log_deriv,
)
from .gaussian import closed_form_A_inflation, closed_form_A_radiation_exact

__all__ = [
    "CubicKernel",
    "SourceTerm",
    "AlphaFactor",
    "sine_integral",
    "alpha_factor",
    "source_term",
    "integrate_F",
    "imF_inflation_closed",
    "imF_radiation_closed",
    "free_F_propagation",
]

SIN_GUARD = 1e-6  # refuse approximate/closed forms this close to a sine zero


@dataclass(frozen=True)
class CubicKernel:
    triplet: ModeTriplet
    time: float
    F: complex


@dataclass(frozen=True)
class SourceTerm:
    triplet: ModeTriplet
    time: float
    value: complex


@dataclass(frozen=True)
class AlphaFactor:
    triplet: ModeTriplet
    time: float
    value: complex


# ------------------------------------------------------------- sine integral

# Si(x) = sum_n (-1)^n x^(2n+1) / ((2n+1) (2n+1)!)  for the small branch
_SI_COEFFS = np.array(
    [
        (-1.0) ** n / ((2 * n + 1) * math.factorial(2 * n + 1))
        for n in range(31)
    ][::-1]
)


def _e1_imag_axis(x, max_iter=600, tol=1e-16):
    """E1(i x) for real x >= 6 via the contracted continued fraction.

    E1(z) = e^{-z} / (z+1 - 1/(z+3 - 4/(z+5 - 9/(z+7 - ...)))),
    evaluated with the modified Lentz algorithm (vectorized).
    """
    z = 1j * np.asarray(x, dtype=float)
    tiny = 1e-300
    f = z + 1.0
    f = np.where(f == 0, tiny, f)
    C = f.copy()
    D = np.zeros_like(z)
    done = np.zeros(z.shape, dtype=bool)
    for n in range(1, max_iter + 1):
        a = -float(n * n)
        b = z + (2 * n + 1)
        D = b + a * D
        D = np.where(D == 0, tiny, D)
        D = 1.0 / D
        C = b + a / C
        C = np.where(C == 0, tiny, C)
        delta = C * D
        f = f * delta
        done |= np.abs(delta - 1.0) < tol
        if done.all():
            break
    return np.exp(-z) / f


def sine_integral(x):
    """Si(x) = int_0^x sin(y)/y dy, to better than 1e-10 absolute.

    Alternating Taylor series below |x| = 6; beyond that the asymptotic
    tail is resummed through Si(x) = pi/2 + Im E1(ix) with the continued
    fraction for E1 (the plain asymptotic series stalls at ~1e-3 near the
    crossover, far short of the accuracy target).  Odd in x; accepts
    scalars or arrays.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("sine_integral requires finite arguments")
    ax = np.abs(x)
    small = ax < 6.0
    out = np.empty_like(ax)
    if small.any():
        xs = ax[small]
        out[small] = xs * np.polyval(_SI_COEFFS, xs * xs)
    if (~small).any():
        xl = ax[~small]
        out[~small] = 0.5 * math.pi + _e1_imag_axis(xl).imag
    out = np.where(x < 0, -out, out)
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------- kernel machinery


def _kernel_A(epoch, k, time):
    """Gaussian kernel for one leg; the q -> 0 leg carries A = 0."""
    if k == 0.0:
        return 0.0j
    if isinstance(epoch, InflationEpoch):
        return closed_form_A_inflation(k, time)
    if isinstance(epoch, RadiationEpoch):
        return closed_form_A_radiation_exact(k, time, epoch.tau_f)
    raise TypeError(f"unknown epoch type {type(epoch)!r}")


def _epoch_orientation(epoch):
    # sign/weight fixed by the two closed-form anchors: +2 during inflation,
    # -1 during radiation domination
    if isinstance(epoch, InflationEpoch):
        return 2.0
    if isinstance(epoch, RadiationEpoch):
        return -1.0
    raise TypeError(f"unknown epoch type {type(epoch)!r}")


def _mode_u(epoch, k, t):
    """Unnormalized mode function of the Gaussian kernel, A = -i s u'/u.

    Inflation: u = (1 - i k tau) e^{i k tau}.  Radiation: u = v/(eta-tau_f)
    with v'' = -k^2 v carrying the end-of-inflation matching data.  Neither
    vanishes at real times, so products and ratios are safe everywhere.
    """
    if k == 0.0:
        return 1.0 + 0.0j
    if isinstance(epoch, InflationEpoch):
        return (1.0 - 1j * k * t) * np.exp(1j * k * t)
    if isinstance(epoch, RadiationEpoch):
        T = epoch.tau_f
        v0 = -T * (1.0 - 1j * k * T)
        v0p = 1.0 - 1j * k * T - k * k * T * T
        v = v0 * math.cos(k * t) + v0p * t * np.sinc(k * t / math.pi)
        return v / (t - T)
    raise TypeError(f"unknown epoch type {type(epoch)!r}")


def alpha_factor(triplet, time, epoch):
    """alpha = -(A(k) + A(k') + A(q)) / s for the triplet's three legs.

    Deep inside the horizon alpha -> -(k + k' + q) (Minkowski phases);
    in the radiation era Im alpha = sum_j [k_j cot(k_j eta) - 1/eta] up to
    relative O(k tau_f)^4 corrections.
    """
    s = kinetic_weight(epoch, time)
    total = (
        _kernel_A(epoch, triplet.k, time)
        + _kernel_A(epoch, triplet.k_prime, time)
        + _kernel_A(epoch, triplet.q, time)
    )
    return -total / s


def source_term(triplet, time, epoch, coupling):
    """Interaction source S(k, k', q, t) driving the cubic kernel.

    Acting the cubic Hamiltonian on the Gaussian state turns each phi'
    into a -2iA phi (one functional derivative), giving a gradient-vertex
    piece proportional to g s (k^2+k'^2+q^2) and a kinetic-vertex piece
    proportional to (g_tilde/s) (A_k A_k' + A_k A_q + A_k' A_q), with an
    epoch-dependent orientation fixed by the closed-form anchors.  Because
    the exact kernels A stay finite at sine zeros, so does the source (the
    familiar cot(k eta) poles belong to its small-|k tau_f| limit only).
    """
    s = kinetic_weight(epoch, time)
    A1 = _kernel_A(epoch, triplet.k, time)
    A2 = _kernel_A(epoch, triplet.k_prime, time)
    A3 = _kernel_A(epoch, triplet.q, time)
    mech = -coupling.g * s * triplet.k_squared_sum / 6.0 + (
        coupling.g_tilde / (3.0 * s)
    ) * (A1 * A2 + A1 * A3 + A2 * A3)
    return _epoch_orientation(epoch) * mech


def _source_times_modes(triplet, time, epoch, coupling):
    # S * u_k u_k' u_q written directly in mode functions, using
    # A_i A_j u_i u_j = -s^2 u_i' u_j' to avoid any division by u
    s = kinetic_weight(epoch, time)
    u = [_mode_u(epoch, kk, time) for kk in (triplet.k, triplet.k_prime, triplet.q)]
    return source_term(triplet, time, epoch, coupling) * u[0] * u[1] * u[2]


def integrate_F(triplet, t0, t1, F0, epoch, coupling, rel_tol=1e-8, method="ode"):
    """Evolve the cubic kernel from F(t0) = F0 to t1.

    method="ode" integrates G = F u_k u_k' u_q together with the three mode
    functions (14 real components); the source in G' = -i S u u u is
    polynomial in (u, u') so nothing blows up at mode zeros.  method=
    "quadrature" integrates the explicit solution with adaptive quadrature
    against the closed-form mode functions.  The two routes are independent
    and agree to rel_tol.
    """
    if t1 < t0:
        raise ValueError("t1 must be >= t0")
    for t in (t0, t1):
        if not epoch.contains(t):
            raise ValueError(f"time {t} outside the epoch domain")
    F0 = complex(F0)
    if t0 == t1:
        return F0
    ks = (triplet.k, triplet.k_prime, triplet.q)
    orient = _epoch_orientation(epoch)

    if method == "ode":
        u0 = []
        for kk in ks:
            A = _kernel_A(epoch, kk, t0)
            u0.extend([1.0, 0.0])
            up = 1j * A / kinetic_weight(epoch, t0)
            u0.extend([up.real, up.imag])
        # normalized at t0, so G(t0) = F0
        y0 = np.array(u0 + [F0.real, F0.imag])

        def rhs(t, y):
            s = kinetic_weight(epoch, t)
            sl = kinetic_weight_log_deriv(epoch, t)
            dy = np.empty_like(y)
            u = np.empty(3, dtype=complex)
            up = np.empty(3, dtype=complex)
            for j, kk in enumerate(ks):
                ur, ui, pr, pi = y[4 * j : 4 * j + 4]
                u[j] = complex(ur, ui)
                up[j] = complex(pr, pi)
                dy[4 * j] = pr
                dy[4 * j + 1] = pi
                app = -sl * up[j] - kk * kk * u[j]
                dy[4 * j + 2] = app.real
                dy[4 * j + 3] = app.imag
            src = orient * (
                -coupling.g * s * triplet.k_squared_sum / 6.0 * u[0] * u[1] * u[2]
                - (coupling.g_tilde * s / 3.0)
                * (up[0] * up[1] * u[2] + up[0] * u[1] * up[2] + u[0] * up[1] * up[2])
            )
            dG = -1j * src
            dy[12] = dG.real
            dy[13] = dG.imag
            return dy

        sol = solve_ivp(
            rhs,
            (t0, t1),
            y0,
            method="DOP853",
            rtol=max(rel_tol * 1e-2, 1e-13),
            atol=1e-12,
        )
        if not sol.success:
            raise RuntimeError(f"cubic kernel integration failed: {sol.message}")
        y = sol.y[:, -1]
        P = 1.0 + 0.0j
        for j in range(3):
            P *= complex(y[4 * j], y[4 * j + 1])
        return complex(y[12], y[13]) / P

    if method == "quadrature":
        P0 = np.prod([_mode_u(epoch, kk, t0) for kk in ks])
        P1 = np.prod([_mode_u(epoch, kk, t1) for kk in ks])
        if coupling.g == 0.0 and coupling.g_tilde == 0.0:
            return F0 * P0 / P1

        def integrand_re(t):
            return (-1j * _source_times_modes(triplet, t, epoch, coupling)).real

        def integrand_im(t):
            return (-1j * _source_times_modes(triplet, t, epoch, coupling)).imag

        eps = max(rel_tol * 0.1, 1e-12)
        with warnings.catch_warnings():
            # quad's roundoff heuristic trips on the oscillatory integrand;
            # accuracy is instead established by agreement with the ODE route
            warnings.simplefilter("ignore", IntegrationWarning)
            re, _ = quad(integrand_re, t0, t1, epsabs=0.0, epsrel=eps, limit=2000)
            im, _ = quad(integrand_im, t0, t1, epsabs=0.0, epsrel=eps, limit=2000)
        return (F0 * P0 + complex(re, im)) / P1

    raise ValueError(f"unknown method {method!r}")


# ------------------------------------------------------------- closed forms


def imF_inflation_closed(triplet, tau, g):
    """Superhorizon inflationary phase: Im F = -(g/(3 tau)) (k^2+k'^2+q^2).

    Grows like 1/|tau| -- the secular phase accumulated while the gradient
    vertex acts on frozen superhorizon modes.  Only g contributes; the
    kinetic vertex is inert here.
    """
    if tau >= 0:
        raise ValueError("tau must be negative during inflation")
    worst = max(triplet.k, triplet.k_prime, triplet.q) * abs(tau)
    if worst > 0.3:
        warnings.warn(
            f"mode with |k tau| = {worst:.3g} is near or inside the horizon; "
            "the superhorizon form does not apply",
            stacklevel=2,
        )
    return -(g / (3.0 * tau)) * triplet.k_squared_sum


def imF_radiation_closed(triplet, eta, coupling, tau_f):
    """Radiation-era phase for a long mode q << k, k' after re-entry.

    Im F = -((g + g_tilde)/12) k^3 (k eta)^3 / (k tau_f)^4
           * [Si((q+q_par) eta) + Si((q-q_par) eta)]
           / (sin(k eta) sin(k' eta) sin(q eta)).

    Vanishes identically for g + g_tilde = 0 (no phase, no records).  The
    sine zeros are genuine singularities of this asymptotic form; inside
    the guard band the exact kernels must be used instead, so we refuse.
    As q eta -> 0 the bracket-over-sin(q eta) ratio tends to 2 for any
    q_par/q.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    if tau_f >= 0:
        raise ValueError("tau_f must be negative")
    k, kp, q = triplet.k, triplet.k_prime, triplet.q
    if q > 0.2 * min(k, kp):
        warnings.warn(
            "closed form assumes q << k, k'; accuracy degrades",
            stacklevel=2,
        )
    if k * eta < 5.0:
        warnings.warn("closed form assumes k eta >> 1", stacklevel=2)
    if abs(k * tau_f) > 0.1:
        warnings.warn("closed form assumes |k tau_f| << 1", stacklevel=2)
    gp = coupling.g + coupling.g_tilde
    if gp == 0.0:
        return 0.0
    for x in (k * eta, kp * eta, q * eta):
        if x >= 0.5 and abs(math.sin(x)) < SIN_GUARD:
            raise ValueError(
                f"sin({x:.6g}) inside the guard band; the asymptotic form "
                "is singular at sine zeros"
            )
    qe = q * eta
    if qe == 0.0:
        ratio = 2.0
    else:
        bracket = sine_integral((q + triplet.q_parallel) * eta) + sine_integral(
            (q - triplet.q_parallel) * eta
        )
        ratio = bracket / math.sin(qe)
    ke = k * eta
    return (
        -(gp / 12.0)
        * k**3
        * ke**3
        / (k * tau_f) ** 4
        * ratio
        / (math.sin(ke) * math.sin(kp * eta))
    )


def free_F_propagation(F0, triplet, eta):
    """Source-free stretching of the cubic kernel after the transition.

    F(eta) = F0 * prod_j [k_j eta / sin(k_j eta)]; each factor -> 1 as
    k_j eta -> 0.  Refuses inside the guard band around nonzero sine zeros,
    where the leading form has a pole (the exact kernel stays finite).
    """
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    out = complex(F0)
    for kk in (triplet.k, triplet.k_prime, triplet.q):
        x = kk * eta
        if x == 0.0:
            continue
        if x >= 0.5 and abs(math.sin(x)) < SIN_GUARD:
            raise ValueError(
                f"sin({x:.6g}) inside the guard band; free propagation "
                "factor is singular there"
            )
        out *= x / math.sin(x)
    return out
