"""Closed-form constants and extremal profiles for the cylinder inequalities.

Everything here is exact up to floating point: Gamma-function integrals of
cosh powers, the sech-type extremal profile and its moments, the sharp
one-bound-state spectral constant, the radial best constants in both the
plain and the interpolation (theta < 1) families, and the gap factor that
bounds how far the full constant can sit above the radial one.

Two normalizations of the radial constant circulate; the canonical one here
carries sphere_area(N)**(-(p-2)/p) and is the one validated by direct
quadrature of the extremal profile.  The other convention is exposed as
:func:`radial_constant_alt` and flagged in all outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NumericsError
from .params import ParamPoint

__all__ = [
    "log_gamma",
    "sphere_area",
    "f_cosh_integral",
    "Moments",
    "moments",
    "ProfileConstants",
    "profile_constants",
    "extremal_profile",
    "extremal_potential",
    "lt_ground_state",
    "lt_constant",
    "radial_constant",
    "radial_constant_alt",
    "radial_interp_coefficient",
    "radial_interp_constant",
    "gap_factor",
    "lt_identity_defect",
    "euclidean_radial_extremal",
]


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0 (wraps the C library implementation)."""
    if x <= 0:
        raise DomainError(f"log_gamma needs x > 0, got x={x}")
    return math.lgamma(x)


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere in R^N: 2 pi^(N/2) / Gamma(N/2)."""
    if N < 2:
        raise DomainError(f"need N >= 2, got N={N}")
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


def f_cosh_integral(q: float) -> float:
    """Line integral of cosh(s)^(-q): sqrt(pi) Gamma(q/2) / Gamma((q+1)/2)."""
    if q <= 0:
        raise DomainError(f"integral of cosh^-q diverges for q <= 0, got q={q}")
    return math.exp(0.5 * math.log(math.pi) + log_gamma(q / 2) - log_gamma((q + 1) / 2))


@dataclass(frozen=True)
class Moments:
    """Line moments of the unit profile cosh(s)^(-2/(p-2)) and its derivative.

    I2 and Ip are the squared and p-th power integrals; J2 the derivative
    energy.  They satisfy Ip = 4 I2/(p+2) and J2 = 4 I2/((p+2)(p-2)).
    """

    I2: float
    Ip: float
    J2: float


def moments(p: float) -> Moments:
    """Moments of the unit cosh profile at exponent p > 2."""
    if p <= 2:
        raise DomainError(f"need p > 2, got p={p}")
    i2 = f_cosh_integral(4.0 / (p - 2))
    ip = f_cosh_integral(2.0 * p / (p - 2))
    j2 = 4.0 * i2 / ((p + 2) * (p - 2))
    return Moments(I2=i2, Ip=ip, J2=j2)


@dataclass(frozen=True)
class ProfileConstants:
    """Amplitude/width data of the extremal profile A cosh(B s)^(-2/(p-2)).

    eta is the effective spectral parameter ((p+2) theta Lambda /
    ((2 theta - 1) p + 2), equal to Lambda at theta = 1), and t_star the
    kinetic-to-mass ratio of the profile.
    """

    eta: float
    A: float
    B: float
    t_star: float


def profile_constants(Lambda: float, p: float, theta: float = 1.0) -> ProfileConstants:
    """Constants of the extremal profile for parameters (Lambda, p, theta).

    The profile u(s) = A cosh(B s)^(-2/(p-2)) solves
    -theta u'' + eta u = u^(p-1) with A = (p eta / 2)^(1/(p-2)) and
    B = (p-2)/2 sqrt(eta/theta).
    """
    if Lambda <= 0:
        raise DomainError(f"need Lambda > 0, got {Lambda}")
    if p <= 2:
        raise DomainError(f"need p > 2, got p={p}")
    denom = (2 * theta - 1) * p + 2
    if denom <= 0 or theta <= 0:
        raise DomainError(f"(2 theta - 1) p + 2 = {denom} <= 0: no profile")
    eta = (p + 2) * theta * Lambda / denom
    A = (p * eta / 2.0) ** (1.0 / (p - 2))
    B = 0.5 * (p - 2) * math.sqrt(eta / theta)
    t_star = (p - 2) / (p + 2) * eta / theta
    return ProfileConstants(eta=eta, A=A, B=B, t_star=t_star)


def extremal_profile(s, pc: ProfileConstants, p: float):
    """Evaluate the extremal profile A cosh(B s)^(-2/(p-2)); vectorized in s."""
    s = np.asarray(s, dtype=float)
    return pc.A * np.cosh(pc.B * s) ** (-2.0 / (p - 2))


def extremal_potential(s, pc: ProfileConstants, p: float):
    """Evaluate the optimizing well A^(p-2) / cosh(B s)^2; vectorized in s."""
    s = np.asarray(s, dtype=float)
    return pc.A ** (p - 2) / np.cosh(pc.B * s) ** 2


def lt_ground_state(s, gamma: float):
    """Unit-normalized ground state of the optimizing well at width 1.

    psi(s) = pi^(-1/4) (Gamma(gamma)/Gamma(gamma - 1/2))^(1/2)
             cosh(s)^(-gamma + 1/2), with integral of psi^2 equal to 1.
    """
    if gamma <= 0.5:
        raise DomainError(f"need gamma > 1/2, got {gamma}")
    s = np.asarray(s, dtype=float)
    norm = math.exp(-0.25 * math.log(math.pi) + 0.5 * (log_gamma(gamma) - log_gamma(gamma - 0.5)))
    return norm * np.cosh(s) ** (-gamma + 0.5)


def _lt_constant_ratio_form(gamma: float) -> float:
    # 1/(sqrt(pi)(g-1/2)) * Gamma(g+1)/Gamma(g+1/2) * ((g-1/2)/(g+1/2))^(g+1/2)
    return math.exp(
        -0.5 * math.log(math.pi)
        - math.log(gamma - 0.5)
        + log_gamma(gamma + 1)
        - log_gamma(gamma + 0.5)
        + (gamma + 0.5) * (math.log(gamma - 0.5) - math.log(gamma + 0.5))
    )


def _lt_constant_product_form(gamma: float) -> float:
    # ((2g-1)/(2g+1))^(g-1/2) * 2g/(2g+1) * Gamma(g)/(sqrt(pi) Gamma(g+1/2))
    return math.exp(
        (gamma - 0.5) * (math.log(2 * gamma - 1) - math.log(2 * gamma + 1))
        + math.log(2 * gamma)
        - math.log(2 * gamma + 1)
        + log_gamma(gamma)
        - 0.5 * math.log(math.pi)
        - log_gamma(gamma + 0.5)
    )


def lt_constant(gamma: float) -> float:
    """Sharp constant of the one-bound-state spectral inequality.

    Two printed forms exist; they are algebraically identical (via
    Gamma(gamma+1) = gamma Gamma(gamma)) and both are evaluated here, with
    agreement asserted to 1e-11 relative before returning.
    Spot values: lt_constant(2.5) = 5/36, lt_constant(1.5) = 3/16.
    """
    if gamma <= 0.5:
        raise DomainError(f"need gamma > 1/2, got {gamma}")
    c1 = _lt_constant_ratio_form(gamma)
    c2 = _lt_constant_product_form(gamma)
    if abs(c1 - c2) > 1e-11 * abs(c1):
        raise NumericsError(f"lt_constant forms disagree at gamma={gamma}: {c1} vs {c2}")
    return c1


def _radial_bracket(Lambda: float, p: float) -> float:
    # Lambda- and p-dependent product common to all radial-constant displays.
    return (
        (Lambda * (p - 2) ** 2 / (p + 2)) ** ((p - 2) / (2 * p))
        * ((p + 2) / (2 * p * Lambda))
        * (4.0 / (p + 2)) ** ((6 - p) / (2 * p))
        * math.exp((p - 2) / p * (log_gamma(2 / (p - 2) + 0.5) - 0.5 * math.log(math.pi) - log_gamma(2 / (p - 2))))
    )


def radial_constant(Lambda: float, p: float, N: int) -> float:
    """Best constant among s-only profiles, surface measure on the sphere.

    Equals (sphere_area(N) * integral of u_star^p ds)^(-(p-2)/p) and scales
    as radial_constant(1, p, N) * Lambda^(-(p+2)/(2p)).
    """
    if not 2 < p < 6:
        raise DomainError(f"need 2 < p < 6, got p={p}")
    if Lambda <= 0:
        raise DomainError(f"need Lambda > 0, got {Lambda}")
    return sphere_area(N) ** (-(p - 2) / p) * _radial_bracket(Lambda, p)


def radial_constant_alt(Lambda: float, p: float, N: int) -> float:
    """Radial constant in the alternative normalization (FLAGGED).

    Same product as :func:`radial_constant` but with the sphere-area factor
    to the +(p-2)/p power, i.e. larger by sphere_area(N)**(2(p-2)/p).  This
    convention appears in some statements of the sharp constant; it fails
    the direct variational cross-check and is reported only for comparison.
    """
    if not 2 < p < 6:
        raise DomainError(f"need 2 < p < 6, got p={p}")
    if Lambda <= 0:
        raise DomainError(f"need Lambda > 0, got {Lambda}")
    return sphere_area(N) ** ((p - 2) / p) * _radial_bracket(Lambda, p)


def radial_interp_coefficient(theta: float, p: float) -> float:
    """Lambda-independent prefactor of the radial constant, theta family.

    This is the best constant of the probability-measure quotient at
    Lambda = 1 among s-only profiles.
    """
    if not 2 < p < 6:
        raise DomainError(f"need 2 < p < 6, got p={p}")
    A = (2 * theta - 1) * p + 2
    if theta > 1.0 or A <= 0 or 2 - p * (1 - theta) <= 0:
        raise DomainError(f"(p={p}, theta={theta}) outside the admissible range")
    return (
        ((p - 2) ** 2 / A) ** ((p - 2) / (2 * p))
        * (A / (2 * p * theta)) ** theta
        * (4.0 / (p + 2)) ** ((6 - p) / (2 * p))
        * math.exp((p - 2) / p * (log_gamma(2 / (p - 2) + 0.5) - 0.5 * math.log(math.pi) - log_gamma(2 / (p - 2))))
    )


def radial_interp_constant(theta: float, Lambda: float, p: float) -> float:
    """Radial best constant of the theta family at general Lambda.

    radial_interp_coefficient(theta, p) * Lambda^(-((2 theta - 1) p + 2)/(2p));
    at theta = 1 it equals sphere_area(N)^((p-2)/p) * radial_constant(Lambda, p, N).
    """
    if Lambda <= 0:
        raise DomainError(f"need Lambda > 0, got {Lambda}")
    A = (2 * theta - 1) * p + 2
    return radial_interp_coefficient(theta, p) * Lambda ** (-A / (2 * p))


def gap_factor(p: float, theta: float) -> float:
    """Factor >= 1 bounding the full/radial constant ratio for theta < 1.

    Returns 1 exactly iff theta = 1.  Verified in the tests against the
    independent route lt_constant(gamma_theta)^(1/gamma_theta) *
    Q[u_star]^(2p/((2 theta - 1)p + 2)) / Lambda.
    """
    if not 2 < p < 6:
        raise DomainError(f"need 2 < p < 6, got p={p}")
    A = (2 * theta - 1) * p + 2
    if theta > 1.0 or A <= 0 or 2 - p * (1 - theta) <= 0:
        raise DomainError(f"(p={p}, theta={theta}) outside the admissible range")
    ln = (
        (p + 2) / A * math.log(p + 2)
        - math.log(A)
        + 2 * (2 - p * (1 - theta)) / A * math.log((2 - p * (1 - theta)) / 2)
        + 4 * (p - 2) / A * (log_gamma(p / (p - 2)) - log_gamma(theta * p / (p - 2)))
        + 2 * (p - 2) / A * (log_gamma(2 * theta * p / (p - 2)) - log_gamma(2 * p / (p - 2)))
    )
    return math.exp(ln)


def lt_identity_defect(Lambda: float, p: float) -> float:
    """Relative defect of the potential-norm identity at (Lambda, p).

    For the optimizing well V_star at theta = 1 and gamma = (p+2)/(2(p-2)),
    lt_constant(gamma) * integral of V_star^(gamma + 1/2) equals
    Lambda^gamma exactly; returns |defect| / Lambda^gamma measured by
    adaptive quadrature on a decay-aware window.
    """
    if not 2 < p < 6:
        raise DomainError(f"need 2 < p < 6, got p={p}")
    if Lambda <= 0:
        raise DomainError(f"need Lambda > 0, got {Lambda}")
    gamma = (p + 2) / (2 * (p - 2))
    pc = profile_constants(Lambda, p, 1.0)
    half_width = max(30.0 / pc.B, 30.0)
    integrand = lambda s: float(extremal_potential(s, pc, p)) ** (gamma + 0.5)
    val, err = quad(integrand, -half_width, half_width, epsabs=1e-13, epsrel=1e-12, limit=400)
    if err > 1e-8 * max(abs(val), 1.0):
        raise NumericsError(f"quadrature did not converge: value={val}, err={err}")
    target = Lambda**gamma
    return abs(lt_constant(gamma) * val - target) / target


def euclidean_radial_extremal(x_norm: float, pt: ParamPoint):
    """Radial extremal of the Euclidean weighted inequality at radius |x|.

    w(x) = (1 + |x|^e)^(-m) with e = 2(N-2-2a)(1+a-b)/(N-2(1+a-b)) and
    m = (N-2(1+a-b))/(2(1+a-b)); defined for a < b < a+1, positive and
    decreasing in |x| when a < a_c.  Vectorized in x_norm.
    """
    delta = 1 + pt.a - pt.b
    if delta <= 0 or pt.b <= pt.a:
        raise DomainError(f"need a < b < a+1, got (a, b) = ({pt.a}, {pt.b})")
    denom = pt.N - 2 * delta
    if denom <= 0:
        raise DomainError(f"degenerate exponent: N - 2(1+a-b) = {denom}")
    inner = 2 * (pt.N - 2 - 2 * pt.a) * delta / denom
    outer = denom / (2 * delta)
    r = np.asarray(x_norm, dtype=float)
    if np.any(r < 0):
        raise DomainError("x_norm must be >= 0")
    return (1.0 + r**inner) ** (-outer)
