r"""Analytic forward problem on the core-shell disk.

The rescaled radial equation is

.. math::
    r^{-1}(r\psi')' = c(r)\,\psi, \qquad
    c = \sigma_1^{-1} \text{ on } (0, r_1), \quad c = 1 \text{ on } (r_1, 1),

with continuity of :math:`\psi` and the flux condition
:math:`\psi'(r_1^+) = \sigma_1\psi'(r_1^-)` at the interface and
:math:`\psi(1) = f`. The solution is
:math:`a_0 I_0(r/\sqrt{\sigma_1})` in the core and
:math:`a_1 I_0(r) + b_1 K_0(r)` in the shell, so the Dirichlet-to-Neumann map
is multiplication by a scalar :math:`\lambda(r_1, \sigma_1)`.
"""

import math
from dataclasses import dataclass

from .errors import DegenerateConfigurationError, DomainError
from .specfun import bessel_i0, bessel_i1, bessel_k0, bessel_k1

DEGENERACY_THRESHOLD = 1e-14

_I0_1 = bessel_i0(1.0)
_I1_1 = bessel_i1(1.0)
_K0_1 = bessel_k0(1.0)
_K1_1 = bessel_k1(1.0)


def _positive_finite(name, value):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be finite and > 0, got {value}")
    return value


@dataclass(frozen=True)
class PotentialProfile:
    """Core radius ``r1`` in (0, 1) and core coefficient ``sigma1`` > 0.

    The core potential is ``E + 1/sigma1`` and the shell potential is fixed
    at ``E + 1`` (rescaled units).
    """

    r1: float
    sigma1: float

    def __post_init__(self):
        r1 = float(self.r1)
        if not math.isfinite(r1) or not 0.0 < r1 < 1.0:
            raise DomainError(f"r1 must lie in (0, 1), got {self.r1}")
        object.__setattr__(self, "r1", r1)
        object.__setattr__(self, "sigma1", _positive_finite("sigma1", self.sigma1))


@dataclass(frozen=True)
class ShellCoefficients:
    a0: float
    a1: float
    b1: float
    rho: float


@dataclass(frozen=True)
class DnMultiplier:
    """The scalar ``value`` such that the DN map sends ``f`` to ``value * f``."""

    value: float

    def __call__(self, f):
        return self.value * f

    @property
    def norm(self):
        return abs(self.value)


@dataclass(frozen=True)
class PhysicalScaling:
    hbar: float
    mass: float
    energy: float

    def __post_init__(self):
        object.__setattr__(self, "hbar", _positive_finite("hbar", self.hbar))
        object.__setattr__(self, "mass", _positive_finite("mass", self.mass))
        object.__setattr__(self, "energy", float(self.energy))


def core_response(r1, sigma1):
    r"""Return :math:`q = \sqrt{\sigma_1} I_1(u)/I_0(u)` with :math:`u = r_1/\sqrt{\sigma_1}`.

    This is the only way the core enters the DN map: it is the core's
    logarithmic flux :math:`\sigma_1 r\psi'/\psi` at the interface divided by
    :math:`r_1`.
    """
    eta = math.sqrt(sigma1)
    u = r1 / eta
    return eta * bessel_i1(u) / bessel_i0(u)


def _rho_from_q(q, r1):
    return (q * bessel_i0(r1) - bessel_i1(r1)) / (q * bessel_k0(r1) + bessel_k1(r1))


def rho(profile):
    """Ratio of the K- to the I-component of the shell solution."""
    r1, sigma1 = profile.r1, profile.sigma1
    eta = math.sqrt(sigma1)
    u = r1 / eta
    i0u, i1u = bessel_i0(u), bessel_i1(u)
    num = eta * i1u * bessel_i0(r1) - i0u * bessel_i1(r1)
    den = eta * i1u * bessel_k0(r1) + i0u * bessel_k1(r1)
    return num / den


def _denominator(rho_value):
    den = rho_value * _K0_1 - _I0_1
    if abs(den) < DEGENERACY_THRESHOLD:
        raise DegenerateConfigurationError(
            f"rho*K0(1) - I0(1) = {den:.3e} is numerically zero (rho = {rho_value})"
        )
    return den


def shell_coefficients(f, profile):
    """Solve the 3x3 interface/boundary system for ``(a0, a1, b1)``."""
    f = float(f)
    if not math.isfinite(f):
        raise DomainError(f"boundary value f must be finite, got {f}")
    r1, sigma1 = profile.r1, profile.sigma1
    p = rho(profile)
    den = _denominator(p)
    a1 = -f / den
    b1 = p * f / den
    a0 = (p * bessel_k0(r1) - bessel_i0(r1)) * f / (den * bessel_i0(r1 / math.sqrt(sigma1)))
    return ShellCoefficients(a0=a0 + 0.0, a1=a1 + 0.0, b1=b1 + 0.0, rho=p)


def psi_analytic(r, f, profile, coefficients=None):
    """Exact radial solution at ``r`` in [0, 1].

    At ``r == r1`` the core branch is used; the two branches agree there.
    """
    r = float(r)
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"r must lie in [0, 1], got {r}")
    c = coefficients if coefficients is not None else shell_coefficients(f, profile)
    if r <= profile.r1:
        return c.a0 * bessel_i0(r / math.sqrt(profile.sigma1))
    return c.a1 * bessel_i0(r) + c.b1 * bessel_k0(r)


def dn_multiplier(profile):
    p = rho(profile)
    return DnMultiplier(-(p * _K1_1 + _I1_1) / _denominator(p))


def disk_dn_multiplier():
    """DN multiplier of the homogeneous disk (shell coefficient everywhere)."""
    return DnMultiplier(_I1_1 / _I0_1)


def dn_distance(p, q):
    """Operator-norm distance between the DN maps of two profiles."""
    return abs(dn_multiplier(p).value - dn_multiplier(q).value)


def jaeger_d(x, y):
    return bessel_i0(x) * bessel_k0(y) - bessel_k0(x) * bessel_i0(y)


def jaeger_d10(x, y):
    """Partial derivative of :func:`jaeger_d` in ``x``."""
    return bessel_i1(x) * bessel_k0(y) + bessel_k1(x) * bessel_i0(y)


def jaeger_d01(x, y):
    """Partial derivative of :func:`jaeger_d` in ``y``."""
    return -bessel_i0(x) * bessel_k1(y) - bessel_k0(x) * bessel_i1(y)


def jaeger_d11(x, y):
    """Mixed second partial derivative of :func:`jaeger_d`."""
    return -bessel_i1(x) * bessel_k1(y) + bessel_k1(x) * bessel_i1(y)


def dn_multiplier_jaeger(profile):
    """DN multiplier evaluated through the Jaeger cross-products at ``(1, r1)``."""
    r1 = profile.r1
    eta = math.sqrt(profile.sigma1)
    u = r1 / eta
    i0u = bessel_i0(u)
    s = eta * bessel_i1(u)
    num = i0u * jaeger_d11(1.0, r1) - s * jaeger_d10(1.0, r1)
    den = i0u * jaeger_d01(1.0, r1) - s * jaeger_d(1.0, r1)
    if abs(den) < DEGENERACY_THRESHOLD:
        raise DegenerateConfigurationError(f"Jaeger-form denominator {den:.3e} vanishes")
    return DnMultiplier(num / den)


def monotone_f(eta, r):
    r"""Return :math:`\eta\, I_1(r/\eta) / I_0(r/\eta)`, strictly increasing in ``eta``."""
    eta = _positive_finite("eta", eta)
    r = _positive_finite("r", r)
    z = r / eta
    return eta * bessel_i1(z) / bessel_i0(z)


def physical_potential(profile, scaling):
    """Return the physical core and shell potentials ``(U1, U2)``."""
    unit = scaling.hbar ** 2 / (2.0 * scaling.mass)
    return scaling.energy + unit / profile.sigma1, scaling.energy + unit


def _ratio_derivatives(z):
    # R = I1/I0 satisfies R' = 1 - R/z - R^2
    R = bessel_i1(z) / bessel_i0(z)
    d1 = 1.0 - R / z - R * R
    d2 = -d1 / z + R / (z * z) - 2.0 * R * d1
    return R, d1, d2


def dn_multiplier_derivatives(r1, sigma1):
    r"""Return :math:`(\lambda, d\lambda/d\sigma_1, d^2\lambda/d\sigma_1^2)` at fixed ``r1``.

    :math:`\lambda` is a Moebius function of :math:`q` (see
    :func:`core_response`), and :math:`q = \eta R(r_1/\eta)` with
    :math:`\eta = \sqrt{\sigma_1}`, so everything follows from the Riccati
    equation for :math:`R = I_1/I_0`.
    """
    eta = math.sqrt(sigma1)
    z = r1 / eta
    R, dR, d2R = _ratio_derivatives(z)
    q = eta * R
    dq_deta = R - z * dR
    d2q_deta2 = z * z * d2R / eta
    # eta = sqrt(sigma): d eta/d sigma = 1/(2 eta), d2 eta/d sigma2 = -1/(4 eta^3)
    e1 = 0.5 / eta
    e2 = -0.25 / eta ** 3
    dq = dq_deta * e1
    d2q = d2q_deta2 * e1 * e1 + dq_deta * e2

    i0r, i1r, k0r, k1r = bessel_i0(r1), bessel_i1(r1), bessel_k0(r1), bessel_k1(r1)
    a = -(i0r * _K1_1 + k0r * _I1_1)
    b = i1r * _K1_1 - k1r * _I1_1
    c = i0r * _K0_1 - k0r * _I0_1
    d = -i1r * _K0_1 - k1r * _I0_1
    den = c * q + d
    if abs(den) < DEGENERACY_THRESHOLD:
        raise DegenerateConfigurationError(f"DN denominator {den:.3e} vanishes")
    det = a * d - b * c
    lam = (a * q + b) / den
    dlam_dq = det / den ** 2
    d2lam_dq2 = -2.0 * c * det / den ** 3
    return lam, dlam_dq * dq, d2lam_dq2 * dq * dq + dlam_dq * d2q
