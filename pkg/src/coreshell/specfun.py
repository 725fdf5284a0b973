r"""Modified Bessel functions :math:`I_0, I_1, K_0, K_1` on the positive axis.

Evaluation strategy
-------------------
* :math:`I_n`, ``x <= 30``: ascending power series. All terms are positive, so
  the sum is accurate to a few ulps however many terms are needed.
* :math:`K_n`, ``x <= 2``: logarithmic series (ascending series plus the
  :math:`\ln(x/2)` coupling to :math:`I_n`). Cancellation costs at most a
  factor :math:`e^{2x} \approx 55` here.
* :math:`K_n`, ``2 < x <= 30``: trapezoidal rule on
  :math:`K_n(x) = \int_0^\infty e^{-x\cosh t}\cosh(nt)\,dt`. The integrand is
  entire and decays doubly exponentially, so a fixed step of 0.1 already
  converges to round-off.
* ``30 < x <= 700``: large-argument Hankel expansion, truncated at the
  smallest term (error of order :math:`e^{-2x}`).

Arguments above 700 raise :class:`~coreshell.errors.BesselRangeError` instead
of overflowing.
"""

import math
from dataclasses import dataclass

from .errors import BesselRangeError, DomainError

EULER_GAMMA = 0.57721566490153286061
X_MAX = 700.0

_SERIES_I_MAX = 30.0
_SERIES_K_MAX = 2.0
_TRAPEZOID_STEP = 0.1
_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class BesselEval:
    """A function value together with a rough absolute error bound."""

    value: float
    estimated_abs_error: float


def _check(x, allow_zero):
    try:
        x = float(x)
    except (TypeError, ValueError):
        raise DomainError(f"Bessel argument must be a real number, got {x!r}")
    if not math.isfinite(x):
        raise DomainError(f"Bessel argument must be finite, got {x}")
    if x < 0.0 or (x == 0.0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise DomainError(f"Bessel argument must be {bound}, got {x}")
    if x > X_MAX:
        raise BesselRangeError(f"Bessel argument {x} exceeds {X_MAX}")
    return x


def _series_i(order, x):
    # I_n(x) = (x/2)^n sum_k (x^2/4)^k / (k! (k+n)!)
    q = 0.25 * x * x
    term = 1.0 if order == 0 else 0.5 * x
    total = term
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + order))
        total += term
        if term < 1e-18 * total:
            return total, k


def _log_series_k(order, x):
    q = 0.25 * x * x
    log_term = math.log(0.5 * x) + EULER_GAMMA
    if order == 0:
        # K_0 = -(ln(x/2) + gamma) I_0 + sum_{k>=1} H_k q^k / (k!)^2
        i0, _ = _series_i(0, x)
        term = 1.0
        harmonic = 0.0
        total = 0.0
        k = 0
        while True:
            k += 1
            term *= q / (k * k)
            harmonic += 1.0 / k
            total += term * harmonic
            if term * harmonic < 1e-18 * abs(total):
                break
        return -log_term * i0 + total, k
    # K_1 = 1/x + ln(x/2) I_1 - (x/4) sum_k (psi(k+1) + psi(k+2)) q^k / (k!(k+1)!)
    i1, _ = _series_i(1, x)
    term = 1.0
    harmonic = 0.0
    total = (1.0 - 2.0 * EULER_GAMMA) * term
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + 1))
        harmonic += 1.0 / k
        contrib = term * (2.0 * harmonic + 1.0 / (k + 1) - 2.0 * EULER_GAMMA)
        total += contrib
        if abs(contrib) < 1e-18 * abs(total):
            break
    return 1.0 / x + math.log(0.5 * x) * i1 - 0.25 * x * total, k


def _trapezoid_k(order, x):
    # e^x K_n(x) = int_0^inf exp(-2x sinh^2(t/2)) cosh(n t) dt
    h = _TRAPEZOID_STEP
    total = 0.5
    k = 0
    while True:
        k += 1
        t = k * h
        s = math.sinh(0.5 * t)
        term = math.exp(-2.0 * x * s * s)
        if order:
            term *= math.cosh(t)
        total += term
        if term < 1e-18 * total:
            break
    return h * total * math.exp(-x), k


def _hankel(order, x, kind):
    mu = 4.0 * order * order
    term = 1.0
    total = 1.0
    sign = -1.0 if kind == "i" else 1.0
    k = 0
    while True:
        k += 1
        new = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(new) >= abs(term) or abs(new) < 1e-17 * abs(total):
            break
        term = new
        total += sign ** k * term
    if kind == "i":
        return math.exp(x) / math.sqrt(2.0 * math.pi * x) * total, k
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * total, k


def _eval_i(order, x):
    if x <= _SERIES_I_MAX:
        return _series_i(order, x)
    return _hankel(order, x, "i")


def _eval_k(order, x):
    if x <= _SERIES_K_MAX:
        return _log_series_k(order, x)
    if x <= _SERIES_I_MAX:
        return _trapezoid_k(order, x)
    return _hankel(order, x, "k")


def bessel_i0(x):
    """Modified Bessel function of the first kind, order 0, for ``x >= 0``."""
    x = _check(x, allow_zero=True)
    return _eval_i(0, x)[0]


def bessel_i1(x):
    """Modified Bessel function of the first kind, order 1, for ``x >= 0``."""
    x = _check(x, allow_zero=True)
    if x == 0.0:
        return 0.0
    return _eval_i(1, x)[0]


def bessel_k0(x):
    """Modified Bessel function of the second kind, order 0, for ``x > 0``."""
    x = _check(x, allow_zero=False)
    return _eval_k(0, x)[0]


def bessel_k1(x):
    """Modified Bessel function of the second kind, order 1, for ``x > 0``."""
    x = _check(x, allow_zero=False)
    return _eval_k(1, x)[0]


_FUNCS = {
    "i0": (0, _eval_i, True),
    "i1": (1, _eval_i, True),
    "k0": (0, _eval_k, False),
    "k1": (1, _eval_k, False),
}


def evaluate(name, x):
    """Evaluate ``name`` in ``{"i0", "i1", "k0", "k1"}`` with an error estimate.

    The estimate scales machine epsilon by the number of terms summed, with an
    extra factor for the cancellation in the small-argument K series.
    """
    try:
        order, fn, allow_zero = _FUNCS[name]
    except KeyError:
        raise DomainError(f"unknown Bessel function {name!r}")
    x = _check(x, allow_zero=allow_zero)
    if name == "i1" and x == 0.0:
        return BesselEval(0.0, 0.0)
    value, nterms = fn(order, x)
    amplification = 1.0
    if fn is _eval_k and x <= _SERIES_K_MAX:
        amplification = math.exp(2.0 * x) + abs(math.log(0.5 * x))
    err = abs(value) * _EPS * (4.0 + nterms) * amplification
    return BesselEval(value, err)
