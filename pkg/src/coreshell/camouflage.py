"""Camouflage pairs: distinct core-shell configurations with the same DN map.

For fixed ``(r1, sigma1)`` and a second core radius ``r2``, the coefficient
``sigma2`` that reproduces the DN multiplier is a zero of a 3x3 determinant
built from Jaeger cross-products. :func:`find_sigma2_all` brackets sign changes
of that determinant on a logarithmic scan and refines each with Brent's method.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .dnmap import (
    PotentialProfile,
    dn_multiplier,
    jaeger_d,
    jaeger_d01,
    jaeger_d10,
    jaeger_d11,
)
from .errors import DomainError, NoRootError
from .fdsolver import solve_fd
from .specfun import bessel_i0, bessel_i1

SCAN_RANGE = (1e-4, 1e3)
SCAN_POINTS = 200


@dataclass(frozen=True)
class CamouflagePair:
    p: PotentialProfile
    q: PotentialProfile
    det_residual: float
    dn_residual: float


def det_matrix(r1, sigma1, r2, sigma2):
    """The 3x3 matrix whose determinant vanishes exactly on camouflage pairs."""
    PotentialProfile(r1, sigma1)
    PotentialProfile(r2, sigma2)
    e1 = math.sqrt(sigma1)
    e2 = math.sqrt(sigma2)
    u1 = r1 / e1
    u2 = r2 / e2
    return np.array(
        [
            [jaeger_d10(r1, r2), e1 * bessel_i1(u1), jaeger_d11(r1, r2)],
            [bessel_i0(u2), 0.0, e2 * bessel_i1(u2)],
            [jaeger_d(r1, r2), bessel_i0(u1), jaeger_d01(r1, r2)],
        ]
    )


def det_d(r1, sigma1, r2, sigma2, scaled=True):
    """Determinant by cofactor expansion; rows scaled to unit max-norm when ``scaled``."""
    m = det_matrix(r1, sigma1, r2, sigma2)
    if scaled:
        m = m / np.max(np.abs(m), axis=1, keepdims=True)
    (a, b, c), (d, e, f), (g, h, k) = m.tolist()
    return a * (e * k - f * h) - b * (d * k - f * g) + c * (d * h - e * g)


def scan_det(r1, sigma1, r2, lo=SCAN_RANGE[0], hi=SCAN_RANGE[1], points=SCAN_POINTS):
    """Scaled determinant on a log grid of ``sigma2``; returns ``(grid, values)``."""
    grid = np.logspace(math.log10(lo), math.log10(hi), points)
    values = np.array([det_d(r1, sigma1, r2, s) for s in grid])
    return grid, values


def _refine(r1, sigma1, r2, a, b):
    fn = lambda s: det_d(r1, sigma1, r2, s)
    return brentq(fn, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def find_sigma2_all(r1, sigma1, r2, bracket=None):
    """All roots in ``sigma2`` of the determinant, sorted ascending.

    With ``bracket=(lo, hi)`` showing a sign change, only that bracket is
    refined. Otherwise the default range (1e-4, 1e3) is scanned.
    """
    PotentialProfile(r1, sigma1)
    PotentialProfile(r2, 1.0)
    if r2 == r1 and bracket is None:
        # same radius: the DN multiplier is injective in sigma, so the only root is sigma1
        return [float(sigma1)]
    if bracket is not None:
        lo, hi = map(float, bracket)
        if not 0.0 < lo < hi:
            raise DomainError(f"bracket must satisfy 0 < lo < hi, got {bracket}")
        flo, fhi = det_d(r1, sigma1, r2, lo), det_d(r1, sigma1, r2, hi)
        if flo == 0.0:
            return [lo]
        if fhi == 0.0:
            return [hi]
        if flo * fhi < 0.0:
            return [_refine(r1, sigma1, r2, lo, hi)]
        grid, values = scan_det(r1, sigma1, r2, lo, hi)
    else:
        grid, values = scan_det(r1, sigma1, r2)
    roots = []
    for k in range(len(grid)):
        if values[k] == 0.0:
            roots.append(float(grid[k]))
        elif k + 1 < len(grid) and values[k] * values[k + 1] < 0.0:
            roots.append(_refine(r1, sigma1, r2, grid[k], grid[k + 1]))
    if not roots:
        raise NoRootError(
            f"determinant has no sign change for sigma2 in [{grid[0]:g}, {grid[-1]:g}] "
            f"(range of values [{values.min():.3e}, {values.max():.3e}])",
            scan=(grid, values),
        )
    return sorted(roots)


def find_sigma2(r1, sigma1, r2, bracket=None):
    """The camouflage coefficient for core radius ``r2``.

    When several roots exist the one nearest ``sigma1`` in log scale is
    returned; use :func:`find_sigma2_all` to see them all.
    """
    roots = find_sigma2_all(r1, sigma1, r2, bracket=bracket)
    return min(roots, key=lambda s: abs(math.log(s / sigma1)))


def make_pair(r1, sigma1, r2, sigma2):
    p = PotentialProfile(r1, sigma1)
    q = PotentialProfile(r2, sigma2)
    return CamouflagePair(
        p=p,
        q=q,
        det_residual=abs(det_d(r1, sigma1, r2, sigma2)),
        dn_residual=abs(dn_multiplier(p).value - dn_multiplier(q).value),
    )


def verify_pair(pair, f=1.0, fd_n=()):
    """Analytic DN mismatch and finite-difference mismatch for each ``N`` in ``fd_n``."""
    dn = abs(dn_multiplier(pair.p).value * f - dn_multiplier(pair.q).value * f)
    fd = [abs(solve_fd(f, pair.p, n).neumann - solve_fd(f, pair.q, n).neumann) for n in fd_n]
    return dn, fd


def camouflage_record(pair, fd_residuals_by_n=None):
    return {
        "r1": pair.p.r1,
        "sigma1": pair.p.sigma1,
        "r2": pair.q.r1,
        "sigma2": pair.q.sigma1,
        "det_residual": pair.det_residual,
        "dn_residual": pair.dn_residual,
        "fd_residuals_by_N": {str(n): v for n, v in (fd_residuals_by_n or {}).items()},
    }
