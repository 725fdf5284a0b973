"""Potential reconstruction for the radial Schrodinger equation on a core-shell disk."""

from .camouflage import CamouflagePair, det_d, find_sigma2, find_sigma2_all, make_pair, verify_pair
from .dnmap import (
    DnMultiplier,
    PhysicalScaling,
    PotentialProfile,
    ShellCoefficients,
    disk_dn_multiplier,
    dn_distance,
    dn_multiplier,
    dn_multiplier_jaeger,
    psi_analytic,
    rho,
    shell_coefficients,
)
from .errors import CoreShellError
from .fdsolver import FdSolution, RadialGrid, solve_fd
from .inverse import (
    NoisyMeasurement,
    TikhonovResult,
    choose_alpha_discrepancy,
    make_noisy,
    minimize_newton,
    reconstruct,
    tikhonov_value,
)
from .specfun import bessel_i0, bessel_i1, bessel_k0, bessel_k1

__version__ = "0.1.0"

__all__ = [
    "CamouflagePair",
    "CoreShellError",
    "DnMultiplier",
    "FdSolution",
    "NoisyMeasurement",
    "PhysicalScaling",
    "PotentialProfile",
    "RadialGrid",
    "ShellCoefficients",
    "TikhonovResult",
    "bessel_i0",
    "bessel_i1",
    "bessel_k0",
    "bessel_k1",
    "choose_alpha_discrepancy",
    "det_d",
    "disk_dn_multiplier",
    "dn_distance",
    "dn_multiplier",
    "dn_multiplier_jaeger",
    "find_sigma2",
    "find_sigma2_all",
    "make_noisy",
    "make_pair",
    "minimize_newton",
    "psi_analytic",
    "reconstruct",
    "rho",
    "shell_coefficients",
    "solve_fd",
    "tikhonov_value",
    "verify_pair",
]
