"""Finite-difference forward solver on a uniform radial grid.

Rows of the tridiagonal system, for nodes ``r_i = i * dr``:

* ``i = 0``: regularity closure ``4 (psi_1 - psi_0) / dr^2 = c_0 psi_0``
  (ghost node ``psi_{-1} = psi_1``), or ``psi_0 = value`` in pinned mode.
* interior: conservative central stencil for ``r^{-1} (r psi')'`` minus the
  subdomain mass term ``c_i psi_i``.
* ``i = i*`` (the interface node): either the one-sided flux condition
  ``sigma1 (psi_i - psi_{i-1}) = psi_{i+1} - psi_i`` (first order, the
  default) or a flux-balanced finite-volume row that reduces exactly to the
  interior stencil when ``sigma1 == 1``.
* ``i = N``: Dirichlet ``psi_N = f``.

The Neumann datum is the backward quotient ``(psi_N - psi_{N-1}) / dr``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import DomainError, GridAlignmentError, SolverError

ALIGNMENT_TOLERANCE = 1e-9
MIN_INTERVALS = 10
INTERFACE_SCHEMES = ("one-sided", "balanced")


@dataclass(frozen=True)
class RadialGrid:
    n_intervals: int
    step: float
    interface_index: int

    @classmethod
    def for_radius(cls, r1, n_intervals):
        """Uniform grid on [0, 1] with ``r1`` on a node; no snapping."""
        n = int(n_intervals)
        if n != n_intervals or n < MIN_INTERVALS:
            raise DomainError(f"N must be an integer >= {MIN_INTERVALS}, got {n_intervals}")
        scaled = r1 * n
        index = round(scaled)
        if abs(scaled - index) > ALIGNMENT_TOLERANCE or not 0 < index < n:
            raise GridAlignmentError(
                f"r1 = {r1} is not on the grid for N = {n} (r1*N = {scaled!r})"
            )
        return cls(n_intervals=n, step=1.0 / n, interface_index=index)

    @property
    def nodes(self):
        return np.arange(self.n_intervals + 1) * self.step


@dataclass(frozen=True, eq=False)
class FdSolution:
    grid: RadialGrid
    values: np.ndarray
    neumann: float

    def to_csv(self):
        lines = ["r,psi"]
        lines.extend(f"{r!r},{v!r}" for r, v in zip(self.grid.nodes.tolist(), self.values.tolist()))
        return "\n".join(lines) + "\n"


def assemble_system(f, profile, grid, pin_center=None, interface="one-sided"):
    """Return ``(ab, rhs)`` in the banded layout used by :func:`scipy.linalg.solve_banded`.

    ``profile`` may be ``None`` for the homogeneous disk, in which case no
    interface row is written.
    """
    if interface not in INTERFACE_SCHEMES:
        raise DomainError(f"interface scheme must be one of {INTERFACE_SCHEMES}, got {interface!r}")
    n = grid.n_intervals
    h = grid.step
    h2 = h * h
    sigma = profile.sigma1 if profile is not None else 1.0
    istar = grid.interface_index if profile is not None else -1
    core_mass = 1.0 / sigma

    r = grid.nodes
    i = np.arange(1, n)
    rm = (i - 0.5) * h
    rp = (i + 0.5) * h
    mass = np.where(i < istar, core_mass, 1.0)

    ab = np.zeros((3, n + 1))
    rhs = np.zeros(n + 1)
    # ab[0, j+1] = A[j, j+1], ab[1, j] = A[j, j], ab[2, j-1] = A[j, j-1]
    ab[2, i - 1] = rm / (r[i] * h2)
    ab[1, i] = -(rm + rp) / (r[i] * h2) - mass
    ab[0, i + 1] = rp / (r[i] * h2)

    if pin_center is None:
        c0 = core_mass if profile is not None else 1.0
        ab[1, 0] = -4.0 / h2 - c0
        ab[0, 1] = 4.0 / h2
    else:
        ab[1, 0] = 1.0
        ab[0, 1] = 0.0
        rhs[0] = float(pin_center)

    if profile is not None:
        k = istar
        rm_k, rp_k, r_k = (k - 0.5) * h, (k + 0.5) * h, k * h
        if interface == "one-sided":
            ab[2, k - 1] = -sigma
            ab[1, k] = sigma + 1.0
            ab[0, k + 1] = -1.0
        else:
            # finite volume on [r_k - h/2, r_k + h/2] for r^{-1} (r k psi')' = psi,
            # k = sigma1 in the core and 1 in the shell
            ab[2, k - 1] = sigma * rm_k / (r_k * h2)
            ab[1, k] = -(sigma * rm_k + rp_k) / (r_k * h2) - 1.0
            ab[0, k + 1] = rp_k / (r_k * h2)

    ab[2, n - 1] = 0.0
    ab[1, n] = 1.0
    rhs[n] = f
    return ab, rhs


def neumann_forward_difference(sol):
    """Backward quotient ``(psi(1) - psi(1 - dr)) / dr`` at the outer boundary."""
    v = sol.values
    return float((v[-1] - v[-2]) / sol.grid.step)


def _solve(ab, rhs):
    try:
        values = solve_banded((1, 1), ab, rhs, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"tridiagonal solve failed: {exc}") from exc
    if not np.all(np.isfinite(values)):
        raise SolverError("finite-difference solution contains non-finite values")
    return values


def solve_fd(f, profile, n_intervals, pin_center=None, interface="one-sided"):
    """Solve the core-shell transmission problem with ``n_intervals`` cells.

    Raises :class:`GridAlignmentError` unless ``profile.r1 * n_intervals`` is
    integral to within 1e-9.
    """
    f = float(f)
    if not math.isfinite(f):
        raise DomainError(f"boundary value f must be finite, got {f}")
    grid = RadialGrid.for_radius(profile.r1, n_intervals)
    ab, rhs = assemble_system(f, profile, grid, pin_center=pin_center, interface=interface)
    values = _solve(ab, rhs)
    values[-1] = f
    if pin_center is not None:
        values[0] = float(pin_center)
    provisional = FdSolution(grid=grid, values=values, neumann=float("nan"))
    return FdSolution(grid=grid, values=values, neumann=neumann_forward_difference(provisional))


def solve_fd_disk(f, n_intervals, pin_center=None):
    """Same discretisation for the homogeneous disk (no interface)."""
    n = int(n_intervals)
    if n < MIN_INTERVALS:
        raise DomainError(f"N must be >= {MIN_INTERVALS}, got {n_intervals}")
    grid = RadialGrid(n_intervals=n, step=1.0 / n, interface_index=0)
    ab, rhs = assemble_system(float(f), None, grid, pin_center=pin_center)
    values = _solve(ab, rhs)
    provisional = FdSolution(grid=grid, values=values, neumann=float("nan"))
    return FdSolution(grid=grid, values=values, neumann=neumann_forward_difference(provisional))


def system_residual(sol, f, profile, pin_center=None, interface="one-sided"):
    """Max row residual of the discrete system, each row divided by its largest coefficient."""
    ab, rhs = assemble_system(f, profile, sol.grid, pin_center=pin_center, interface=interface)
    v = sol.values
    lhs = ab[1] * v
    lhs[:-1] += ab[0, 1:] * v[1:]
    lhs[1:] += ab[2, :-1] * v[:-1]
    # row j's coefficients live in ab[0, j+1], ab[1, j], ab[2, j-1]
    row_scale = np.abs(ab[1]).copy()
    row_scale[:-1] = np.maximum(row_scale[:-1], np.abs(ab[0, 1:]))
    row_scale[1:] = np.maximum(row_scale[1:], np.abs(ab[2, :-1]))
    return float(np.max(np.abs(lhs - rhs) / row_scale))
