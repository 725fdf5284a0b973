r"""Tikhonov recovery of the core coefficient from a single noisy Neumann datum.

The regularised estimate minimises

.. math::
    T_\alpha(\sigma) = \tfrac12 |\lambda(\sigma, r_1) f - g^\delta|^2 + \tfrac12\alpha\sigma^2

over :math:`\sigma > 0`. Newton's method runs in :math:`s = \ln\sigma` so every
iterate stays positive. The forward model inside the functional is the analytic
DN multiplier, while synthetic data come from the finite-difference solver.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .dnmap import PotentialProfile, dn_multiplier_derivatives
from .errors import (
    ConvergenceError,
    CoreShellError,
    DiscrepancyError,
    DomainError,
    ReconstructionError,
)
from .fdsolver import solve_fd
from .specfun import X_MAX

TAU = 1.1
ALPHA_MAX = 1.0
ALPHA_MIN = 1e-14
ALPHA_RATIO = 10.0 ** 0.25
ALPHA_FLOOR = 1e-14
STATIONARITY_TOL = 1e-10
MAX_ITER = 100
DEFAULT_DR = 1e-4
LOG_SIGMA_BOUNDS = (math.log(1e-12), math.log(1e12))


@dataclass(frozen=True)
class NoisyMeasurement:
    g_clean: float
    g_delta: float
    delta: float
    seed: int


@dataclass(frozen=True)
class TikhonovResult:
    sigma_est: float
    alpha: float
    residual: float
    iterations: int
    gradient: float
    eps_abs: float = None

    def with_truth(self, sigma_true):
        return TikhonovResult(
            sigma_est=self.sigma_est,
            alpha=self.alpha,
            residual=self.residual,
            iterations=self.iterations,
            gradient=self.gradient,
            eps_abs=abs(self.sigma_est - sigma_true),
        )


def make_noisy(g, delta, seed):
    """Add ``delta`` times one standard normal draw from a generator seeded by ``seed``."""
    delta = float(delta)
    if not math.isfinite(delta) or delta < 0.0:
        raise DomainError(f"noise level delta must be finite and >= 0, got {delta}")
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    g = float(g)
    if delta == 0.0:
        return NoisyMeasurement(g_clean=g, g_delta=g, delta=0.0, seed=seed)
    zeta = np.random.default_rng(seed).standard_normal()
    return NoisyMeasurement(g_clean=g, g_delta=g + delta * float(zeta), delta=delta, seed=seed)


def tikhonov_value(sigma, f, g_delta, alpha, r1):
    lam, _, _ = dn_multiplier_derivatives(r1, sigma)
    return 0.5 * (lam * f - g_delta) ** 2 + 0.5 * alpha * sigma * sigma


def tikhonov_derivatives(sigma, f, g_delta, alpha, r1):
    """Return ``(T, dT/dsigma, d2T/dsigma2, residual)``; residual is signed."""
    lam, d1, d2 = dn_multiplier_derivatives(r1, sigma)
    res = lam * f - g_delta
    value = 0.5 * res * res + 0.5 * alpha * sigma * sigma
    grad = res * f * d1 + alpha * sigma
    hess = f * f * d1 * d1 + res * f * d2 + alpha
    return value, grad, hess, res


def tikhonov_gradient(sigma, f, g_delta, alpha, r1):
    return tikhonov_derivatives(sigma, f, g_delta, alpha, r1)[1]


def log_sigma_bounds(r1):
    """Search interval for log(sigma).

    The core argument r1/sqrt(sigma) must stay within the Bessel range, which
    raises the lower end above 1e-12 when r1 is not tiny.
    """
    lo, hi = LOG_SIGMA_BOUNDS
    return max(lo, 2.0 * math.log(r1 / X_MAX) + 1e-9), hi


def _validate(f, g_delta, alpha, r1, sigma_init):
    for name, v in (("f", f), ("g_delta", g_delta)):
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v}")
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise DomainError(f"alpha must be finite and > 0, got {alpha}")
    if not (math.isfinite(sigma_init) and sigma_init > 0.0):
        raise DomainError(f"sigma_init must be finite and > 0, got {sigma_init}")
    PotentialProfile(r1, 1.0)


def minimize_newton(f, g_delta, alpha, r1, sigma_init=1.0, tol=STATIONARITY_TOL, max_iter=MAX_ITER):
    """Safeguarded Newton iteration for the stationary point of T in log-sigma.

    Newton steps are taken when the log-space curvature is positive and
    otherwise replaced by a unit descent step; either is backtracked until T
    decreases. Iteration stops once ``|dT/dsigma| <= tol``.
    """
    f, g_delta, alpha, sigma_init = map(float, (f, g_delta, alpha, sigma_init))
    _validate(f, g_delta, alpha, r1, sigma_init)
    lo, hi = log_sigma_bounds(r1)
    s = min(max(math.log(sigma_init), lo), hi)
    clamped_at = None

    for it in range(max_iter + 1):
        sigma = math.exp(s)
        value, grad, hess, res = tikhonov_derivatives(sigma, f, g_delta, alpha, r1)
        if abs(grad) <= tol:
            return _polish(s, f, g_delta, alpha, r1, it)
        if it == max_iter:
            break
        # chain rule for phi(s) = T(exp(s))
        dphi = sigma * grad
        d2phi = sigma * grad + sigma * sigma * hess
        if d2phi > 0.0:
            step = -dphi / d2phi
        else:
            step = -math.copysign(1.0, dphi)
        step = max(-2.0, min(2.0, step))

        for _ in range(60):
            trial = min(max(s + step, lo), hi)
            if tikhonov_value(math.exp(trial), f, g_delta, alpha, r1) <= value:
                break
            step *= 0.5
        else:
            trial = s
        if trial in (lo, hi):
            if clamped_at == trial:
                raise ConvergenceError(
                    f"iterate pinned at sigma = {math.exp(trial):.3e}; no interior minimiser",
                    last_iterate=math.exp(trial),
                    iterations=it,
                )
            clamped_at = trial
        if trial == s:
            raise ConvergenceError(
                f"line search stalled at sigma = {sigma!r} with dT/dsigma = {grad:.3e}",
                last_iterate=sigma,
                iterations=it,
            )
        s = trial

    raise ConvergenceError(
        f"no stationary point after {max_iter} iterations (sigma = {math.exp(s)!r})",
        last_iterate=math.exp(s),
        iterations=max_iter,
    )


def _polish(s, f, g_delta, alpha, r1, iterations, max_steps=3):
    # once inside the tolerance, plain Newton steps are kept while |dT/dsigma| shrinks
    sigma = math.exp(s)
    _, grad, hess, res = tikhonov_derivatives(sigma, f, g_delta, alpha, r1)
    for _ in range(max_steps):
        d2phi = sigma * grad + sigma * sigma * hess
        if grad == 0.0 or d2phi <= 0.0:
            break
        trial = s - sigma * grad / d2phi
        t_sigma = math.exp(trial)
        _, t_grad, t_hess, t_res = tikhonov_derivatives(t_sigma, f, g_delta, alpha, r1)
        if abs(t_grad) >= abs(grad):
            break
        s, sigma, grad, hess, res = trial, t_sigma, t_grad, t_hess, t_res
        iterations += 1
    return TikhonovResult(
        sigma_est=sigma, alpha=alpha, residual=abs(res), iterations=iterations, gradient=grad
    )


def _alpha_grid(alpha_max=ALPHA_MAX, alpha_min=ALPHA_MIN, ratio=ALPHA_RATIO):
    n = int(round(math.log(alpha_max / alpha_min) / math.log(ratio)))
    return [alpha_max / ratio ** k for k in range(n + 1)]


def discrepancy_search(f, g_delta, delta, r1, tau=TAU, sigma_init=1.0):
    """Morozov selection; returns ``(alpha, TikhonovResult)``.

    Scans alpha downward on a geometric grid and accepts the largest grid value
    whose residual lies in ``[delta, tau * delta]``. If the band is jumped over
    between two grid points, bisection in ``log(alpha)`` refines the crossing.
    """
    delta = float(delta)
    if not (math.isfinite(delta) and delta > 0.0):
        raise DomainError(f"discrepancy principle needs delta > 0, got {delta}")
    if tau < 1.0:
        raise DomainError(f"tau must be >= 1, got {tau}")
    upper = tau * delta
    seen = []
    prev = None
    start = sigma_init
    for alpha in _alpha_grid():
        try:
            res = minimize_newton(f, g_delta, alpha, r1, sigma_init=start)
        except ConvergenceError:
            res = None
            try:
                res = minimize_newton(f, g_delta, alpha, r1, sigma_init=sigma_init)
            except ConvergenceError:
                pass
        if res is None:
            prev = None
            continue
        start = res.sigma_est
        seen.append(res.residual)
        if delta <= res.residual <= upper:
            return alpha, res
        if prev is not None and prev[1].residual > upper and res.residual < delta:
            return _bisect_alpha(f, g_delta, r1, delta, upper, prev, (alpha, res))
        prev = (alpha, res)
    rng = (min(seen), max(seen)) if seen else None
    raise DiscrepancyError(
        f"no alpha in [{ALPHA_MIN:g}, {ALPHA_MAX:g}] gives a residual in [{delta:g}, {upper:g}]"
        + (f"; achieved residuals span [{rng[0]:.4e}, {rng[1]:.4e}]" if rng else ""),
        residual_range=rng,
    )


def _bisect_alpha(f, g_delta, r1, lower, upper, big, small):
    (a_hi, r_hi), (a_lo, r_lo) = big, small
    for _ in range(100):
        a_mid = math.sqrt(a_hi * a_lo)
        res = minimize_newton(f, g_delta, a_mid, r1, sigma_init=r_hi.sigma_est)
        if lower <= res.residual <= upper:
            return a_mid, res
        if res.residual > upper:
            a_hi, r_hi = a_mid, res
        else:
            a_lo, r_lo = a_mid, res
    raise DiscrepancyError(
        f"bisection failed to hit residual band [{lower:g}, {upper:g}]",
        residual_range=(r_lo.residual, r_hi.residual),
    )


def choose_alpha_discrepancy(f, g_delta, delta, r1, tau=TAU):
    return discrepancy_search(f, g_delta, delta, r1, tau=tau)[0]


@lru_cache(maxsize=64)
def _fd_datum(r1, sigma1, f, n_intervals):
    return solve_fd(f, PotentialProfile(r1, sigma1), n_intervals).neumann


def synthetic_datum(profile, f=1.0, dr=DEFAULT_DR):
    """Neumann datum from the finite-difference solver with step ``dr``."""
    n = int(round(1.0 / dr))
    if abs(n * dr - 1.0) > 1e-9:
        raise DomainError(f"1/dr must be an integer, got dr = {dr}")
    return _fd_datum(profile.r1, profile.sigma1, float(f), n)


def reconstruct(
    profile_true,
    f,
    delta,
    seed,
    dr=DEFAULT_DR,
    tau=TAU,
    alpha=None,
    sigma_init=1.0,
    g_clean=None,
):
    """Full pipeline: FD datum, noise, alpha choice, Newton, error against truth.

    ``alpha=None`` selects the discrepancy principle when ``delta > 0`` and the
    floor ``1e-14`` when ``delta == 0``. ``g_clean`` bypasses the FD stage
    (used to study the method without discretisation bias).
    """
    try:
        g = synthetic_datum(profile_true, f, dr) if g_clean is None else float(g_clean)
    except CoreShellError as exc:
        raise ReconstructionError("forward", exc) from exc
    try:
        meas = make_noisy(g, delta, seed)
    except CoreShellError as exc:
        raise ReconstructionError("noise", exc) from exc
    r1 = profile_true.r1
    try:
        if alpha is None and delta > 0.0:
            _, result = discrepancy_search(f, meas.g_delta, delta, r1, tau=tau, sigma_init=sigma_init)
        else:
            a = ALPHA_FLOOR if alpha is None else alpha
            result = minimize_newton(f, meas.g_delta, a, r1, sigma_init=sigma_init)
    except DiscrepancyError as exc:
        raise ReconstructionError("alpha", exc) from exc
    except CoreShellError as exc:
        raise ReconstructionError("newton", exc) from exc
    return result.with_truth(profile_true.sigma1)


def experiment_record(profile, delta, seed, result=None, error=None):
    """Flat JSON-ready record of one experiment."""
    rec = {
        "r1": profile.r1,
        "sigma_true": profile.sigma1,
        "delta": delta,
        "seed": seed,
        "alpha": None,
        "sigma_est": None,
        "residual": None,
        "eps_abs": None,
        "iterations": None,
    }
    if result is not None:
        d = asdict(result)
        for key in ("alpha", "sigma_est", "residual", "eps_abs", "iterations"):
            rec[key] = d[key]
    if error is not None:
        rec["error"] = str(error)
    return rec


def _run_one(args):
    profile, f, delta, seed, kwargs = args
    try:
        return experiment_record(profile, delta, seed, result=reconstruct(profile, f, delta, seed, **kwargs))
    except ReconstructionError as exc:
        return experiment_record(profile, delta, seed, error=exc)


def run_ensemble(profile, f, delta, seeds, jobs=1, **kwargs):
    """Reconstruct once per seed; records come back in seed order.

    Failed reconstructions appear with an ``error`` field and ``eps_abs`` of
    ``None``.
    """
    # compute the FD datum once so worker processes don't each redo it
    if kwargs.get("g_clean") is None:
        kwargs["g_clean"] = synthetic_datum(profile, f, kwargs.pop("dr", DEFAULT_DR))
    tasks = [(profile, f, delta, int(s), kwargs) for s in seeds]
    if jobs <= 1:
        return [_run_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def ensemble_median_error(records):
    """Median absolute error, counting failed runs as infinitely wrong."""
    errs = [r["eps_abs"] if r["eps_abs"] is not None else math.inf for r in records]
    return float(np.median(errs))
