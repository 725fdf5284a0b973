import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import grids
import oracles
from coreshell.dnmap import PotentialProfile, dn_multiplier
from coreshell.errors import ConvergenceError, DiscrepancyError, DomainError, ReconstructionError
from coreshell.inverse import (
    STATIONARITY_TOL,
    choose_alpha_discrepancy,
    discrepancy_search,
    ensemble_median_error,
    experiment_record,
    make_noisy,
    minimize_newton,
    reconstruct,
    run_ensemble,
    synthetic_datum,
    tikhonov_derivatives,
    tikhonov_gradient,
    tikhonov_value,
)
from coreshell.reference import TABLE_1

EXAMPLE_1 = PotentialProfile(0.7, 0.9)
EXAMPLE_2 = PotentialProfile(0.8, 1.5)
SEEDS = range(100)
MEDIAN_BANDS = {0.1: 5e-2, 0.01: 5e-3, 0.001: 1e-3}


def _lam(profile):
    return dn_multiplier(profile).value


def _gradient_points():
    rng = np.random.default_rng(grids.GRADIENT_SEED)
    for _ in range(grids.GRADIENT_POINTS):
        r1 = rng.uniform(0.1, 0.9)
        sigma = math.exp(rng.uniform(math.log(0.05), math.log(20.0)))
        g = rng.uniform(0.3, 0.6)
        alpha = 10.0 ** rng.uniform(-8.0, -2.0)
        yield r1, sigma, g, alpha


# -- noise model --

def test_zero_noise_returns_clean_datum():
    m = make_noisy(0.44, 0.0, 7)
    assert m.g_delta == 0.44 and m.g_clean == 0.44


def test_noise_is_reproducible():
    assert make_noisy(0.44, 0.01, 123) == make_noisy(0.44, 0.01, 123)
    assert make_noisy(0.44, 0.01, 123).g_delta != make_noisy(0.44, 0.01, 124).g_delta


def test_noise_is_one_standard_normal_draw():
    zeta = np.random.default_rng(5).standard_normal()
    assert make_noisy(0.5, 0.1, 5).g_delta == 0.5 + 0.1 * zeta


def test_noise_statistics_over_many_seeds():
    z = np.array([(make_noisy(0.44, 0.01, s).g_delta - 0.44) / 0.01 for s in range(100_000)])
    assert -0.02 <= z.mean() <= 0.02
    assert 0.98 <= z.std() <= 1.02


@pytest.mark.parametrize("delta, seed", [(-0.1, 1), (math.nan, 1), (math.inf, 1), (0.1, -1), (0.1, 2 ** 64)])
def test_noise_rejects_bad_parameters(delta, seed):
    with pytest.raises(DomainError):
        make_noisy(0.4, delta, seed)


# -- Tikhonov functional --

def test_functional_vanishes_at_truth_without_penalty():
    g = _lam(EXAMPLE_1)
    assert tikhonov_value(0.9, 1.0, g, 1e-300, 0.7) == pytest.approx(0.0, abs=1e-30)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 20.0), st.floats(0.3, 0.6), st.floats(1e-10, 1.0), st.floats(0.1, 0.9))
def test_penalty_is_additive(sigma, g, alpha, r1):
    diff = tikhonov_value(sigma, 1.0, g, alpha, r1) - tikhonov_value(sigma, 1.0, g, 0.0, r1)
    assert diff == pytest.approx(0.5 * alpha * sigma * sigma, rel=1e-9, abs=1e-16)


def test_functional_at_table_one_alpha():
    g = make_noisy(synthetic_datum(EXAMPLE_1), 0.1, 42).g_delta
    alpha = TABLE_1["rows"][0][1]
    v = tikhonov_value(0.9, 1.0, g, alpha, 0.7)
    assert math.isfinite(v) and v > 0.0


def test_gradient_matches_central_differences():
    for r1, sigma, g, alpha in _gradient_points():
        step = 1e-6 * max(1.0, sigma)
        ref = float(oracles.tikhonov_central_difference(sigma, 1.0, g, alpha, r1, step))
        got = tikhonov_gradient(sigma, 1.0, g, alpha, r1)
        assert abs(got - ref) <= grids.GRADIENT_RTOL * abs(ref), (r1, sigma, g, alpha)


def test_curvature_matches_gradient_differences():
    for r1, sigma, g, alpha in list(_gradient_points())[:20]:
        h = 1e-5 * sigma
        fd = (tikhonov_gradient(sigma + h, 1.0, g, alpha, r1) - tikhonov_gradient(sigma - h, 1.0, g, alpha, r1)) / (2 * h)
        hess = tikhonov_derivatives(sigma, 1.0, g, alpha, r1)[2]
        assert hess == pytest.approx(fd, rel=1e-5, abs=1e-12)


# -- Newton minimisation --

def test_noiseless_recovery():
    res = minimize_newton(1.0, _lam(EXAMPLE_1), 1e-12, 0.7, sigma_init=0.5)
    assert res.sigma_est == pytest.approx(0.9, abs=1e-5)
    assert abs(res.gradient) <= STATIONARITY_TOL


def test_result_independent_of_start():
    g = _lam(EXAMPLE_1)
    found = [minimize_newton(1.0, g, 1e-12, 0.7, sigma_init=s).sigma_est for s in (0.1, 1.0, 5.0)]
    assert max(found) - min(found) <= 1e-8


@pytest.mark.parametrize("alpha", [1e-2, 1e-4, 1e-8, 1e-12])
def test_returned_point_is_stationary(alpha):
    g = make_noisy(synthetic_datum(EXAMPLE_1), 0.01, 3).g_delta
    res = minimize_newton(1.0, g, alpha, 0.7)
    assert res.sigma_est > 0.0 and res.residual >= 0.0
    assert res.iterations <= 100
    assert abs(tikhonov_gradient(res.sigma_est, 1.0, g, alpha, 0.7)) <= STATIONARITY_TOL
    # the difference quotient is flat to within its own rounding
    h = 1e-6 * max(1.0, res.sigma_est)
    fd = float(oracles.tikhonov_central_difference(res.sigma_est, 1.0, g, alpha, 0.7, h))
    assert abs(fd) <= STATIONARITY_TOL + 1e-12


def test_data_below_attainable_range_has_no_minimiser():
    # lambda(sigma) > lambda(0+) ~ 0.249 at r1 = 0.7, so T keeps decreasing towards sigma = 0
    with pytest.raises(ConvergenceError) as info:
        minimize_newton(1.0, 0.20, 1e-14, 0.7)
    assert info.value.last_iterate is not None


@pytest.mark.parametrize("kwargs", [dict(alpha=0.0), dict(alpha=-1.0), dict(sigma_init=0.0),
                                    dict(g_delta=math.nan), dict(r1=1.2)])
def test_newton_rejects_bad_input(kwargs):
    args = dict(f=1.0, g_delta=0.45, alpha=1e-6, r1=0.7, sigma_init=1.0)
    args.update(kwargs)
    with pytest.raises(DomainError):
        minimize_newton(**args)


def test_newton_band_at_largest_noise():
    g = synthetic_datum(EXAMPLE_1)
    hits = 0
    for seed in SEEDS:
        gd = make_noisy(g, 0.1, seed).g_delta
        try:
            _, res = discrepancy_search(1.0, gd, 0.1, 0.7)
        except DiscrepancyError:
            continue
        hits += abs(res.sigma_est - 0.9) <= 0.05
    assert hits == len(SEEDS)


# -- discrepancy principle --

def test_alpha_magnitude_at_largest_noise():
    gd = make_noisy(synthetic_datum(EXAMPLE_1), 0.1, 42).g_delta
    alpha = choose_alpha_discrepancy(1.0, gd, 0.1, 0.7)
    assert TABLE_1["rows"][0][1] / 10 <= alpha <= TABLE_1["rows"][0][1] * 10


def test_alpha_magnitude_at_smallest_noise():
    gd = make_noisy(synthetic_datum(EXAMPLE_1), 0.001, 42).g_delta
    alpha = choose_alpha_discrepancy(1.0, gd, 0.001, 0.7)
    assert TABLE_1["rows"][2][1] / 10 <= alpha <= TABLE_1["rows"][2][1] * 10


def test_alpha_non_increasing_with_noise_level():
    g = synthetic_datum(EXAMPLE_1)
    alphas = [choose_alpha_discrepancy(1.0, make_noisy(g, d, 42).g_delta, d, 0.7) for d in (0.1, 0.01, 0.001)]
    assert alphas[0] >= alphas[1] >= alphas[2]


@pytest.mark.parametrize("delta", [0.01, 0.001])
def test_selected_alpha_meets_discrepancy_band(delta):
    gd = make_noisy(synthetic_datum(EXAMPLE_2), delta, 11).g_delta
    alpha, res = discrepancy_search(1.0, gd, delta, 0.8)
    assert delta <= res.residual <= 1.1 * delta
    assert res.alpha == alpha


def test_unreachable_band_reports_residual_range():
    g = synthetic_datum(EXAMPLE_1)
    with pytest.raises(DiscrepancyError) as info:
        choose_alpha_discrepancy(1.0, make_noisy(g, 0.1, 0).g_delta, 0.1, 0.7)
    lo, hi = info.value.residual_range
    assert 0.0 <= lo <= hi


@pytest.mark.parametrize("delta", [0.0, -0.01, math.nan])
def test_discrepancy_needs_positive_noise_level(delta):
    with pytest.raises(DomainError):
        choose_alpha_discrepancy(1.0, 0.45, delta, 0.7)


# -- end-to-end reconstruction --

def test_identifiability_with_exact_data():
    for prof in (EXAMPLE_1, EXAMPLE_2):
        res = reconstruct(prof, 1.0, 0.0, 0, g_clean=_lam(prof))
        assert res.eps_abs <= 1e-8


def test_noiseless_fd_data():
    res = reconstruct(EXAMPLE_1, 1.0, 0.0, 0)
    assert res.eps_abs < 1e-4


def test_reconstruction_band_example_one():
    recs = run_ensemble(EXAMPLE_1, 1.0, 0.01, SEEDS)
    good = sum(r["eps_abs"] is not None and r["eps_abs"] < 5e-3 for r in recs)
    assert good >= 95


def test_reconstruction_band_example_two():
    recs = run_ensemble(EXAMPLE_2, 1.0, 0.001, SEEDS)
    good = sum(r["eps_abs"] is not None and r["eps_abs"] < 1e-3 for r in recs)
    assert good >= 95


@pytest.mark.parametrize("profile", [EXAMPLE_1, EXAMPLE_2], ids=["example1", "example2"])
def test_median_error_decays_with_noise(profile):
    medians = [ensemble_median_error(run_ensemble(profile, 1.0, d, SEEDS)) for d in (0.1, 0.01, 0.001)]
    assert medians[0] >= medians[1] >= medians[2]


def test_reconstruction_is_deterministic():
    a = reconstruct(EXAMPLE_2, 1.0, 0.01, 9)
    b = reconstruct(EXAMPLE_2, 1.0, 0.01, 9)
    assert a == b
    assert a.eps_abs == abs(a.sigma_est - 1.5)


def test_parallel_ensemble_matches_serial():
    serial = run_ensemble(EXAMPLE_1, 1.0, 0.01, range(8), jobs=1)
    parallel = run_ensemble(EXAMPLE_1, 1.0, 0.01, range(8), jobs=2)
    assert serial == parallel
    assert [r["seed"] for r in serial] == list(range(8))


@pytest.mark.parametrize("kwargs, stage", [
    (dict(delta=0.01, dr=0.3), "forward"),
    (dict(delta=-1.0), "noise"),
    (dict(delta=0.1, seed=0), "alpha"),
    (dict(delta=0.0, g_clean=0.20), "newton"),
])
def test_failures_carry_stage(kwargs, stage):
    args = dict(profile_true=EXAMPLE_1, f=1.0, delta=0.01, seed=1)
    args.update(kwargs)
    with pytest.raises(ReconstructionError) as info:
        reconstruct(**args)
    assert info.value.stage == stage


def test_experiment_record_fields():
    res = reconstruct(EXAMPLE_1, 1.0, 0.01, 4)
    rec = experiment_record(EXAMPLE_1, 0.01, 4, result=res)
    assert set(rec) == {"r1", "sigma_true", "delta", "seed", "alpha", "sigma_est",
                        "residual", "eps_abs", "iterations"}
    assert rec["sigma_est"] == res.sigma_est


def test_failed_runs_count_as_infinite_error():
    recs = [{"eps_abs": 0.1}, {"eps_abs": None}, {"eps_abs": None}]
    assert ensemble_median_error(recs) == math.inf


@pytest.mark.parametrize("delta", sorted(MEDIAN_BANDS, reverse=True))
@pytest.mark.parametrize("profile", [EXAMPLE_1, EXAMPLE_2], ids=["example1", "example2"])
def test_median_error_band(profile, delta):
    assert ensemble_median_error(run_ensemble(profile, 1.0, delta, SEEDS)) < MEDIAN_BANDS[delta]
