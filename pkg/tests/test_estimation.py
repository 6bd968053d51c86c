import datetime as dt
import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from weathervol import (
    EstimationError,
    ModelParams,
    RealizedVolSeries,
    TemperatureSeries,
    TrendSeasonalParams,
    VolSeasonalParams,
    clse_eta2_cir,
    clse_gamma_cir,
    detrend,
    estimate_eta2,
    estimate_rho,
    estimate_trend,
    estimate_vol_seasonal,
    load_params,
    realized_volatility,
    save_params,
    simulate_paths,
)
from weathervol.estimation import (
    conditional_mean_coeffs,
    forward_lambda,
    params_from_dict,
    params_to_dict,
)
from weathervol.seasonal import XI
from weathervol.simulation import cir_step

START = dt.date(1980, 1, 1)


def series_from(values):
    return TemperatureSeries(start_date=START, values=values)


# --- trend / kappa -----------------------------------------------------------


def test_trend_noise_free_recursion_recovers_exactly():
    trend = TrendSeasonalParams(10.0, 1e-4, (-3.0,), (-7.0,))
    kappa = 0.25
    lam = forward_lambda(trend, kappa, 1.0)
    n = 2000
    temps = np.empty(n + 1)
    temps[0] = 12.0
    for i in range(n):
        x = np.array([1.0, i, temps[i], math.sin(XI * i), math.cos(XI * i)])
        temps[i + 1] = lam @ x
    fit = estimate_trend(series_from(temps))
    assert fit.kappa == pytest.approx(kappa, abs=1e-10)
    assert fit.trend.alpha0 == pytest.approx(10.0, abs=1e-9)
    assert fit.trend.beta0 == pytest.approx(1e-4, abs=1e-12)
    assert fit.trend.alpha[0] == pytest.approx(-3.0, abs=1e-10)
    assert fit.trend.beta[0] == pytest.approx(-7.0, abs=1e-10)


def test_trend_residuals_orthogonal_to_design(synthetic_series, synthetic_calibration):
    fit = synthetic_calibration.trend_fit
    temps = synthetic_series.values
    n = temps.size - 1
    t = np.arange(n)
    design = np.column_stack(
        [np.ones(n), t, temps[:-1], np.sin(XI * t), np.cos(XI * t)]
    )
    dots = design.T @ fit.residuals
    assert np.all(np.abs(dots) < 1e-6 * n)


def test_trend_round_trip_on_simulated_paris(synthetic_calibration, paris_params):
    fit = synthetic_calibration.trend_fit
    assert fit.kappa == pytest.approx(paris_params.kappa, abs=0.02)
    assert fit.trend.alpha0 == pytest.approx(paris_params.trend.alpha0, abs=0.5)
    assert fit.trend.beta0 == pytest.approx(paris_params.trend.beta0, abs=2e-5)
    assert fit.trend.alpha[0] == pytest.approx(paris_params.trend.alpha[0], abs=0.05)
    assert fit.trend.beta[0] == pytest.approx(paris_params.trend.beta[0], abs=0.05)


def test_trend_rejects_non_mean_reverting():
    temps = 1.05 ** np.arange(200.0)  # explosive: AR coefficient above one
    with pytest.raises(EstimationError, match="non-mean-reverting"):
        estimate_trend(series_from(temps))


def test_trend_needs_six_observations():
    with pytest.raises(EstimationError):
        estimate_trend(series_from(np.arange(5.0)))


# --- realized volatility ------------------------------------------------------


def test_realized_vol_zero_series():
    base = series_from(np.zeros(101))
    rv = realized_volatility(detrend(base, TrendSeasonalParams(0, 0, (0,), (0,))), 0.3, 10)
    assert np.all(rv.values == 0.0)
    assert len(rv) == 10


def test_realized_vol_single_window_collapse():
    rng = np.random.Generator(np.random.Philox(4))
    x = rng.standard_normal(51)
    base = series_from(x)
    det = detrend(base, TrendSeasonalParams(0, 0, (0,), (0,)))
    kappa = 0.4
    rv = realized_volatility(det, kappa, 50)
    c = 2 * kappa / (1 - math.exp(-2 * kappa))
    innov = x[1:] - math.exp(-kappa) * x[:-1]
    assert len(rv) == 1
    assert rv.values[0] == pytest.approx(c * np.mean(innov**2), rel=1e-12)


def test_realized_vol_frozen_vol_unbiased():
    # constant latent volatility: the windowed estimate is chi-squared
    # with Q degrees of freedom, scaled to mean zeta_star
    kappa, zeta_star, Q = 0.25, 4.0, 10
    n = 200_000
    rng = np.random.Generator(np.random.Philox(5))
    e = math.exp(-kappa)
    sd = math.sqrt(zeta_star * (1 - math.exp(-2 * kappa)) / (2 * kappa))
    x = np.empty(n + 1)
    x[0] = 0.0
    shocks = rng.standard_normal(n) * sd
    for i in range(n):
        x[i + 1] = e * x[i] + shocks[i]
    det = detrend(series_from(x), TrendSeasonalParams(0, 0, (0,), (0,)))
    rv = realized_volatility(det, kappa, Q)
    n_windows = len(rv)
    se = zeta_star * math.sqrt(2.0 / (Q * n_windows))
    assert rv.values.mean() == pytest.approx(zeta_star, abs=3 * se)


def test_realized_vol_invariant_to_level_shift(synthetic_series):
    # shifting the series and its fitted level together leaves the
    # innovations, hence the realized volatility, unchanged
    fit1 = estimate_trend(synthetic_series)
    rv1 = realized_volatility(detrend(synthetic_series, fit1.trend), fit1.kappa, 10)
    shifted = TemperatureSeries(START, synthetic_series.values + 11.0)
    fit2 = estimate_trend(shifted)
    rv2 = realized_volatility(detrend(shifted, fit2.trend), fit2.kappa, 10)
    assert np.allclose(rv1.values, rv2.values, rtol=1e-6, atol=1e-9)


# --- volatility dynamics -------------------------------------------------------


def make_recursion_rv(vol, K, n_windows=400, zeta0=60.0):
    coeffs = conditional_mean_coeffs(vol, K, 1.0)
    zeta = np.empty(n_windows)
    zeta[0] = zeta0
    times = np.arange(n_windows, dtype=float)
    m = vol.n_harmonics
    for i in range(n_windows - 1):
        x = np.concatenate(
            [
                [1.0, zeta[i]],
                [math.sin(k * XI * times[i]) for k in range(1, m + 1)],
                [math.cos(k * XI * times[i]) for k in range(1, m + 1)],
            ]
        )
        zeta[i + 1] = coeffs @ x
    return RealizedVolSeries(Q=1, delta=1.0, values=zeta, times=times)


def test_vol_seasonal_noise_free_recursion_recovers_exactly():
    vol = VolSeasonalParams(5.0, (0.3, -0.2), (0.4, 0.25))
    K = 0.05  # slow reversion keeps the transient in the design
    rv = make_recursion_rv(vol, K)
    fit = estimate_vol_seasonal(rv, 2)
    assert fit.K == pytest.approx(K, abs=1e-12)
    assert fit.vol_seasonal.gamma0 == pytest.approx(5.0, abs=1e-10)
    assert np.allclose(fit.vol_seasonal.gamma, vol.gamma, atol=1e-9)
    assert np.allclose(fit.vol_seasonal.delta, vol.delta, atol=1e-9)


def test_vol_seasonal_single_harmonic():
    vol = VolSeasonalParams(4.0, (0.5,), (0.8,))
    rv = make_recursion_rv(vol, 0.05)
    fit = estimate_vol_seasonal(rv, 1)
    assert fit.K == pytest.approx(0.05, abs=1e-12)
    assert fit.vol_seasonal.gamma[0] == pytest.approx(0.5, abs=1e-9)
    assert fit.vol_seasonal.delta[0] == pytest.approx(0.8, abs=1e-9)


def test_vol_seasonal_round_trip_bias_pattern(synthetic_series, synthetic_calibration):
    # window averaging: strong overestimation at Q=1, mild at Q=8
    fit = synthetic_calibration.trend_fit
    det = detrend(synthetic_series, fit.trend)
    K_true = 0.396
    K_by_Q = {}
    for Q in (1, 8):
        rv = realized_volatility(det, fit.kappa, Q)
        K_by_Q[Q] = estimate_vol_seasonal(rv, 2).K
    assert K_by_Q[1] > 4.0 * K_true
    assert abs(K_by_Q[8] - K_true) / K_true < 0.30


def test_vol_seasonal_rejects_non_mean_reverting():
    values = np.linspace(1.0, 200.0, 50)
    rv = RealizedVolSeries(Q=1, delta=1.0, values=values, times=np.arange(50.0))
    with pytest.raises(EstimationError, match="not mean-reverting"):
        estimate_vol_seasonal(rv, 1)


# --- eta2 and rho ----------------------------------------------------------------


def test_eta2_zero_residuals():
    vol = VolSeasonalParams(5.0, (0.3, -0.2), (0.4, 0.25))
    rv = make_recursion_rv(vol, 0.05)
    fit = estimate_vol_seasonal(rv, 2)
    assert estimate_eta2(rv, fit) == pytest.approx(0.0, abs=1e-20)


def test_eta2_round_trip_window_bias(synthetic_series, synthetic_calibration):
    fit = synthetic_calibration.trend_fit
    det = detrend(synthetic_series, fit.trend)
    eta2_by_Q = {}
    for Q in (1, 8):
        rv = realized_volatility(det, fit.kappa, Q)
        vfit = estimate_vol_seasonal(rv, 2)
        eta2_by_Q[Q] = estimate_eta2(rv, vfit)
    # Q=1 is noise-dominated and overestimates by more than an order of magnitude
    assert eta2_by_Q[8] / eta2_by_Q[1] < 0.05


def test_eta2_scale_consistency(synthetic_series, synthetic_calibration):
    # scaling the realized volatility by c scales the estimate by c
    fit = synthetic_calibration.trend_fit
    det = detrend(synthetic_series, fit.trend)
    rv = realized_volatility(det, fit.kappa, 10)
    c = 3.0
    rv_scaled = RealizedVolSeries(Q=rv.Q, delta=rv.delta, values=c * rv.values, times=rv.times)
    e1 = estimate_eta2(rv, estimate_vol_seasonal(rv, 2))
    e2 = estimate_eta2(rv_scaled, estimate_vol_seasonal(rv_scaled, 2))
    assert e2 == pytest.approx(c * e1, rel=1e-9)


def test_rho_zero_for_independent_noises(paris_params):
    # multi-replica spread: the estimate must be consistent with zero
    n_rep = 20
    paths = simulate_paths(
        paris_params,
        init=(0.0, paris_params.vol_seasonal.gamma0),
        t0=0.0,
        horizon=3650.0,
        n_paths=n_rep,
        seed=31,
    )
    rhos = []
    for p in range(n_rep):
        series = series_from(paths.temps[p])
        tf = estimate_trend(series)
        det = detrend(series, tf.trend)
        rv = realized_volatility(det, tf.kappa, 10)
        vf = estimate_vol_seasonal(rv, 2)
        e2 = estimate_eta2(rv, vf)
        rhos.append(estimate_rho(series, rv, tf, vf, e2).rho)
    rhos = np.array(rhos)
    assert abs(rhos.mean()) < 3.0 * rhos.std(ddof=1) / math.sqrt(n_rep)


def test_rho_requires_positive_eta2(synthetic_series, synthetic_calibration):
    cal = synthetic_calibration
    with pytest.raises(EstimationError):
        estimate_rho(synthetic_series, cal.realized_vol, cal.trend_fit, cal.vol_fit, 0.0)


# --- parameter document -----------------------------------------------------------


def test_params_json_round_trip(paris_params, tmp_path):
    path = tmp_path / "params.json"
    save_params(paris_params, path, Q=10, origin="1980-01-01")
    loaded, doc = load_params(path)
    assert loaded == paris_params
    assert doc["Q"] == 10
    assert doc["origin"] == "1980-01-01"
    assert params_from_dict(params_to_dict(paris_params)) == paris_params


def test_params_invariants():
    trend = TrendSeasonalParams(0.0, 0.0, (), ())
    vol = VolSeasonalParams(1.0, (), ())
    with pytest.raises(ValueError):
        ModelParams(trend=trend, kappa=-0.1, vol_seasonal=vol, K=1.0, eta2=1.0)
    with pytest.raises(ValueError):
        ModelParams(trend=trend, kappa=0.1, vol_seasonal=vol, K=0.0, eta2=1.0)
    with pytest.raises(ValueError):
        ModelParams(trend=trend, kappa=0.1, vol_seasonal=vol, K=1.0, eta2=-1.0)
    with pytest.raises(ValueError):
        ModelParams(trend=trend, kappa=0.1, vol_seasonal=vol, K=1.0, eta2=1.0, rho=1.5)


# --- square-root process estimators ------------------------------------------------


def sinusoidal_theta(u):
    return 1.0 + 0.5 * np.sin(2.0 * np.pi * np.asarray(u, dtype=float) / 365.0)


def test_gamma_cir_constant_theta_identity():
    rng = np.random.Generator(np.random.Philox(1))
    zeta = np.abs(rng.normal(1.0, 0.2, size=5001))
    K = 0.5
    ones = lambda u: np.ones_like(np.asarray(u, dtype=float))
    est = clse_gamma_cir(zeta, K, ones, 1.0)
    e = math.exp(-K)
    direct = np.sum(zeta[1:] - zeta[:-1] * e) / (5000 * (1 - e))
    assert est == pytest.approx(direct, rel=1e-10)


def test_gamma_cir_noise_free_ode_path():
    K, gamma = 0.5, 1.3
    sol = solve_ivp(
        lambda s, z: K * (gamma * sinusoidal_theta(s) - z),
        [0.0, 3000.0],
        [1.0],
        rtol=1e-12,
        atol=1e-14,
        dense_output=True,
    )
    grid = np.arange(0.0, 3001.0)
    est = clse_gamma_cir(sol.sol(grid)[0], K, sinusoidal_theta, 1.0)
    assert est == pytest.approx(gamma, abs=1e-8)


def test_eta2_cir_noise_free_is_zero():
    K = 0.5
    sol = solve_ivp(
        lambda s, z: K * (sinusoidal_theta(s) - z),
        [0.0, 2000.0],
        [1.0],
        rtol=1e-12,
        atol=1e-14,
        dense_output=True,
    )
    grid = np.arange(0.0, 2001.0)
    est = clse_eta2_cir(sol.sol(grid)[0], K, sinusoidal_theta, 1.0)
    assert est == pytest.approx(0.0, abs=1e-12)


def simulate_cir_replicas(K, eta2, n_obs, n_rep, seed, substeps=4):
    """Unit-level square-root paths sampled daily, sub-stepped scheme."""
    params = ModelParams(
        trend=TrendSeasonalParams(0.0, 0.0, (), ()),
        kappa=0.1,
        vol_seasonal=VolSeasonalParams(1.0, (0.5,), (0.0,)),  # theta = 1 + 0.5 sin
        K=K,
        eta2=eta2,
    )
    dt_sub = 1.0 / substeps
    rng = np.random.Generator(np.random.Philox(seed))
    z = np.ones(n_rep)
    out = np.empty((n_obs + 1, n_rep))
    out[0] = z
    for i in range(n_obs * substeps):
        z = cir_step(z, (i + 0.5) * dt_sub, dt_sub, params, rng.standard_normal(n_rep))
        if (i + 1) % substeps == 0:
            out[(i + 1) // substeps] = z
    return out


@pytest.fixture(scope="module")
def cir_path():
    return simulate_cir_replicas(K=0.5, eta2=1.0, n_obs=100_000, n_rep=1, seed=123)


def test_gamma_cir_simulated_known_truth(cir_path):
    est = clse_gamma_cir(cir_path[:, 0], 0.5, sinusoidal_theta, 1.0)
    assert abs(est - 1.0) < 0.05


def test_eta2_cir_simulated_known_truth(cir_path):
    est = clse_eta2_cir(cir_path[:, 0], 0.5, sinusoidal_theta, 1.0)
    assert abs(est - 1.0) < 0.1
