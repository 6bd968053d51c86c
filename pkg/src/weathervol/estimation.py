"""Conditional least squares calibration of the temperature model.

The model has four blocks of parameters, estimated in a fixed order:

1. temperature mean reversion ``kappa`` and the trend/seasonality
   coefficients, from a 5-regressor linear fit of each observation on
   the previous one (:func:`estimate_trend`);
2. volatility mean reversion ``K`` and the seasonal volatility
   coefficients, from the same kind of fit applied to the realized
   volatility proxy (:func:`realized_volatility`,
   :func:`estimate_vol_seasonal`);
3. the squared vol-of-vol ``eta2`` from a conditional-variance fit
   (:func:`estimate_eta2`);
4. the temperature/volatility correlation ``rho`` from a
   conditional-covariance fit (:func:`estimate_rho`).

Each step only needs the outputs of the previous ones; the full chain
is wrapped by :func:`calibrate`.  The module also provides the
single-parameter CLS estimators for a time-dependent square-root
process (:func:`clse_gamma_cir`, :func:`clse_eta2_cir`) that back the
empirical convergence checks of the volatility estimators.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from .seasonal import XI, TrendSeasonalParams, VolSeasonalParams, eval_s, eval_sigma2
from .timeseries import DetrendedSeries, TemperatureSeries

logger = logging.getLogger(__name__)


class EstimationError(ValueError):
    """Raised when a calibration step cannot produce admissible parameters."""


@dataclass(frozen=True)
class ModelParams:
    """Full parameter set of the temperature model.

    ``kappa`` (1/day) drives the temperature mean reversion, ``K``
    (1/day) the volatility mean reversion, ``eta2`` is the squared
    vol-of-vol and ``rho`` the correlation between the two driving
    noises.  Simulation and Fourier pricing require ``rho == 0``.
    """

    trend: TrendSeasonalParams
    kappa: float
    vol_seasonal: VolSeasonalParams
    K: float
    eta2: float
    rho: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0.0:
            raise ValueError("kappa must be positive")
        if not self.K > 0.0:
            raise ValueError("K must be positive")
        if self.eta2 < 0.0:
            raise ValueError("eta2 must be nonnegative")
        if abs(self.rho) > 1.0:
            raise ValueError("rho must lie in [-1, 1]")

    @property
    def eta(self) -> float:
        return math.sqrt(self.eta2)

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)


def params_to_dict(params: ModelParams, Q: int | None = None, origin: str | None = None) -> dict:
    """Flatten to the JSON document used by the CLI and file formats."""
    doc = {
        "alpha0": params.trend.alpha0,
        "beta0": params.trend.beta0,
        "alpha": list(params.trend.alpha),
        "beta": list(params.trend.beta),
        "kappa": params.kappa,
        "gamma0": params.vol_seasonal.gamma0,
        "gamma": list(params.vol_seasonal.gamma),
        "delta": list(params.vol_seasonal.delta),
        "K": params.K,
        "eta2": params.eta2,
        "rho": params.rho,
    }
    if Q is not None:
        doc["Q"] = int(Q)
    if origin is not None:
        doc["origin"] = origin
    return doc


def params_from_dict(doc: dict) -> ModelParams:
    trend = TrendSeasonalParams(
        alpha0=float(doc["alpha0"]),
        beta0=float(doc["beta0"]),
        alpha=tuple(doc.get("alpha", ())),
        beta=tuple(doc.get("beta", ())),
    )
    vol = VolSeasonalParams(
        gamma0=float(doc["gamma0"]),
        gamma=tuple(doc.get("gamma", ())),
        delta=tuple(doc.get("delta", ())),
    )
    return ModelParams(
        trend=trend,
        kappa=float(doc["kappa"]),
        vol_seasonal=vol,
        K=float(doc["K"]),
        eta2=float(doc["eta2"]),
        rho=float(doc.get("rho", 0.0)),
    )


def save_params(params: ModelParams, path, Q: int | None = None, origin: str | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(params_to_dict(params, Q=Q, origin=origin), fh, indent=2)
        fh.write("\n")


def load_params(path) -> tuple[ModelParams, dict]:
    """Read a parameter document; returns (params, full document)."""
    with open(path) as fh:
        doc = json.load(fh)
    return params_from_dict(doc), doc


# ---------------------------------------------------------------------------
# Trend / kappa
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrendFit:
    """Output of :func:`estimate_trend`."""

    trend: TrendSeasonalParams
    kappa: float
    lam: np.ndarray  # regression coefficients (constant, t, T, sin, cos)
    residuals: np.ndarray  # one-step innovations, length N-1


def forward_lambda(trend: TrendSeasonalParams, kappa: float, step: float) -> np.ndarray:
    """One-step regression coefficients implied by trend parameters.

    Maps ``(alpha, beta, kappa)`` at step ``step`` to the coefficient
    vector of the conditional mean of the next observation on
    ``(1, t, T_t, sin(XI t), cos(XI t))``.  Inverse of the extraction
    done in :func:`estimate_trend`; also used at coarser steps by
    :func:`estimate_rho`.
    """
    if trend.n_harmonics != 1:
        raise ValueError("forward map is defined for a single harmonic")
    e = math.exp(-kappa * step)
    c = math.cos(XI * step) - e
    s = math.sin(XI * step)
    a1, b1 = trend.alpha[0], trend.beta[0]
    return np.array(
        [
            trend.alpha0 * (1.0 - e) + trend.beta0 * step,
            trend.beta0 * (1.0 - e),
            e,
            a1 * c - b1 * s,
            a1 * s + b1 * c,
        ]
    )


def estimate_trend(series: TemperatureSeries, delta: float | None = None) -> TrendFit:
    """Fit ``kappa`` and the trend/seasonality by conditional least squares.

    Regresses ``T_{(i+1)d}`` on ``(1, i*d, T_{i*d}, sin(XI i d),
    cos(XI i d))`` and inverts the coefficients into
    ``(alpha0, beta0, alpha1, beta1, kappa)``.  The autoregressive
    coefficient must fall in (0, 1); anything else means the data are
    not mean reverting at this sampling and is a hard error.
    """
    delta = series.delta if delta is None else float(delta)
    temps = series.values
    n = temps.size - 1
    if n + 1 < 6:
        raise EstimationError("need at least 6 observations for the 5-regressor fit")
    t = np.arange(n) * delta
    design = np.column_stack(
        [np.ones(n), t, temps[:-1], np.sin(XI * t), np.cos(XI * t)]
    )
    y = temps[1:]
    lam, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 5:
        raise EstimationError("singular design matrix in the trend fit")
    lam2 = lam[2]
    if not 0.0 < lam2 < 1.0:
        raise EstimationError(
            f"non-mean-reverting fit: autoregressive coefficient {lam2:.4f} not in (0, 1)"
        )
    kappa = -math.log(lam2) / delta
    beta0 = lam[1] / (1.0 - lam2)
    alpha0 = lam[0] / (1.0 - lam2) - lam[1] * delta / (1.0 - lam2) ** 2
    c = math.cos(XI * delta) - lam2
    s = math.sin(XI * delta)
    denom = c * c + s * s
    alpha1 = (lam[3] * c + lam[4] * s) / denom
    beta1 = (lam[4] * c - lam[3] * s) / denom
    trend = TrendSeasonalParams(alpha0=alpha0, beta0=beta0, alpha=(alpha1,), beta=(beta1,))
    residuals = y - design @ lam
    return TrendFit(trend=trend, kappa=kappa, lam=lam, residuals=residuals)


def detrend(series: TemperatureSeries, trend: TrendSeasonalParams) -> DetrendedSeries:
    """Remove a fitted trend/seasonality from a series."""
    t = np.arange(len(series)) * series.delta
    return DetrendedSeries(base=series, residuals=series.values - eval_s(t, trend))


# ---------------------------------------------------------------------------
# Realized volatility and volatility dynamics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RealizedVolSeries:
    """Windowed realized-volatility proxy for the latent volatility.

    ``values[i]`` is the corrected mean squared one-step innovation over
    the window ``[i*Q*delta, (i+1)*Q*delta)``, labelled at the window
    start ``times[i] = i*Q*delta``.
    """

    Q: int
    delta: float
    values: np.ndarray
    times: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        times = np.array(self.times, dtype=float)
        if values.shape != times.shape or values.ndim != 1:
            raise ValueError("values and times must be 1-D arrays of equal length")
        if np.any(values < 0.0):
            raise ValueError("realized volatility must be nonnegative")
        values.flags.writeable = False
        times.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "times", times)

    def __len__(self) -> int:
        return self.values.size

    @property
    def step(self) -> float:
        return self.Q * self.delta


def realized_volatility(detrended: DetrendedSeries, kappa: float, Q: int) -> RealizedVolSeries:
    """Q-day windowed realized volatility of the detrended temperature.

    Each one-step innovation ``x_{j} - exp(-kappa*d) x_{j-1}`` is scaled
    by ``2*kappa / (1 - exp(-2*kappa*d))`` so that, for volatility frozen
    over the window, the window average is an unbiased (chi-squared
    distributed) estimate of the latent volatility.
    """
    if not kappa > 0.0:
        raise ValueError("kappa must be positive")
    Q = int(Q)
    if Q < 1:
        raise ValueError("Q must be >= 1")
    x = detrended.residuals
    delta = detrended.base.delta
    n = x.size - 1  # number of one-step innovations
    if n < Q:
        raise ValueError("series too short for a single window")
    correction = 2.0 * kappa / (1.0 - math.exp(-2.0 * kappa * delta))
    innov = x[1:] - math.exp(-kappa * delta) * x[:-1]
    n_windows = n // Q
    sq = correction * innov[: n_windows * Q] ** 2
    values = sq.reshape(n_windows, Q).mean(axis=1)
    times = np.arange(n_windows) * Q * delta
    return RealizedVolSeries(Q=Q, delta=delta, values=values, times=times)


def _exp_cos_integrals(rate: float, xi_k: float, step: float) -> tuple[float, float]:
    """``(I_cos, I_sin)`` with ``I_cos = int_0^step e^{-rate(step-u)} cos(xi_k u) du``.

    Evaluated in closed form; both integrals appear throughout the
    conditional-moment formulas below.
    """
    den = rate * rate + xi_k * xi_k
    ec = math.cos(xi_k * step) - math.exp(-rate * step)
    es = math.sin(xi_k * step)
    i_cos = (rate * ec + xi_k * es) / den
    i_sin = (rate * es - xi_k * ec) / den
    return i_cos, i_sin


def _rotate(gamma_k: float, delta_k: float, a: float, b: float) -> tuple[float, float]:
    """Apply the 2x2 rotation-like map that mixes sine and cosine coefficients."""
    return gamma_k * a - delta_k * b, gamma_k * b + delta_k * a


def conditional_mean_coeffs(vol: VolSeasonalParams, K: float, step: float) -> np.ndarray:
    """Coefficients of the one-step conditional mean of the volatility.

    Returns ``(theta0, phi0, theta_1.., phi_1..)`` such that
    ``E[zeta_{t+step} | zeta_t] = theta0 + phi0*zeta_t
    + sum_k theta_k sin(xi_k t) + sum_k phi_k cos(xi_k t)``.
    Inverse of the extraction in :func:`estimate_vol_seasonal`.
    """
    e = math.exp(-K * step)
    m = vol.n_harmonics
    theta = np.empty(m)
    phi = np.empty(m)
    for k in range(1, m + 1):
        i_cos, i_sin = _exp_cos_integrals(K, k * XI, step)
        a = K * i_cos
        b = K * i_sin
        theta[k - 1], phi[k - 1] = _rotate(vol.gamma[k - 1], vol.delta[k - 1], a, b)
    return np.concatenate([[vol.gamma0 * (1.0 - e), e], theta, phi])


@dataclass(frozen=True)
class VolDynamicsFit:
    """Output of :func:`estimate_vol_seasonal`."""

    vol_seasonal: VolSeasonalParams
    K: float
    vartheta: np.ndarray  # regression coefficients (const, AR, sines.., cosines..)
    Q: int
    step: float
    projected: bool  # True when gamma0 was raised to restore nonnegativity


def _vol_design(rv: RealizedVolSeries, n_harmonics: int) -> tuple[np.ndarray, np.ndarray]:
    zeta = rv.values
    t = rv.times[:-1]
    cols = [np.ones(t.size), zeta[:-1]]
    cols += [np.sin(k * XI * t) for k in range(1, n_harmonics + 1)]
    cols += [np.cos(k * XI * t) for k in range(1, n_harmonics + 1)]
    return np.column_stack(cols), zeta[1:]


def estimate_vol_seasonal(rv: RealizedVolSeries, n_harmonics: int = 2) -> VolDynamicsFit:
    """Fit ``K`` and the seasonal volatility level from realized volatility.

    Same regression structure as :func:`estimate_trend`, at the window
    step and with one pair of harmonics per ``k``: the realized
    volatility of each window is regressed on the previous window's, the
    autoregressive coefficient gives ``K`` and the remaining
    coefficients are inverted into the Fourier coefficients of the
    seasonal level.  If the fitted seasonal level dips below zero it is
    projected back by raising ``gamma0`` minimally (logged).
    """
    n_harmonics = int(n_harmonics)
    if n_harmonics < 1:
        raise ValueError("n_harmonics must be >= 1")
    n_regressors = 2 + 2 * n_harmonics
    if len(rv) - 1 < n_regressors + 1:
        raise EstimationError("not enough realized-volatility windows for the fit")
    design, y = _vol_design(rv, n_harmonics)
    vartheta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < n_regressors:
        raise EstimationError("singular design matrix in the volatility fit")
    phi0 = vartheta[1]
    if not 0.0 < phi0 < 1.0:
        raise EstimationError(
            f"volatility fit not mean-reverting: autoregressive coefficient "
            f"{phi0:.4f} not in (0, 1)"
        )
    step = rv.step
    K = -math.log(phi0) / step
    gamma0 = vartheta[0] / (1.0 - phi0)
    gamma = np.empty(n_harmonics)
    delta = np.empty(n_harmonics)
    for k in range(1, n_harmonics + 1):
        i_cos, i_sin = _exp_cos_integrals(K, k * XI, step)
        a = K * i_cos
        b = K * i_sin
        theta_k = vartheta[1 + k]
        phi_k = vartheta[1 + n_harmonics + k]
        den = a * a + b * b
        gamma[k - 1] = (theta_k * a + phi_k * b) / den
        delta[k - 1] = (phi_k * a - theta_k * b) / den

    # Project the fit if the implied seasonal level goes negative.
    grid = np.arange(0.0, 365.25, 0.25)
    trig = np.zeros_like(grid)
    for k in range(1, n_harmonics + 1):
        trig += gamma[k - 1] * np.sin(k * XI * grid) + delta[k - 1] * np.cos(k * XI * grid)
    low = gamma0 + float(trig.min())
    projected = False
    if low < 0.0:
        logger.warning(
            "fitted seasonal volatility dips to %.4g; raising its level by %.4g "
            "to restore nonnegativity",
            low,
            -low,
        )
        gamma0 += -low + 1e-12
        projected = True
    vol = VolSeasonalParams(gamma0=gamma0, gamma=tuple(gamma), delta=tuple(delta))
    return VolDynamicsFit(
        vol_seasonal=vol, K=K, vartheta=vartheta, Q=rv.Q, step=step, projected=projected
    )


# ---------------------------------------------------------------------------
# eta2 and rho
# ---------------------------------------------------------------------------


def conditional_variance_weights(
    vol: VolSeasonalParams, K: float, step: float, zeta: np.ndarray, times: np.ndarray
) -> np.ndarray:
    """Per-observation conditional variance of the volatility step, over eta2.

    ``eta2 * weight_i`` is the conditional variance of
    ``zeta_{t+step}`` given ``zeta_t = zeta[i]`` at ``t = times[i]``.
    """
    e = math.exp(-K * step)
    theta0 = vol.gamma0 * (1.0 - e) ** 2 / (2.0 * K)
    phi0 = e * (1.0 - e) / K
    out = theta0 + phi0 * zeta
    for k in range(1, vol.n_harmonics + 1):
        xi_k = k * XI
        a_p, b_p = _exp_cos_integrals(2.0 * K, xi_k, step)
        den = K * K + xi_k * xi_k
        a = K * (K * (a_p - phi0) + xi_k * b_p) / den
        b = K * (K * b_p - xi_k * (a_p - phi0)) / den
        theta_k, phi_k = _rotate(vol.gamma[k - 1], vol.delta[k - 1], a, b)
        out = out + theta_k * np.sin(xi_k * times) + phi_k * np.cos(xi_k * times)
    return out


def estimate_eta2(rv: RealizedVolSeries, fit: VolDynamicsFit) -> float:
    """Squared vol-of-vol from the conditional-variance least squares fit.

    The squared one-step residuals of the volatility regression are
    projected onto the model's conditional variance profile; the ratio
    estimator below is the exact minimiser.
    """
    if len(rv) < 2:
        raise EstimationError("need at least two realized-volatility windows")
    design, y = _vol_design(rv, fit.vol_seasonal.n_harmonics)
    resid_sq = (y - design @ fit.vartheta) ** 2
    weights = conditional_variance_weights(
        fit.vol_seasonal, fit.K, fit.step, rv.values[:-1], rv.times[:-1]
    )
    denom = float(np.dot(weights, weights))
    if denom == 0.0:
        raise EstimationError("degenerate conditional-variance weights")
    return float(np.dot(weights, resid_sq) / denom)


def conditional_covariance_weights(
    vol: VolSeasonalParams,
    K: float,
    kappa: float,
    eta: float,
    step: float,
    zeta: np.ndarray,
    times: np.ndarray,
) -> np.ndarray:
    """Per-observation conditional covariance of the joint step, over rho.

    ``rho * weight_i`` is the conditional covariance between the
    temperature innovation and the volatility innovation over one step.
    The sine/cosine mixing reuses the decay-weighted integrals of the
    conditional mean, here at rate ``kappa + K``; the plain exponential
    integral ``int e^{-(kappa+K)(step-u)} e^{-K u} du`` evaluates to
    ``e^{-K step}(1 - e^{-kappa step})/kappa`` and enters both the
    constant and the harmonic terms.
    """
    ek = math.exp(-K * step)
    i_exp = ek * (1.0 - math.exp(-kappa * step)) / kappa
    theta0 = eta * vol.gamma0 * (
        (1.0 - math.exp(-(kappa + K) * step)) / (kappa + K)
        + (math.exp(-(kappa + K) * step) - ek) / kappa
    )
    phi0 = eta * i_exp
    out = theta0 + phi0 * zeta
    for k in range(1, vol.n_harmonics + 1):
        xi_k = k * XI
        a_pp, b_pp = _exp_cos_integrals(kappa + K, xi_k, step)
        den = K * K + xi_k * xi_k
        a = eta * K * (K * (a_pp - i_exp) + xi_k * b_pp) / den
        b = eta * K * (K * b_pp - xi_k * (a_pp - i_exp)) / den
        theta_k, phi_k = _rotate(vol.gamma[k - 1], vol.delta[k - 1], a, b)
        out = out + theta_k * np.sin(xi_k * times) + phi_k * np.cos(xi_k * times)
    return out


@dataclass(frozen=True)
class RhoEstimate:
    rho: float  # clamped to [-1, 1]
    raw: float


def estimate_rho(
    series: TemperatureSeries,
    rv: RealizedVolSeries,
    trend_fit: TrendFit,
    vol_fit: VolDynamicsFit,
    eta2: float,
) -> RhoEstimate:
    """Correlation between temperature and volatility noises.

    Pairs the temperature innovation over each realized-volatility
    window with the volatility innovation over the same window and
    projects their product onto the model's conditional covariance
    profile.  The temperature conditional mean at the window step is
    rebuilt from the fitted trend parameters via :func:`forward_lambda`.
    """
    if eta2 <= 0.0:
        raise EstimationError("rho is unidentifiable when eta2 is zero")
    Q = rv.Q
    step = rv.step
    n_windows = len(rv)
    idx = np.arange(n_windows) * Q
    temps = series.values[idx]  # T at window starts; last index (I-1)Q is in range
    t = rv.times[:-1]
    lam = forward_lambda(trend_fit.trend, trend_fit.kappa, step)
    design_T = np.column_stack(
        [np.ones(t.size), t, temps[:-1], np.sin(XI * t), np.cos(XI * t)]
    )
    temp_resid = temps[1:] - design_T @ lam

    design_v, y = _vol_design(rv, vol_fit.vol_seasonal.n_harmonics)
    vol_resid = y - design_v @ vol_fit.vartheta

    weights = conditional_covariance_weights(
        vol_fit.vol_seasonal,
        vol_fit.K,
        trend_fit.kappa,
        math.sqrt(eta2),
        step,
        rv.values[:-1],
        rv.times[:-1],
    )
    denom = float(np.dot(weights, weights))
    if denom == 0.0:
        raise EstimationError("degenerate conditional-covariance weights")
    raw = float(np.dot(weights, temp_resid * vol_resid) / denom)
    clamped = min(1.0, max(-1.0, raw))
    if clamped != raw:
        logger.warning("rho estimate %.4f outside [-1, 1]; clamped", raw)
    return RhoEstimate(rho=clamped, raw=raw)


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CalibrationResult:
    params: ModelParams
    Q: int
    trend_fit: TrendFit
    vol_fit: VolDynamicsFit
    rho_estimate: RhoEstimate
    realized_vol: RealizedVolSeries


def calibrate(series: TemperatureSeries, Q: int = 10, n_harmonics: int = 2) -> CalibrationResult:
    """Run the full estimation pipeline on a temperature series."""
    trend_fit = estimate_trend(series)
    detrended = detrend(series, trend_fit.trend)
    rv = realized_volatility(detrended, trend_fit.kappa, Q)
    vol_fit = estimate_vol_seasonal(rv, n_harmonics)
    eta2 = estimate_eta2(rv, vol_fit)
    rho_est = estimate_rho(series, rv, trend_fit, vol_fit, eta2)
    params = ModelParams(
        trend=trend_fit.trend,
        kappa=trend_fit.kappa,
        vol_seasonal=vol_fit.vol_seasonal,
        K=vol_fit.K,
        eta2=eta2,
        rho=rho_est.rho,
    )
    return CalibrationResult(
        params=params,
        Q=Q,
        trend_fit=trend_fit,
        vol_fit=vol_fit,
        rho_estimate=rho_est,
        realized_vol=rv,
    )


# ---------------------------------------------------------------------------
# CLS estimators for a time-dependent square-root process
# ---------------------------------------------------------------------------


def _decay_weighted_integrals(theta_fn, K: float, delta: float, n_steps: int, n_sub: int = 100):
    """Simpson quadrature of ``int theta(u) w(u) du`` over each step.

    Returns ``(J1, J2)`` where, for step ``i`` ending at ``(i+1)*delta``,
    ``J1[i] = int theta(u) e^{-K((i+1)delta - u)} du`` and
    ``J2[i] = int theta(u) e^{-K(.)}(1 - e^{-K(.)}) du``.
    """
    if n_sub % 2:
        raise ValueError("Simpson rule needs an even number of subintervals")
    # Nodes for all steps at once: shape (n_steps, n_sub + 1).
    offsets = np.linspace(0.0, delta, n_sub + 1)
    starts = np.arange(n_steps)[:, None] * delta
    u = starts + offsets[None, :]
    tail = (starts + delta) - u  # (i+1)delta - u, shared across steps
    theta_vals = np.asarray(theta_fn(u), dtype=float)
    if theta_vals.shape != u.shape:
        theta_vals = np.broadcast_to(theta_vals, u.shape)
    decay = np.exp(-K * tail)
    w = np.empty(n_sub + 1)
    w[0] = w[-1] = 1.0
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    h = delta / n_sub
    j1 = (theta_vals * decay) @ w * (h / 3.0)
    j2 = (theta_vals * decay * (1.0 - decay)) @ w * (h / 3.0)
    return j1, j2


def clse_gamma_cir(zeta_obs, K: float, theta_fn, delta: float, n_sub: int = 100):
    """CLS level estimator for ``d zeta = K(gamma*theta(t) - zeta) dt + eta sqrt(zeta) dW``.

    ``theta_fn`` must be bounded and vectorized; the decay-weighted
    integrals of ``theta`` are evaluated by Simpson quadrature with
    ``n_sub`` subintervals per observation step.  ``zeta_obs`` may be a
    matrix of independent replica paths (one per column), in which case
    one estimate per column is returned.
    """
    zeta = np.asarray(zeta_obs, dtype=float)
    if not K > 0.0:
        raise ValueError("K must be positive")
    n = zeta.shape[0] - 1
    if n < 1:
        raise ValueError("need at least two observations")
    j1, _ = _decay_weighted_integrals(theta_fn, K, delta, n, n_sub)
    increments = zeta[1:] - zeta[:-1] * math.exp(-K * delta)
    out = np.tensordot(j1, increments, axes=(0, 0)) / (K * np.dot(j1, j1))
    return out if out.ndim else float(out)


def clse_eta2_cir(zeta_obs, K: float, theta_fn, delta: float, n_sub: int = 100):
    """CLS squared vol-of-vol estimator for the unit-level square-root process.

    Assumes the level multiplier equals one, i.e. the drift is
    ``K(theta(t) - zeta)``.  The conditional mean uses the drift
    integral ``K * int theta e^{-K(.)}``, and the conditional variance
    per unit eta2 is ``e^{-K d}(1-e^{-K d})/K * zeta_i + int theta
    e^{-K(.)}(1-e^{-K(.)})``.  Replica columns are estimated
    independently, as in :func:`clse_gamma_cir`.
    """
    zeta = np.asarray(zeta_obs, dtype=float)
    if not K > 0.0:
        raise ValueError("K must be positive")
    n = zeta.shape[0] - 1
    if n < 1:
        raise ValueError("need at least two observations")
    j1, j2 = _decay_weighted_integrals(theta_fn, K, delta, n, n_sub)
    e = math.exp(-K * delta)
    expand = (slice(None),) + (None,) * (zeta.ndim - 1)
    mean_resid = zeta[1:] - (zeta[:-1] * e + K * j1[expand])
    a = e * (1.0 - e) / K * zeta[:-1] + j2[expand]
    denom = (a * a).sum(axis=0)
    if np.any(denom == 0.0):
        raise EstimationError("degenerate variance weights")
    out = (a * mean_resid**2).sum(axis=0) / denom
    return out if out.ndim else float(out)
