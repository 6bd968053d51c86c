"""Business-practice index pricing: fit a gamma law to yearly indices.

The market-standard shortcut prices a contract from the yearly history
of its index rather than from a daily temperature model: compute the
index for the contract window in each historical year, remove a linear
trend, fit a gamma distribution by maximum likelihood and integrate the
payoff against it.  Serves as the comparison baseline for the
model-based prices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import digamma, polygamma
from scipy.stats import gamma as gamma_dist

from .pricing import PayoffSpec, compute_index, payoff, resolve_strike
from .timeseries import TemperatureSeries

#: Days per cleaned year (leap days removed upstream).
YEAR_DAYS = 365


class BaselineError(ValueError):
    """Raised when the yearly sample cannot support a gamma fit."""


@dataclass(frozen=True)
class HistoricalIndexSample:
    """Yearly index history, detrended and recentered for fitting.

    ``detrended[i]`` is the year-``years[i]`` index with the fitted
    linear trend removed and the level restored at ``recenter_year``'s
    trend value.
    """

    years: np.ndarray
    index_values: np.ndarray
    detrended: np.ndarray
    trend_intercept: float
    trend_slope: float
    recenter_year: int


@dataclass(frozen=True)
class GammaFit:
    shape: float
    scale: float
    score_norm: float  # residual of the likelihood equations at the fit


@dataclass(frozen=True)
class BaselineResult:
    price: float
    strike: float
    fit: GammaFit
    sample: HistoricalIndexSample


def yearly_index_history(
    series: TemperatureSeries,
    spec: PayoffSpec,
    years: range,
    recenter_year: int | None = None,
) -> HistoricalIndexSample:
    """Per-year contract index, linearly detrended and recentered.

    The contract window ``[t1, t2]`` is taken as day indices in the
    contract year; the same window is replayed in each historical year
    by shifting whole 365-day years.  The contract year (the default
    recentering level) is inferred from ``t1``.
    """
    if len(years) < 10:
        raise BaselineError("need at least 10 yearly observations")
    index = spec.index
    start_year = series.start_date.year
    contract_year = start_year + index.t1 // YEAR_DAYS
    if recenter_year is None:
        recenter_year = contract_year
    values = []
    for year in years:
        shift = (contract_year - year) * YEAR_DAYS
        window_values = compute_index(
            series.values, index, start_day=shift
        )
        values.append(window_values)
    years_arr = np.array(list(years), dtype=float)
    index_values = np.array(values, dtype=float)
    slope, intercept = np.polyfit(years_arr, index_values, 1)
    detrended = index_values - (intercept + slope * years_arr) + (
        intercept + slope * recenter_year
    )
    return HistoricalIndexSample(
        years=years_arr.astype(int),
        index_values=index_values,
        detrended=detrended,
        trend_intercept=float(intercept),
        trend_slope=float(slope),
        recenter_year=int(recenter_year),
    )


def fit_gamma_mle(x, tol: float = 1e-12, max_iter: int = 100) -> GammaFit:
    """Maximum-likelihood gamma fit by Newton iteration on the shape.

    The scale is profiled out in closed form (mean over shape); the
    shape solves ``log k - digamma(k) = log(mean) - mean(log x)``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise BaselineError("gamma support violated: nonpositive observation")
    mean = float(x.mean())
    s = math.log(mean) - float(np.mean(np.log(x)))
    if s <= 0.0:
        raise BaselineError("degenerate sample: zero log-spread")
    k = (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    for _ in range(max_iter):
        f = math.log(k) - digamma(k) - s
        fprime = 1.0 / k - polygamma(1, k)
        step = f / fprime
        k -= step
        if abs(step) < tol * max(1.0, k):
            break
    score = abs(math.log(k) - digamma(k) - s)
    return GammaFit(shape=float(k), scale=mean / k, score_norm=float(score))


def expected_gamma_payoff(fit: GammaFit, strike: float, cap: float) -> float:
    """Expected capped call payoff under the fitted gamma distribution."""
    dist = gamma_dist(fit.shape, scale=fit.scale)
    upper = float(dist.ppf(1.0 - 1e-12))
    if strike >= upper:
        return 0.0

    def integrand(x):
        return payoff(x, strike, cap) * dist.pdf(x)

    points = [p for p in (strike, strike + cap) if strike < p < upper and math.isfinite(p)]
    value, _ = quad(integrand, max(strike, 0.0), upper, points=points or None, limit=200)
    return float(value)


def index_model_price(
    series: TemperatureSeries,
    spec: PayoffSpec,
    years: range,
    recenter_year: int | None = None,
) -> BaselineResult:
    """Price a contract from its yearly index history.

    Historical-quantile strikes resolve against the detrended yearly
    sample; the expected payoff integrates the payoff against the
    maximum-likelihood gamma fit of that sample.
    """
    sample = yearly_index_history(series, spec, years, recenter_year)
    bad = np.nonzero(sample.detrended <= 0.0)[0]
    if bad.size:
        raise BaselineError(
            f"gamma support violated: detrended index for year "
            f"{sample.years[bad[0]]} is {sample.detrended[bad[0]]:.3f}"
        )
    if spec.strike is not None:
        strike = spec.strike
    else:
        strike = resolve_strike(spec, sample.detrended)
    fit = fit_gamma_mle(sample.detrended)
    price = expected_gamma_payoff(fit, strike, spec.cap)
    return BaselineResult(price=price, strike=float(strike), fit=fit, sample=sample)
