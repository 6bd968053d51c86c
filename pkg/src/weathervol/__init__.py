"""Stochastic-volatility temperature modelling and weather-derivative pricing.

The package calibrates a mean-reverting daily temperature model whose
volatility is itself a mean-reverting square-root process with a
seasonal level, simulates it with a second-order scheme, and prices
degree-day derivatives by Monte Carlo, Fourier inversion of the model's
affine characteristic function, and a control-variate hybrid of the two.
"""

from .baseline import BaselineResult, fit_gamma_mle, index_model_price, yearly_index_history
from .charfn import CharFnSolution, FourierArgs, cat_charfn, charfn_state, riccati_solve, temperature_charfn
from .estimation import (
    CalibrationResult,
    EstimationError,
    ModelParams,
    RealizedVolSeries,
    calibrate,
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
)
from .pricing import (
    FftGrid,
    IndexSpec,
    PayoffSpec,
    PriceDistribution,
    compute_index,
    control_variate_price,
    daily_hdd_expectation,
    daily_temperature_cdf,
    cat_cdf,
    fft_cdf,
    hdd_option_via_cat,
    mc_price,
    payoff,
    resolve_strike,
)
from .seasonal import TrendSeasonalParams, VolSeasonalParams, eval_s, eval_sigma2
from .sensitivity import SweepResult, sweep
from .simulation import PathSet, cir_step, load_paths_binary, save_paths_binary, save_paths_csv, simulate_paths
from .timeseries import (
    DetrendedSeries,
    LoadError,
    TemperatureSeries,
    day_index,
    hurst_estimate,
    load_series,
    pacf,
    save_series,
    structure_function,
)

__version__ = "0.1.0"
