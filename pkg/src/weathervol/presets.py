"""Reference parameter sets used by examples, tests and data generation."""

from __future__ import annotations

from .estimation import ModelParams
from .seasonal import TrendSeasonalParams, VolSeasonalParams


def paris() -> ModelParams:
    """Reference calibration for Paris daily average temperature.

    Estimated on 1980-2020 data with a 10-day realized-volatility
    window and two volatility harmonics; day 0 is 1980-01-01.  The
    correlation estimate is indistinguishable from zero and is set to
    zero so the set is directly usable for simulation and pricing.
    """
    return ModelParams(
        trend=TrendSeasonalParams(
            alpha0=10.868, beta0=0.00013, alpha=(-3.540,), beta=(-6.993,)
        ),
        kappa=0.230,
        vol_seasonal=VolSeasonalParams(
            gamma0=5.603, gamma=(0.201, -0.266), delta=(0.358, 0.459)
        ),
        K=0.396,
        eta2=1.043,
        rho=0.0,
    )
