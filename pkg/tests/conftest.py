import datetime as dt

import numpy as np
import pytest

from weathervol import TemperatureSeries, calibrate, simulate_paths
from weathervol.presets import paris

PARIS_START = dt.date(1980, 1, 1)
FULL_DAYS = 14_965  # 41 years of 365 cleaned days


@pytest.fixture(scope="session")
def paris_params():
    return paris()


@pytest.fixture(scope="session")
def synthetic_series(paris_params) -> TemperatureSeries:
    """One 41-year daily series simulated from the Paris calibration."""
    paths = simulate_paths(
        paris_params,
        init=(0.0, paris_params.vol_seasonal.gamma0),
        t0=0.0,
        horizon=FULL_DAYS - 1,
        n_paths=1,
        seed=1980,
    )
    return TemperatureSeries(start_date=PARIS_START, values=paths.temps[0])


@pytest.fixture(scope="session")
def synthetic_calibration(synthetic_series):
    return calibrate(synthetic_series, Q=10)


def winter_contract_days(year_index: int = 39) -> tuple[int, int]:
    """January risk period of the given 365-day year (default: year 39)."""
    start = year_index * 365
    return start, start + 30


def summer_contract_days(year_index: int = 39) -> tuple[int, int]:
    """July risk period of the given 365-day year."""
    start = year_index * 365 + 181
    return start, start + 30


@pytest.fixture(scope="session")
def rng():
    return np.random.Generator(np.random.Philox(2718))
