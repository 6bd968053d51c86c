"""Daily average-temperature series: loading, cleaning and diagnostics.

Input files are CSV with a ``date,tavg`` header, ISO-8601 dates and
temperatures in degC, one row per calendar day with strictly increasing
dates and no gaps.  February 29 rows are dropped on load so that every
year contributes exactly 365 observations; the day index of an
observation (used as the time variable everywhere else in the package)
is simply its position in the cleaned series.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass

import numpy as np


class LoadError(ValueError):
    """Raised when a temperature file violates the input contract."""


@dataclass(frozen=True)
class TemperatureSeries:
    """Equally spaced daily temperatures with Feb 29 removed.

    ``values[i]`` is the average temperature (degC) ``i`` cleaned days
    after ``start_date``; ``delta`` is the sampling step in days.
    """

    start_date: dt.date
    values: np.ndarray
    delta: float = 1.0

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("temperature series must be a non-empty 1-D array")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class DetrendedSeries:
    """A temperature series minus its fitted trend/seasonality."""

    base: TemperatureSeries
    residuals: np.ndarray

    def __post_init__(self):
        residuals = np.array(self.residuals, dtype=float)
        if residuals.shape != self.base.values.shape:
            raise ValueError("residuals must match the base series length")
        residuals.flags.writeable = False
        object.__setattr__(self, "residuals", residuals)

    def __len__(self) -> int:
        return self.residuals.size


def _is_leap_day(day: dt.date) -> bool:
    return day.month == 2 and day.day == 29


def _next_expected(day: dt.date) -> dt.date:
    """Next required calendar day, never landing on Feb 29."""
    nxt = day + dt.timedelta(days=1)
    if _is_leap_day(nxt):
        nxt += dt.timedelta(days=1)
    return nxt


def day_index(start_date: dt.date, date: dt.date) -> int:
    """Cleaned-day index of ``date`` relative to ``start_date``.

    Counts calendar days excluding any Feb 29 in between, i.e. the row
    index ``date`` would have in a loaded series starting at
    ``start_date``.
    """
    if date < start_date:
        raise ValueError("date precedes the series start")
    if _is_leap_day(date):
        raise ValueError("Feb 29 has no index in a cleaned series")
    raw = (date - start_date).days
    leaps = 0
    year = start_date.year
    while year <= date.year:
        try:
            leap = dt.date(year, 2, 29)
        except ValueError:
            year += 1
            continue
        if start_date < leap < date:
            leaps += 1
        year += 1
    return raw - leaps


def load_series(path) -> TemperatureSeries:
    """Load a ``date,tavg`` CSV into a :class:`TemperatureSeries`.

    Feb 29 rows are dropped; a missing day is a :class:`LoadError`
    naming the first absent date, and an unparsable row is a
    :class:`LoadError` carrying its row number.
    """
    dates: list[dt.date] = []
    temps: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header[:2]] != ["date", "tavg"]:
            raise LoadError(f"{path}: expected header 'date,tavg', got {header!r}")
        for row_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            try:
                day = dt.date.fromisoformat(row[0].strip())
                temp = float(row[1])
            except (ValueError, IndexError) as exc:
                raise LoadError(f"{path}: unparsable row {row_no}: {row!r}") from exc
            if dates:
                expected = _next_expected(dates[-1])
                if day == expected:
                    pass
                elif _is_leap_day(day) and day == dates[-1] + dt.timedelta(days=1):
                    continue  # leap day present in the file: drop it
                else:
                    raise LoadError(
                        f"{path}: missing day {expected.isoformat()} "
                        f"(row {row_no} jumps to {day.isoformat()})"
                    )
            elif _is_leap_day(day):
                continue
            dates.append(day)
            temps.append(temp)
    if not temps:
        raise LoadError(f"{path}: no data rows")
    return TemperatureSeries(start_date=dates[0], values=np.array(temps))


def save_series(series: TemperatureSeries, path) -> None:
    """Write a series back to ``date,tavg`` CSV (inverse of load)."""
    day = series.start_date
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "tavg"])
        for value in series.values:
            writer.writerow([day.isoformat(), repr(float(value))])
            day = _next_expected(day)


def structure_function(residuals, q: float, lag: int) -> float:
    """Mean ``q``-th absolute power of lag-``lag`` increments.

    For a path of Hoelder regularity ``H`` this scales like ``lag**(q*H)``,
    which is what :func:`hurst_estimate` exploits.
    """
    x = np.asarray(residuals, dtype=float)
    if lag < 1:
        raise ValueError("lag must be >= 1")
    n_pairs = (x.size - 1) // lag
    if n_pairs < 1:
        raise ValueError("series too short for the requested lag")
    sub = x[: (n_pairs + 1) * lag : lag]
    return float(np.mean(np.abs(np.diff(sub)) ** q))


@dataclass(frozen=True)
class HurstEstimate:
    """Regression-based roughness estimate with its per-exponent slopes."""

    h: float
    slopes: dict[float, float]
    table: list[tuple[float, int, float]]  # (q, lag, structure function)


def hurst_estimate(series, qs=(0.5, 1.0, 1.5, 2.0, 3.0), lags=tuple(range(1, 11))) -> HurstEstimate:
    """Estimate the roughness exponent H from increment scaling.

    For each exponent ``q`` the log structure function is regressed on
    ``log(lag)`` by OLS; the slope divided by ``q`` estimates H, and the
    returned ``h`` averages those estimates over ``qs``.  Values near 0.5
    are consistent with driving noise of Brownian regularity.
    """
    if isinstance(series, DetrendedSeries):
        x = series.residuals
    else:
        x = np.asarray(series, dtype=float)
    qs = tuple(float(q) for q in qs)
    lags = tuple(int(d) for d in lags)
    if not qs or not lags:
        raise ValueError("qs and lags must be non-empty")
    if min(lags) < 1:
        raise ValueError("lags must be >= 1")
    if len(lags) < 2:
        raise ValueError("at least two lags are needed for the regression")
    log_lags = np.log(np.array(lags, dtype=float))
    slopes: dict[float, float] = {}
    table: list[tuple[float, int, float]] = []
    for q in qs:
        m = np.array([structure_function(x, q, lag) for lag in lags])
        table.extend((q, lag, mv) for lag, mv in zip(lags, m))
        if np.any(m <= 0.0):
            raise ValueError("structure function vanished; series has repeated values")
        slope = np.polyfit(log_lags, np.log(m), 1)[0]
        slopes[q] = float(slope)
    h = float(np.mean([slope / q for q, slope in slopes.items()]))
    return HurstEstimate(h=h, slopes=slopes, table=table)


def pacf(series, max_lag: int):
    """Partial autocorrelations (Durbin-Levinson) for lags 1..max_lag.

    Returns ``(values, band)`` where ``band = 1.96/sqrt(N)`` is the 95%
    significance band for a white-noise null.
    """
    x = np.asarray(series, dtype=float)
    n = x.size
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    if max_lag >= n / 2:
        raise ValueError("max_lag must be below half the series length")
    xc = x - x.mean()
    denom = float(np.dot(xc, xc))
    if denom == 0.0:
        raise ValueError("constant series has no partial autocorrelations")
    acov = np.array([np.dot(xc[: n - k], xc[k:]) / denom for k in range(max_lag + 1)])

    # Durbin-Levinson recursion on the autocorrelation sequence.
    values = np.empty(max_lag)
    phi_prev = np.zeros(0)
    var = 1.0
    for k in range(1, max_lag + 1):
        if k == 1:
            phi_kk = acov[1]
        else:
            phi_kk = (acov[k] - np.dot(phi_prev, acov[k - 1 : 0 : -1])) / var
        phi = np.empty(k)
        phi[:-1] = phi_prev - phi_kk * phi_prev[::-1]
        phi[-1] = phi_kk
        var *= 1.0 - phi_kk**2
        values[k - 1] = phi_kk
        phi_prev = phi
    return values, 1.96 / np.sqrt(n)
