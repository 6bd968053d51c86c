import datetime as dt

import numpy as np
import pytest

from weathervol import (
    LoadError,
    TemperatureSeries,
    day_index,
    hurst_estimate,
    load_series,
    pacf,
    save_series,
    structure_function,
)


def write_csv(path, rows):
    with open(path, "w") as fh:
        fh.write("date,tavg\n")
        for day, value in rows:
            fh.write(f"{day.isoformat()},{value}\n")


def calendar_rows(start, n_days, include_leap=True):
    rows = []
    day = start
    while len(rows) < n_days:
        if include_leap or not (day.month == 2 and day.day == 29):
            rows.append((day, float(len(rows) % 17)))
        day += dt.timedelta(days=1)
    return rows


def test_full_range_has_paper_length(tmp_path):
    start = dt.date(1980, 1, 1)
    end = dt.date(2020, 12, 31)
    n_raw = (end - start).days + 1
    path = tmp_path / "full.csv"
    write_csv(path, calendar_rows(start, n_raw))
    series = load_series(path)
    assert len(series) == 14_965
    assert series.start_date == start


def test_single_row(tmp_path):
    path = tmp_path / "one.csv"
    write_csv(path, [(dt.date(2000, 5, 1), 12.5)])
    series = load_series(path)
    assert len(series) == 1
    assert series.values[0] == 12.5


def test_leap_day_dropped(tmp_path):
    rows = calendar_rows(dt.date(1980, 2, 27), 5)  # includes 1980-02-29
    assert any(d.month == 2 and d.day == 29 for d, _ in rows)
    path = tmp_path / "leap.csv"
    write_csv(path, rows)
    series = load_series(path)
    assert len(series) == len(rows) - 1


def test_missing_day_is_error(tmp_path):
    rows = calendar_rows(dt.date(2001, 3, 1), 10)
    del rows[4]
    path = tmp_path / "gap.csv"
    write_csv(path, rows)
    with pytest.raises(LoadError, match="2001-03-05"):
        load_series(path)


def test_unparsable_row_names_row_number(tmp_path):
    path = tmp_path / "bad.csv"
    with open(path, "w") as fh:
        fh.write("date,tavg\n2001-01-01,5.0\nnot-a-date,5.0\n")
    with pytest.raises(LoadError, match="row 3"):
        load_series(path)


def test_header_required(tmp_path):
    path = tmp_path / "hdr.csv"
    with open(path, "w") as fh:
        fh.write("2001-01-01,5.0\n")
    with pytest.raises(LoadError, match="header"):
        load_series(path)


def test_round_trip(tmp_path):
    rows = calendar_rows(dt.date(2019, 12, 20), 30)
    path = tmp_path / "rt.csv"
    write_csv(path, rows)
    series = load_series(path)
    out = tmp_path / "rt2.csv"
    save_series(series, out)
    again = load_series(out)
    assert again.start_date == series.start_date
    assert np.array_equal(again.values, series.values)


def test_day_index_skips_leap_days():
    start = dt.date(1980, 1, 1)
    assert day_index(start, dt.date(1980, 1, 1)) == 0
    assert day_index(start, dt.date(1980, 3, 1)) == 59  # Feb 29 not counted
    assert day_index(start, dt.date(1981, 1, 1)) == 365
    assert day_index(start, dt.date(2019, 1, 1)) == 39 * 365
    with pytest.raises(ValueError):
        day_index(start, dt.date(1980, 2, 29))


# --- roughness diagnostic ---------------------------------------------------


def test_hurst_linear_ramp_exact():
    ramp = 0.37 * np.arange(5000.0)
    est = hurst_estimate(ramp)
    assert est.h == pytest.approx(1.0, abs=1e-12)
    assert all(slope == pytest.approx(q, abs=1e-10) for q, slope in est.slopes.items())


def test_hurst_brownian_path():
    rng = np.random.Generator(np.random.Philox(2024))
    path = np.cumsum(rng.standard_normal(100_000))
    est = hurst_estimate(path)
    assert est.h == pytest.approx(0.5, abs=0.02)


def test_hurst_scale_equivariance():
    rng = np.random.Generator(np.random.Philox(3))
    x = np.cumsum(rng.standard_normal(5000))
    for q in (0.5, 2.0):
        m1 = structure_function(x, q, 3)
        m2 = structure_function(4.0 * x, q, 3)
        assert m2 == pytest.approx(4.0**q * m1, rel=1e-12)
    assert hurst_estimate(4.0 * x).h == pytest.approx(hurst_estimate(x).h, rel=1e-12)


def test_hurst_needs_two_lags():
    with pytest.raises(ValueError):
        hurst_estimate(np.arange(100.0), lags=(1,))


# --- partial autocorrelations ----------------------------------------------


def test_pacf_ar1():
    rng = np.random.Generator(np.random.Philox(2024))
    n = 100_000
    x = np.empty(n)
    x[0] = 0.0
    eps = rng.standard_normal(n)
    for i in range(1, n):
        x[i] = 0.8 * x[i - 1] + eps[i]
    values, band = pacf(x, 10)
    assert values[0] == pytest.approx(0.8, abs=0.02)
    assert np.all(np.abs(values[1:]) < band)


def test_pacf_white_noise_inside_band():
    rng = np.random.Generator(np.random.Philox(2))
    values, band = pacf(rng.standard_normal(100_000), 20)
    assert np.all(np.abs(values) < band)


def test_pacf_values_in_unit_interval(rng):
    x = rng.standard_normal(500).cumsum()
    values, _ = pacf(x, 20)
    assert np.all(np.abs(values) <= 1.0)


def test_pacf_constant_series_rejected():
    with pytest.raises(ValueError, match="constant"):
        pacf(np.full(100, 3.0), 5)


def test_pacf_max_lag_bound():
    with pytest.raises(ValueError):
        pacf(np.arange(10.0), 5)
