#!/usr/bin/env python3
"""Generate a synthetic Paris-like daily temperature CSV.

Simulates the reference Paris calibration over 1980-2020 (14,965
cleaned days) with a fixed seed and writes it in the package's
``date,tavg`` input format.  Useful as a stand-in for licensed station
data when exercising the CLI end to end.

Usage: python scripts/generate_sample_data.py [out.csv] [seed]
"""

import datetime as dt
import sys

from weathervol import TemperatureSeries, save_series, simulate_paths
from weathervol.presets import paris


def main() -> None:
    out = sys.argv[1] if len(sys.argv) > 1 else "data/paris_synthetic.csv"
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 1980
    params = paris()
    paths = simulate_paths(
        params,
        init=(0.0, params.vol_seasonal.gamma0),
        t0=0.0,
        horizon=14_964.0,
        n_paths=1,
        seed=seed,
    )
    series = TemperatureSeries(start_date=dt.date(1980, 1, 1), values=paths.temps[0])
    save_series(series, out)
    print(f"wrote {len(series)} days to {out} (seed {seed})")


if __name__ == "__main__":
    main()
