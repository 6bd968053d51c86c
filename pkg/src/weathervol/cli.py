"""Command-line interface.

Subcommands cover the full workflow: ``calibrate`` a parameter file
from a temperature CSV, ``simulate`` paths from it, ``price`` a
contract by Monte Carlo / Fourier inversion / control variates,
``baseline`` for the yearly-index comparison price, ``compare`` for a
per-month table of all methods, and ``sensitivity`` for parameter
sweeps.  Outputs are JSON documents or CSV tables.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys

import numpy as np
from scipy.stats import norm

from . import baseline as baseline_mod
from . import pricing, sensitivity
from .estimation import calibrate, load_params, params_to_dict, save_params
from .seasonal import eval_sigma2
from .simulation import save_paths_binary, save_paths_csv, simulate_paths
from .timeseries import hurst_estimate, load_series, pacf

logger = logging.getLogger(__name__)


def _add_contract_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--index", choices=["hdd", "cdd", "cat"], default="hdd")
    parser.add_argument("--t0", type=float, required=True, help="pricing day index")
    parser.add_argument("--t1", type=int, required=True, help="risk period start day")
    parser.add_argument("--t2", type=int, required=True, help="risk period end day")
    parser.add_argument("--base-temp", type=float, default=15.5)
    parser.add_argument(
        "--strike-rule",
        default="quantile:0.9",
        help="'quantile:Q', 'hist-quantile:Q' or 'fixed:VALUE'",
    )
    parser.add_argument("--cap", default="inf", help="payoff cap (or 'inf')")
    parser.add_argument("--paths", type=int, default=50_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--state",
        default=None,
        help="initial 'Ttilde,zeta' at t0; default 0 and the seasonal level",
    )


def _parse_strike_rule(rule: str) -> tuple[str, float]:
    kind, _, value = rule.partition(":")
    if kind not in ("quantile", "hist-quantile", "fixed") or not value:
        raise SystemExit(f"bad strike rule {rule!r}")
    return kind, float(value)


def _payoff_spec(args) -> pricing.PayoffSpec:
    index = pricing.IndexSpec(
        kind=args.index, t1=args.t1, t2=args.t2, base_temp=args.base_temp
    )
    cap = math.inf if args.cap == "inf" else float(args.cap)
    kind, value = _parse_strike_rule(args.strike_rule)
    if kind == "fixed":
        return pricing.PayoffSpec(index=index, strike=value, cap=cap)
    basis = "historical" if kind == "hist-quantile" else "simulated"
    return pricing.PayoffSpec(
        index=index, strike_quantile=value, strike_basis=basis, cap=cap
    )


def _initial_state(args, params) -> tuple[float, float]:
    if args.state is None:
        return 0.0, float(eval_sigma2(args.t0, params.vol_seasonal))
    t_tilde, zeta = (float(x) for x in args.state.split(","))
    return t_tilde, zeta


def _load_pricing_params(path):
    params, doc = load_params(path)
    if params.rho != 0.0:
        logger.info(
            "ignoring estimated correlation %.4f; simulation and pricing assume zero",
            params.rho,
        )
        params = params.replace(rho=0.0)
    return params, doc


def _write_json(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_calibrate(args) -> None:
    series = load_series(args.input)
    result = calibrate(series, Q=args.q_window, n_harmonics=args.harmonics_sigma2)
    save_params(
        result.params,
        args.out,
        Q=result.Q,
        origin=series.start_date.isoformat(),
    )
    print(json.dumps(params_to_dict(result.params, Q=result.Q), indent=2))
    if args.diagnostics_dir:
        _write_diagnostics(args.diagnostics_dir, series, result)


def _write_diagnostics(out_dir: str, series, result) -> None:
    import os

    os.makedirs(out_dir, exist_ok=True)
    residuals = result.trend_fit.residuals
    # Normal quantile-quantile data for the one-step innovations.
    std = residuals / residuals.std(ddof=1)
    order = np.sort(std)
    levels = (np.arange(order.size) + 0.5) / order.size
    with open(os.path.join(out_dir, "qqplot.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theoretical", "observed"])
        writer.writerows(zip(norm.ppf(levels), order))
    from .estimation import detrend

    detrended = detrend(series, result.trend_fit.trend)
    hurst = hurst_estimate(detrended)
    with open(os.path.join(out_dir, "hurst.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["q", "delta", "m"])
        writer.writerows(hurst.table)
    values, band = pacf(detrended.residuals, max_lag=20)
    with open(os.path.join(out_dir, "pacf.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lag", "pacf", "band"])
        writer.writerows((lag, v, band) for lag, v in enumerate(values, start=1))
    print(f"diagnostics written to {out_dir} (hurst H = {hurst.h:.3f})")


def _cmd_simulate(args) -> None:
    params, _ = _load_pricing_params(args.params)
    state = _initial_state(args, params)
    paths = simulate_paths(
        params,
        init=state,
        t0=args.t0,
        horizon=args.days,
        delta=args.delta,
        n_paths=args.paths,
        seed=args.seed,
    )
    if args.out.endswith(".csv"):
        save_paths_csv(paths, args.out)
    else:
        save_paths_binary(paths, args.out)
    print(f"wrote {paths.n_paths} paths x {paths.n_steps} steps to {args.out}")


def _simulate_for_contract(args, params, spec):
    state = _initial_state(args, params)
    horizon = spec.index.t2 - args.t0
    return simulate_paths(
        params,
        init=state,
        t0=args.t0,
        horizon=horizon,
        n_paths=args.paths,
        seed=args.seed,
    )


def _cmd_price(args) -> None:
    params, _ = _load_pricing_params(args.params)
    spec = _payoff_spec(args)
    state = _initial_state(args, params)
    doc: dict = {"method": args.method}

    if args.dump_charfn:
        from .charfn import temperature_charfn

        v = (np.arange(512) + 0.5) * pricing.FftGrid().dv
        phi = temperature_charfn(v, args.t0, float(spec.index.t2), state, params)
        with open(args.dump_charfn, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["u", "re", "im"])
            writer.writerows(zip(v, phi.real, phi.imag))

    if args.method == "fft":
        paths = _simulate_for_contract(args, params, spec)
        indices = pricing.compute_index(paths.temps, spec.index, paths.t0)
        strike = (
            spec.strike
            if spec.strike is not None
            else pricing.resolve_strike(spec, indices)
        )
        value = pricing.hdd_option_via_cat(spec, strike, args.t0, state, params)
        doc.update({"mean": value, "strike": strike})
    else:
        paths = _simulate_for_contract(args, params, spec)
        if args.method == "mc":
            dist = pricing.mc_price(paths, spec)
        else:
            dist = pricing.control_variate_price(paths, spec, params)
        doc.update(
            {
                "mean": dist.mean,
                "ci95": dist.ci95_halfwidth,
                "var95": dist.var95,
                "cvar95": dist.cvar95,
                "strike": dist.strike,
                "n_samples": dist.n_samples,
            }
        )
        if dist.lambda_star is not None:
            doc["lambda_star"] = dist.lambda_star
            doc["variance_ratio"] = dist.variance_ratio
    _write_json(doc, args.out)


def _cmd_baseline(args) -> None:
    series = load_series(args.input)
    spec = _payoff_spec(args)
    years = range(args.year_start, args.year_end + 1)
    result = baseline_mod.index_model_price(series, spec, years)
    _write_json(
        {
            "mean": result.price,
            "strike": result.strike,
            "gamma_shape": result.fit.shape,
            "gamma_scale": result.fit.scale,
            "recenter_year": result.sample.recenter_year,
            "years": [int(result.sample.years[0]), int(result.sample.years[-1])],
        },
        args.out,
    )


def _month_windows(year_index: int):
    """(month, t1, t2) day-index windows of a 365-day calendar year."""
    lengths = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31]
    start = year_index * 365
    for month, length in enumerate(lengths, start=1):
        yield month, start, start + length - 1
        start += length


def _cmd_compare(args) -> None:
    series = load_series(args.input)
    result = calibrate(series, Q=args.q_window)
    params = result.params.replace(rho=0.0)
    year_index = args.contract_year - series.start_date.year
    years = range(series.start_date.year, args.contract_year - 1 + 1)
    rows = []
    for month, t1, t2 in _month_windows(year_index):
        index = pricing.IndexSpec(kind="hdd", t1=t1, t2=t2, base_temp=args.base_temp)
        spec = pricing.PayoffSpec(index=index, strike_quantile=0.9)
        t0 = t1 - args.lead
        state = (0.0, float(eval_sigma2(t0, params.vol_seasonal)))
        paths = simulate_paths(
            params, init=state, t0=t0, horizon=t2 - t0, n_paths=args.paths, seed=args.seed
        )
        mc = pricing.mc_price(paths, spec)
        fft_value = pricing.hdd_option_via_cat(spec, mc.strike, t0, state, params)
        cv = pricing.control_variate_price(paths, spec, params, fft_leg=fft_value)
        hist_spec = pricing.PayoffSpec(
            index=index, strike_quantile=0.9, strike_basis="historical"
        )
        base = baseline_mod.index_model_price(series, hist_spec, years)
        rows.append(
            (month, mc.mean, mc.ci95_halfwidth, fft_value, cv.mean, base.price)
        )
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["month", "mc_mean", "mc_ci", "fft", "cv", "baseline"])
        writer.writerows(rows)
    print(f"wrote per-month comparison to {args.out}")


def _cmd_sensitivity(args) -> None:
    params, _ = _load_pricing_params(args.params)
    spec = _payoff_spec(args)
    state = _initial_state(args, params)
    values = [float(v) for v in args.values.split(",")]
    result = sensitivity.sweep(
        params,
        args.axis,
        values,
        spec,
        t0=args.t0,
        state=state,
        n_paths=args.paths,
        seed=args.seed,
    )
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["axis_value", "mean", "ci95", "var95", "cvar95"])
        for point in result.points:
            d = point.distribution
            writer.writerow([point.axis_value, d.mean, d.ci95_halfwidth, d.var95, d.cvar95])
    if args.histograms:
        for point in result.points:
            path = f"{args.histograms}.{point.axis_value:g}.csv"
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["bin_left", "bin_right", "count"])
                writer.writerows(
                    zip(
                        point.histogram_edges[:-1],
                        point.histogram_edges[1:],
                        point.histogram_counts,
                    )
                )
    print(f"wrote sweep table to {args.out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weathervol",
        description="Temperature model calibration and weather-derivative pricing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="estimate model parameters from a CSV")
    p.add_argument("input", help="CSV file with a date,tavg header")
    p.add_argument("--q-window", type=int, default=10)
    p.add_argument("--harmonics-sigma2", type=int, choices=[1, 2], default=2)
    p.add_argument("--out", required=True, help="output parameter JSON")
    p.add_argument("--diagnostics-dir", default=None)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("simulate", help="simulate joint paths")
    p.add_argument("--params", required=True)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--days", type=float, required=True)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--paths", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--state", default=None)
    p.add_argument("--out", required=True, help=".csv or binary output path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("price", help="price a degree-day contract")
    p.add_argument("--params", required=True)
    p.add_argument("--method", choices=["mc", "fft", "cv"], default="mc")
    _add_contract_args(p)
    p.add_argument("--out", default=None, help="output JSON (stdout if omitted)")
    p.add_argument("--dump-charfn", default=None, help="debug CSV of the transform")
    p.set_defaults(func=_cmd_price)

    p = sub.add_parser("baseline", help="yearly-index gamma-fit price")
    p.add_argument("input", help="CSV file with a date,tavg header")
    _add_contract_args(p)
    p.add_argument("--year-start", type=int, required=True)
    p.add_argument("--year-end", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("compare", help="per-month table: MC, FFT, CV, baseline")
    p.add_argument("input")
    p.add_argument("--contract-year", type=int, required=True)
    p.add_argument("--lead", type=int, default=30)
    p.add_argument("--q-window", type=int, default=10)
    p.add_argument("--base-temp", type=float, default=15.5)
    p.add_argument("--paths", type=int, default=50_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("sensitivity", help="sweep a parameter axis")
    p.add_argument("--params", required=True)
    p.add_argument("--axis", choices=list(sensitivity.AXES), required=True)
    p.add_argument("--values", required=True, help="comma-separated axis values")
    _add_contract_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--histograms", default=None, help="per-point histogram CSV prefix")
    p.set_defaults(func=_cmd_sensitivity)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
