"""Parameter sweeps of the Monte-Carlo valuation.

Reprices a contract while one model input moves along an axis, with
common random numbers across points so that differences in the output
table are parameter-driven rather than sampling noise.  The strike is
resolved once at the base configuration and held fixed, except along
the moneyness axis where the quantile level itself is the variable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .estimation import ModelParams
from .pricing import PayoffSpec, PriceDistribution, compute_index, mc_price
from .seasonal import eval_sigma2
from .simulation import PathSet, simulate_paths

AXES = ("kappa", "eta2", "K", "lead_time", "moneyness")


@dataclass(frozen=True)
class SweepPoint:
    axis_value: float
    distribution: PriceDistribution
    histogram_counts: np.ndarray
    histogram_edges: np.ndarray


@dataclass(frozen=True)
class SweepResult:
    axis: str
    points: list[SweepPoint]


def _scaled(params: ModelParams, axis: str, multiplier: float) -> ModelParams:
    if axis == "kappa":
        return params.replace(kappa=params.kappa * multiplier)
    if axis == "eta2":
        return params.replace(eta2=params.eta2 * multiplier)
    if axis == "K":
        return params.replace(K=params.K * multiplier)
    raise ValueError(f"axis {axis!r} does not scale a parameter")


def sweep(
    params: ModelParams,
    axis: str,
    values,
    spec: PayoffSpec,
    t0: float,
    state: tuple[float, float] | None = None,
    n_paths: int = 10_000,
    seed: int = 0,
    delta: float = 1.0,
    histogram_bins: int = 50,
) -> SweepResult:
    """Price the contract at each point of a one-dimensional sweep.

    ``values`` are multipliers for the parameter axes (``kappa``,
    ``eta2``, ``K``), lead times in days for ``lead_time``, and strike
    quantile levels for ``moneyness``.  The same seed drives every
    point.  For the lead-time axis the state at the pricing date is
    held fixed while the pricing date moves with the lead.
    """
    if axis not in AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {AXES}")
    values = [float(v) for v in values]
    if not values:
        raise ValueError("empty sweep value list")
    index = spec.index
    if state is None:
        state = (0.0, float(eval_sigma2(t0, params.vol_seasonal)))

    if axis == "moneyness" and spec.strike is not None:
        raise ValueError("the moneyness axis needs a quantile-strike payoff spec")

    def run(point_params: ModelParams, point_t0: float) -> PathSet:
        horizon = index.t2 - point_t0
        return simulate_paths(
            point_params,
            init=state,
            t0=point_t0,
            horizon=horizon,
            delta=delta,
            n_paths=n_paths,
            seed=seed,
        )

    # Resolve the strike once, on the base configuration.
    base_paths = run(params, t0)
    base_indices = compute_index(base_paths.temps, index, base_paths.t0)
    if spec.strike is not None:
        strike = float(spec.strike)
    elif axis == "moneyness":
        strike = None  # varies along the axis
    else:
        strike = float(np.quantile(base_indices, spec.strike_quantile))

    points: list[SweepPoint] = []
    for value in values:
        if axis in ("kappa", "eta2", "K"):
            paths = base_paths if value == 1.0 else run(_scaled(params, axis, value), t0)
            point_strike = strike
        elif axis == "lead_time":
            paths = run(params, index.t1 - value)
            point_strike = strike
        else:  # moneyness
            paths = base_paths
            point_strike = float(np.quantile(base_indices, value))
        point_spec = replace(spec, strike=point_strike, strike_quantile=None)
        dist = mc_price(paths, point_spec)
        indices = compute_index(paths.temps, index, paths.t0)
        counts, edges = np.histogram(indices, bins=histogram_bins)
        points.append(
            SweepPoint(
                axis_value=value,
                distribution=dist,
                histogram_counts=counts,
                histogram_edges=edges,
            )
        )
    return SweepResult(axis=axis, points=points)
