"""Joint simulation of temperature and its stochastic volatility.

One step advances the pair ``(T, zeta)`` over ``delta`` days:

* the volatility moves by a second-order weak scheme for the
  square-root process, with the seasonal level frozen at the midpoint
  of the step;
* the detrended temperature then moves by its exact autoregression,
  with shock variance using the trapezoid of the volatility at the two
  endpoints.

Randomness comes from a counter-based generator (Philox) keyed on the
seed, with a fixed draw layout, so a given ``(params, seed, shape)``
always yields bit-identical paths regardless of how the work is
scheduled.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .estimation import ModelParams
from .seasonal import eval_s, eval_sigma2

_MAGIC = b"WVPATHS1"


@dataclass(frozen=True)
class PathSet:
    """Simulated joint paths on a regular time grid.

    ``temps`` and ``vols`` have shape ``(n_paths, n_steps + 1)``; column
    ``i`` is day ``t0 + i*delta``.  ``vols`` is nonnegative everywhere.
    """

    t0: float
    delta: float
    n_steps: int
    n_paths: int
    temps: np.ndarray
    vols: np.ndarray
    seed: int

    def __post_init__(self):
        shape = (self.n_paths, self.n_steps + 1)
        if self.temps.shape != shape or self.vols.shape != shape:
            raise ValueError(f"path arrays must have shape {shape}")
        if np.any(self.vols < 0.0):
            raise ValueError("volatility paths must be nonnegative")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.delta * np.arange(self.n_steps + 1)


def _phi_k(K: float, t: float) -> float:
    return (1.0 - math.exp(-K * t)) / K


def cir_step(zeta, t_mid: float, delta: float, params: ModelParams, gaussian):
    """One volatility step of length ``delta`` from state ``zeta``.

    ``gaussian`` supplies the standard normal draw(s); ``zeta`` and
    ``gaussian`` broadcast together.  When the frozen drift level
    satisfies ``K*sigma2 >= eta2/4`` the step is the closed-form
    second-order scheme; otherwise it falls back to a discrete
    three-point law matching the exact first two conditional moments of
    the frozen-coefficient process, mapped through the same normal draw.
    Output is nonnegative in both branches.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    zeta = np.asarray(zeta, dtype=float)
    gaussian = np.asarray(gaussian, dtype=float)
    K = params.K
    eta2 = params.eta2
    level = eval_sigma2(t_mid, params.vol_seasonal)
    drift = K * level
    if drift >= eta2 / 4.0:
        shift = (drift - eta2 / 4.0) * _phi_k(K, delta / 2.0)
        e_half = math.exp(-K * delta / 2.0)
        root = np.sqrt(shift + zeta * e_half)
        out = e_half * (root + 0.5 * math.sqrt(eta2 * delta) * gaussian) ** 2 + shift
        return out
    return _three_point_step(zeta, level, delta, K, eta2, gaussian)


def _three_point_step(zeta, level, delta, K, eta2, gaussian):
    """Moment-matched discrete step for the degenerate drift regime.

    The law is supported on ``{0, m, m + 2v/m}`` with probabilities
    ``{v/(m^2+2v), 1/2, m^2/(2(m^2+2v))}`` where ``m`` and ``v`` are the
    exact conditional mean and variance of the frozen-coefficient
    square-root step; both moments are matched exactly and the support
    is nonnegative for any state.
    """
    e = math.exp(-K * delta)
    m = zeta * e + level * (1.0 - e)
    v = zeta * (eta2 / K) * (e - e * e) + level * (eta2 / (2.0 * K)) * (1.0 - e) ** 2
    u = ndtr(gaussian)  # uniform in (0, 1), monotone in the draw
    m2 = m * m
    with np.errstate(divide="ignore", invalid="ignore"):
        p_zero = np.where(m2 + 2.0 * v > 0.0, v / (m2 + 2.0 * v), 0.0)
        high = np.where(m > 0.0, m + 2.0 * v / np.where(m > 0.0, m, 1.0), 0.0)
    out = np.where(u < p_zero, 0.0, np.where(u < p_zero + 0.5, m, high))
    return np.maximum(out, 0.0)


def simulate_paths(
    params: ModelParams,
    init: tuple[float, float],
    t0: float,
    horizon: float,
    delta: float = 1.0,
    n_paths: int = 1,
    seed: int = 0,
    dynamics: str = "sv",
) -> PathSet:
    """Simulate ``n_paths`` joint paths over ``horizon`` days from ``t0``.

    ``init`` is the detrended temperature and volatility at ``t0``.
    ``dynamics="sv"`` is the stochastic-volatility model; ``"ou"``
    replaces the volatility by its deterministic seasonal level, which
    is the Gaussian benchmark the model extends.  Requires
    ``params.rho == 0``; a correlated simulation scheme is deliberately
    unsupported.
    """
    if params.rho != 0.0:
        raise ValueError(
            "simulation requires rho == 0; zero out the estimated correlation first"
        )
    t_init, zeta_init = float(init[0]), float(init[1])
    if zeta_init < 0.0:
        raise ValueError("initial volatility must be nonnegative")
    if dynamics not in ("sv", "ou"):
        raise ValueError(f"unknown dynamics {dynamics!r}")
    n_steps = int(round(horizon / delta))
    if n_steps < 1 or abs(n_steps * delta - horizon) > 1e-9:
        raise ValueError("horizon must be a positive multiple of delta")
    rng = np.random.Generator(np.random.Philox(seed))
    draws = rng.standard_normal((n_steps, 2, n_paths))

    kappa = params.kappa
    e_kappa = math.exp(-kappa * delta)
    shock_scale = (1.0 - math.exp(-2.0 * kappa * delta)) / (2.0 * kappa)

    times = t0 + delta * np.arange(n_steps + 1)
    vols = np.empty((n_paths, n_steps + 1))
    tilde = np.empty((n_paths, n_steps + 1))
    tilde[:, 0] = t_init
    if dynamics == "ou":
        vols[:] = eval_sigma2(times, params.vol_seasonal)[None, :]
    else:
        vols[:, 0] = zeta_init
    for i in range(n_steps):
        if dynamics == "sv":
            vols[:, i + 1] = cir_step(
                vols[:, i], t0 + (i + 0.5) * delta, delta, params, draws[i, 0]
            )
        var = shock_scale * 0.5 * (vols[:, i] + vols[:, i + 1])
        tilde[:, i + 1] = e_kappa * tilde[:, i] + np.sqrt(var) * draws[i, 1]
    temps = tilde + eval_s(times, params.trend)[None, :]
    return PathSet(
        t0=float(t0),
        delta=float(delta),
        n_steps=n_steps,
        n_paths=int(n_paths),
        temps=temps,
        vols=vols,
        seed=int(seed),
    )


# ---------------------------------------------------------------------------
# Path file formats
# ---------------------------------------------------------------------------


def save_paths_binary(paths: PathSet, path) -> None:
    """Write paths to the package's little-endian binary format.

    Layout: magic ``WVPATHS1``; header ``<qqddq`` = (n_paths, n_steps,
    t0, delta, seed); then the temperature block and the volatility
    block, each ``n_paths * (n_steps+1)`` float64 little-endian, row
    major (path by path).
    """
    header = struct.pack(
        "<qqddq", paths.n_paths, paths.n_steps, paths.t0, paths.delta, paths.seed
    )
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(header)
        fh.write(np.ascontiguousarray(paths.temps, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(paths.vols, dtype="<f8").tobytes())


def load_paths_binary(path) -> PathSet:
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ValueError(f"{path}: not a path file (bad magic {magic!r})")
        n_paths, n_steps, t0, delta, seed = struct.unpack(
            "<qqddq", fh.read(struct.calcsize("<qqddq"))
        )
        count = n_paths * (n_steps + 1)
        temps = np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(n_paths, n_steps + 1)
        vols = np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(n_paths, n_steps + 1)
    return PathSet(
        t0=t0,
        delta=delta,
        n_steps=n_steps,
        n_paths=n_paths,
        temps=temps.copy(),
        vols=vols.copy(),
        seed=seed,
    )


def save_paths_csv(paths: PathSet, path) -> None:
    """Write paths as CSV: one row per (path, day) with temp and vol."""
    times = paths.times
    with open(path, "w") as fh:
        fh.write("path,t,temp,vol\n")
        for p in range(paths.n_paths):
            for i, t in enumerate(times):
                fh.write(f"{p},{t:.6g},{paths.temps[p, i]!r},{paths.vols[p, i]!r}\n")
