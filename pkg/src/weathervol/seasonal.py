"""Deterministic trend and seasonality functions of the temperature model.

Two yearly-periodic Fourier functions are used throughout the package:

* ``s(t)``, the temperature trend and seasonality, a linear trend plus a
  truncated Fourier series,
* ``sigma2(t)``, the seasonal level the stochastic volatility reverts to,
  a nonnegative truncated Fourier series.

The time unit is the day and the angular frequency is exactly
``2*pi/365`` (leap days are removed upstream, so every year has 365 days).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

#: Base angular frequency, one cycle per 365-day year.
XI = 2.0 * np.pi / 365.0

#: Grid step (days) used to certify nonnegativity of sigma2 at construction.
_SIGMA2_CHECK_STEP = 0.25

#: Tolerance for the nonnegativity check (absorbs float rounding only).
_SIGMA2_TOL = 1e-9


@dataclass(frozen=True)
class TrendSeasonalParams:
    """Coefficients of the temperature trend/seasonality function.

    ``s(t) = alpha0 + beta0*t + sum_k alpha[k]*sin(k*XI*t)
    + sum_k beta[k]*cos(k*XI*t)``, with ``alpha0`` in degC, ``beta0`` in
    degC/day and one sine/cosine pair per harmonic.
    """

    alpha0: float
    beta0: float
    alpha: tuple[float, ...] = field(default=())
    beta: tuple[float, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        if len(self.alpha) != len(self.beta):
            raise ValueError(
                f"sine/cosine coefficient counts differ: "
                f"{len(self.alpha)} != {len(self.beta)}"
            )

    @property
    def n_harmonics(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class VolSeasonalParams:
    """Coefficients of the seasonal volatility level ``sigma2(t)``.

    ``sigma2(t) = gamma0 + sum_k gamma[k]*sin(k*XI*t)
    + sum_k delta[k]*cos(k*XI*t)`` in degC^2/day.  The function must be
    nonnegative; this is certified on a quarter-day grid over one year at
    construction time.
    """

    gamma0: float
    gamma: tuple[float, ...] = field(default=())
    delta: tuple[float, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(float(g) for g in self.gamma))
        object.__setattr__(self, "delta", tuple(float(d) for d in self.delta))
        if len(self.gamma) != len(self.delta):
            raise ValueError(
                f"sine/cosine coefficient counts differ: "
                f"{len(self.gamma)} != {len(self.delta)}"
            )
        grid = np.arange(0.0, 365.0 + _SIGMA2_CHECK_STEP, _SIGMA2_CHECK_STEP)
        low = float(np.min(eval_sigma2(grid, self)))
        if low < -_SIGMA2_TOL:
            raise ValueError(
                f"seasonal volatility is negative (min {low:.6g} on the "
                f"yearly grid); adjust gamma0 or the harmonic coefficients"
            )

    @property
    def n_harmonics(self) -> int:
        return len(self.gamma)


def _harmonics(t, sines, cosines):
    """Sum of ``sin``/``cos`` harmonics at times ``t`` (vectorized)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for k, (a, b) in enumerate(zip(sines, cosines), start=1):
        out = out + a * np.sin(k * XI * t) + b * np.cos(k * XI * t)
    return out


def eval_s(t, p: TrendSeasonalParams):
    """Trend/seasonality ``s(t)`` in degC; ``t`` may be scalar or array.

    Linear-plus-periodic: ``eval_s(t + 365) - eval_s(t) == 365 * beta0``.
    """
    t = np.asarray(t, dtype=float)
    out = p.alpha0 + p.beta0 * t + _harmonics(t, p.alpha, p.beta)
    return out if out.ndim else float(out)


def eval_sigma2(t, p: VolSeasonalParams):
    """Seasonal volatility level ``sigma2(t)``; 365-day periodic."""
    t = np.asarray(t, dtype=float)
    out = p.gamma0 + _harmonics(t, p.gamma, p.delta)
    return out if out.ndim else float(out)
