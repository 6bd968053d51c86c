"""Characteristic functions of the affine temperature model.

With zero correlation the model is affine, so the conditional
characteristic function of (detrended temperature, volatility, running
integral of the detrended temperature) is an exponential of three
coefficient functions: a fully explicit linear one, a scalar Riccati
solution advanced here by an analytic step with the seasonal
coefficient frozen at each sub-interval midpoint, and an integral
accumulated alongside by the trapezoidal rule.

The Riccati step is algebraically identical to the textbook closed form
for the constant-coefficient equation, rearranged so that nothing
divides by the vol-of-vol; the same code therefore covers the
deterministic-volatility limit without branching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimation import ModelParams
from .seasonal import eval_s, eval_sigma2

_RE_A2_TOL = 1e-12


@dataclass(frozen=True)
class FourierArgs:
    """Transform arguments: real on the temperature and its integral,
    complex with nonnegative imaginary part on the volatility."""

    u1: float
    u2: complex
    u3: float

    def __post_init__(self):
        if complex(self.u2).imag < 0.0:
            raise ValueError("u2 must have nonnegative imaginary part")


@dataclass(frozen=True)
class CharFnSolution:
    """Discretized transform coefficients over ``[t, t_prime]``.

    ``a2`` is sampled on the time-to-maturity grid ``grid`` (step
    ``delta_riccati``), ``a1`` is the explicit linear coefficient at
    maturity and ``a0`` the accumulated seasonal integral.
    """

    t: float
    t_prime: float
    grid: np.ndarray
    a2: np.ndarray
    a1: complex
    a0: complex
    delta_riccati: float

    @property
    def a2_end(self) -> complex:
        return complex(self.a2[-1])


def _decay_coeff(u1, u3, kappa: float, tau):
    """Drift coefficient ``u1*e^{-kappa tau} + u3*(1-e^{-kappa tau})/kappa``."""
    tau = np.asarray(tau, dtype=float)
    e = np.exp(-kappa * tau)
    if kappa == 0.0:
        ramp = tau
    else:
        ramp = (1.0 - e) / kappa
    return u1 * e + u3 * ramp


def _riccati_step(a, c, K: float, eta2: float, delta: float):
    """Advance ``a' = -K a - c^2/2 + eta2 a^2 / 2`` by ``delta``, ``c`` frozen.

    Stable rearrangement of the constant-coefficient closed form; exact
    for any ``eta2 >= 0`` including zero.  ``c`` is real so the
    discriminant ``K^2 + eta2 c^2`` is real nonnegative and the square
    root is branch-unambiguous.
    """
    d = K * K + eta2 * c * c
    s = np.sqrt(d)
    e = np.exp(-s * delta)
    num = c * c * (1.0 - e) - a * ((K + s) * e - (K - s))
    den = K * (e - 1.0) - s * (e + 1.0) - eta2 * a * (e - 1.0)
    return num / den


def _solve(u1, u2, u3, t: float, t_prime: float, params: ModelParams, delta: float,
           keep_grid: bool = False):
    """March the Riccati coefficient and accumulate the seasonal integral.

    ``u1``, ``u2``, ``u3`` may be scalars or equal-length arrays (one
    transform argument per entry).  Returns ``(a2_end, a1, a0)`` plus
    the full ``a2`` grid when ``keep_grid`` is set.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if not t_prime > t:
        raise ValueError("t_prime must exceed t")
    span = t_prime - t
    n = int(round(span / delta))
    if n < 1 or abs(n * delta - span) > 1e-9 * max(1.0, span):
        raise ValueError("delta must divide t_prime - t")
    u1 = np.asarray(u1, dtype=complex)
    u2 = np.asarray(u2, dtype=complex)
    u3 = np.asarray(u3, dtype=complex)
    shape = np.broadcast_shapes(u1.shape, u2.shape, u3.shape)
    K = params.K
    eta2 = params.eta2

    a2 = np.broadcast_to(1j * u2, shape).astype(complex)
    a0 = np.zeros(shape, dtype=complex)
    sigma_tail = eval_sigma2(t_prime, params.vol_seasonal)  # sigma2 at tau = 0
    grid = np.empty((n + 1,) + shape, dtype=complex) if keep_grid else None
    if keep_grid:
        grid[0] = a2
    # u1/u3 enter only through the real frozen coefficient at midpoints.
    u1r = u1.real
    u3r = u3.real
    for k in range(n):
        tau_mid = (k + 0.5) * delta
        c = _decay_coeff(u1r, u3r, params.kappa, tau_mid)
        a2_next = _riccati_step(a2, c, K, eta2, delta)
        # trapezoid of sigma2(s) a2(t'-s): tau = (k+1)*delta pairs with
        # calendar time t' - tau.
        sigma_new = eval_sigma2(t_prime - (k + 1) * delta, params.vol_seasonal)
        a0 += 0.5 * delta * K * (sigma_tail * a2 + sigma_new * a2_next)
        sigma_tail = sigma_new
        a2 = a2_next
        if keep_grid:
            grid[k + 1] = a2
    a1 = 1j * _decay_coeff(u1r, u3r, params.kappa, span)
    if np.any(a2.real > _RE_A2_TOL):
        raise FloatingPointError("Riccati coefficient developed a positive real part")
    return a2, a1, a0, grid


def riccati_solve(
    args: FourierArgs, t: float, t_prime: float, params: ModelParams, delta: float = 0.1
) -> CharFnSolution:
    """Solve the transform coefficients for one argument triple."""
    a2_end, a1, a0, grid = _solve(
        args.u1, complex(args.u2), args.u3, t, t_prime, params, delta, keep_grid=True
    )
    n = grid.shape[0] - 1
    return CharFnSolution(
        t=float(t),
        t_prime=float(t_prime),
        grid=np.arange(n + 1) * delta,
        a2=grid.reshape(n + 1),
        a1=complex(a1),
        a0=complex(a0),
        delta_riccati=float(delta),
    )


def charfn_state(sol: CharFnSolution, t_tilde: float, zeta: float) -> complex:
    """Evaluate the transform at a state (detrended temperature, volatility)."""
    if zeta < 0.0:
        raise ValueError("zeta must be nonnegative")
    return complex(np.exp(sol.a0 + sol.a1 * t_tilde + sol.a2_end * zeta))


def temperature_charfn(
    v, t0: float, t_prime: float, state: tuple[float, float], params: ModelParams,
    delta: float = 0.1,
):
    """Conditional characteristic function of the detrended temperature.

    ``v`` may be an array; entries equal to zero return exactly one.
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    t_tilde, zeta = state
    a2, a1, a0, _ = _solve(v, np.zeros_like(v), np.zeros_like(v), t0, t_prime, params, delta)
    return np.exp(a0 + a1 * t_tilde + a2 * zeta)


def cat_charfn(
    v,
    t0: float,
    t1: float,
    t2: float,
    state: tuple[float, float],
    params: ModelParams,
    delta: float = 0.1,
    include_seasonal: bool = True,
):
    """Characteristic function of the cumulative average temperature.

    The seasonal part ``sum s(t)`` over the integer days of ``[t1, t2]``
    is deterministic and enters as a phase; the stochastic part uses the
    integral of the detrended temperature over ``[t1, t2+1]`` as a
    proxy for the daily sum and is evaluated by applying the affine
    transform twice: once over the risk period resolving the integral
    argument, and once over the lead period ``[t0, t1]`` resolving the
    resulting state arguments.
    """
    if not (t0 <= t1 and t1 < t2):
        raise ValueError("need t0 <= t1 < t2")
    v = np.atleast_1d(np.asarray(v, dtype=float))
    t_tilde, zeta = state
    zeros = np.zeros_like(v)
    a2_risk, a1_risk, a0_risk, _ = _solve(zeros, zeros, v, t1, t2 + 1.0, params, delta)
    out = np.empty(v.shape, dtype=complex)
    if t0 == t1:
        out = np.exp(a0_risk + a1_risk * t_tilde + a2_risk * zeta)
    else:
        # Second pass: the transform of the lead-period state with the
        # risk-period coefficients as arguments.  a1_risk is purely
        # imaginary and a2_risk has nonpositive real part, so the new u2
        # lies in the admissible half-plane.
        u1_lead = a1_risk.imag
        u2_lead = -1j * a2_risk
        if np.any(u2_lead.imag < -1e-12):
            raise FloatingPointError("second-stage volatility argument left its domain")
        u2_lead = u2_lead.real + 1j * np.maximum(u2_lead.imag, 0.0)
        a2_lead, a1_lead, a0_lead, _ = _solve(
            u1_lead, u2_lead, zeros, t0, t1, params, delta
        )
        out = np.exp(a0_risk + a0_lead + a1_lead * t_tilde + a2_lead * zeta)
    if include_seasonal:
        days = np.arange(math.floor(t1), math.floor(t2) + 1, dtype=float)
        phase = float(np.sum(eval_s(days, params.trend)))
        out = out * np.exp(1j * v * phase)
    return out


def seasonal_cat_level(t1: float, t2: float, params: ModelParams) -> float:
    """Sum of the seasonal function over the integer days of ``[t1, t2]``."""
    days = np.arange(math.floor(t1), math.floor(t2) + 1, dtype=float)
    return float(np.sum(eval_s(days, params.trend)))
