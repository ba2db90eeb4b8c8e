"""Reduced vortex-core orbit dynamics.

The orbit obeys ``ds/dt = alpha*s + beta*s**(n+1)``, a Bernoulli equation
with the closed-form solution

    s(t) = s0 / ((1 + s0**n*beta/alpha) * exp(-n*alpha*t) - s0**n*beta/alpha) ** (1/n)

The radicand of the denominator is evaluated in an overflow-free
rearrangement (``expm1``/``log1p``), and its root is taken as
``exp(log(R)/n)``.  A non-positive radicand means the orbit diverged before
the requested time and is reported as :class:`BlowUpError`.

A fixed-step RK4 integrator is kept alongside as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

#: Relative size of alpha (against ``|beta| * s0**n``) below which the
#: alpha -> 0 limit formula replaces the general one.
EPS_ALPHA_REL = 1e-3
#: Absolute floor of the alpha threshold, 1/s.
EPS_ALPHA_FLOOR = 1e-30
#: Bound on ``n*|alpha|*dt`` inside the limit branch; keeps the two branches
#: within ~1e-14 of each other at the switch-over point.
EPS_ALPHA_HORIZON = 1e-14
#: RK4 aborts and reports divergence once s exceeds this.
RK4_DIVERGENCE_GUARD = 1e6


class InvalidParameterError(ValueError):
    """Non-finite or out-of-domain dynamics input."""


class BlowUpError(ArithmeticError):
    """The orbit diverges in finite time before the requested horizon.

    Attributes:
        t_star: blow-up time measured from the start of the evolution, s.
        index: offending grid index when raised from :func:`trace`.
    """

    def __init__(self, t_star: float, index: int | None = None):
        self.t_star = t_star
        self.index = index
        where = "" if index is None else f" at grid index {index}"
        super().__init__(f"orbit blows up at t*={t_star:.17g} s{where}")


@dataclass(frozen=True)
class ThieleParams:
    """Growth rate ``alpha`` (1/s), nonlinear rate ``beta`` (1/s), exponent ``n``."""

    alpha: float
    beta: float
    n: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise InvalidParameterError(
                f"alpha and beta must be finite, got alpha={self.alpha}, beta={self.beta}"
            )
        if not (math.isfinite(self.n) and self.n > 0):
            raise InvalidParameterError(f"n must be finite and > 0, got {self.n}")


# ---------------------------------------------------------------------------
# compiled kernels


@numba.njit(cache=True, nogil=True)
def _closed_form(alpha, beta, n, s0, dt):
    """Return ``(s, t_star)``; ``s`` is NaN on blow-up, ``t_star`` NaN otherwise."""
    if s0 == 0.0:
        return 0.0, math.nan
    if dt == 0.0:
        return s0, math.nan
    b = beta * s0**n
    eps = max(EPS_ALPHA_FLOOR, min(EPS_ALPHA_REL * abs(b), EPS_ALPHA_HORIZON / (n * dt)))
    if abs(alpha) < eps:
        q = 1.0 - n * b * dt
        if q <= 0.0:
            return math.nan, 1.0 / (n * b)
        return s0 * math.exp(-math.log(q) / n), math.nan
    x = n * alpha * dt
    ratio = b / alpha
    if x >= 0.0:
        radicand = math.exp(-x) + ratio * math.expm1(-x)
        if radicand > 0.0:
            return s0 * math.exp(-math.log(radicand) / n), math.nan
        if b > 0.0:
            return math.nan, math.log1p(alpha / b) / (n * alpha)
        # exp(-x) underflowed on a bounded-below radicand: go through logs
        g = -ratio * math.expm1(x) if ratio != 0.0 else 0.0
        return s0 * math.exp((x - math.log1p(g)) / n), math.nan
    # decaying exponential: factor exp(-x) out of the radicand to avoid overflow
    g = -ratio * math.expm1(x)
    if g <= -1.0:
        return math.nan, math.log1p(alpha / b) / (n * alpha)
    return s0 * math.exp((x - math.log1p(g)) / n), math.nan


@numba.njit(cache=True, nogil=True)
def _chain_closed_form(alpha, beta, n, s0, dt):
    """Chain ``_closed_form`` over parameter arrays, carrying s between entries.

    Returns the array of end-of-interval states and the index of the first
    blown-up interval (-1 if none) with its blow-up time.
    """
    out = np.empty(alpha.shape[0])
    s = s0
    for k in range(alpha.shape[0]):
        s, t_star = _closed_form(alpha[k], beta[k], n[k], s, dt)
        if math.isnan(s):
            return out, k, t_star
        out[k] = s
    return out, -1, math.nan


@numba.njit(cache=True, nogil=True)
def _power(s, n, n_int):
    if n_int > 0:
        p = s
        for _ in range(n_int - 1):
            p *= s
        return p
    return s**n


@numba.njit(cache=True, nogil=True)
def _rk4(alpha, beta, n, s0, dt, step):
    """Fixed-step RK4; returns ``(s, t_reached, diverged)``."""
    n_steps = max(1, int(math.ceil(dt / step - 1e-9)))
    h = dt / n_steps
    n_int = int(n) if n == math.floor(n) and n <= 16 else 0
    s = s0
    for i in range(n_steps):
        k1 = s * (alpha + beta * _power(s, n, n_int))
        y = s + 0.5 * h * k1
        k2 = y * (alpha + beta * _power(y, n, n_int))
        y = s + 0.5 * h * k2
        k3 = y * (alpha + beta * _power(y, n, n_int))
        y = s + h * k3
        k4 = y * (alpha + beta * _power(y, n, n_int))
        s = s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not (s <= RK4_DIVERGENCE_GUARD):
            return s, (i + 1) * h, True
    return s, dt, False


@numba.njit(cache=True, nogil=True)
def _rk4_many(alpha, beta, n, s0, dt, step_divisor):
    out = np.empty(alpha.shape[0])
    for k in range(alpha.shape[0]):
        s, _, diverged = _rk4(alpha[k], beta[k], n[k], s0[k], dt[k], dt[k] / step_divisor)
        out[k] = math.inf if diverged else s
    return out


# ---------------------------------------------------------------------------
# public surface


def _check_state(s0: float, dt: float) -> None:
    if not (math.isfinite(s0) and s0 >= 0):
        raise InvalidParameterError(f"s0 must be finite and >= 0, got {s0}")
    if not (math.isfinite(dt) and dt >= 0):
        raise InvalidParameterError(f"dt must be finite and >= 0, got {dt}")


def evolve_closed_form(p: ThieleParams, s0: float, dt: float) -> float:
    """Evolve the orbit from ``s0`` over ``dt`` seconds in closed form.

    Raises:
        BlowUpError: the radicand reaches zero within ``dt``.
        InvalidParameterError: ``s0`` or ``dt`` negative or non-finite.
    """
    _check_state(s0, dt)
    s, t_star = _closed_form(float(p.alpha), float(p.beta), float(p.n), float(s0), float(dt))
    if math.isnan(s):
        raise BlowUpError(t_star)
    return s


def blow_up_time(p: ThieleParams, s0: float) -> float | None:
    """Finite divergence time from ``s0``, or None if the orbit stays bounded."""
    _check_state(s0, 0.0)
    b = p.beta * s0**p.n
    if s0 == 0 or b <= 0:
        return None
    if p.alpha == 0:
        return 1.0 / (p.n * b)
    if p.alpha < 0 and b <= -p.alpha:
        return None
    return math.log1p(p.alpha / b) / (p.n * p.alpha)


def steady_state(p: ThieleParams) -> float | None:
    """Attracting orbit radius, 0 for a decaying orbit, None if unbounded.

    ``alpha == 0`` with ``beta < 0`` decays algebraically and returns 0.
    """
    if p.alpha > 0:
        if p.beta < 0:
            return math.exp(math.log(-p.alpha / p.beta) / p.n)
        return None
    if p.alpha == 0 and p.beta > 0:
        return None
    return 0.0


def evolve_rk4(p: ThieleParams, s0: float, dt: float, step: float) -> float:
    """Integrate the orbit ODE with classical fixed-step RK4.

    The step is shrunk slightly so that an integer number of steps lands on
    ``dt`` exactly.  Divergence past ``RK4_DIVERGENCE_GUARD`` raises
    :class:`BlowUpError` carrying the time at which the guard tripped.
    """
    _check_state(s0, dt)
    if not (math.isfinite(step) and 0 < step <= dt):
        raise InvalidParameterError(f"need 0 < step <= dt, got step={step}, dt={dt}")
    s, t_reached, diverged = _rk4(
        float(p.alpha), float(p.beta), float(p.n), float(s0), float(dt), float(step)
    )
    if diverged:
        raise BlowUpError(t_reached)
    return s


def rk4_grid(alpha, beta, n, s0, dt, step_divisor: float = 1e6) -> np.ndarray:
    """Vectorised RK4 end states with ``step = dt/step_divisor`` per entry.

    Diverged entries come back as ``inf``.  Used for oracle sweeps over large
    parameter grids.
    """
    arrays = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (alpha, beta, n, s0, dt)))
    flat = [np.ascontiguousarray(a.ravel()) for a in arrays]
    return _rk4_many(*flat, float(step_divisor)).reshape(arrays[0].shape)


def trace(p: ThieleParams, s0: float, t_grid: Sequence[float]) -> list[float]:
    """Closed-form orbit at each time of a non-decreasing grid (t=0 is ``s0``)."""
    t = [float(v) for v in t_grid]
    if t and t[0] < 0:
        raise InvalidParameterError("time grid must start at t >= 0")
    if any(b < a for a, b in zip(t, t[1:])):
        raise InvalidParameterError("time grid must be non-decreasing")
    out = []
    for i, ti in enumerate(t):
        try:
            out.append(evolve_closed_form(p, s0, ti))
        except BlowUpError as exc:
            raise BlowUpError(exc.t_star, index=i) from None
    return out
