"""Closed-form analysis of the infinite-server fluid queue under impulses.

Between impulses the level follows dq/dt = lam - mu*q, i.e. a single
exponential relaxation toward lam/mu.  Under periodic multiplicative
impulses the level settles into a sawtooth cycle whose extremes and time
average have exact expressions; these are the reference results the
Erlang-A analysis reduces to when capacity never binds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import DomainError, InstabilityError, ParameterError, QueueParams, SteadyBounds


@dataclass(frozen=True)
class LinearCycle:
    """Steady cycle summary: extreme levels and the within-cycle average."""

    lower: float
    upper: float
    average: float


def linear_solution(params: QueueParams, q0: float, t: float) -> float:
    """Level at time t starting from q0: lam/mu + (q0 - lam/mu) * e^(-mu*t).

    Monotone in t toward lam/mu.

    Raises:
        DomainError: if t < 0.
    """
    if t < 0:
        raise DomainError(f"time t must be >= 0, got {t}")
    xi = params.lam / params.mu
    return xi + (q0 - xi) * math.exp(-params.mu * t)


def _pre_impulse_fixed_point(params: QueueParams, m: float, delta: float) -> float:
    """Pre-impulse level V of the steady cycle: V = m*V relaxed over delta."""
    if not (math.isfinite(m) and m > 0):
        raise ParameterError(f"impulse multiplier m must be > 0, got {m!r}")
    if not (math.isfinite(delta) and delta > 0):
        raise ParameterError(f"impulse spacing delta must be > 0, got {delta!r}")
    decay = math.exp(-params.mu * delta)
    if m * decay >= 1.0:
        raise InstabilityError(
            f"unstable impulse cycle: m * e^(-mu*delta) = {m * decay} >= 1"
        )
    xi = params.lam / params.mu
    return xi * (1.0 - decay) / (1.0 - m * decay)


def linear_steady_bounds(params: QueueParams, m: float, delta: float) -> SteadyBounds:
    """Extreme levels of the steady cycle under impulses every delta.

    The pre-impulse level is V = (lam/mu) * (1 - e^(-mu*delta)) /
    (1 - m*e^(-mu*delta)) and the post-impulse level is m*V.  For m < 1
    the post-impulse value is the lower bound; for m >= 1 the roles
    swap.  Amplitude is exactly upper - lower.

    Raises:
        InstabilityError: if m * e^(-mu*delta) >= 1.
    """
    pre = _pre_impulse_fixed_point(params, m, delta)
    post = m * pre
    return SteadyBounds.from_pair(pre, post)


def linear_cycle_average(params: QueueParams, m: float, delta: float) -> float:
    """Time average of the level over one steady inter-impulse interval.

    Equals lam/mu + (L - lam/mu) * (1 - e^(-mu*delta)) / (mu*delta) where
    L is the post-impulse (cycle-start) level; this is the exact integral
    (1/delta) * int_0^delta q(s) ds of the steady cycle.
    """
    pre = _pre_impulse_fixed_point(params, m, delta)
    start = m * pre
    xi = params.lam / params.mu
    decay = math.exp(-params.mu * delta)
    return xi + (start - xi) * (1.0 - decay) / (params.mu * delta)


def linear_cycle(params: QueueParams, m: float, delta: float) -> LinearCycle:
    """Bundle bounds and average of the steady cycle."""
    bounds = linear_steady_bounds(params, m, delta)
    avg = linear_cycle_average(params, m, delta)
    return LinearCycle(lower=bounds.lower, upper=bounds.upper, average=avg)
