"""Piecewise closed-form analysis of the Erlang-A fluid queue.

Between impulses the level follows

    dq/dt = lam - mu * min(q, c) - theta * max(q - c, 0),

a continuous drift with a kink at capacity: above c the level relaxes at
rate theta toward xi1, below at rate mu toward xi2.  A trajectory is a
chain of at most two exponential segments joined where it hits c, so
levels, hitting times, and integrals all have exact expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    DomainError,
    InstabilityError,
    ImpulseMode,
    ParameterError,
    QueueParams,
    SteadyBounds,
    fixed_points,
)


@dataclass(frozen=True)
class ErlangSegment:
    """One exponential piece of a trajectory.

    On [start, end] the level is target + coeff * e^(-rate * (t - start)).
    ``rate`` is theta for segments above capacity and mu at or below it.
    """

    start: float
    end: float
    target: float
    rate: float
    coeff: float

    def value(self, t: float) -> float:
        return self.target + self.coeff * math.exp(-self.rate * (t - self.start))

    def integral(self, a: float, b: float) -> float:
        """Exact integral of the level over [a, b] within the segment."""
        ea = math.exp(-self.rate * (a - self.start))
        eb = math.exp(-self.rate * (b - self.start))
        return self.target * (b - a) + self.coeff * (ea - eb) / self.rate


def active_branch(params: QueueParams, q: float) -> tuple[float, float]:
    """Drift branch (target, rate) governing the level q.

    At q = c the branch is chosen by the drift sign there: overloaded
    systems move up into the theta regime, others stay in the mu regime.

    Raises:
        ParameterError: for levels above capacity with theta = 0, where
            the relaxation-rate description breaks down.
    """
    above = q > params.c or (q == params.c and params.overloaded)
    if above:
        if params.theta <= 0:
            raise ParameterError(
                "theta must be > 0 for trajectories at or above capacity"
            )
        fp = fixed_points(params)
        return fp.xi1, params.theta
    return params.lam / params.mu, params.mu


def _level_hit_time(target: float, rate: float, q: float, level: float) -> float | None:
    """Time for target + (q - target) e^(-rate t) to reach ``level``, else None.

    Evaluated in log space; the ratio is checked for positivity first so
    unreachable levels return None instead of a NaN.
    """
    if q == level:
        return 0.0
    num = q - target
    den = level - target
    if den == 0.0 or num == 0.0:
        return None  # asymptotic approach or resting exactly at the target
    ratio = num / den
    if ratio < 1.0:
        return None
    return math.log(ratio) / rate


def erlang_segments(
    params: QueueParams, q0: float, horizon: float, t0: float = 0.0
) -> list[ErlangSegment]:
    """Exponential segments of the trajectory from q0 over [t0, t0 + horizon].

    The trajectory crosses capacity at most once, so the result has one
    or two segments; the join is placed exactly at the hitting time of c.
    """
    if not (math.isfinite(q0) and q0 >= 0):
        raise DomainError(f"initial level q0 must be >= 0 and finite, got {q0!r}")
    if horizon < 0:
        raise DomainError(f"horizon must be >= 0, got {horizon}")
    segments: list[ErlangSegment] = []
    t, q = t0, q0
    end_time = t0 + horizon
    while True:
        target, rate = active_branch(params, q)
        hit = _level_hit_time(target, rate, q, params.c)
        if hit is not None and hit > 0 and t + hit < end_time:
            segments.append(ErlangSegment(t, t + hit, target, rate, q - target))
            t, q = t + hit, params.c
            continue
        segments.append(ErlangSegment(t, end_time, target, rate, q - target))
        return segments


def erlang_solution(params: QueueParams, q0: float, t: float) -> float:
    """Level at time t starting from q0, following the piecewise drift.

    Continuous in t, monotone toward the active fixed point, with the
    branch switch applied at the capacity-hitting time.

    Raises:
        DomainError: if t < 0 or q0 < 0.
    """
    if t < 0:
        raise DomainError(f"time t must be >= 0, got {t}")
    segments = erlang_segments(params, q0, t)
    return segments[-1].value(t)


def capacity_crossing_time(params: QueueParams, q0: float) -> float | None:
    """Time at which the trajectory from q0 hits capacity c, or None.

    Returns 0 when q0 = c.  Returns None when the trajectory stays on one
    side forever: starting above c with lam >= mu*c, starting at or below
    c with lam <= mu*c, or the asymptotic approach at lam = mu*c.
    """
    if not (math.isfinite(q0) and q0 >= 0):
        raise DomainError(f"initial level q0 must be >= 0 and finite, got {q0!r}")
    if q0 == params.c:
        return 0.0
    target, rate = active_branch(params, q0)
    return _level_hit_time(target, rate, q0, params.c)


def _steady_cycle_start(
    params: QueueParams, m: float, delta: float, rate: float, target: float, mode: ImpulseMode
) -> tuple[float, float]:
    """(pre, post) impulse levels of the steady cycle relaxing at ``rate``."""
    decay = math.exp(-rate * delta)
    if m * decay >= 1.0:
        raise InstabilityError(
            f"unstable impulse cycle: m * e^(-rate*delta) = {m * decay} >= 1"
        )
    if mode is ImpulseMode.FULL_STATE:
        pre = target * (1.0 - decay) / (1.0 - m * decay)
        return pre, m * pre
    # Excess-only impulse: post = c + m*(pre - c) for cycles above capacity.
    pre = (target * (1.0 - decay) - params.c * (m - 1.0) * decay) / (1.0 - m * decay)
    post = min(pre, params.c) + m * max(pre - params.c, 0.0)
    return pre, post


def erlang_steady_bounds(
    params: QueueParams, m: float, delta: float, mode: ImpulseMode = ImpulseMode.FULL_STATE
) -> SteadyBounds:
    """Extreme levels of the steady cycle under impulses every delta.

    The closed forms assume the whole cycle stays in a single drift
    regime: below capacity for underloaded full-state impulses (rate mu
    toward xi2), above capacity otherwise (rate theta toward xi1).  When
    the computed cycle violates that assumption the bounds are returned
    with ``regime_valid=False`` and a numerical integration should be
    used instead.

    Raises:
        ParameterError: if m is outside (0, 1] — growth impulses have no
            single-regime steady cycle here — or theta = 0 is needed.
        InstabilityError: if m * e^(-rate*delta) >= 1 for the active rate.
    """
    if not (math.isfinite(m) and 0 < m <= 1):
        raise ParameterError(f"impulse multiplier m must be in (0, 1], got {m!r}")
    if not (math.isfinite(delta) and delta > 0):
        raise ParameterError(f"impulse spacing delta must be > 0, got {delta!r}")
    # lam = mu*c ties to the above-capacity form, whose validity flag then
    # reports whether a single-regime cycle actually exists.
    below = mode is ImpulseMode.FULL_STATE and params.lam < params.mu * params.c
    if below:
        target, rate = params.lam / params.mu, params.mu
    else:
        if params.theta <= 0:
            raise ParameterError("theta must be > 0 for cycles above capacity")
        target, rate = fixed_points(params).xi1, params.theta
    pre, post = _steady_cycle_start(params, m, delta, rate, target, mode)
    if below:
        valid = max(pre, post) <= params.c
    elif mode is ImpulseMode.FULL_STATE:
        valid = min(pre, post) >= params.c
    else:
        valid = pre > params.c
    return SteadyBounds.from_pair(pre, post, regime_valid=valid)


def erlang_cycle_average(
    params: QueueParams, m: float, delta: float, mode: ImpulseMode = ImpulseMode.FULL_STATE
) -> float:
    """Time average over one steady inter-impulse interval.

    Exact while the steady cycle stays in one drift regime; raises when
    it does not (the bounds carry regime_valid=False in that case).

    Raises:
        DomainError: if the steady cycle crosses capacity, so no
            single-regime closed form applies.
    """
    bounds = erlang_steady_bounds(params, m, delta, mode)
    if not bounds.regime_valid:
        raise DomainError(
            "steady cycle crosses capacity; use a numerical trajectory average"
        )
    if mode is ImpulseMode.FULL_STATE and params.lam < params.mu * params.c:
        target, rate = params.lam / params.mu, params.mu
    else:
        target, rate = fixed_points(params).xi1, params.theta
    _, start = _steady_cycle_start(params, m, delta, rate, target, mode)
    decay = math.exp(-rate * delta)
    return target + (start - target) * (1.0 - decay) / (rate * delta)
