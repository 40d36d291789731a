"""Shared domain types for impulsively controlled fluid queues.

A fluid queue is described by four rates (arrival, service, abandonment,
capacity); an impulse instantaneously rescales the queue level by a
multiplier ``m``.  Everything in this module is an immutable value or a
pure function, safe to use concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class ParameterError(ValueError):
    """A queue or impulse parameter violates its invariants."""


class UndefinedFixedPointError(ParameterError):
    """The overloaded fixed point is requested but undefined (theta = 0)."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class InstabilityError(ValueError):
    """The periodic impulse map admits no stable cycle (m * e^(-rate*delta) >= 1)."""


class Dynamics(str, Enum):
    """Which drift the fluid level follows between impulses."""

    LINEAR = "linear"
    ERLANG_A = "erlanga"


@dataclass(frozen=True)
class QueueParams:
    """Rates of the fluid queue.

    Attributes:
        lam: arrival rate, per unit time (> 0).
        mu: service rate, per unit time (> 0).
        theta: abandonment rate, per unit time (>= 0).
        c: server capacity, in continuous fluid units (> 0).
    """

    lam: float
    mu: float
    theta: float
    c: float

    def __post_init__(self) -> None:
        for name in ("lam", "mu", "theta", "c"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite, got {v!r}")
        if self.lam <= 0:
            raise ParameterError(f"arrival rate lam must be > 0, got {self.lam}")
        if self.mu <= 0:
            raise ParameterError(f"service rate mu must be > 0, got {self.mu}")
        if self.theta < 0:
            raise ParameterError(f"abandonment rate theta must be >= 0, got {self.theta}")
        if self.c <= 0:
            raise ParameterError(f"capacity c must be > 0, got {self.c}")

    @property
    def overloaded(self) -> bool:
        """True when arrivals exceed total service capacity (lam > mu*c)."""
        return self.lam > self.mu * self.c

    @property
    def offered_load(self) -> float:
        """lam / mu, the level an unlimited-capacity system settles at."""
        return self.lam / self.mu


@dataclass(frozen=True)
class FixedPoints:
    """Stationary levels of the two drift regimes.

    xi1 applies above capacity (relaxation rate theta), xi2 below
    (relaxation rate mu).  Only the one matching the load is attracting.
    """

    xi1: float
    xi2: float


def fixed_points(params: QueueParams) -> FixedPoints:
    """Stationary levels xi1 = (lam - mu*c + theta*c)/theta and xi2 = lam/mu.

    Raises:
        UndefinedFixedPointError: if theta = 0 while lam > mu*c (the
            overloaded system then has no finite stationary level).
    """
    xi2 = params.lam / params.mu
    if params.theta > 0:
        xi1 = (params.lam - params.mu * params.c) / params.theta + params.c
    elif params.overloaded:
        raise UndefinedFixedPointError(
            "xi1 is undefined: theta = 0 with lam > mu*c has no stationary level"
        )
    else:
        # theta = 0, lam <= mu*c: the above-capacity drift has no finite
        # rest point; report the limiting value.
        xi1 = params.c if params.lam == params.mu * params.c else -math.inf
    return FixedPoints(xi1=xi1, xi2=xi2)


class RegimeCase(Enum):
    """Joint classification of start level (vs c) and load (lam vs mu*c)."""

    OVER_START_OVER_LOAD = "over_start_over_load"
    UNDER_START_OVER_LOAD = "under_start_over_load"
    OVER_START_UNDER_LOAD = "over_start_under_load"
    UNDER_START_UNDER_LOAD = "under_start_under_load"

    @property
    def starts_above(self) -> bool:
        return self in (RegimeCase.OVER_START_OVER_LOAD, RegimeCase.OVER_START_UNDER_LOAD)

    @property
    def overloaded(self) -> bool:
        return self in (RegimeCase.OVER_START_OVER_LOAD, RegimeCase.UNDER_START_OVER_LOAD)


def classify_regime(params: QueueParams, q0: float) -> RegimeCase:
    """Classify a (params, q0) pair into one of the four regime cases.

    Boundary convention: q0 = c counts as an under-start and lam = mu*c
    as an under-load, i.e. ties go to the "<=" branches.

    Raises:
        ParameterError: on invalid params (raised by QueueParams itself).
        DomainError: if q0 < 0.
    """
    if not math.isfinite(q0) or q0 < 0:
        raise DomainError(f"initial level q0 must be >= 0 and finite, got {q0!r}")
    above = q0 > params.c
    over = params.overloaded
    if above and over:
        return RegimeCase.OVER_START_OVER_LOAD
    if above:
        return RegimeCase.OVER_START_UNDER_LOAD
    if over:
        return RegimeCase.UNDER_START_OVER_LOAD
    return RegimeCase.UNDER_START_UNDER_LOAD


class ImpulseMode(str, Enum):
    """Which part of the state an impulse rescales."""

    FULL_STATE = "full_state"
    ABANDONMENT_ONLY = "abandonment_only"


@dataclass(frozen=True)
class Periodic:
    """Impulses every ``delta`` time units (at delta, 2*delta, ...)."""

    delta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ParameterError(f"impulse spacing delta must be > 0, got {self.delta!r}")


@dataclass(frozen=True)
class Single:
    """One impulse at time ``tau``."""

    tau: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.tau) and self.tau >= 0):
            raise ParameterError(f"impulse time tau must be >= 0, got {self.tau!r}")


@dataclass(frozen=True)
class ImpulseSpec:
    """A multiplicative impulse and its schedule.

    The post-impulse level is ``m`` times the pre-impulse level in
    FULL_STATE mode; in ABANDONMENT_ONLY mode only the excess above
    capacity is rescaled: post = min(pre, c) + m * max(pre - c, 0).
    """

    m: float
    schedule: Periodic | Single
    mode: ImpulseMode = ImpulseMode.FULL_STATE

    def __post_init__(self) -> None:
        if not (math.isfinite(self.m) and self.m > 0):
            raise ParameterError(f"impulse multiplier m must be > 0, got {self.m!r}")

    def apply(self, q: float, c: float) -> float:
        """Map a pre-impulse level to the post-impulse level."""
        if self.mode is ImpulseMode.FULL_STATE:
            return self.m * q
        return min(q, c) + self.m * max(q - c, 0.0)


@dataclass(frozen=True)
class SteadyBounds:
    """Steady oscillation bounds of a periodically impulsed queue.

    ``lower`` and ``upper`` are the extreme levels of the limiting cycle
    (post- and pre-impulse values, in the order set by whether the
    impulse shrinks or grows the state).  ``regime_valid`` is False when
    a closed-form result assumed the cycle stays on one side of capacity
    but the computed cycle does not; such bounds should be replaced by a
    numerical integration.
    """

    lower: float
    upper: float
    amplitude: float
    regime_valid: bool = True

    @staticmethod
    def from_pair(a: float, b: float, regime_valid: bool = True) -> "SteadyBounds":
        lo, hi = (a, b) if a <= b else (b, a)
        return SteadyBounds(lower=lo, upper=hi, amplitude=hi - lo, regime_valid=regime_valid)
