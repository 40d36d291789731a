"""Single-impulse timing over a fixed horizon.

Given a horizon [0, T] and one multiplicative impulse at time tau, the
average level J(tau) is an exact sum of piecewise-exponential integrals.
This module evaluates J and dJ/dtau in closed form, decomposes [0, T]
into sub-intervals on which the post-impulse dynamics keep one shape,
and finds the impulse times minimizing and maximizing J.

The decomposition uses four start/load cases.  Sub-interval labels are
I_{i,j}: i is the case index (1: start above capacity, overloaded;
2: start at/below, overloaded; 3: start above, underloaded; 4: start
at/below, underloaded) and j enumerates that case's sub-intervals.
Where a closed-form minimizer exists it is still polished by a local
numerical refinement and compared with the numeric sub-interval minima,
so a wrong analytic candidate can never win silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .erlang import ErlangSegment, _level_hit_time, active_branch, erlang_segments
from .model import (
    DomainError,
    Dynamics,
    ParameterError,
    QueueParams,
    RegimeCase,
    classify_regime,
    fixed_points,
)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

ANALYTIC = "analytic"
NUMERIC = "numeric"


class BoundaryError(DomainError):
    """The derivative was requested at a sub-interval boundary."""


class MinimizerError(RuntimeError):
    """A scalar minimization hit its iteration cap; carries the best so far."""

    def __init__(self, message: str, best: tuple[float, float]):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class SubInterval:
    """One tile of [0, T] with a fixed impulse-response shape.

    ``solver`` is "analytic" when a closed-form candidate exists on the
    tile (named by ``formula``) and "numeric" otherwise.
    """

    label: str
    lo: float
    hi: float
    solver: str
    formula: str | None = None


@dataclass(frozen=True)
class Candidate:
    """An evaluated impulse time: where it came from and its J value."""

    interval: str
    tau: float
    value: float
    provenance: str  # "analytic" | "numeric" | "endpoint"


@dataclass(frozen=True)
class OptimalTimes:
    """Minimizing and maximizing impulse times with the full candidate set."""

    tau_min: float
    tau_max: float
    j_min: float
    j_max: float
    candidates: tuple[Candidate, ...]


def golden_minimize(
    f, lo: float, hi: float, tol: float, max_iter: int = 256
) -> tuple[float, float]:
    """Golden-section minimization of f on [lo, hi].

    Deterministic; ties resolve to the smaller abscissa.  Returns the
    best (x, f(x)) among the probes and the bracket endpoints.

    Raises:
        MinimizerError: if the bracket has not shrunk to ``tol`` within
            max_iter iterations (carries the best point found so far).
    """
    evals: list[tuple[float, float]] = [(lo, f(lo)), (hi, f(hi))]
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    evals += [(x1, f1), (x2, f2)]
    it = 0
    while b - a > tol:
        if it >= max_iter:
            best = min(evals, key=lambda e: (e[1], e[0]))
            raise MinimizerError(
                f"golden-section did not reach tol={tol:.1e} in {max_iter} iterations",
                best=best,
            )
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
            evals.append((x1, f1))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
            evals.append((x2, f2))
        it += 1
    return min(evals, key=lambda e: (e[1], e[0]))


def scan_golden_minimize(
    f, lo: float, hi: float, tol: float, n_scan: int = 64
) -> tuple[float, float]:
    """Coarse scan then golden-section refinement around the best point.

    The scan keeps golden section from locking onto the wrong basin when
    f has several local minima on [lo, hi].
    """
    if hi - lo <= tol:
        x = 0.5 * (lo + hi)
        return x, f(x)
    xs = np.linspace(lo, hi, n_scan + 1)
    fs = [f(float(x)) for x in xs]
    i = int(np.argmin(fs))  # first index wins ties -> smallest abscissa
    a = float(xs[max(i - 1, 0)])
    b = float(xs[min(i + 1, n_scan)])
    x, fx = golden_minimize(f, a, b, tol)
    if fs[i] < fx or (fs[i] == fx and xs[i] < x):
        return float(xs[i]), fs[i]
    return x, fx


def _segments(
    params: QueueParams, q0: float, horizon: float, dynamics: Dynamics, t0: float = 0.0
) -> list[ErlangSegment]:
    """Exponential segments of the unimpulsed trajectory over [t0, t0+horizon]."""
    if dynamics is Dynamics.LINEAR:
        if not (math.isfinite(q0) and q0 >= 0):
            raise DomainError(f"initial level q0 must be >= 0 and finite, got {q0!r}")
        xi = params.lam / params.mu
        return [ErlangSegment(t0, t0 + horizon, xi, params.mu, q0 - xi)]
    return erlang_segments(params, q0, horizon, t0=t0)


def average_queue_length(
    params: QueueParams,
    q0: float,
    T: float,
    tau: float,
    m: float,
    dynamics: Dynamics = Dynamics.ERLANG_A,
) -> float:
    """Average level J(tau) over [0, T] with one impulse (factor m) at tau.

    Computed by exact integration of every exponential segment before and
    after the impulse, including any capacity crossings, so there is no
    quadrature error.

    Raises:
        DomainError: if tau is outside [0, T] or T <= 0.
    """
    if not (math.isfinite(T) and T > 0):
        raise DomainError(f"horizon T must be > 0, got {T!r}")
    if not (0.0 <= tau <= T):
        raise DomainError(f"impulse time tau must lie in [0, {T}], got {tau}")
    if not (math.isfinite(m) and m > 0):
        raise ParameterError(f"impulse multiplier m must be > 0, got {m!r}")
    total = 0.0
    if tau > 0:
        pre = _segments(params, q0, tau, dynamics)
        total += sum(s.integral(s.start, s.end) for s in pre)
        level = pre[-1].value(tau)
    else:
        level = q0
    if tau < T:
        post = _segments(params, m * level, T - tau, dynamics, t0=tau)
        total += sum(s.integral(s.start, s.end) for s in post)
    return total / T


def derivative_average(
    params: QueueParams,
    q0: float,
    T: float,
    tau: float,
    m: float,
    dynamics: Dynamics = Dynamics.ERLANG_A,
) -> float:
    """dJ/dtau at an impulse time interior to one sub-interval.

    The derivative combines the Leibniz boundary terms with the
    sensitivity of the post-impulse trajectory to tau; when the
    post-impulse path crosses capacity at tau + s the chain rule also
    carries s'(tau), the sensitivity of the crossing delay.

    Raises:
        BoundaryError: at sub-interval boundaries (tau in {0, T}, the
            pre-impulse capacity-crossing time, or an impulse time whose
            post level lands exactly on capacity); one-sided derivatives
            differ there.
    """
    if not (math.isfinite(T) and T > 0):
        raise DomainError(f"horizon T must be > 0, got {T!r}")
    if not (math.isfinite(m) and m > 0):
        raise ParameterError(f"impulse multiplier m must be > 0, got {m!r}")
    atol = 1e-12 * max(1.0, T)
    if tau <= atol or tau >= T - atol:
        raise BoundaryError(f"tau={tau} is not interior to (0, {T})")

    pre = _segments(params, q0, T, dynamics)
    for seg in pre[:-1]:
        if abs(tau - seg.end) <= atol:
            raise BoundaryError(f"tau={tau} sits on the pre-impulse crossing time")
    seg = next(s for s in pre if s.start - atol <= tau <= s.end + atol)
    xi_a, r_a = seg.target, seg.rate
    level = seg.value(tau)
    v = m * level
    v_dot = -m * r_a * (level - xi_a)

    if dynamics is Dynamics.LINEAR:
        xi_b, r_b = params.lam / params.mu, params.mu
        s = None
    else:
        if abs(v - params.c) <= 1e-12 * max(1.0, params.c):
            raise BoundaryError("post-impulse level lands exactly on capacity")
        xi_b, r_b = active_branch(params, v)
        s = _level_hit_time(xi_b, r_b, v, params.c)

    if s is not None and s > 0 and tau + s < T:
        # Post-impulse path crosses capacity at tau + s, then relaxes on
        # the far branch; d(T*J)/dtau picks up the crossing sensitivity
        # s' = v' / (r_b * (v - xi_b)).
        if v > params.c:
            xi_f, r_f = params.lam / params.mu, params.mu
        else:
            xi_f, r_f = active_branch(params, params.c + 1.0)  # above-capacity branch
        s_dot = v_dot / (r_b * (v - xi_b))
        d = (
            level
            + xi_b * s_dot
            + v_dot / r_b
            - xi_f * (1.0 + s_dot)
            - (params.c - xi_f) * (1.0 + s_dot) * math.exp(-r_f * (T - tau - s))
        )
    else:
        # No further crossing: the pre-level boundary terms plus the
        # integrated sensitivity of a single post-impulse exponential.
        d = (1.0 - m) * level + (
            m * (r_b - r_a) * level + m * r_a * xi_a - r_b * xi_b
        ) * (1.0 - math.exp(-r_b * (T - tau))) / r_b
    return d / T


def _region_above_level(
    target: float, rate: float, q0: float, level: float, T: float
) -> tuple[float, float] | None:
    """Sub-range of [0, T] where the branch trajectory exceeds ``level``.

    The trajectory is monotone, so the region is a prefix, a suffix, all
    of [0, T], or empty (None).
    """
    if q0 > level:
        if target >= level:
            return (0.0, T)
        hit = _level_hit_time(target, rate, q0, level)
        return (0.0, min(hit, T)) if hit < T else (0.0, T)
    if q0 < level:
        if target <= level:
            return None
        hit = _level_hit_time(target, rate, q0, level)
        return (hit, T) if hit is not None and hit < T else None
    # q0 == level: moving up means immediately above, else never above.
    return (0.0, T) if target > level else None


def erlang_subintervals(
    params: QueueParams, q0: float, T: float, m: float
) -> list[SubInterval]:
    """Tile [0, T] into sub-intervals of fixed impulse-response shape.

    Breakpoints are the time where the rescaled pre-impulse level m*q(tau)
    passes capacity (computed from the branch the trajectory starts on)
    and the pre-impulse capacity-crossing time; both are clamped to
    [0, T] and degenerate tiles are dropped.  Tiles carry an analytic
    solver tag where a closed-form candidate exists, numeric otherwise.
    """
    if not (math.isfinite(T) and T > 0):
        raise DomainError(f"horizon T must be > 0, got {T!r}")
    if not (math.isfinite(m) and 0 < m <= 1):
        raise ParameterError(f"impulse multiplier m must be in (0, 1], got {m!r}")
    case = classify_regime(params, q0)
    c = params.c
    level = c / m
    out: list[SubInterval] = []

    if case is RegimeCase.OVER_START_OVER_LOAD:
        xi1, theta = active_branch(params, q0)
        region = _region_above_level(xi1, theta, q0, level, T)
        # I_{1,1}: impulse still lands above capacity (single-branch shape);
        # I_{1,2}: impulse lands below, where the minimizer is numeric only.
        if region is None:
            out.append(SubInterval("I_{1,2}", 0.0, T, NUMERIC))
        elif region == (0.0, T):
            out.append(SubInterval("I_{1,1}", 0.0, T, ANALYTIC, "stationary-or-left"))
        elif region[0] == 0.0:
            out.append(SubInterval("I_{1,1}", 0.0, region[1], ANALYTIC, "stationary-or-left"))
            out.append(SubInterval("I_{1,2}", region[1], T, NUMERIC))
        else:
            out.append(SubInterval("I_{1,2}", 0.0, region[0], NUMERIC))
            out.append(SubInterval("I_{1,1}", region[0], T, ANALYTIC, "stationary-or-left"))

    elif case is RegimeCase.UNDER_START_OVER_LOAD:
        xi2 = params.lam / params.mu
        t2 = _level_hit_time(xi2, params.mu, q0, c) if q0 < c else 0.0
        # Rescaled-level breakpoint, taken on the starting (below-capacity)
        # branch: m * (xi2 + (q0 - xi2) e^(-mu tau)) = c.
        tau_c = _level_hit_time(xi2, params.mu, q0, level)
        if tau_c is not None and tau_c < T:
            out.append(SubInterval("I_{2,1}", 0.0, t2, ANALYTIC, "right-endpoint"))
            out.append(SubInterval("I_{2,2}", t2, tau_c, NUMERIC))
            out.append(SubInterval("I_{2,3}", tau_c, T, ANALYTIC, "stationary-post-crossing"))
        elif t2 < T:
            out.append(SubInterval("I_{2,1}", 0.0, t2, ANALYTIC, "right-endpoint"))
            out.append(SubInterval("I_{2,4}", t2, T, NUMERIC))
        else:
            out.append(SubInterval("I_{2,5}", 0.0, T, ANALYTIC, "stationary-below"))

    elif case is RegimeCase.OVER_START_UNDER_LOAD:
        xi1, theta = active_branch(params, q0)
        t1 = _level_hit_time(xi1, theta, q0, c)  # None when lam = mu*c
        tau_b = _level_hit_time(xi1, theta, q0, level)  # None when q0 < c/m
        if tau_b is not None and T <= tau_b:
            out.append(SubInterval("I_{3,4}", 0.0, T, ANALYTIC, "left-endpoint"))
        else:
            lo = 0.0
            if tau_b is not None and tau_b > 0:
                out.append(SubInterval("I_{3,1}", 0.0, tau_b, ANALYTIC, "left-endpoint"))
                lo = tau_b
            # else: impulse never lands above capacity; one fewer regime.
            t1_eff = t1 if t1 is not None else math.inf
            if t1_eff < T:
                out.append(SubInterval("I_{3,2}", lo, t1_eff, NUMERIC))
                out.append(SubInterval("I_{3,3}", t1_eff, T, ANALYTIC, "left-endpoint"))
            else:
                out.append(SubInterval("I_{3,2}", lo, T, NUMERIC))

    else:
        out.append(SubInterval("I_{4,1}", 0.0, T, ANALYTIC, "stationary-below"))

    return [s for s in out if s.hi > s.lo]


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(max(x, lo), hi)


def _analytic_candidate(
    sub: SubInterval, params: QueueParams, q0: float, T: float, m: float
) -> float:
    """Closed-form minimizer candidate on an analytic sub-interval.

    Interior stationary points solve a two-exponential balance and land
    at a log-midpoint; monotone tiles give an endpoint.  The result is
    clamped into the tile.
    """
    label = sub.label
    if label == "I_{1,1}":
        xi1, theta = fixed_points(params).xi1, params.theta
        if q0 < xi1:
            t = T / 2.0 + math.log(1.0 - q0 / xi1) / (2.0 * theta)
            return _clamp(t, sub.lo, sub.hi)
        return sub.lo  # level starts at/above its rest point: J increases
    if label == "I_{2,1}":
        return sub.hi  # J decreases up to the pre-impulse crossing time
    if label == "I_{2,3}":
        xi1, theta = fixed_points(params).xi1, params.theta
        xi2 = params.lam / params.mu
        t2 = _level_hit_time(xi2, params.mu, q0, params.c) if q0 < params.c else 0.0
        t = (T + t2) / 2.0 + math.log(1.0 - params.c / xi1) / (2.0 * theta)
        return _clamp(t, sub.lo, sub.hi)
    if label in ("I_{2,5}", "I_{4,1}"):
        xi2 = params.lam / params.mu
        if q0 < xi2:
            t = T / 2.0 + math.log(1.0 - q0 / xi2) / (2.0 * params.mu)
            return _clamp(t, sub.lo, sub.hi)
        return sub.lo
    if label in ("I_{3,1}", "I_{3,3}", "I_{3,4}"):
        return sub.lo  # J increases on these tiles
    raise ValueError(f"no analytic candidate for sub-interval {label}")


_TIE_TOL = 1e-12


def _select_optimum(
    candidates: list[Candidate], objective, T: float
) -> OptimalTimes:
    """Pick the global minimizer (ties -> smallest tau); maximizer is T.

    A numeric or endpoint candidate that ties an analytic candidate at
    (numerically) the same point is dropped first: both represent one
    stationary time and the analytic expression is its canonical value.
    Genuinely flat objectives still resolve to the smallest tau because
    distant tied candidates are kept.
    """
    snap = 1e-6 * max(T, 1.0)
    analytic = [c for c in candidates if c.provenance == ANALYTIC]
    kept = [
        c
        for c in candidates
        if c.provenance == ANALYTIC
        or not any(
            abs(c.tau - a.tau) <= snap and abs(c.value - a.value) <= _TIE_TOL
            for a in analytic
        )
    ]
    j_best = min(c.value for c in kept)
    tau_min = min(c.tau for c in kept if c.value <= j_best + _TIE_TOL)
    j_min = min(c.value for c in kept if c.tau == tau_min)
    j_max = objective(T)
    return OptimalTimes(
        tau_min=tau_min,
        tau_max=T,
        j_min=j_min,
        j_max=j_max,
        candidates=tuple(candidates),
    )


def linear_optimal_times(
    params: QueueParams, q0: float, T: float, m: float
) -> OptimalTimes:
    """Optimal single-impulse times for the single-exponential dynamics.

    The maximizer is always T (an impulse at the end never lowers the
    running level).  The minimizer is the log-midpoint stationary time
    T/2 + ln(1 - q0*mu/lam)/(2*mu) when q0 < lam/mu, clamped into [0, T],
    and 0 otherwise; a numeric search cross-checks it.
    """
    if not (math.isfinite(T) and T > 0):
        raise DomainError(f"horizon T must be > 0, got {T!r}")
    if not (math.isfinite(m) and 0 < m <= 1):
        raise ParameterError(f"impulse multiplier m must be in (0, 1], got {m!r}")

    def objective(tau: float) -> float:
        return average_queue_length(params, q0, T, tau, m, Dynamics.LINEAR)

    xi = params.lam / params.mu
    if q0 < xi:
        t_analytic = _clamp(T / 2.0 + math.log(1.0 - q0 / xi) / (2.0 * params.mu), 0.0, T)
    else:
        t_analytic = 0.0
    candidates = [Candidate("linear", t_analytic, objective(t_analytic), ANALYTIC)]
    t_num, j_num = scan_golden_minimize(objective, 0.0, T, tol=1e-10 * T)
    candidates.append(Candidate("linear", t_num, j_num, NUMERIC))
    candidates.append(Candidate("linear", 0.0, objective(0.0), "endpoint"))
    candidates.append(Candidate("linear", T, objective(T), "endpoint"))
    return _select_optimum(candidates, objective, T)


def erlang_optimal_times(
    params: QueueParams, q0: float, T: float, m: float
) -> OptimalTimes:
    """Optimal single-impulse times for the capacity-kinked dynamics.

    The maximizer is T.  For the minimizer every sub-interval contributes
    its analytic candidate where one exists, a scan-plus-golden numeric
    minimum always, and its endpoints; the global minimum over all
    candidates is returned with full provenance.  Ties within 1e-12 in J
    resolve to the smallest impulse time.

    Raises:
        MinimizerError: if a numeric sub-interval search fails to
            converge (carries the best point found so far).
    """
    if not (math.isfinite(T) and T > 0):
        raise DomainError(f"horizon T must be > 0, got {T!r}")

    def objective(tau: float) -> float:
        return average_queue_length(params, q0, T, tau, m, Dynamics.ERLANG_A)

    subs = erlang_subintervals(params, q0, T, m)
    candidates: list[Candidate] = []
    for sub in subs:
        if sub.solver == ANALYTIC:
            t_a = _analytic_candidate(sub, params, q0, T, m)
            candidates.append(Candidate(sub.label, t_a, objective(t_a), ANALYTIC))
        t_n, j_n = scan_golden_minimize(objective, sub.lo, sub.hi, tol=1e-10 * T)
        candidates.append(Candidate(sub.label, t_n, j_n, NUMERIC))
        candidates.append(Candidate(sub.label, sub.lo, objective(sub.lo), "endpoint"))
        candidates.append(Candidate(sub.label, sub.hi, objective(sub.hi), "endpoint"))
    return _select_optimum(candidates, objective, T)


def derivative_sign_change_root(
    params: QueueParams,
    q0: float,
    T: float,
    m: float,
    dynamics: Dynamics,
    lo: float,
    hi: float,
    n_probe: int = 33,
) -> float | None:
    """Stationary time located by bisecting a sign change of dJ/dtau.

    Secondary verification path for the minimizers: probes the derivative
    on an interior grid of (lo, hi) and bisects the first sign change.
    Returns None when the derivative keeps one sign.
    """
    from scipy.optimize import brentq

    pad = 1e-9 * max(1.0, T)
    a, b = lo + pad, hi - pad
    if a >= b:
        return None

    def deriv(tau: float) -> float:
        return derivative_average(params, q0, T, tau, m, dynamics)

    xs = np.linspace(a, b, n_probe)
    vals = [deriv(float(x)) for x in xs]
    for i in range(len(xs) - 1):
        if vals[i] == 0.0:
            return float(xs[i])
        if vals[i] * vals[i + 1] < 0:
            return float(brentq(deriv, float(xs[i]), float(xs[i + 1]), xtol=1e-13))
    return None
