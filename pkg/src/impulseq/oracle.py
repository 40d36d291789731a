"""Independent numerical ground truth for the closed-form results.

Trajectories are integrated with an adaptive Runge-Kutta 4(5) scheme
between impulse times; capacity crossings are located by root finding on
the sign change of q - c and the step is restarted there, so the kink in
the drift never degrades the integrator's order.  Averages use the
trapezoidal rule on densely sampled output.  Every run is an isolated
computation; nothing here shares mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.integrate import solve_ivp

from .model import (
    DomainError,
    Dynamics,
    ImpulseMode,
    ImpulseSpec,
    Periodic,
    QueueParams,
    Single,
    SteadyBounds,
    fixed_points,
)


@dataclass(frozen=True)
class OracleConfig:
    """Integrator tolerances and sampling density.

    ``min_density`` is the number of dense-output samples per unit time;
    tolerances default three-plus orders tighter than any comparison the
    results feed into.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    min_density: float = 1000.0
    max_steps: int = 1_000_000

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise DomainError("tolerances must be > 0")
        if self.min_density <= 0:
            raise DomainError("min_density must be > 0")


class BreakpointKind(str, Enum):
    IMPULSE = "impulse"
    CAPACITY_CROSSING = "capacity_crossing"


@dataclass
class Trajectory:
    """Sampled trajectory with event bookkeeping.

    Sample times are increasing, with each impulse time recorded twice:
    first the pre-impulse level, then the post-impulse level.
    ``breakpoints`` lists impulse and capacity-crossing times in order.
    """

    times: np.ndarray
    values: np.ndarray
    breakpoints: list[tuple[float, BreakpointKind]] = field(default_factory=list)

    @property
    def final(self) -> tuple[float, float]:
        return float(self.times[-1]), float(self.values[-1])


class IntegrationError(RuntimeError):
    """Integration gave up; carries the trajectory computed so far."""

    def __init__(self, message: str, partial: Trajectory | None = None):
        super().__init__(message)
        self.partial = partial


class NonConvergenceError(RuntimeError):
    """A fixed-point iteration did not settle; carries the last two iterates."""

    def __init__(self, message: str, last_two: tuple[SteadyBounds, SteadyBounds]):
        super().__init__(message)
        self.last_two = last_two


def _rhs(params: QueueParams, dynamics: Dynamics):
    lam, mu, theta, c = params.lam, params.mu, params.theta, params.c
    if dynamics is Dynamics.LINEAR:
        def rhs(t, y):
            return [lam - mu * y[0]]
    else:
        def rhs(t, y):
            q = y[0]
            return [lam - mu * min(q, c) - theta * max(q - c, 0.0)]
    return rhs


def _propagate(
    params: QueueParams,
    q0: float,
    t0: float,
    t1: float,
    cfg: OracleConfig,
    dynamics: Dynamics,
    collect: list | None,
):
    """Integrate from (t0, q0) to t1, restarting at capacity crossings.

    Returns (q_end, crossing_times, n_steps).  When ``collect`` is given,
    (times, values) sample arrays for each smooth piece are appended to it
    at cfg.min_density samples per unit time.
    """
    rhs = _rhs(params, dynamics)
    crossings: list[float] = []
    steps = 0

    def crossing(t, y):
        return y[0] - params.c

    crossing.terminal = True
    crossing.direction = 0.0

    t, q = t0, q0
    while t < t1:
        # A solve starting exactly on the capacity level is moving away
        # from it (the drift is transversal there), so the crossing event
        # must be disarmed or it would re-fire at the start time.
        watch = dynamics is Dynamics.ERLANG_A and q != params.c
        sol = solve_ivp(
            rhs,
            (t, t1),
            [q],
            method="RK45",
            rtol=cfg.rel_tol,
            atol=cfg.abs_tol,
            dense_output=True,
            events=[crossing] if watch else None,
        )
        if not sol.success:
            raise IntegrationError(f"integration failed at t={t}: {sol.message}")
        steps += sol.t.size
        if sol.status == 1:  # stopped at a capacity crossing
            t_stop = float(sol.t_events[0][0])
            crossings.append(t_stop)
            q_next = params.c
        else:
            t_stop = float(sol.t[-1])
            q_next = float(sol.y[0, -1])
        if collect is not None:
            n = max(2, int(math.ceil((t_stop - t) * cfg.min_density)) + 1)
            ts = np.linspace(t, t_stop, n)
            collect.append((ts, sol.sol(ts)[0]))
        t, q = t_stop, q_next
    return q, crossings, steps


def _impulse_times(schedule: Periodic | Single, horizon: float) -> list[float]:
    if isinstance(schedule, Single):
        return [schedule.tau] if 0.0 <= schedule.tau <= horizon else []
    times = []
    k = 1
    while k * schedule.delta <= horizon * (1.0 + 1e-12):
        times.append(min(k * schedule.delta, horizon))
        k += 1
    return times


def integrate_impulsive(
    params: QueueParams,
    q0: float,
    impulses: ImpulseSpec,
    horizon: float,
    cfg: OracleConfig | None = None,
    dynamics: Dynamics = Dynamics.ERLANG_A,
) -> Trajectory:
    """Integrate the impulsive system over [0, horizon].

    The impulse map is applied exactly at each scheduled time and the
    pre/post levels are both recorded, so the jump contributes no area to
    later trapezoid averages.

    Raises:
        DomainError: if horizon <= 0 or q0 < 0.
        IntegrationError: if cfg.max_steps is exceeded; the partial
            trajectory is attached to the exception.
    """
    if not (math.isfinite(horizon) and horizon > 0):
        raise DomainError(f"horizon must be > 0, got {horizon!r}")
    if not (math.isfinite(q0) and q0 >= 0):
        raise DomainError(f"initial level q0 must be >= 0 and finite, got {q0!r}")
    cfg = cfg or OracleConfig()

    pieces: list[tuple[np.ndarray, np.ndarray]] = []
    breakpoints: list[tuple[float, BreakpointKind]] = []
    jump_at: dict[float, float] = {}  # impulse time -> post level, patched in below
    total_steps = 0

    t, q = 0.0, q0
    stops = _impulse_times(impulses.schedule, horizon)
    if stops and stops[0] == 0.0:
        # Impulse at t = 0: record the jump before any integration.
        post = impulses.apply(q, params.c)
        pieces.append((np.array([0.0, 0.0]), np.array([q, post])))
        breakpoints.append((0.0, BreakpointKind.IMPULSE))
        q = post
        stops = stops[1:]
    for t_k in stops:
        if t_k > t:
            q, crossings, steps = _propagate(params, q, t, t_k, cfg, dynamics, pieces)
            total_steps += steps
            breakpoints.extend((tc, BreakpointKind.CAPACITY_CROSSING) for tc in crossings)
            t = t_k
        post = impulses.apply(q, params.c)
        jump_at[t_k] = post
        breakpoints.append((t_k, BreakpointKind.IMPULSE))
        q = post
        if total_steps > cfg.max_steps:
            traj = _assemble(pieces, jump_at)
            raise IntegrationError(
                f"exceeded max_steps={cfg.max_steps} at t={t}", partial=traj
            )
    if horizon > t:
        q, crossings, steps = _propagate(params, q, t, horizon, cfg, dynamics, pieces)
        total_steps += steps
        breakpoints.extend((tc, BreakpointKind.CAPACITY_CROSSING) for tc in crossings)
        if total_steps > cfg.max_steps:
            traj = _assemble(pieces, jump_at)
            raise IntegrationError(
                f"exceeded max_steps={cfg.max_steps} at t={horizon}", partial=traj
            )

    traj = _assemble(pieces, jump_at)
    traj.breakpoints = sorted(breakpoints, key=lambda bk: bk[0])
    return traj


def _assemble(
    pieces: list[tuple[np.ndarray, np.ndarray]], jump_at: dict[float, float]
) -> Trajectory:
    """Concatenate sampled pieces, inserting dual samples at impulse times."""
    ts: list[np.ndarray] = []
    qs: list[np.ndarray] = []
    last_t = None
    for pt, pq in pieces:
        if last_t is not None and pt[0] == last_t:
            pt, pq = pt[1:], pq[1:]  # seam point already recorded
        ts.append(pt)
        qs.append(pq)
        last_t = pt[-1] if pt.size else last_t
        post = jump_at.get(last_t)
        if post is not None:
            ts.append(np.array([last_t]))
            qs.append(np.array([post]))
    times = np.concatenate(ts) if ts else np.empty(0)
    values = np.concatenate(qs) if qs else np.empty(0)
    return Trajectory(times=times, values=values)


def trajectory_average(traj: Trajectory, t_from: float, t_to: float) -> float:
    """Trapezoid time average of the trajectory over [t_from, t_to].

    Window endpoints falling on an impulse time use the post-impulse
    level on the left edge and the pre-impulse level on the right edge.

    Raises:
        DomainError: if the window is empty or outside the sampled span.
    """
    times, values = traj.times, traj.values
    if t_from >= t_to:
        raise DomainError(f"empty averaging window [{t_from}, {t_to}]")
    tol = 1e-9 * max(1.0, abs(t_to))
    if t_from < times[0] - tol or t_to > times[-1] + tol:
        raise DomainError("averaging window outside the trajectory span")
    t_from = max(t_from, float(times[0]))
    t_to = min(t_to, float(times[-1]))

    def value_at(t: float, prefer_post: bool) -> float:
        if prefer_post:
            i = int(np.searchsorted(times, t, side="right"))
            if i > 0 and times[i - 1] == t:
                return float(values[i - 1])
            i0 = i - 1
        else:
            i = int(np.searchsorted(times, t, side="left"))
            if i < times.size and times[i] == t:
                return float(values[i])
            i0 = i - 1
        w = (t - times[i0]) / (times[i0 + 1] - times[i0])
        return float(values[i0] * (1 - w) + values[i0 + 1] * w)

    lo = int(np.searchsorted(times, t_from, side="right"))
    hi = int(np.searchsorted(times, t_to, side="left"))
    ts = np.concatenate(([t_from], times[lo:hi], [t_to]))
    qs = np.concatenate(([value_at(t_from, True)], values[lo:hi], [value_at(t_to, False)]))
    return float(np.trapz(qs, ts) / (t_to - t_from))


def steady_cycle_bounds(
    params: QueueParams,
    m: float,
    delta: float,
    mode: ImpulseMode = ImpulseMode.FULL_STATE,
    n_cycles: int = 50,
    dynamics: Dynamics = Dynamics.ERLANG_A,
    cfg: OracleConfig | None = None,
    q0: float | None = None,
    conv_tol: float = 1e-9,
) -> SteadyBounds:
    """Pre/post-impulse levels of the final cycle after n_cycles periods.

    Starts from the unimpulsed stationary level unless q0 is given.

    Raises:
        NonConvergenceError: if the pre-impulse level still moves by more
            than conv_tol between the last two cycles.
    """
    if n_cycles < 2:
        raise DomainError(f"n_cycles must be >= 2, got {n_cycles}")
    cfg = cfg or OracleConfig()
    spec = ImpulseSpec(m=m, schedule=Periodic(delta=delta), mode=mode)
    if q0 is None:
        if dynamics is Dynamics.ERLANG_A and params.overloaded:
            q0 = fixed_points(params).xi1
        else:
            q0 = params.lam / params.mu
    q = q0
    pairs: list[tuple[float, float]] = []
    for k in range(n_cycles):
        pre, _, _ = _propagate(params, q, k * delta, (k + 1) * delta, cfg, dynamics, None)
        post = spec.apply(pre, params.c)
        pairs.append((pre, post))
        q = post
    pre, post = pairs[-1]
    bounds = SteadyBounds.from_pair(pre, post)
    if abs(pre - pairs[-2][0]) > conv_tol:
        raise NonConvergenceError(
            f"cycle not settled after {n_cycles} periods: "
            f"|pre_k - pre_(k-1)| = {abs(pre - pairs[-2][0]):.3e} > {conv_tol:.1e}",
            last_two=(SteadyBounds.from_pair(*pairs[-2]), bounds),
        )
    return bounds


def grid_minimize_impulse_time(
    params: QueueParams,
    q0: float,
    T: float,
    m: float,
    n_grid: int = 4096,
    dynamics: Dynamics = Dynamics.ERLANG_A,
) -> tuple[float, float]:
    """Grid-plus-golden search for the impulse time minimizing the average.

    Evaluates the exact average on a uniform grid over [0, T], then
    refines around the best grid point.  Deterministic; ties resolve to
    the smallest impulse time.

    Raises:
        DomainError: if n_grid < 16.
    """
    from .design import average_queue_length, golden_minimize

    if n_grid < 16:
        raise DomainError(f"n_grid must be >= 16, got {n_grid}")

    def objective(tau: float) -> float:
        return average_queue_length(params, q0, T, tau, m, dynamics)

    taus = np.linspace(0.0, T, n_grid + 1)
    js = [objective(float(t)) for t in taus]
    i = int(np.argmin(js))
    a = float(taus[max(i - 1, 0)])
    b = float(taus[min(i + 1, n_grid)])
    x, fx = golden_minimize(objective, a, b, tol=1e-11 * max(T, 1.0))
    if js[i] < fx or (js[i] == fx and taus[i] < x):
        return float(taus[i]), js[i]
    return x, fx
