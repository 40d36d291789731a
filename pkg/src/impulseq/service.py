"""HTTP service wrapping the analysis library.

One endpoint per analysis: simulate, bounds, average, optimize, sweep.
Endpoints do no computation of their own; they validate, call the
library, and shape the response.  Invalid parameters map to 400 (or 422
for schema violations) and numerical non-convergence to 409.
"""

from __future__ import annotations

import logging

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .design import (
    MinimizerError,
    OptimalTimes,
    average_queue_length,
    erlang_optimal_times,
    erlang_subintervals,
    linear_optimal_times,
)
from .erlang import erlang_cycle_average, erlang_steady_bounds
from .linear import linear_cycle_average, linear_steady_bounds
from .model import DomainError, Dynamics, ImpulseMode, ImpulseSpec, Periodic, Single
from .oracle import (
    IntegrationError,
    NonConvergenceError,
    OracleConfig,
    integrate_impulsive,
    steady_cycle_bounds,
    trajectory_average,
)
from .schemas import (
    AverageRequest,
    AverageResponse,
    BoundsRequest,
    BoundsResponse,
    BoundsSide,
    BreakpointModel,
    CandidateModel,
    OptimizeRequest,
    OptimizeResponse,
    SimulateRequest,
    SimulateResponse,
    SubIntervalModel,
    SweepRequest,
    SweepResponse,
    to_dynamics,
)

logger = logging.getLogger("impulseq.service")

app = FastAPI(title="impulseq", version=__version__)


@app.exception_handler(ValueError)
async def _bad_request(request: Request, exc: ValueError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(NonConvergenceError)
@app.exception_handler(IntegrationError)
@app.exception_handler(MinimizerError)
async def _non_convergence(request: Request, exc: Exception) -> JSONResponse:
    return JSONResponse(status_code=409, content={"detail": str(exc)})


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    params = req.params.to_domain()
    if req.impulse.delta is not None:
        schedule = Periodic(delta=req.impulse.delta)
    elif req.impulse.tau is not None:
        schedule = Single(tau=req.impulse.tau)
    else:
        raise DomainError("simulate needs an impulse schedule: delta or tau")
    spec = ImpulseSpec(m=req.impulse.m, schedule=schedule, mode=req.impulse.domain_mode())
    cfg = OracleConfig(min_density=req.density)
    traj = integrate_impulsive(
        params, req.q0, spec, req.horizon, cfg=cfg, dynamics=to_dynamics(req.dynamics)
    )
    samples = [(float(t), float(q)) for t, q in zip(traj.times, traj.values)]
    bps = [BreakpointModel(t=float(t), kind=k.value) for t, k in traj.breakpoints]
    return SimulateResponse(samples=samples, breakpoints=bps, final=traj.final)


@app.post("/bounds", response_model=BoundsResponse)
def bounds(req: BoundsRequest) -> BoundsResponse:
    params = req.params.to_domain()
    dynamics = to_dynamics(req.dynamics)
    mode = ImpulseMode(req.mode)
    if dynamics is Dynamics.LINEAR:
        if mode is not ImpulseMode.FULL_STATE:
            raise DomainError("abandonment_only mode requires erlanga dynamics")
        cb = linear_steady_bounds(params, req.m, req.delta)
        closed_avg = linear_cycle_average(params, req.m, req.delta)
    else:
        cb = erlang_steady_bounds(params, req.m, req.delta, mode)
        try:
            closed_avg = erlang_cycle_average(params, req.m, req.delta, mode)
        except DomainError:
            closed_avg = None  # cycle crosses capacity: no closed form
    ob = steady_cycle_bounds(
        params, req.m, req.delta, mode, n_cycles=req.n_cycles, dynamics=dynamics
    )
    # One steady cycle runs from the settled post-impulse level to the
    # next impulse; average it with the trapezoid rule.
    pre = ob.upper if req.m <= 1 else ob.lower
    spec = ImpulseSpec(m=req.m, schedule=Periodic(delta=req.delta), mode=mode)
    start = spec.apply(pre, params.c)
    traj = integrate_impulsive(params, start, spec, req.delta, dynamics=dynamics)
    oracle_avg = trajectory_average(traj, 0.0, req.delta)
    return BoundsResponse(
        closed_form=BoundsSide(
            lower=cb.lower,
            upper=cb.upper,
            amplitude=cb.amplitude,
            average=closed_avg,
            regime_valid=cb.regime_valid,
        ),
        oracle=BoundsSide(
            lower=ob.lower, upper=ob.upper, amplitude=ob.amplitude, average=oracle_avg
        ),
    )


@app.post("/average", response_model=AverageResponse)
def average(req: AverageRequest) -> AverageResponse:
    params = req.params.to_domain()
    j = average_queue_length(params, req.q0, req.T, req.tau, req.m, to_dynamics(req.dynamics))
    return AverageResponse(tau=req.tau, average=j)


def _optimal_times_response(
    opt: OptimalTimes, subintervals: list[SubIntervalModel]
) -> OptimizeResponse:
    return OptimizeResponse(
        tau_min=opt.tau_min,
        tau_max=opt.tau_max,
        j_min=opt.j_min,
        j_max=opt.j_max,
        candidates=[
            CandidateModel(
                interval=c.interval, tau=c.tau, value=c.value, provenance=c.provenance
            )
            for c in opt.candidates
        ],
        subintervals=subintervals,
    )


@app.post("/optimize", response_model=OptimizeResponse)
def optimize(req: OptimizeRequest) -> OptimizeResponse:
    params = req.params.to_domain()
    if to_dynamics(req.dynamics) is Dynamics.LINEAR:
        opt = linear_optimal_times(params, req.q0, req.T, req.m)
        subs = [SubIntervalModel(label="linear", lo=0.0, hi=req.T, solver="analytic")]
    else:
        opt = erlang_optimal_times(params, req.q0, req.T, req.m)
        subs = [
            SubIntervalModel(
                label=s.label, lo=s.lo, hi=s.hi, solver=s.solver, formula=s.formula
            )
            for s in erlang_subintervals(params, req.q0, req.T, req.m)
        ]
    logger.debug("optimize: tau_min=%r tau_max=%r", opt.tau_min, opt.tau_max)
    return _optimal_times_response(opt, subs)


@app.post("/sweep", response_model=SweepResponse)
def sweep(req: SweepRequest) -> SweepResponse:
    params = req.params.to_domain()
    dynamics = to_dynamics(req.dynamics)
    taus = [float(t) for t in np.linspace(0.0, req.T, req.grid + 1)]
    averages = [average_queue_length(params, req.q0, req.T, t, req.m, dynamics) for t in taus]
    if dynamics is Dynamics.LINEAR:
        opt = linear_optimal_times(params, req.q0, req.T, req.m)
    else:
        opt = erlang_optimal_times(params, req.q0, req.T, req.m)
    return SweepResponse(
        taus=taus,
        averages=averages,
        tau_min=opt.tau_min,
        tau_max=opt.tau_max,
        j_min=opt.j_min,
        j_max=opt.j_max,
    )
