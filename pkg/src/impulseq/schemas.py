"""Pydantic request/response models for the HTTP service.

Field names mirror the library API; queue parameters accept the JSON key
"lambda" for the arrival rate.  Validation failures surface as 422
responses with the offending field path.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .model import Dynamics, ImpulseMode, QueueParams

DynamicsName = Literal["linear", "erlanga"]
ModeName = Literal["full_state", "abandonment_only"]


class ParamsModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lam: float = Field(alias="lambda", gt=0, description="arrival rate")
    mu: float = Field(gt=0, description="service rate")
    theta: float = Field(ge=0, description="abandonment rate")
    c: float = Field(gt=0, description="server capacity")

    def to_domain(self) -> QueueParams:
        return QueueParams(lam=self.lam, mu=self.mu, theta=self.theta, c=self.c)


class ImpulseModel(BaseModel):
    m: float = Field(gt=0, description="post = m * pre (full-state mode)")
    delta: Optional[float] = Field(default=None, gt=0, description="periodic spacing")
    tau: Optional[float] = Field(default=None, ge=0, description="single impulse time")
    mode: ModeName = "full_state"

    @model_validator(mode="after")
    def _one_schedule(self) -> "ImpulseModel":
        if self.delta is not None and self.tau is not None:
            raise ValueError("give either delta (periodic) or tau (single), not both")
        return self

    def domain_mode(self) -> ImpulseMode:
        return ImpulseMode(self.mode)


def to_dynamics(name: DynamicsName) -> Dynamics:
    return Dynamics(name)


class SimulateRequest(BaseModel):
    params: ParamsModel
    q0: float = Field(ge=0)
    impulse: ImpulseModel
    horizon: float = Field(gt=0)
    dynamics: DynamicsName = "erlanga"
    density: float = Field(default=1000.0, gt=0, description="samples per unit time")


class BreakpointModel(BaseModel):
    t: float
    kind: Literal["impulse", "capacity_crossing"]


class SimulateResponse(BaseModel):
    samples: list[tuple[float, float]]
    breakpoints: list[BreakpointModel]
    final: tuple[float, float]


class BoundsRequest(BaseModel):
    params: ParamsModel
    m: float = Field(gt=0)
    delta: float = Field(gt=0)
    mode: ModeName = "full_state"
    dynamics: DynamicsName = "erlanga"
    n_cycles: int = Field(default=50, ge=2)


class BoundsSide(BaseModel):
    lower: float
    upper: float
    amplitude: float
    average: Optional[float] = None
    regime_valid: bool = True


class BoundsResponse(BaseModel):
    closed_form: BoundsSide
    oracle: BoundsSide


class AverageRequest(BaseModel):
    params: ParamsModel
    q0: float = Field(ge=0)
    T: float = Field(gt=0)
    tau: float = Field(ge=0)
    m: float = Field(gt=0)
    dynamics: DynamicsName = "erlanga"


class AverageResponse(BaseModel):
    tau: float
    average: float


class OptimizeRequest(BaseModel):
    params: ParamsModel
    q0: float = Field(ge=0)
    T: float = Field(gt=0)
    m: float = Field(gt=0)
    dynamics: DynamicsName = "erlanga"


class SubIntervalModel(BaseModel):
    label: str
    lo: float
    hi: float
    solver: Literal["analytic", "numeric"]
    formula: Optional[str] = None


class CandidateModel(BaseModel):
    interval: str
    tau: float
    value: float
    provenance: Literal["analytic", "numeric", "endpoint"]


class OptimizeResponse(BaseModel):
    tau_min: float
    tau_max: float
    j_min: float
    j_max: float
    candidates: list[CandidateModel]
    subintervals: list[SubIntervalModel]


class SweepRequest(BaseModel):
    params: ParamsModel
    q0: float = Field(ge=0)
    T: float = Field(gt=0)
    m: float = Field(gt=0)
    dynamics: DynamicsName = "erlanga"
    grid: int = Field(default=256, ge=2)


class SweepResponse(BaseModel):
    taus: list[float]
    averages: list[float]
    tau_min: float
    tau_max: float
    j_min: float
    j_max: float
