"""Request and response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator

from ..harness import SCHEMES, SWEEP_PARAMS


class InstanceModel(BaseModel):
    """Physical scenario parameters; keys match the JSON file format."""

    gamma: list[float] = Field(min_length=1)
    C_bits: float = Field(gt=0)
    beta_s_sec: float = Field(ge=0)
    bandwidth_hz: float = Field(gt=0)
    p_max_w: float = Field(gt=0)
    energy_budget_j: float = Field(gt=0)


class InstanceRef(BaseModel):
    """Either an inline instance or the name of a shipped preset."""

    instance: InstanceModel | None = None
    preset: str | None = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.instance is None) == (self.preset is None):
            raise ValueError("provide exactly one of 'instance' or 'preset'")
        return self


class SolveRequest(InstanceRef):
    epsilon: float = Field(default=1e-3, gt=0, le=0.1)
    scheme: str = "proposed"

    @model_validator(mode="after")
    def _known_scheme(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        return self


class PlanModel(BaseModel):
    t_n: list[float]
    t_c: float
    p_n: list[float]
    p_c: list[float]
    E_c: list[float]


class DiagnosticModel(BaseModel):
    name: str
    passed: bool
    residual: float
    detail: str = ""


class ReportModel(BaseModel):
    scheme: str
    total_T: float
    omega: list[float]
    plan: PlanModel
    energies: list[float]
    iterations: int
    gap: float
    diagnostics: list[DiagnosticModel] = []


class NecessityModel(BaseModel):
    x_star: float
    threshold: float
    overlap_possible: bool


class SolveResponse(BaseModel):
    report: ReportModel
    necessity: NecessityModel


class SweepSpecModel(BaseModel):
    param: str
    values: list[float] = Field(min_length=1)
    schemes: list[str] = list(SCHEMES)
    seed: int = 0

    @model_validator(mode="after")
    def _known_names(self):
        if self.param not in SWEEP_PARAMS:
            raise ValueError(f"unknown sweep parameter {self.param!r}")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}")
        return self


class SweepRequest(InstanceRef):
    sweep: SweepSpecModel
    epsilon: float = Field(default=1e-3, gt=0, le=0.1)


class SweepRowModel(BaseModel):
    param: str
    value: float
    scheme: str
    total_T: float
    omega: list[float]
    energies: list[float]
    t_c: float
    t_n: list[float]
    iterations: int
    gap: float


class SweepResponse(BaseModel):
    rows: list[SweepRowModel]
    mean_gaps_percent: dict[str, float]
    skipped: list[list[str]] = []


class CheckRequest(InstanceRef):
    rows: list[SweepRowModel]


class RowCheckModel(BaseModel):
    index: int
    violations: list[DiagnosticModel]


class CheckResponse(BaseModel):
    all_passed: bool
    rows: list[RowCheckModel]


class OracleRequest(InstanceRef):
    grid_step: float = Field(default=0.02, ge=0.005, le=0.5)


class OracleResponse(BaseModel):
    omega: list[float]
    total_T: float


class TraceRequest(InstanceRef):
    epsilon: float = Field(default=1e-3, gt=0, le=0.1)


class TraceRowModel(BaseModel):
    iteration: int
    cbv: float
    lower_bound: float
    vertex: list[float]
    projection: list[float] | None = None


class TraceResponse(BaseModel):
    report: ReportModel
    rows: list[TraceRowModel]


class HealthResponse(BaseModel):
    status: str = "ok"


class PresetsResponse(BaseModel):
    presets: dict[str, InstanceModel]
