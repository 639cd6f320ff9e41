"""Request/response models for the HTTP service (also used by the CLI client)."""

from __future__ import annotations

from pydantic import BaseModel, Field


class CheckRequest(BaseModel):
    mesh_text: str
    trials: int = Field(default=100, ge=1)
    seed: int = 0


class CheckItem(BaseModel):
    name: str
    passed: bool
    detail: str
    worst: float


class CheckResponse(BaseModel):
    passed: bool
    dimension: int
    cells: list[int]
    checks: list[CheckItem]


class OperatorsRequest(BaseModel):
    mesh_text: str


class OperatorInfo(BaseModel):
    name: str
    shape: tuple[int, int]
    domain_carrier: str
    domain_degree: int
    codomain_carrier: str
    codomain_degree: int


class OperatorsResponse(BaseModel):
    manifest: list[OperatorInfo]
    files: dict[str, str]


class CertifyRequest(BaseModel):
    mesh_text: str
    flavor: str = Field(pattern="^[AB]$")
    p: int
    q: int
    trials: int = Field(default=100, ge=1)
    seed: int = 0


class CertifyResponse(BaseModel):
    passed: bool
    flavor: str
    p: int
    q: int
    trials: int
    isotropy_worst: float
    isotropy_tol: float
    isotropy_pass: bool
    graph_dimension: int
    flow_dimension: int
    dimension_pass: bool
    poisson_worst: float | None = None
    poisson_pass: bool | None = None
    spaces: dict[str, tuple[str, int, int]]


class SimulateRequest(BaseModel):
    model_text: str
    mesh_text: str | None = None
    dt: float = Field(gt=0)
    t_final: float = Field(ge=0)
    seed: int = 0


class SimulateResponse(BaseModel):
    manifest: dict
    trajectory_text: str
    final_energy: float
    initial_energy: float
    final_defect: float
    max_abs_power: float
    steps: int


class ConvergeRequest(BaseModel):
    ns: list[int]
    dt0: float = Field(default=0.64, gt=0)
    t_final: float = Field(default=1.0, gt=0)
    causality: str = "voltage_in"


class ConvergeEntry(BaseModel):
    n: int
    dt: float
    error: float


class ConvergeResponse(BaseModel):
    entries: list[ConvergeEntry]
    observed_order: float


class ErrorResponse(BaseModel):
    error: str
    kind: str
