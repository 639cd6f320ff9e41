"""HTTP front end: stateless JSON endpoints over the core handlers.

Input problems (malformed meshes or model files, degree mismatches,
non-well-centered complexes) map to 400 responses carrying the error kind.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..mesh import MeshError
from ..operators import OperatorError
from . import handlers
from .schemas import (
    CertifyRequest,
    CertifyResponse,
    CheckRequest,
    CheckResponse,
    ConvergeRequest,
    ConvergeResponse,
    ErrorResponse,
    OperatorsRequest,
    OperatorsResponse,
    SimulateRequest,
    SimulateResponse,
)

app = FastAPI(
    title="decphs",
    description="Simplicial complexes, circumcentric duals, Dirac structures, "
                "and port-Hamiltonian simulation as a service.",
)


def _bad_request(exc: Exception) -> JSONResponse:
    body = ErrorResponse(error=str(exc), kind=type(exc).__name__)
    return JSONResponse(status_code=400, content=body.model_dump())


@app.exception_handler(MeshError)
async def _mesh_error(_: Request, exc: MeshError) -> JSONResponse:
    return _bad_request(exc)


@app.exception_handler(OperatorError)
async def _operator_error(_: Request, exc: OperatorError) -> JSONResponse:
    return _bad_request(exc)


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/check", response_model=CheckResponse)
def check(req: CheckRequest) -> CheckResponse:
    return handlers.handle_check(req)


@app.post("/operators", response_model=OperatorsResponse)
def operators(req: OperatorsRequest) -> OperatorsResponse:
    return handlers.handle_operators(req)


@app.post("/certify", response_model=CertifyResponse)
def certify(req: CertifyRequest) -> CertifyResponse:
    return handlers.handle_certify(req)


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    return handlers.handle_simulate(req)


@app.post("/converge", response_model=ConvergeResponse)
def converge(req: ConvergeRequest) -> ConvergeResponse:
    return handlers.handle_converge(req)
