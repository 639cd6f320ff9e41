"""Core handlers shared by the HTTP endpoints and the in-process CLI client.

Each handler maps a request model to a response model deterministically:
identical requests (including seeds) produce identical responses, byte for
byte once serialized.
"""

from __future__ import annotations

import hashlib

import numpy as np

from ..checks import run_checks
from ..dirac import build_dirac, certify_dirac, certify_poisson, dirac_spaces, Flavor
from ..dual import build_dual, dual_to_text
from ..mesh import SimplicialComplex, mesh_from_text
from ..models import (
    Causality,
    instantiate_model,
    parse_model_text,
    telegraph_convergence,
)
from ..operators import (
    LinearOp,
    coboundary,
    dual_derivative_boundary,
    dual_derivative_interior,
    hodge,
    hodge_boundary,
    matrix_triplets,
    trace,
)
from ..phs import simulate
from .schemas import (
    CertifyRequest,
    CertifyResponse,
    CheckItem,
    CheckRequest,
    CheckResponse,
    ConvergeEntry,
    ConvergeRequest,
    ConvergeResponse,
    OperatorInfo,
    OperatorsRequest,
    OperatorsResponse,
    SimulateRequest,
    SimulateResponse,
)


def _mesh(req_text: str) -> SimplicialComplex:
    return mesh_from_text(req_text)


def handle_check(req: CheckRequest) -> CheckResponse:
    K = _mesh(req.mesh_text)
    report = run_checks(K, trials=req.trials, seed=req.seed)
    return CheckResponse(
        passed=report.passed,
        dimension=K.dimension,
        cells=[K.num_simplices(k) for k in range(K.dimension + 1)],
        checks=[CheckItem(name=r.name, passed=r.passed, detail=r.detail, worst=r.worst)
                for r in report.results],
    )


def _named_operators(K: SimplicialComplex) -> list[tuple[str, LinearOp]]:
    dual = build_dual(K)
    n = K.dimension
    ops: list[tuple[str, LinearOp]] = []
    for k in range(n):
        ops.append((f"d{k}", coboundary(K, k)))
        ops.append((f"tr{k}", trace(K, k)))
    for d in range(n):
        ops.append((f"di{d}", dual_derivative_interior(K, d)))
        ops.append((f"db{d}", dual_derivative_boundary(K, d)))
    for k in range(n + 1):
        ops.append((f"star{k}", hodge(K, dual, k)))
    for k in range(n):
        ops.append((f"starb{k}", hodge_boundary(K, dual, k)))
    return ops


def handle_operators(req: OperatorsRequest) -> OperatorsResponse:
    K = _mesh(req.mesh_text)
    manifest, files = [], {}
    for name, op in _named_operators(K):
        manifest.append(OperatorInfo(
            name=name,
            shape=(op.matrix.shape[0], op.matrix.shape[1]),
            domain_carrier=op.domain.carrier.value,
            domain_degree=op.domain.degree,
            codomain_carrier=op.codomain.carrier.value,
            codomain_degree=op.codomain.degree,
        ))
        files[f"{name}.mtx"] = matrix_triplets(op)
    files["dual.txt"] = dual_to_text(build_dual(K))
    return OperatorsResponse(manifest=manifest, files=files)


def handle_certify(req: CertifyRequest) -> CertifyResponse:
    K = _mesh(req.mesh_text)
    dual = build_dual(K)
    D = build_dirac(K, dual, req.flavor, req.p, req.q)
    cert = certify_dirac(D, trials=req.trials, seed=req.seed)
    poisson_worst = poisson_pass = None
    if D.flavor is Flavor.A:
        pois = certify_poisson(D, trials=req.trials, seed=req.seed)
        poisson_worst, poisson_pass = pois.worst_residual, pois.passed
    return CertifyResponse(
        passed=cert.passed and (poisson_pass is not False),
        flavor=cert.flavor, p=cert.p, q=cert.q, trials=cert.trials,
        isotropy_worst=cert.isotropy_worst, isotropy_tol=cert.isotropy_tol,
        isotropy_pass=cert.isotropy_pass,
        graph_dimension=cert.graph_dimension, flow_dimension=cert.flow_dimension,
        dimension_pass=cert.dimension_pass,
        poisson_worst=poisson_worst, poisson_pass=poisson_pass,
        spaces=dirac_spaces(D),
    )


def handle_simulate(req: SimulateRequest) -> SimulateResponse:
    parsed = parse_model_text(req.model_text)
    mesh = _mesh(req.mesh_text) if req.mesh_text else None
    model = instantiate_model(parsed, mesh)
    traj = simulate(model.system, model.initial_state, req.t_final, req.dt)
    manifest = {
        "model": parsed.kind,
        "model_sha256": hashlib.sha256(req.model_text.encode()).hexdigest(),
        "mesh_sha256": hashlib.sha256(req.mesh_text.encode()).hexdigest()
        if req.mesh_text else None,
        "dt": req.dt,
        "t_final": req.t_final,
        "seed": req.seed,
        "flavor": model.dirac.flavor.value,
        "p": model.dirac.p,
        "q": model.dirac.q,
        "state_dimension": model.system.dim,
        "description": model.description,
    }
    return SimulateResponse(
        manifest=manifest,
        trajectory_text=traj.to_text(),
        final_energy=float(traj.energy[-1]),
        initial_energy=float(traj.energy[0]),
        final_defect=float(traj.defect[-1]),
        max_abs_power=float(np.max(np.abs(traj.power))),
        steps=len(traj.times) - 1,
    )


def handle_converge(req: ConvergeRequest) -> ConvergeResponse:
    result = telegraph_convergence(
        req.ns, dt0=req.dt0, t_final=req.t_final, causality=Causality(req.causality)
    )
    return ConvergeResponse(
        entries=[ConvergeEntry(n=n, dt=dt, error=e)
                 for n, dt, e in zip(result.ns, result.dts, result.errors)],
        observed_order=result.observed_order,
    )
