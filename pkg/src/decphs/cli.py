"""Command-line front end.

The CLI is a thin client over the service layer: each subcommand builds the
same request model the HTTP endpoint accepts and either calls the handler
in-process (default) or posts it to a running service via ``--server``.
Outputs are deterministic: identical inputs and seeds give byte-identical
files.

Exit codes: 0 on success, 1 when a check or certification fails, 2 on input
errors (unreadable files, parse errors, bad degrees).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from pydantic import BaseModel, ValidationError

from .mesh import MeshError
from .operators import OperatorError
from .service import handlers
from .service.schemas import (
    CertifyRequest,
    CertifyResponse,
    CheckRequest,
    CheckResponse,
    ConvergeRequest,
    ConvergeResponse,
    OperatorsRequest,
    OperatorsResponse,
    SimulateRequest,
    SimulateResponse,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2

_ROUTES = {
    "/check": (handlers.handle_check, CheckResponse),
    "/operators": (handlers.handle_operators, OperatorsResponse),
    "/certify": (handlers.handle_certify, CertifyResponse),
    "/simulate": (handlers.handle_simulate, SimulateResponse),
    "/converge": (handlers.handle_converge, ConvergeResponse),
}


class InputError(Exception):
    pass


class ServiceClient:
    """Dispatches requests in-process or to a remote service."""

    def __init__(self, server: str | None = None):
        self.server = server.rstrip("/") if server else None

    def post(self, path: str, request: BaseModel):
        handler, response_model = _ROUTES[path]
        if self.server is None:
            return handler(request)
        import httpx

        resp = httpx.post(f"{self.server}{path}", json=request.model_dump(), timeout=600.0)
        if resp.status_code == 400:
            raise InputError(resp.json().get("error", "bad request"))
        resp.raise_for_status()
        return response_model.model_validate(resp.json())


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _write(out_dir: str | None, name: str, content: str) -> None:
    if out_dir is None:
        return
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / name).write_text(content)


def _json_text(model: BaseModel) -> str:
    return json.dumps(model.model_dump(), indent=2, sort_keys=True) + "\n"


def cmd_check(args, client: ServiceClient) -> int:
    req = CheckRequest(mesh_text=_read_text(args.mesh), trials=args.trials, seed=args.seed)
    resp = client.post("/check", req)
    _write(args.out, "check_report.json", _json_text(resp))
    for item in resp.checks:
        status = "pass" if item.passed else "FAIL"
        print(f"{status} {item.name} worst={item.worst!r}")
    print(f"{'pass' if resp.passed else 'FAIL'} overall")
    return EXIT_OK if resp.passed else EXIT_CHECK_FAILED


def cmd_dump_operators(args, client: ServiceClient) -> int:
    req = OperatorsRequest(mesh_text=_read_text(args.mesh))
    resp = client.post("/operators", req)
    out = args.out or "operators"
    for name, content in sorted(resp.files.items()):
        _write(out, name, content)
    manifest = json.dumps(
        [info.model_dump() for info in resp.manifest], indent=2, sort_keys=True
    ) + "\n"
    _write(out, "manifest.json", manifest)
    print(f"wrote {len(resp.files) + 1} files to {out}")
    return EXIT_OK


def cmd_certify(args, client: ServiceClient) -> int:
    req = CertifyRequest(
        mesh_text=_read_text(args.mesh), flavor=args.flavor, p=args.p, q=args.q,
        trials=args.trials, seed=args.seed,
    )
    resp = client.post("/certify", req)
    _write(args.out, "certify_report.json", _json_text(resp))
    print(_json_text(resp), end="")
    return EXIT_OK if resp.passed else EXIT_CHECK_FAILED


def cmd_simulate(args, client: ServiceClient) -> int:
    req = SimulateRequest(
        model_text=_read_text(args.model),
        mesh_text=_read_text(args.mesh) if args.mesh else None,
        dt=args.dt, t_final=args.T, seed=args.seed,
    )
    resp = client.post("/simulate", req)
    _write(args.out, "trajectory.txt", resp.trajectory_text)
    _write(args.out, "manifest.json",
           json.dumps(resp.manifest, indent=2, sort_keys=True) + "\n")
    print(f"steps {resp.steps}")
    print(f"H_final {resp.final_energy!r}")
    print(f"defect {resp.final_defect!r}")
    print(f"max_abs_power {resp.max_abs_power!r}")
    return EXIT_OK


def cmd_converge(args, client: ServiceClient) -> int:
    try:
        ns = [int(v) for v in args.ns.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"--ns must be a comma-separated integer list, got {args.ns!r}")
    req = ConvergeRequest(ns=ns, dt0=args.dt0, t_final=args.T, causality=args.causality)
    resp = client.post("/converge", req)
    _write(args.out, "convergence.json", _json_text(resp))
    table = ["# n dt error"]
    for e in resp.entries:
        table.append(f"{e.n} {e.dt!r} {e.error!r}")
    table.append(f"# observed_order {resp.observed_order!r}")
    text = "\n".join(table) + "\n"
    _write(args.out, "convergence.txt", text)
    print(text, end="")
    return EXIT_OK


def cmd_serve(args, _client: ServiceClient) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decphs",
        description="Simplicial complexes, duals, Dirac structures, and "
                    "port-Hamiltonian simulation.",
    )
    parser.add_argument("--server", default=None,
                        help="base URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a mesh and its operator identities")
    p.add_argument("--mesh", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("dump-operators", help="write every operator matrix as triplets")
    p.add_argument("--mesh", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_dump_operators)

    p = sub.add_parser("certify", help="certify a Dirac structure")
    p.add_argument("--mesh", required=True)
    p.add_argument("--flavor", required=True, choices=["A", "B"])
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("simulate", help="run a model file")
    p.add_argument("--model", required=True)
    p.add_argument("--mesh", default=None)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("converge", help="standing-wave convergence sweep")
    p.add_argument("--ns", required=True, help="comma-separated segment counts")
    p.add_argument("--dt0", type=float, default=0.64)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--causality", default="voltage_in",
                   choices=["voltage_in", "current_in"])
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_converge)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    client = ServiceClient(args.server)
    try:
        return args.fn(args, client)
    except (MeshError, OperatorError, InputError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
