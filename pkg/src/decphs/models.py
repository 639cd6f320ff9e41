"""Turn-key builders: a 2D wave system on a triangle mesh and a 1D lossless
transmission line in both causalities, plus the analytic standing-wave oracle
used for convergence sweeps.

Material parameters given as scalars are per-length (or per-area) densities
and are integrated over cells; arrays are taken as already-lumped per-cell
values.  The energy matrix is diagonal in the lumped weights, so the line is
exactly an LC ladder: voltage-driven lines get one capacitor per primal edge
and one inductor per dual cell (two half-cells at the ends); current-driven
lines swap the carriers.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dual import DualComplex, build_dual
from .dirac import DiracStructure, Flavor, build_dirac
from .mesh import (
    MeshFormatError,
    MeshStructureError,
    SimplicialComplex,
    build_complex,
    uniform_interval,
)
from .operators import OperatorError
from .phs import PHSystem, QuadraticHamiltonian, assemble_system, passive_feedback


# ---------------------------------------------------------------------------
# Two-triangle fixture
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TwoTriangleFixture:
    """A well-centered two-triangle complex with golden operator matrices.

    ``edge_listing`` gives the reference edge order and orientation used by
    the golden matrices; ``edge_permutation``/``edge_orientation`` map the
    builder's canonical ascending-vertex storage onto that listing
    (column j of a golden matrix corresponds to canonical column
    ``edge_permutation[j]`` times ``edge_orientation[j]``).
    ``boundary_row_order`` lists boundary vertices in boundary-loop order.
    """

    complex: SimplicialComplex
    edge_listing: tuple[tuple[int, int], ...]
    edge_permutation: np.ndarray
    edge_orientation: np.ndarray
    boundary_row_order: np.ndarray
    incidence_1: np.ndarray
    trace_0: np.ndarray

    @property
    def d0(self) -> np.ndarray:
        return self.incidence_1.T

    @property
    def dual_derivative_1(self) -> np.ndarray:
        return -self.d0.T

    @property
    def dual_boundary_derivative_1(self) -> np.ndarray:
        return self.trace_0.T


def two_triangle_example() -> TwoTriangleFixture:
    """Two counterclockwise triangles glued along one interior edge.

    The layout is a symmetric kite, chosen acute so the complex is strictly
    well-centered; all four vertices lie on the boundary.
    """
    vertices = np.array([
        [0.0, 0.0],
        [0.75, -0.5],
        [0.75, 0.5],
        [1.5, 0.0],
    ])
    K = build_complex(2, vertices, np.array([[0, 1, 2], [2, 1, 3]]))
    listing = ((0, 1), (1, 2), (2, 0), (1, 3), (3, 2))
    incidence = np.array([
        [-1, 0, 1, 0, 0],
        [1, -1, 0, -1, 0],
        [0, 1, -1, 0, 1],
        [0, 0, 0, 1, -1],
    ])
    canonical = {tuple(K.simplices[1][j].tolist()): j for j in range(K.num_simplices(1))}
    perm, orient = [], []
    for (a, b) in listing:
        stored = tuple(sorted((a, b)))
        perm.append(canonical[stored])
        orient.append(1 if (a, b) == stored else -1)
    return TwoTriangleFixture(
        complex=K,
        edge_listing=listing,
        edge_permutation=np.asarray(perm, dtype=np.int64),
        edge_orientation=np.asarray(orient, dtype=np.int64),
        boundary_row_order=np.array([0, 1, 3, 2], dtype=np.int64),
        incidence_1=incidence,
        trace_0=np.eye(4)[np.array([0, 1, 3, 2])],
    )


# ---------------------------------------------------------------------------
# Wave model
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WaveModelSpec:
    """2D wave system: momentum on dual 2-cells, strain on primal edges."""

    mesh: SimplicialComplex
    kinetic_weight: float | np.ndarray = 1.0
    elastic_weight: float | np.ndarray = 1.0
    initial_momentum: np.ndarray | None = None
    initial_strain: np.ndarray | None = None
    boundary_input: Callable[[float], np.ndarray] | None = None
    feedback: str = "none"


@dataclass(frozen=True, eq=False)
class AssembledModel:
    """A ready-to-simulate system with its mesh, dual, and initial state."""

    system: PHSystem
    initial_state: np.ndarray
    mesh: SimplicialComplex
    dual: DualComplex
    kind: str
    description: dict = field(default_factory=dict)

    @property
    def dirac(self) -> DiracStructure:
        return self.system.dirac


def _per_cell(value, measures: np.ndarray, what: str) -> np.ndarray:
    """Scalar density -> integrated per-cell values; arrays pass through."""
    if np.isscalar(value):
        v = float(value)
        if v <= 0:
            raise OperatorError(f"{what} must be positive")
        return v * measures
    arr = np.asarray(value, dtype=float)
    if arr.shape != measures.shape:
        raise OperatorError(f"{what} needs {measures.shape[0]} per-cell values")
    if np.any(arr <= 0):
        raise OperatorError(f"{what} must be positive")
    return arr


def build_wave(spec: WaveModelSpec) -> AssembledModel:
    """Assemble the flavor-A wave system (p = 2, q = 1) on the given mesh."""
    K = spec.mesh
    if K.dimension != 2:
        raise MeshStructureError("the wave model needs a 2D complex")
    dual = build_dual(K)
    D = build_dirac(K, dual, Flavor.A, p=2, q=1)
    rho_cells = _per_cell(spec.kinetic_weight, dual.dual_measure[0], "kinetic weight")
    m_p = 1.0 / rho_cells
    stiff = spec.elastic_weight
    if np.isscalar(stiff):
        m_q = float(stiff) * dual.dual_measure[1] / dual.primal_measure[1]
        if float(stiff) <= 0:
            raise OperatorError("elastic weight must be positive")
    else:
        arr = np.asarray(stiff, dtype=float)
        if arr.shape != (K.num_simplices(1),) or np.any(arr <= 0):
            raise OperatorError("elastic weight needs positive per-edge values")
        m_q = arr * dual.dual_measure[1] / dual.primal_measure[1]
    H = QuadraticHamiltonian(m_p=m_p, m_q=m_q)
    sys = assemble_system(D, H, spec.boundary_input)
    if spec.feedback == "passive":
        sys = passive_feedback(sys)
    elif spec.feedback == "anti":
        sys = passive_feedback(sys, anti=True)
    elif spec.feedback != "none":
        raise OperatorError(f"unknown feedback {spec.feedback!r}")
    x0 = np.zeros(sys.dim)
    if spec.initial_momentum is not None:
        x0[: sys.dim_p] = np.asarray(spec.initial_momentum, dtype=float)
    if spec.initial_strain is not None:
        x0[sys.dim_p:] = np.asarray(spec.initial_strain, dtype=float)
    return AssembledModel(
        system=sys, initial_state=x0, mesh=K, dual=dual, kind="wave",
        description={"feedback": spec.feedback},
    )


# ---------------------------------------------------------------------------
# Telegraph model
# ---------------------------------------------------------------------------

class Causality(enum.Enum):
    VOLTAGE_IN = "voltage_in"
    CURRENT_IN = "current_in"


@dataclass(frozen=True, eq=False)
class TelegraphModelSpec:
    """1D lossless line on a uniform mesh with ``n_segments`` primal edges.

    ``capacitance``/``inductance``: scalars are per-length densities,
    arrays are lumped per-cell values on the carrier the causality dictates
    (voltage_in: capacitors on primal edges, inductors on dual cells;
    current_in: swapped).
    """

    n_segments: int
    length: float = 1.0
    capacitance: float | np.ndarray = 1.0
    inductance: float | np.ndarray = 1.0
    causality: Causality = Causality.VOLTAGE_IN
    initial_charge: np.ndarray | None = None
    initial_flux: np.ndarray | None = None
    input_signal: Callable[[float], np.ndarray] | None = None


def build_telegraph(spec: TelegraphModelSpec) -> AssembledModel:
    """Assemble the line in the requested causality (p = q = 1)."""
    if spec.n_segments < 1:
        raise MeshStructureError("need at least one segment")
    K = uniform_interval(spec.n_segments, spec.length)
    dual = build_dual(K)
    edge_meas = dual.primal_measure[1]
    cell_meas = dual.dual_measure[0]
    causality = Causality(spec.causality)
    if causality is Causality.VOLTAGE_IN:
        D = build_dirac(K, dual, Flavor.B, p=1, q=1)
        cap = _per_cell(spec.capacitance, edge_meas, "capacitance")
        ind = _per_cell(spec.inductance, cell_meas, "inductance")
        H = QuadraticHamiltonian(m_p=1.0 / cap, m_q=1.0 / ind)
    else:
        D = build_dirac(K, dual, Flavor.A, p=1, q=1)
        cap = _per_cell(spec.capacitance, cell_meas, "capacitance")
        ind = _per_cell(spec.inductance, edge_meas, "inductance")
        H = QuadraticHamiltonian(m_p=1.0 / cap, m_q=1.0 / ind)
    sys = assemble_system(D, H, spec.input_signal)
    x0 = np.zeros(sys.dim)
    if spec.initial_charge is not None:
        x0[: sys.dim_p] = np.asarray(spec.initial_charge, dtype=float)
    if spec.initial_flux is not None:
        x0[sys.dim_p:] = np.asarray(spec.initial_flux, dtype=float)
    return AssembledModel(
        system=sys, initial_state=x0, mesh=K, dual=dual, kind="telegraph",
        description={"causality": causality.value, "n_segments": spec.n_segments,
                     "length": spec.length},
    )


# ---------------------------------------------------------------------------
# Standing-wave oracle on the unit line (unit densities, wave speed 1):
#   V(x, t) = cos(pi x) cos(pi t),  I(x, t) = sin(pi x) sin(pi t)
# with exact antiderivatives for cochain sampling.
# ---------------------------------------------------------------------------

def standing_wave_cochains(model: AssembledModel, t: float) -> np.ndarray:
    """Exact-integral state cochains of the standing wave at time t."""
    K = model.mesh
    xs = K.vertices[:, 0]
    edges = K.simplices[1]
    xa, xb = xs[edges[:, 0]], xs[edges[:, 1]]
    # dual cell of a vertex spans from the adjacent midpoints, clipped at the ends
    a_v = np.full_like(xs, np.inf)
    b_v = np.full_like(xs, -np.inf)
    mids = 0.5 * (xa + xb)
    for j in range(len(edges)):
        for v in edges[j]:
            a_v[v] = min(a_v[v], min(xs[v], mids[j]))
            b_v[v] = max(b_v[v], max(xs[v], mids[j]))
    charge_primal = (np.sin(np.pi * xb) - np.sin(np.pi * xa)) / np.pi * np.cos(np.pi * t)
    flux_dual = (np.cos(np.pi * a_v) - np.cos(np.pi * b_v)) / np.pi * np.sin(np.pi * t)
    charge_dual = (np.sin(np.pi * b_v) - np.sin(np.pi * a_v)) / np.pi * np.cos(np.pi * t)
    flux_primal = (np.cos(np.pi * xa) - np.cos(np.pi * xb)) / np.pi * np.sin(np.pi * t)
    if model.description.get("causality") == Causality.VOLTAGE_IN.value:
        return np.concatenate([charge_primal, flux_dual])
    return np.concatenate([charge_dual, flux_primal])


def standing_wave_input(causality: Causality) -> Callable[[float], np.ndarray]:
    """Boundary drive realizing the standing wave in either causality."""
    causality = Causality(causality)
    if causality is Causality.VOLTAGE_IN:
        def drive(t: float) -> np.ndarray:
            return np.array([math.cos(math.pi * t), -math.cos(math.pi * t)])
    else:
        def drive(t: float) -> np.ndarray:
            return np.zeros(2)
    return drive


def standing_wave_telegraph(n_segments: int,
                            causality: Causality = Causality.VOLTAGE_IN) -> AssembledModel:
    """Unit line with unit densities, driven and initialized on the oracle."""
    spec = TelegraphModelSpec(
        n_segments=n_segments,
        causality=causality,
        input_signal=standing_wave_input(causality),
    )
    model = build_telegraph(spec)
    x0 = standing_wave_cochains(model, 0.0)
    return AssembledModel(
        system=model.system, initial_state=x0, mesh=model.mesh, dual=model.dual,
        kind=model.kind, description={**model.description, "oracle": "standing_wave"},
    )


def standing_wave_error(model: AssembledModel, trajectory) -> float:
    """L2-in-space (efforts at their carriers, plus boundary ports) max-in-time."""
    K, dual = model.mesh, model.dual
    xs = K.vertices[:, 0]
    edges = K.simplices[1]
    mids = 0.5 * (xs[edges[:, 0]] + xs[edges[:, 1]])
    w_e = dual.primal_measure[1]
    w_v = dual.dual_measure[0]
    voltage_in = model.description.get("causality") == Causality.VOLTAGE_IN.value
    sys = model.system
    worst = 0.0
    for i, t in enumerate(trajectory.times):
        g = trajectory.efforts[i]
        y = trajectory.outputs[i]
        if voltage_in:
            v_disc, i_disc = g[: sys.dim_p], g[sys.dim_p:]
            v_exact = np.cos(np.pi * mids) * math.cos(math.pi * t)
            i_exact = np.sin(np.pi * xs) * math.sin(math.pi * t)
            y_exact = np.zeros(2)
            err2 = (
                float(w_e @ (v_disc - v_exact) ** 2)
                + float(w_v @ (i_disc - i_exact) ** 2)
                + float(((y - y_exact) ** 2).sum())
            )
        else:
            v_disc, i_disc = g[: sys.dim_p], g[sys.dim_p:]
            v_exact = np.cos(np.pi * xs) * math.cos(math.pi * t)
            i_exact = np.sin(np.pi * mids) * math.sin(math.pi * t)
            y_exact = np.array([math.cos(math.pi * t), math.cos(math.pi * t)])
            err2 = (
                float(w_v @ (v_disc - v_exact) ** 2)
                + float(w_e @ (i_disc - i_exact) ** 2)
                + float(((y - y_exact) ** 2).sum())
            )
        worst = max(worst, math.sqrt(err2))
    return worst


@dataclass(frozen=True)
class ConvergenceResult:
    ns: tuple[int, ...]
    dts: tuple[float, ...]
    errors: tuple[float, ...]
    observed_order: float


def telegraph_convergence(ns, dt0: float = 0.64, t_final: float = 1.0,
                          causality: Causality = Causality.VOLTAGE_IN) -> ConvergenceResult:
    """Standing-wave sweep with dt proportional to 1/n^2.

    Requires an ascending list of at least three segment counts.
    """
    from .phs import simulate

    ns = [int(n) for n in ns]
    if len(ns) < 3 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise OperatorError("need an ascending list of at least three segment counts")
    dts, errors = [], []
    for n in ns:
        dt = dt0 / n**2
        steps = max(1, int(round(t_final / dt)))
        dt = t_final / steps
        model = standing_wave_telegraph(n, causality)
        traj = simulate(model.system, model.initial_state, t_final, dt)
        dts.append(dt)
        errors.append(standing_wave_error(model, traj))
    slope = np.polyfit(np.log(np.asarray(ns, dtype=float)),
                       np.log(np.asarray(errors, dtype=float)), 1)[0]
    return ConvergenceResult(
        ns=tuple(ns), dts=tuple(dts), errors=tuple(errors),
        observed_order=float(-slope),
    )


# ---------------------------------------------------------------------------
# Model spec text format
# ---------------------------------------------------------------------------

_EXPR_TOKEN = re.compile(r"^[0-9xyt+\-*/(). pisncoqrtex]*$")
_EXPR_NAMES = {"pi": math.pi, "sin": np.sin, "cos": np.cos, "sqrt": np.sqrt,
               "exp": np.exp}


def _compile_expr(expr: str, variables: tuple[str, ...]):
    """Compile a closed-form expression over the given variables.

    Accepts numbers, + - * / ** parentheses, and the names pi, sin, cos,
    sqrt, exp.
    """
    if not _EXPR_TOKEN.match(expr.replace("**", "*")):
        raise MeshFormatError(f"unsupported expression {expr!r}")
    allowed = dict(_EXPR_NAMES)
    try:
        code = compile(expr, "<model-expression>", "eval")
    except SyntaxError as exc:
        raise MeshFormatError(f"malformed expression {expr!r}: {exc.msg}") from None
    for name in code.co_names:
        if name not in allowed and name not in variables:
            raise MeshFormatError(f"unknown name {name!r} in expression {expr!r}")

    def fn(**kwargs):
        scope = dict(allowed)
        scope.update({k: kwargs[k] for k in variables})
        return eval(code, {"__builtins__": {}}, scope)  # noqa: S307 - charset-restricted

    return fn


@dataclass(frozen=True, eq=False)
class ParsedModel:
    """A model file: kind, scalar parameters, and expression strings."""

    kind: str
    fields: dict


def parse_model_text(text: str) -> ParsedModel:
    """Parse the key/value model format; '#' starts a comment."""
    fields: dict = {}
    kind = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        key, _, rest = body.partition(" ")
        rest = rest.strip()
        if not rest:
            raise MeshFormatError(f"field {key!r} needs a value", lineno)
        if key == "model":
            kind = rest
        else:
            fields[key] = rest
    if kind is None:
        raise MeshFormatError("missing 'model <kind>' line")
    if kind not in ("telegraph", "wave"):
        raise MeshFormatError(f"unknown model kind {kind!r}")
    return ParsedModel(kind=kind, fields=fields)


def _parse_number(fields: dict, key: str, default: float) -> float:
    if key not in fields:
        return default
    try:
        return float(fields[key])
    except ValueError:
        raise MeshFormatError(f"field {key!r} must be a number, got {fields[key]!r}") from None


def _parse_values(fields: dict, key: str, default):
    """A single number stays scalar; several become a per-cell array."""
    if key not in fields:
        return default
    parts = fields[key].split()
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise MeshFormatError(f"field {key!r} must be numeric, got {fields[key]!r}") from None
    return vals[0] if len(vals) == 1 else np.asarray(vals)


def instantiate_model(parsed: ParsedModel,
                      mesh: SimplicialComplex | None = None) -> AssembledModel:
    """Build a runnable model from a parsed spec (plus a mesh for wave models).

    Initial conditions are grid-sampled: densities are evaluated at cell
    centers and multiplied by cell measures; wave strain is the coboundary of
    a sampled displacement potential.
    """
    f = parsed.fields
    if parsed.kind == "telegraph":
        n_seg = int(_parse_number(f, "n_segments", 0))
        length = _parse_number(f, "length", 1.0)
        causality = Causality(f.get("causality", "voltage_in"))
        spec = TelegraphModelSpec(
            n_segments=n_seg, length=length,
            capacitance=_parse_values(f, "capacitance", 1.0),
            inductance=_parse_values(f, "inductance", 1.0),
            causality=causality,
            input_signal=_telegraph_input(f),
        )
        model = build_telegraph(spec)
        x0 = model.initial_state.copy()
        K, dual = model.mesh, model.dual
        xs = K.vertices[:, 0]
        mids = 0.5 * (xs[K.simplices[1][:, 0]] + xs[K.simplices[1][:, 1]])
        if causality is Causality.VOLTAGE_IN:
            centers_p, meas_p = mids, dual.primal_measure[1]
            centers_q, meas_q = xs, dual.dual_measure[0]
        else:
            centers_p, meas_p = xs, dual.dual_measure[0]
            centers_q, meas_q = mids, dual.primal_measure[1]
        if "initial_charge" in f:
            fn = _compile_expr(f["initial_charge"], ("x",))
            x0[: model.system.dim_p] = np.asarray(fn(x=centers_p), dtype=float) * meas_p
        if "initial_flux" in f:
            fn = _compile_expr(f["initial_flux"], ("x",))
            x0[model.system.dim_p:] = np.asarray(fn(x=centers_q), dtype=float) * meas_q
        return AssembledModel(system=model.system, initial_state=x0, mesh=K,
                              dual=dual, kind="telegraph", description=model.description)

    mesh_field = f.get("mesh", "external")
    if mesh_field == "two_triangle":
        K = two_triangle_example().complex
    elif mesh_field == "external":
        if mesh is None:
            raise MeshFormatError("wave model with 'mesh external' needs a mesh")
        K = mesh
    else:
        raise MeshFormatError(f"unknown mesh reference {mesh_field!r}")
    boundary_input = None
    if "input" in f:
        fn = _compile_expr(f["input"], ("t",))
        n_ports = len(K.boundary_simplices[0])

        def boundary_input(t: float, _fn=fn, _n=n_ports) -> np.ndarray:
            return np.full(_n, float(_fn(t=t)))

    spec = WaveModelSpec(
        mesh=K,
        kinetic_weight=_parse_values(f, "kinetic_weight", 1.0),
        elastic_weight=_parse_values(f, "elastic_weight", 1.0),
        boundary_input=boundary_input,
        feedback=f.get("feedback", "none"),
    )
    model = build_wave(spec)
    x0 = model.initial_state.copy()
    dual = model.dual
    if "initial_momentum" in f:
        fn = _compile_expr(f["initial_momentum"], ("x", "y"))
        vals = np.asarray(fn(x=K.vertices[:, 0], y=K.vertices[:, 1]), dtype=float)
        x0[: model.system.dim_p] = np.broadcast_to(vals, (K.num_simplices(0),)) \
            * dual.dual_measure[0]
    if "initial_displacement" in f:
        from .operators import coboundary

        fn = _compile_expr(f["initial_displacement"], ("x", "y"))
        pot = np.asarray(fn(x=K.vertices[:, 0], y=K.vertices[:, 1]), dtype=float)
        pot = np.broadcast_to(pot, (K.num_simplices(0),))
        x0[model.system.dim_p:] = coboundary(K, 0).matrix @ pot
    return AssembledModel(system=model.system, initial_state=x0, mesh=K,
                          dual=dual, kind="wave", description=model.description)


def _telegraph_input(fields: dict) -> Callable[[float], np.ndarray] | None:
    exprs = [fields.get("input_left"), fields.get("input_right")]
    if exprs[0] is None and exprs[1] is None:
        return None
    fns = [None if e is None else _compile_expr(e, ("t",)) for e in exprs]

    def signal(t: float) -> np.ndarray:
        return np.array([0.0 if fn is None else float(fn(t=t)) for fn in fns])

    return signal
