"""Discrete exterior calculus on oriented simplicial complexes with
circumcentric duals, simplicial Dirac structures, and energy-consistent
port-Hamiltonian simulation."""

from .mesh import (
    BoundaryComplex,
    MeshError,
    MeshFormatError,
    MeshGeometryError,
    MeshOrientationError,
    MeshStructureError,
    SimplicialComplex,
    boundary_complex,
    boundary_operator,
    build_complex,
    mesh_from_text,
    mesh_to_text,
    uniform_interval,
)
from .dual import (
    DualComplex,
    NotWellCenteredError,
    WellCenteredReport,
    build_dual,
    circumcenter,
    dual_to_text,
    is_well_centered,
)
from .operators import (
    Carrier,
    Cochain,
    LinearOp,
    OperatorError,
    Space,
    check_evaluation_by_parts,
    coboundary,
    dual_derivative_boundary,
    dual_derivative_interior,
    hodge,
    hodge_boundary,
    hodge_inv,
    matrix_triplets,
    trace,
    wedge_eval,
)
from .dirac import (
    DiracCertificate,
    DiracStructure,
    Flavor,
    GraphElement,
    PoissonCertificate,
    bilinear_pairing,
    build_dirac,
    certify_dirac,
    certify_poisson,
    flip_block,
    graph_element,
    random_graph_element,
)
from .phs import (
    PHSystem,
    QuadraticHamiltonian,
    Trajectory,
    assemble_system,
    hamiltonian_gradient_check,
    passive_feedback,
    simulate,
    step_implicit_midpoint,
)
from .models import (
    AssembledModel,
    Causality,
    ConvergenceResult,
    TelegraphModelSpec,
    WaveModelSpec,
    build_telegraph,
    build_wave,
    instantiate_model,
    parse_model_text,
    standing_wave_error,
    standing_wave_telegraph,
    telegraph_convergence,
    two_triangle_example,
)
from .checks import CheckReport, run_checks

__version__ = "0.1.0"
