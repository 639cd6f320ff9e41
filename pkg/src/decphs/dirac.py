"""Simplicial Dirac structures as block linear relations, with certification.

Two flavors are assembled for a degree pair (p, q) with p + q = n + 1 and
r = pq + 1:

* flavor A: state flows live on (dual p, primal q); the free boundary
  variable is a dual-boundary effort.  Block relation::

      [f_p]   [ 0              (-1)^r d_i ] [e_p]            [(-1)^r d_b]
      [f_q] = [ d^(n-p)        0          ] [e_q]   +        [0         ] e_b
       f_b  =  (-1)^p tr^(n-p) e_p

* flavor B: mirrored carriers; the free boundary variable is a dual-boundary
  flow, and the constrained one the primal-boundary effort::

      [f_p]   [ 0              (-1)^r d^(n-q) ] [e_p]        [0   ]
      [f_q] = [ d_i^(n-p)      0              ] [e_q]   +    [d_b ] f_b
       e_b  =  (-1)^p tr^(n-q) e_q

The symmetric pairing mirrors the continuous bilinear form: interior wedge
terms over the complex plus boundary terms, each wedge evaluated with the
graded sign of its written order.  Certification checks isotropy on random
graph elements and the graph-dimension count; together these witness
maximality.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .dual import DualComplex
from .mesh import SimplicialComplex
from .operators import (
    Carrier,
    LinearOp,
    OperatorError,
    Space,
    coboundary,
    dual_derivative_boundary,
    dual_derivative_interior,
    space_dim,
    trace,
)


class Flavor(enum.Enum):
    A = "A"
    B = "B"


def _scaled(op: LinearOp, sign: int) -> LinearOp:
    if sign == 1:
        return op
    return LinearOp(op.complex, op.domain, op.codomain, -op.matrix)


@dataclass(frozen=True, eq=False)
class DiracStructure:
    """Block realization of a simplicial Dirac structure.

    ``top_block``/``bottom_block`` fill the off-diagonal interior operator,
    ``input_block`` couples the free boundary variable into the flow rows,
    and ``output_block`` reads the constrained boundary variable off the
    efforts.  ``pair_sign_*`` are the graded wedge signs turning each term of
    the bilinear pairing into a coefficient dot product.
    """

    complex: SimplicialComplex
    dual: DualComplex
    flavor: Flavor
    p: int
    q: int
    r: int
    top_block: LinearOp
    bottom_block: LinearOp
    input_block: LinearOp
    output_block: LinearOp
    pair_sign_p: int
    pair_sign_q: int
    pair_sign_b: int

    @property
    def dim_p(self) -> int:
        """Dimension of the p-type state/flow space."""
        return self.top_block.matrix.shape[0]

    @property
    def dim_q(self) -> int:
        return self.bottom_block.matrix.shape[0]

    @property
    def dim_b(self) -> int:
        return self.output_block.matrix.shape[0]

    @property
    def flow_dimension(self) -> int:
        return self.dim_p + self.dim_q + self.dim_b


def build_dirac(K: SimplicialComplex, dual: DualComplex, flavor: Flavor | str,
                p: int, q: int) -> DiracStructure:
    """Assemble the block relation for the degree pair (p, q).

    Raises:
        OperatorError: if p + q != n + 1 or the degrees are out of range.
    """
    flavor = Flavor(flavor)
    n = K.dimension
    if p < 1 or q < 1 or p + q != n + 1:
        raise OperatorError(f"need positive p, q with p + q = {n + 1}, got ({p}, {q})")
    if dual.primal is not K:
        raise OperatorError("dual complex does not belong to this complex")
    r = p * q + 1
    sr = -1 if r % 2 else 1
    sp_ = -1 if p % 2 else 1
    sign_p = -1 if (p * (n - p)) % 2 else 1
    sign_q = -1 if (q * (n - q)) % 2 else 1
    sign_b = -1 if ((n - p) * (p - 1)) % 2 else 1

    if flavor is Flavor.A:
        top = _scaled(dual_derivative_interior(K, n - q), sr)
        bottom = coboundary(K, n - p)
        inp = _scaled(dual_derivative_boundary(K, n - q), sr)
        out = _scaled(trace(K, n - p), sp_)
        return DiracStructure(
            complex=K, dual=dual, flavor=flavor, p=p, q=q, r=r,
            top_block=top, bottom_block=bottom, input_block=inp, output_block=out,
            pair_sign_p=1, pair_sign_q=sign_q, pair_sign_b=sign_b,
        )
    top = _scaled(coboundary(K, n - q), sr)
    bottom = dual_derivative_interior(K, n - p)
    inp = dual_derivative_boundary(K, n - p)
    out = _scaled(trace(K, n - q), sp_)
    return DiracStructure(
        complex=K, dual=dual, flavor=flavor, p=p, q=q, r=r,
        top_block=top, bottom_block=bottom, input_block=inp, output_block=out,
        pair_sign_p=sign_p, pair_sign_q=1, pair_sign_b=1,
    )


@dataclass(frozen=True, eq=False)
class GraphElement:
    """One (flows, efforts) tuple of a Dirac structure's graph."""

    flow_p: np.ndarray
    flow_q: np.ndarray
    flow_b: np.ndarray
    effort_p: np.ndarray
    effort_q: np.ndarray
    effort_b: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt(sum(
            float(v @ v) for v in (self.flow_p, self.flow_q, self.flow_b,
                                   self.effort_p, self.effort_q, self.effort_b)
        )))


def graph_element(D: DiracStructure, effort_p: np.ndarray, effort_q: np.ndarray,
                  boundary_free: np.ndarray) -> GraphElement:
    """Complete free variables (both efforts, free boundary) to a graph element."""
    effort_p = np.asarray(effort_p, dtype=float)
    effort_q = np.asarray(effort_q, dtype=float)
    boundary_free = np.asarray(boundary_free, dtype=float)
    if D.flavor is Flavor.A:
        fp = D.top_block.matrix @ effort_q + D.input_block.matrix @ boundary_free
        fq = D.bottom_block.matrix @ effort_p
        fb = D.output_block.matrix @ effort_p
        return GraphElement(fp, fq, fb, effort_p, effort_q, boundary_free)
    fp = D.top_block.matrix @ effort_q
    fq = D.bottom_block.matrix @ effort_p + D.input_block.matrix @ boundary_free
    eb = D.output_block.matrix @ effort_q
    return GraphElement(fp, fq, boundary_free, effort_p, effort_q, eb)


def random_graph_element(D: DiracStructure, rng: np.random.Generator) -> GraphElement:
    """Uniform [-1, 1] draws of the free variables, completed to the graph."""
    ep = rng.uniform(-1.0, 1.0, D.bottom_block.matrix.shape[1])
    eq = rng.uniform(-1.0, 1.0, D.top_block.matrix.shape[1])
    ub = rng.uniform(-1.0, 1.0, D.input_block.matrix.shape[1])
    return graph_element(D, ep, eq, ub)


def bilinear_pairing(D: DiracStructure, t1: GraphElement, t2: GraphElement) -> float:
    """The symmetric pairing of two (flows, efforts) tuples."""
    interior = (
        D.pair_sign_p * (t1.effort_p @ t2.flow_p + t2.effort_p @ t1.flow_p)
        + D.pair_sign_q * (t1.effort_q @ t2.flow_q + t2.effort_q @ t1.flow_q)
    )
    boundary = D.pair_sign_b * (t1.effort_b @ t2.flow_b + t2.effort_b @ t1.flow_b)
    return float(interior + boundary)


@dataclass(frozen=True)
class DiracCertificate:
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

    @property
    def passed(self) -> bool:
        return self.isotropy_pass and self.dimension_pass


ISOTROPY_RTOL = 1e-11


def certify_dirac(D: DiracStructure, trials: int = 100, seed: int = 0) -> DiracCertificate:
    """Numerically certify isotropy and maximal dimension.

    Isotropy: random graph-element pairs must pair to within
    ``ISOTROPY_RTOL`` times the product of their norms.  Dimension: the graph,
    parametrized by the free variables, must have rank equal to the flow-space
    dimension; isotropic + that rank witnesses maximality.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        t1 = random_graph_element(D, rng)
        t2 = random_graph_element(D, rng)
        scale = max(t1.norm() * t2.norm(), 1e-300)
        worst = max(worst, abs(bilinear_pairing(D, t1, t2)) / scale)
    worst = float(worst)
    iso_ok = bool(worst <= ISOTROPY_RTOL)

    dim_p, dim_q, dim_b = D.dim_p, D.dim_q, D.dim_b
    n_free = D.top_block.matrix.shape[1] + D.bottom_block.matrix.shape[1] \
        + D.input_block.matrix.shape[1]
    basis = np.eye(n_free)
    cols = []
    np_, nq = D.bottom_block.matrix.shape[1], D.top_block.matrix.shape[1]
    for v in basis:
        t = graph_element(D, v[:np_], v[np_:np_ + nq], v[np_ + nq:])
        cols.append(np.concatenate([t.flow_p, t.flow_q, t.flow_b,
                                    t.effort_p, t.effort_q, t.effort_b]))
    rank = int(np.linalg.matrix_rank(np.asarray(cols).T))
    flow_dim = dim_p + dim_q + dim_b
    return DiracCertificate(
        flavor=D.flavor.value, p=D.p, q=D.q, trials=trials,
        isotropy_worst=worst, isotropy_tol=ISOTROPY_RTOL, isotropy_pass=iso_ok,
        graph_dimension=rank, flow_dimension=flow_dim,
        dimension_pass=rank == flow_dim,
    )


def flip_block(D: DiracStructure, name: str) -> DiracStructure:
    """Negative control: a copy of D with one block's sign flipped."""
    if name not in ("top_block", "bottom_block", "input_block", "output_block"):
        raise OperatorError(f"unknown block {name!r}")
    op: LinearOp = getattr(D, name)
    return replace(D, **{name: _scaled(op, -1)})


@dataclass(frozen=True)
class PoissonCertificate:
    trials: int
    worst_residual: float
    tol: float
    passed: bool


POISSON_RTOL = 1e-12


def certify_poisson(D: DiracStructure, trials: int = 100, seed: int = 0) -> PoissonCertificate:
    """Skewness of the zero-boundary interior relation under the wedge pairing.

    Only defined for flavor A, whose interior operator is a Poisson structure
    on the state space (constant coefficients, so the Jacobi identity is
    automatic).
    """
    if D.flavor is not Flavor.A:
        raise OperatorError("the Poisson certificate applies to flavor A")
    rng = np.random.default_rng(seed)
    worst = 0.0
    np_, nq = D.bottom_block.matrix.shape[1], D.top_block.matrix.shape[1]
    for _ in range(trials):
        ep = rng.uniform(-1.0, 1.0, np_)
        eq = rng.uniform(-1.0, 1.0, nq)
        fp = D.top_block.matrix @ eq
        fq = D.bottom_block.matrix @ ep
        val = D.pair_sign_p * float(ep @ fp) + D.pair_sign_q * float(eq @ fq)
        scale = max(float(ep @ ep + eq @ eq), 1e-300)
        worst = max(worst, abs(val) / scale)
    return PoissonCertificate(
        trials=trials, worst_residual=float(worst), tol=POISSON_RTOL,
        passed=bool(worst <= POISSON_RTOL),
    )


def dirac_spaces(D: DiracStructure) -> dict[str, tuple[str, int, int]]:
    """Carrier, degree, and dimension of each flow/effort component (for reports)."""
    K = D.complex
    n = K.dimension
    if D.flavor is Flavor.A:
        spaces = {
            "flow_p": Space(Carrier.DUAL_INTERIOR, D.p),
            "flow_q": Space(Carrier.PRIMAL, D.q),
            "flow_b": Space(Carrier.PRIMAL_BOUNDARY, n - D.p),
            "effort_p": Space(Carrier.PRIMAL, n - D.p),
            "effort_q": Space(Carrier.DUAL_INTERIOR, n - D.q),
            "effort_b": Space(Carrier.DUAL_BOUNDARY, n - D.q),
        }
    else:
        spaces = {
            "flow_p": Space(Carrier.PRIMAL, D.p),
            "flow_q": Space(Carrier.DUAL_INTERIOR, D.q),
            "flow_b": Space(Carrier.DUAL_BOUNDARY, n - D.p),
            "effort_p": Space(Carrier.DUAL_INTERIOR, n - D.p),
            "effort_q": Space(Carrier.PRIMAL, n - D.q),
            "effort_b": Space(Carrier.PRIMAL_BOUNDARY, n - D.q),
        }
    return {
        name: (s.carrier.value, s.degree, space_dim(K, s))
        for name, s in spaces.items()
    }
