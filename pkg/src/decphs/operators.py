"""Linear operators on cochain spaces and the primal-dual pairing.

Cochains live on one of four carriers: the primal complex, its boundary, the
interior dual complex, or the boundary of the dual complex.  Dual cochains of
degree d are indexed by the primal (n-d)-simplices they are dual to; boundary
carriers are indexed in the order of ``K.boundary_simplices[k].indices``.

The operator zoo, with n the complex dimension:

* ``coboundary(K, k)``       : primal k -> primal k+1, the transposed boundary map;
* ``trace(K, k)``            : primal k -> boundary k, signed selection;
* ``dual_derivative_interior(K, d)`` : dual d -> dual d+1,
  equal to (-1)^(n-d) coboundary(n-d-1)^T;
* ``dual_derivative_boundary(K, d)`` : dual-boundary d -> dual d+1,
  equal to (-1)^(n-d-1) trace(n-d-1)^T;
* ``hodge(K, dual, k)``      : primal k -> dual n-k, diagonal with entries
  |sigma^k| / |dual cell of sigma^k| (reciprocal for ``hodge_inv``);
* ``hodge_boundary(K, dual, k)`` : boundary k -> dual-boundary n-1-k.

The pairing of a primal k-cochain with a dual (n-k)-cochain over the whole
complex is the plain coefficient dot product; writing the dual factor first
multiplies it by (-1)^(k(n-k)) (on the boundary, with n-1 in place of n).
With these definitions the evaluation-by-parts identity holds exactly in
floating point, for any cochains.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .dual import DualComplex
from .mesh import SimplicialComplex


class Carrier(enum.Enum):
    PRIMAL = "primal"
    PRIMAL_BOUNDARY = "primal_boundary"
    DUAL_INTERIOR = "dual_interior"
    DUAL_BOUNDARY = "dual_boundary"


@dataclass(frozen=True)
class Space:
    """A cochain space: carrier plus degree."""

    carrier: Carrier
    degree: int


class OperatorError(ValueError):
    """Degree out of range, carrier mismatch, or dimension mismatch."""


def space_dim(K: SimplicialComplex, space: Space) -> int:
    n = K.dimension
    c, k = space.carrier, space.degree
    if c is Carrier.PRIMAL:
        if not 0 <= k <= n:
            raise OperatorError(f"primal degree {k} out of range for dimension {n}")
        return K.num_simplices(k)
    if c is Carrier.PRIMAL_BOUNDARY:
        if not 0 <= k <= n - 1:
            raise OperatorError(f"boundary degree {k} out of range for dimension {n}")
        return len(K.boundary_simplices[k])
    if c is Carrier.DUAL_INTERIOR:
        if not 0 <= k <= n:
            raise OperatorError(f"dual degree {k} out of range for dimension {n}")
        return K.num_simplices(n - k)
    if c is Carrier.DUAL_BOUNDARY:
        if not 0 <= k <= n - 1:
            raise OperatorError(f"dual boundary degree {k} out of range for dimension {n}")
        return len(K.boundary_simplices[n - 1 - k])
    raise OperatorError(f"unknown carrier {c}")  # pragma: no cover


@dataclass(frozen=True, eq=False)
class Cochain:
    """A degree-tagged coefficient vector over one carrier of a complex."""

    complex: SimplicialComplex
    space: Space
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        expected = space_dim(self.complex, self.space)
        if vals.shape != (expected,):
            raise OperatorError(
                f"cochain on {self.space} needs {expected} values, got {vals.shape}"
            )

    @property
    def degree(self) -> int:
        return self.space.degree

    @property
    def carrier(self) -> Carrier:
        return self.space.carrier


def cochain(K: SimplicialComplex, carrier: Carrier, degree: int, values) -> Cochain:
    return Cochain(K, Space(carrier, degree), values)


@dataclass(frozen=True, eq=False)
class LinearOp:
    """A sparse matrix between two cochain spaces of one complex."""

    complex: SimplicialComplex
    domain: Space
    codomain: Space
    matrix: sp.csr_matrix

    def __post_init__(self):
        shape = (space_dim(self.complex, self.codomain), space_dim(self.complex, self.domain))
        if self.matrix.shape != shape:
            raise OperatorError(
                f"operator {self.domain} -> {self.codomain} must have shape {shape}, "
                f"got {self.matrix.shape}"
            )

    def __call__(self, c: Cochain) -> Cochain:
        if c.complex is not self.complex or c.space != self.domain:
            raise OperatorError(f"operator expects a cochain on {self.domain}")
        return Cochain(self.complex, self.codomain, self.matrix @ c.values)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


@lru_cache(maxsize=512)
def coboundary(K: SimplicialComplex, k: int) -> LinearOp:
    """The discrete exterior derivative on primal k-cochains."""
    n = K.dimension
    if not 0 <= k <= n - 1:
        raise OperatorError(f"coboundary degree {k} out of range for dimension {n}")
    mat = sp.csr_matrix(K.incidence[k].T)
    return LinearOp(K, Space(Carrier.PRIMAL, k), Space(Carrier.PRIMAL, k + 1), mat)


@lru_cache(maxsize=512)
def trace(K: SimplicialComplex, k: int) -> LinearOp:
    """Signed restriction of primal k-cochains to the boundary.

    Each row holds a single +-1: the orientation sign of the boundary simplex
    relative to its stored primal orientation (the induced-orientation
    coefficient for k = n-1, +1 for lower degrees).
    """
    n = K.dimension
    if not 0 <= k <= n - 1:
        raise OperatorError(f"trace degree {k} out of range for dimension {n}")
    layer = K.boundary_simplices[k]
    rows = np.arange(len(layer))
    mat = sp.csr_matrix(
        (layer.signs.astype(np.int64), (rows, layer.indices)),
        shape=(len(layer), K.num_simplices(k)),
    )
    return LinearOp(K, Space(Carrier.PRIMAL, k), Space(Carrier.PRIMAL_BOUNDARY, k), mat)


@lru_cache(maxsize=512)
def dual_derivative_interior(K: SimplicialComplex, degree: int) -> LinearOp:
    """The derivative on interior dual cochains of the given degree."""
    n = K.dimension
    if not 0 <= degree <= n - 1:
        raise OperatorError(f"dual derivative degree {degree} out of range")
    k = n - degree
    sign = -1 if k % 2 else 1
    mat = sp.csr_matrix(sign * coboundary(K, k - 1).matrix.T)
    return LinearOp(
        K,
        Space(Carrier.DUAL_INTERIOR, degree),
        Space(Carrier.DUAL_INTERIOR, degree + 1),
        mat,
    )


@lru_cache(maxsize=512)
def dual_derivative_boundary(K: SimplicialComplex, degree: int) -> LinearOp:
    """Maps dual boundary cochains into interior dual cochains one degree up."""
    n = K.dimension
    if not 0 <= degree <= n - 1:
        raise OperatorError(f"dual boundary derivative degree {degree} out of range")
    k = n - degree
    sign = -1 if (k - 1) % 2 else 1
    mat = sp.csr_matrix(sign * trace(K, k - 1).matrix.T)
    return LinearOp(
        K,
        Space(Carrier.DUAL_BOUNDARY, degree),
        Space(Carrier.DUAL_INTERIOR, degree + 1),
        mat,
    )


def _diag(values: np.ndarray) -> sp.csr_matrix:
    return sp.csr_matrix(sp.diags(values))


@lru_cache(maxsize=512)
def hodge(K: SimplicialComplex, dual: DualComplex, k: int) -> LinearOp:
    """Diagonal Hodge star on primal k-cochains, entries |sigma|/|dual cell|."""
    n = K.dimension
    if dual.primal is not K:
        raise OperatorError("dual complex does not belong to this complex")
    if not 0 <= k <= n:
        raise OperatorError(f"hodge degree {k} out of range for dimension {n}")
    entries = dual.primal_measure[k] / dual.dual_measure[k]
    return LinearOp(
        K, Space(Carrier.PRIMAL, k), Space(Carrier.DUAL_INTERIOR, n - k), _diag(entries)
    )


@lru_cache(maxsize=512)
def hodge_inv(K: SimplicialComplex, dual: DualComplex, k: int) -> LinearOp:
    """Entrywise reciprocal of ``hodge``, mapping dual (n-k) back to primal k."""
    n = K.dimension
    fwd = hodge(K, dual, k)
    entries = 1.0 / fwd.matrix.diagonal()
    return LinearOp(
        K, Space(Carrier.DUAL_INTERIOR, n - k), Space(Carrier.PRIMAL, k), _diag(entries)
    )


@lru_cache(maxsize=512)
def hodge_boundary(K: SimplicialComplex, dual: DualComplex, k: int = 0) -> LinearOp:
    """Diagonal Hodge star pairing boundary k-cells with boundary dual cells."""
    n = K.dimension
    if dual.primal is not K:
        raise OperatorError("dual complex does not belong to this complex")
    if not 0 <= k <= n - 1:
        raise OperatorError(f"boundary hodge degree {k} out of range for dimension {n}")
    layer = K.boundary_simplices[k]
    primal_meas = np.array(
        [1.0 if k == 0 else dual.primal_measure[k][i] for i in layer.indices]
    )
    entries = primal_meas / dual.boundary_dual_measure[k]
    return LinearOp(
        K,
        Space(Carrier.PRIMAL_BOUNDARY, k),
        Space(Carrier.DUAL_BOUNDARY, n - 1 - k),
        _diag(entries),
    )


def _pair_spaces(a: Cochain, b: Cochain) -> tuple[int, int, bool]:
    """Returns (primal degree, ambient dim of the pairing, dual_first)."""
    n = a.complex.dimension
    ca, cb = a.carrier, b.carrier
    if ca is Carrier.PRIMAL and cb is Carrier.DUAL_INTERIOR:
        k, m, dual_first = a.degree, n, False
    elif ca is Carrier.DUAL_INTERIOR and cb is Carrier.PRIMAL:
        k, m, dual_first = b.degree, n, True
    elif ca is Carrier.PRIMAL_BOUNDARY and cb is Carrier.DUAL_BOUNDARY:
        k, m, dual_first = a.degree, n - 1, False
    elif ca is Carrier.DUAL_BOUNDARY and cb is Carrier.PRIMAL_BOUNDARY:
        k, m, dual_first = b.degree, n - 1, True
    else:
        raise OperatorError(f"cannot pair carriers {ca} and {cb}")
    dual_c = b if not dual_first else a
    if dual_c.degree != m - k:
        raise OperatorError(
            f"degrees {a.degree} and {b.degree} are not complementary in dimension {m}"
        )
    return k, m, dual_first


def wedge_eval(a: Cochain, b: Cochain) -> float:
    """Pairing of complementary primal/dual cochains over the whole carrier.

    Primal-first evaluation is the coefficient dot product; the graded
    antisymmetry sign (-1)^(k(m-k)) appears when the dual factor is first.
    """
    if a.complex is not b.complex:
        raise OperatorError("cochains live on different complexes")
    k, m, dual_first = _pair_spaces(a, b)
    val = float(a.values @ b.values)
    if dual_first and (k * (m - k)) % 2:
        val = -val
    return val


def check_evaluation_by_parts(K: SimplicialComplex,
                              alpha: Cochain,
                              beta_interior: Cochain,
                              beta_boundary: Cochain) -> float:
    """Residual of the discrete integration-by-parts identity.

    For a primal (k-1)-cochain ``alpha``, an interior dual (n-k)-cochain
    ``beta_interior`` and a dual boundary (n-k)-cochain ``beta_boundary``::

        <d alpha ^ b_i, K> + (-1)^(k-1) <alpha ^ (d_i b_i + d_b b_b), K>
            - <tr alpha ^ b_b, bd K>

    which is zero for all inputs by construction of the operators.
    """
    n = K.dimension
    km1 = alpha.degree
    k = km1 + 1
    if beta_interior.degree != n - k or beta_boundary.degree != n - k:
        raise OperatorError("dual cochain degrees must complement d(alpha)")
    d_alpha = coboundary(K, km1)(alpha)
    di = dual_derivative_interior(K, n - k)(beta_interior)
    db = dual_derivative_boundary(K, n - k)(beta_boundary)
    middle = Cochain(K, di.space, di.values + db.values)
    sign = -1.0 if (k - 1) % 2 else 1.0
    total = (
        wedge_eval(d_alpha, beta_interior)
        + sign * wedge_eval(alpha, middle)
        - wedge_eval(trace(K, km1)(alpha), beta_boundary)
    )
    return abs(total)


def matrix_triplets(op: LinearOp) -> str:
    """Coordinate-triplet text (row, col, value), 0-based, sorted by row then col."""
    coo = op.matrix.tocoo()
    integral = coo.dtype.kind in "iu"
    order = np.lexsort((coo.col, coo.row))
    lines = []
    for i in order:
        r, c, v = int(coo.row[i]), int(coo.col[i]), coo.data[i]
        value = str(int(v)) if integral else repr(float(v))
        lines.append(f"{r} {c} {value}")
    return "\n".join(lines) + ("\n" if lines else "")
