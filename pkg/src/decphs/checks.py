"""Aggregated structural and geometric checks behind the `check` command.

Each check returns a name, a pass flag, and a worst-residual detail; the
suite is deterministic given the seed used for the randomized identities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dual import DualComplex, build_dual, is_well_centered
from .mesh import SimplicialComplex
from .operators import (
    Carrier,
    Cochain,
    Space,
    check_evaluation_by_parts,
    coboundary,
    space_dim,
)

EXACTNESS_TOL = 0
PARTITION_RTOL = 1e-12
ORTHOGONALITY_RTOL = 1e-12
EVAL_BY_PARTS_RTOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    worst: float = 0.0


def _complex_checks(K: SimplicialComplex) -> list[CheckResult]:
    results = []
    for k in range(1, K.dimension):
        prod = K.incidence[k - 1] @ K.incidence[k]
        nnz = int(np.count_nonzero(prod.toarray()))
        results.append(CheckResult(
            name=f"boundary_squared_zero_k{k + 1}",
            passed=nnz == 0,
            detail=f"nonzero entries in boundary composition: {nnz}",
            worst=float(nnz),
        ))
    for k in range(0, K.dimension - 1):
        prod = coboundary(K, k + 1).matrix @ coboundary(K, k).matrix
        nnz = int(np.count_nonzero(prod.toarray()))
        results.append(CheckResult(
            name=f"coboundary_squared_zero_k{k}",
            passed=nnz == 0,
            detail=f"nonzero entries in d d: {nnz}",
            worst=float(nnz),
        ))
    return results


def _dual_checks(K: SimplicialComplex, dual: DualComplex) -> list[CheckResult]:
    results = []
    total = dual.total_measure
    for k in range(K.dimension + 1):
        s = float(dual.support_measure[k].sum())
        rel = abs(s - total) / total
        results.append(CheckResult(
            name=f"support_partition_k{k}",
            passed=rel <= PARTITION_RTOL,
            detail=f"support volumes sum to {s!r} vs total {total!r}",
            worst=rel,
        ))
    if K.dimension == 2:
        worst = 0.0
        for j in range(K.num_simplices(1)):
            cell = dual.interior_cells[1][j]
            if len(cell) < 2:
                continue
            direction = cell[-1] - cell[0]
            edge = K.simplex_vertices(1, j)
            evec = edge[1] - edge[0]
            scale = max(np.linalg.norm(direction) * np.linalg.norm(evec), 1e-300)
            worst = max(worst, abs(float(direction @ evec)) / scale)
        results.append(CheckResult(
            name="primal_dual_orthogonality",
            passed=bool(worst <= ORTHOGONALITY_RTOL),
            detail="worst |cos| between primal edges and their dual edges",
            worst=float(worst),
        ))
        # boundary dual cells tile the boundary: per boundary edge, the two
        # half-contributions sum to the edge length
        bl = K.boundary_simplices[1]
        blen = np.array([dual.primal_measure[1][i] for i in bl.indices])
        total_b = float(blen.sum())
        cover = float(dual.boundary_dual_measure[0].sum())
        rel = abs(cover - total_b) / max(total_b, 1e-300)
        results.append(CheckResult(
            name="boundary_dual_tiling",
            passed=rel <= PARTITION_RTOL,
            detail=f"boundary dual cells cover {cover!r} of |bd K| = {total_b!r}",
            worst=rel,
        ))
    return results


def _evaluation_by_parts_check(K: SimplicialComplex, trials: int,
                               seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    n = K.dimension
    worst = 0.0
    for k in range(1, n + 1):
        for _ in range(trials):
            alpha = Cochain(K, Space(Carrier.PRIMAL, k - 1),
                            rng.uniform(-1, 1, K.num_simplices(k - 1)))
            bi = Cochain(K, Space(Carrier.DUAL_INTERIOR, n - k),
                         rng.uniform(-1, 1, space_dim(K, Space(Carrier.DUAL_INTERIOR, n - k))))
            bb = Cochain(K, Space(Carrier.DUAL_BOUNDARY, n - k),
                         rng.uniform(-1, 1, space_dim(K, Space(Carrier.DUAL_BOUNDARY, n - k))))
            scale = max(
                float(np.linalg.norm(alpha.values))
                * (float(np.linalg.norm(bi.values)) + float(np.linalg.norm(bb.values))),
                1e-300,
            )
            worst = max(worst, check_evaluation_by_parts(K, alpha, bi, bb) / scale)
    return CheckResult(
        name="evaluation_by_parts",
        passed=worst <= EVAL_BY_PARTS_RTOL,
        detail=f"worst scaled residual over {trials} random triples per degree",
        worst=worst,
    )


@dataclass(frozen=True)
class CheckReport:
    results: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {"name": r.name, "passed": r.passed, "detail": r.detail, "worst": r.worst}
                for r in self.results
            ],
        }


def run_checks(K: SimplicialComplex, trials: int = 100, seed: int = 0) -> CheckReport:
    """Structural exactness, well-centeredness, dual geometry, and the
    evaluation-by-parts identity, in one deterministic report."""
    results = _complex_checks(K)
    wc = is_well_centered(K)
    results.append(CheckResult(
        name="well_centered",
        passed=wc.ok,
        detail="all circumcenters strictly interior" if wc.ok
        else f"violations (degree, index): {list(wc.violations)[:8]}",
        worst=float(len(wc.violations)),
    ))
    if wc.ok:
        dual = build_dual(K)
        results.extend(_dual_checks(K, dual))
        results.append(_evaluation_by_parts_check(K, trials, seed))
    return CheckReport(results=tuple(results))
