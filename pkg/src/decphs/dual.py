"""Circumcentric dual cell complexes and the measures behind diagonal Hodge stars.

Each primal k-simplex owns an interior dual (n-k)-cell assembled from the
circumcenters of its cofaces and clipped to the underlying polytope; each
boundary k-simplex additionally owns an (n-1-k)-cell on the boundary of the
dual complex, so the boundary of the dual tiles the boundary of the primal
exactly.  Measures are computed by exact decomposition into circumcenter-based
segments and triangles, never by quadrature.

Degenerate-degree conventions: ``primal_measure[0] = 1`` per vertex and
``dual_measure[n] = 1`` per top cell.

Everything is immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mesh import MeshGeometryError, SimplicialComplex, simplex_measure


def circumcenter(points: np.ndarray) -> np.ndarray:
    """The point equidistant from all simplex vertices, in their affine hull.

    Args:
        points: (k+1, d) vertex coordinates of a non-degenerate k-simplex.

    Raises:
        MeshGeometryError: if the simplex is degenerate.
    """
    p = np.asarray(points, dtype=float)
    if p.shape[0] == 1:
        return p[0].copy()
    rel = p[1:] - p[0]
    gram = rel @ rel.T
    try:
        lam = np.linalg.solve(2.0 * gram, np.diag(gram))
    except np.linalg.LinAlgError:
        raise MeshGeometryError("circumcenter of a degenerate simplex") from None
    return p[0] + lam @ rel


def _barycentric(points: np.ndarray, x: np.ndarray) -> np.ndarray:
    rel = (points[1:] - points[0]).T
    lam, *_ = np.linalg.lstsq(rel, x - points[0], rcond=None)
    return np.concatenate([[1.0 - lam.sum()], lam])


@dataclass(frozen=True, eq=False)
class WellCenteredReport:
    """Per-simplex strict well-centeredness, with the list of violators."""

    per_simplex: tuple[np.ndarray, ...]
    violations: tuple[tuple[int, int], ...]

    @property
    def ok(self) -> bool:
        return len(self.violations) == 0


def is_well_centered(K: SimplicialComplex) -> WellCenteredReport:
    """True per simplex iff its circumcenter lies strictly inside it.

    Vertices are trivially well-centered; segments are well-centered whenever
    non-degenerate (the circumcenter is the midpoint).
    """
    flags: list[np.ndarray] = []
    violations: list[tuple[int, int]] = []
    for k in range(K.dimension + 1):
        nk = K.num_simplices(k)
        ok = np.ones(nk, dtype=bool)
        if k >= 2:
            for i in range(nk):
                pts = K.simplex_vertices(k, i)
                bary = _barycentric(pts, circumcenter(pts))
                if not np.all(bary > 0.0):
                    ok[i] = False
                    violations.append((k, i))
        flags.append(ok)
    return WellCenteredReport(per_simplex=tuple(flags), violations=tuple(violations))


class NotWellCenteredError(MeshGeometryError):
    """Raised by build_dual when some simplex fails strict well-centeredness."""

    def __init__(self, report: WellCenteredReport):
        self.report = report
        listed = ", ".join(f"(k={k}, index={i})" for k, i in report.violations[:8])
        more = "" if len(report.violations) <= 8 else f" and {len(report.violations) - 8} more"
        super().__init__(f"complex is not well-centered: {listed}{more}")


@dataclass(frozen=True, eq=False)
class DualComplex:
    """Circumcentric dual of a well-centered complex, with all measures.

    ``interior_cells[k][i]`` is the vertex chain of the dual cell of the i-th
    primal k-simplex (a point for k = n, a polyline for k = n-1, a polygon
    loop for k = n-2).  ``boundary_cells[k]`` and ``boundary_dual_measure[k]``
    are aligned with ``primal.boundary_simplices[k].indices``.
    """

    primal: SimplicialComplex
    circumcenters: tuple[np.ndarray, ...]
    primal_measure: tuple[np.ndarray, ...]
    dual_measure: tuple[np.ndarray, ...]
    support_measure: tuple[np.ndarray, ...]
    interior_cells: tuple[tuple[np.ndarray, ...], ...]
    boundary_cells: tuple[tuple[np.ndarray, ...], ...]
    boundary_dual_measure: tuple[np.ndarray, ...]

    @property
    def total_measure(self) -> float:
        return float(self.primal_measure[self.primal.dimension].sum())


def _dual_1d(K: SimplicialComplex, centers: tuple[np.ndarray, ...]):
    n0, n1 = K.num_simplices(0), K.num_simplices(1)
    mids = centers[1]
    dual0 = np.zeros(n0)
    cell_pts0: list[list[np.ndarray]] = [[K.vertices[v]] for v in range(n0)]
    edge_len = np.array([simplex_measure(K.simplex_vertices(1, j)) for j in range(n1)])
    for j in range(n1):
        a, b = K.simplices[1][j].tolist()
        for v in (a, b):
            dual0[v] += edge_len[j] / 2.0
            cell_pts0[v].append(mids[j])
    # cells: [left endpoint, right endpoint] of the clipped dual segment
    interior0 = []
    for v in range(n0):
        pts = np.asarray(cell_pts0[v])
        order = np.argsort(pts[:, 0], kind="stable")
        interior0.append(pts[order][[0, -1]])
    interior1 = tuple(mids[j][None, :] for j in range(n1))
    bl = K.boundary_simplices[0]
    bcells0 = tuple(K.vertices[v][None, :] for v in bl.indices)
    return (
        (np.ones(n0), edge_len),
        (dual0, np.ones(n1)),
        (tuple(interior0), interior1),
        (bcells0,),
        (np.ones(len(bl)),),
    )


def _fan_order(K: SimplicialComplex, v: int, tris_at_v: list[int]) -> list[int]:
    """Order the triangles around v by edge adjacency (boundary fan or cycle)."""
    edges_of = {}
    for t in tris_at_v:
        verts = [u for u in K.simplices[2][t].tolist() if u != v]
        edges_of[t] = [tuple(sorted((v, u))) for u in verts]
    edge_use: dict[tuple[int, int], list[int]] = {}
    for t, es in edges_of.items():
        for e in es:
            edge_use.setdefault(e, []).append(t)
    boundary_starts = [
        t for t, es in edges_of.items() if any(len(edge_use[e]) == 1 for e in es)
    ]
    start = min(boundary_starts) if boundary_starts else min(tris_at_v)
    order = [start]
    used_edges: set[tuple[int, int]] = set()
    if boundary_starts:
        first_free = sorted(e for e in edges_of[start] if len(edge_use[e]) == 1)[0]
        used_edges.add(first_free)
    while len(order) < len(tris_at_v):
        t = order[-1]
        nxt = None
        for e in edges_of[t]:
            if e in used_edges or len(edge_use[e]) != 2:
                continue
            other = [u for u in edge_use[e] if u != t][0]
            if other not in order:
                used_edges.add(e)
                nxt = other
                break
        if nxt is None:  # pragma: no cover - guarded by manifold checks
            break
        order.append(nxt)
    return order


def _dual_2d(K: SimplicialComplex, centers: tuple[np.ndarray, ...]):
    n0, n1, n2 = (K.num_simplices(k) for k in range(3))
    ccs, mids = centers[2], centers[1]
    edge_index = {tuple(sorted(K.simplices[1][j].tolist())): j for j in range(n1)}
    edge_len = np.array([simplex_measure(K.simplex_vertices(1, j)) for j in range(n1)])
    tri_area = np.array([simplex_measure(K.simplex_vertices(2, t)) for t in range(n2)])

    tris_of_edge: list[list[int]] = [[] for _ in range(n1)]
    tris_of_vertex: list[list[int]] = [[] for _ in range(n0)]
    for t in range(n2):
        verts = K.simplices[2][t].tolist()
        for v in verts:
            tris_of_vertex[v].append(t)
        for a, b in ((verts[0], verts[1]), (verts[1], verts[2]), (verts[0], verts[2])):
            tris_of_edge[edge_index[tuple(sorted((a, b)))]].append(t)

    dual1 = np.zeros(n1)
    interior1 = []
    for j in range(n1):
        ts = tris_of_edge[j]
        segs = [np.linalg.norm(ccs[t] - mids[j]) for t in ts]
        dual1[j] = float(sum(segs))
        if len(ts) == 2:
            interior1.append(np.vstack([ccs[ts[0]], ccs[ts[1]]]))
        else:
            interior1.append(np.vstack([ccs[ts[0]], mids[j]]))

    def tri_area_pts(a, b, c):
        return 0.5 * abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))

    bedge_idx = K.boundary_simplices[1].indices
    bedges_at: dict[int, list[int]] = {}
    for j in bedge_idx:
        for v in K.simplices[1][j].tolist():
            bedges_at.setdefault(v, []).append(int(j))

    def edge_in_tri(j: int, t: int) -> bool:
        a, b = K.simplices[1][j].tolist()
        tv = K.simplices[2][t].tolist()
        return a in tv and b in tv

    dual0 = np.zeros(n0)
    interior0 = []
    for v in range(n0):
        area = 0.0
        for t in tris_of_vertex[v]:
            for u in K.simplices[2][t].tolist():
                if u == v:
                    continue
                j = edge_index[tuple(sorted((v, u)))]
                area += tri_area_pts(K.vertices[v], mids[j], ccs[t])
        dual0[v] = area
        fan = _fan_order(K, v, tris_of_vertex[v])
        loop = [ccs[t] for t in fan]
        if v in bedges_at:
            j0, j1 = bedges_at[v]  # manifold boundary vertex: exactly two
            if not edge_in_tri(j0, fan[0]):
                j0, j1 = j1, j0
            loop = [K.vertices[v], mids[j0], *loop, mids[j1]]
        interior0.append(np.asarray(loop))

    # boundary dual cells: vertices get the two adjacent boundary half-edges,
    # boundary edges get their midpoint (a 0-cell).
    bverts = K.boundary_simplices[0].indices
    bcells0, bmeas0 = [], []
    for v in bverts:
        j0, j1 = bedges_at[int(v)]
        bcells0.append(np.vstack([mids[j0], K.vertices[v], mids[j1]]))
        bmeas0.append(edge_len[j0] / 2.0 + edge_len[j1] / 2.0)
    bcells1 = tuple(mids[j][None, :] for j in bedge_idx)
    return (
        (np.ones(n0), edge_len, tri_area),
        (dual0, dual1, np.ones(n2)),
        (tuple(interior0), tuple(interior1), tuple(ccs[t][None, :] for t in range(n2))),
        (tuple(bcells0), bcells1),
        (np.asarray(bmeas0), np.ones(len(bedge_idx))),
    )


def build_dual(K: SimplicialComplex) -> DualComplex:
    """Construct the circumcentric dual; refuses non-well-centered complexes.

    Raises:
        NotWellCenteredError: listing every violating simplex.
    """
    report = is_well_centered(K)
    if not report.ok:
        raise NotWellCenteredError(report)
    centers = tuple(
        np.asarray([circumcenter(K.simplex_vertices(k, i)) for i in range(K.num_simplices(k))])
        if K.num_simplices(k)
        else np.zeros((0, K.ambient_dimension))
        for k in range(K.dimension + 1)
    )
    if K.dimension == 1:
        primal, dual, interior, bcells, bmeas = _dual_1d(K, centers)
    elif K.dimension == 2:
        primal, dual, interior, bcells, bmeas = _dual_2d(K, centers)
    else:
        raise MeshGeometryError("geometric duals are built for dimensions 1 and 2 only")

    n = K.dimension
    support = []
    for k in range(n + 1):
        scale = _support_factor(k, n)
        support.append(primal[k] * dual[k] * scale)
    return DualComplex(
        primal=K,
        circumcenters=centers,
        primal_measure=primal,
        dual_measure=dual,
        support_measure=tuple(support),
        interior_cells=interior,
        boundary_cells=bcells,
        boundary_dual_measure=bmeas,
    )


def _support_factor(k: int, n: int) -> float:
    return math.factorial(k) * math.factorial(n - k) / math.factorial(n)


def dual_to_text(dual: DualComplex) -> str:
    """Structured dump: every primal simplex, its dual cell loop, and measures."""
    K = dual.primal
    out = [f"dimension {K.dimension}"]
    for k in range(K.dimension + 1):
        out.append(f"degree {k} count {K.num_simplices(k)}")
        for i in range(K.num_simplices(k)):
            verts = " ".join(str(int(v)) for v in K.simplices[k][i])
            out.append(
                f"simplex {i} [{verts}] measure {float(dual.primal_measure[k][i])!r} "
                f"dual_measure {float(dual.dual_measure[k][i])!r} "
                f"support {float(dual.support_measure[k][i])!r}"
            )
            loop = dual.interior_cells[k][i]
            for row in loop:
                out.append("  dual_vertex " + " ".join(repr(float(x)) for x in row))
    for k in range(K.dimension):
        layer = K.boundary_simplices[k]
        out.append(f"boundary_degree {k} count {len(layer)}")
        for r, (idx, sign) in enumerate(zip(layer.indices, layer.signs)):
            out.append(
                f"boundary_cell {r} primal {int(idx)} sign {int(sign)} "
                f"measure {float(dual.boundary_dual_measure[k][r])!r}"
            )
    return "\n".join(out) + "\n"
