"""Oriented manifold-like simplicial complexes of dimension one and two.

A complex is built from its top-dimensional cells only; all lower simplices
are enumerated automatically.  Storage conventions, fixed once so that every
matrix in the package has a reproducible layout:

* vertices keep their input order;
* k-simplices with k < n are stored sorted lexicographically by their sorted
  vertex tuple, oriented by ascending vertex index;
* top cells keep their input order and orientation (2D cells must be
  counterclockwise, 1D cells are oriented as given);
* the boundary operator ``incidence[k-1]`` is the N_{k-1} x N_k integer
  matrix taking oriented k-simplices to their (k-1)-faces.

All containers are immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

DEGENERACY_RTOL = 1e-12


class MeshError(Exception):
    """Base class for mesh construction and parsing failures."""


class MeshFormatError(MeshError):
    """Malformed mesh text; carries the 1-based offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MeshStructureError(MeshError):
    """Non-manifold incidence, duplicate cells, or bad vertex references."""


class MeshOrientationError(MeshError):
    """Clockwise 2D cells or inconsistently oriented neighbours."""


class MeshGeometryError(MeshError):
    """Degenerate (zero-measure) simplices."""


@dataclass(frozen=True, eq=False)
class BoundarySimplices:
    """Indices of the k-simplices lying on the boundary, with orientation signs.

    For k = n-1 the sign is the coefficient of the simplex in the boundary
    chain of the sum of all top cells (the induced orientation); for lower
    degrees the sign is +1.
    """

    indices: np.ndarray
    signs: np.ndarray

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """An oriented simplicial complex with integer incidence matrices."""

    dimension: int
    vertices: np.ndarray
    simplices: tuple[np.ndarray, ...]
    incidence: tuple[sp.csr_matrix, ...]
    boundary_simplices: tuple[BoundarySimplices, ...]

    @property
    def ambient_dimension(self) -> int:
        return self.vertices.shape[1]

    def num_simplices(self, k: int) -> int:
        return self.simplices[k].shape[0]

    @property
    def is_empty(self) -> bool:
        return self.vertices.shape[0] == 0

    @property
    def is_closed(self) -> bool:
        return all(len(b) == 0 for b in self.boundary_simplices)

    def simplex_vertices(self, k: int, i: int) -> np.ndarray:
        """Coordinates of the i-th k-simplex, rows in stored orientation."""
        return self.vertices[self.simplices[k][i]]


def simplex_measure(points: np.ndarray) -> float:
    """Unsigned k-volume of the simplex spanned by ``points`` ((k+1) x d)."""
    p = np.asarray(points, dtype=float)
    k = p.shape[0] - 1
    if k == 0:
        return 1.0
    edges = p[1:] - p[0]
    gram = edges @ edges.T
    det = float(np.linalg.det(gram))
    return math.sqrt(max(det, 0.0)) / math.factorial(k)


def _signed_area(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    return 0.5 * float((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def _bbox_diagonal(vertices: np.ndarray) -> float:
    if len(vertices) == 0:
        return 0.0
    span = vertices.max(axis=0) - vertices.min(axis=0)
    return float(np.linalg.norm(span))


def _orientation_sign(stored: tuple[int, ...], oriented: tuple[int, ...]) -> int:
    """+1 if ``oriented`` is an even permutation of ``stored``, else -1."""
    perm = [stored.index(v) for v in oriented]
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _validate_cells(num_vertices: int, cells: np.ndarray, arity: int) -> None:
    if cells.ndim != 2 or cells.shape[1] != arity:
        raise MeshStructureError(f"top cells must be {arity}-tuples of vertex indices")
    if cells.size and (cells.min() < 0 or cells.max() >= num_vertices):
        raise MeshStructureError("vertex index out of range in top cells")
    for row in cells:
        if len(set(row.tolist())) != arity:
            raise MeshStructureError(f"repeated vertex in cell {row.tolist()}")
    seen: set[tuple[int, ...]] = set()
    for row in cells:
        key = tuple(sorted(row.tolist()))
        if key in seen:
            raise MeshStructureError(f"duplicate cell on vertices {sorted(row.tolist())}")
        seen.add(key)


def _enumerate_faces(cells: np.ndarray, arity: int) -> tuple[list[tuple[int, ...]], dict]:
    faces: set[tuple[int, ...]] = set()
    for row in cells:
        verts = row.tolist()
        for drop in range(arity):
            faces.add(tuple(sorted(verts[:drop] + verts[drop + 1:])))
    ordered = sorted(faces)
    return ordered, {f: i for i, f in enumerate(ordered)}


def _boundary_matrix(simplices_lo: np.ndarray, simplices_hi: np.ndarray) -> sp.csr_matrix:
    """Signed incidence from oriented (k)-simplices to stored (k-1)-faces."""
    index = {tuple(sorted(row.tolist())): i for i, row in enumerate(simplices_lo)}
    rows, cols, vals = [], [], []
    for j, row in enumerate(simplices_hi):
        verts = row.tolist()
        for drop in range(len(verts)):
            face = verts[:drop] + verts[drop + 1:]
            coeff = -1 if drop % 2 else 1
            i = index[tuple(sorted(face))]
            stored = tuple(sorted(face))
            rows.append(i)
            cols.append(j)
            vals.append(coeff * _orientation_sign(stored, tuple(face)))
    mat = sp.csr_matrix(
        (np.asarray(vals, dtype=np.int64), (rows, cols)),
        shape=(len(simplices_lo), len(simplices_hi)),
    )
    mat.sum_duplicates()
    return mat


def _check_manifold_1d(K_edges: np.ndarray, incidence: sp.csr_matrix, num_vertices: int) -> None:
    counts = np.asarray(abs(incidence).sum(axis=1)).ravel()
    if np.any(counts > 2):
        v = int(np.argmax(counts > 2))
        raise MeshStructureError(f"vertex {v} belongs to more than two edges")
    if np.any(counts == 0):
        v = int(np.argmax(counts == 0))
        raise MeshStructureError(f"vertex {v} belongs to no edge")
    chain = np.asarray(incidence @ np.ones(incidence.shape[1], dtype=np.int64))
    # a vertex shared by two edges must be head of one and tail of the other
    shared = counts == 2
    if np.any(np.abs(chain[shared]) != 0):
        v = int(np.nonzero(shared & (np.abs(chain) != 0))[0][0])
        raise MeshOrientationError(f"edges at vertex {v} induce the same orientation")


def _check_manifold_2d(tris: np.ndarray, edges: list[tuple[int, ...]],
                       incidence2: sp.csr_matrix, num_vertices: int) -> None:
    csr = incidence2.tocsr()
    counts = np.diff(csr.indptr)
    if np.any(counts > 2):
        e = int(np.argmax(counts > 2))
        raise MeshStructureError(f"edge {edges[e]} is shared by more than two triangles")
    for e in range(csr.shape[0]):
        sl = slice(csr.indptr[e], csr.indptr[e + 1])
        if counts[e] == 2 and csr.data[sl].sum() != 0:
            raise MeshOrientationError(
                f"triangles sharing edge {edges[e]} induce the same orientation"
            )
    # vertex links: triangles around each vertex must form one fan
    vert_tris: list[list[int]] = [[] for _ in range(num_vertices)]
    for t, row in enumerate(tris):
        for v in row.tolist():
            vert_tris[v].append(t)
    edge_tris: dict[tuple[int, int], list[int]] = {}
    for t, row in enumerate(tris):
        a, b, c = row.tolist()
        for pair in ((a, b), (b, c), (a, c)):
            edge_tris.setdefault(tuple(sorted(pair)), []).append(t)
    for v, ts in enumerate(vert_tris):
        if not ts:
            raise MeshStructureError(f"vertex {v} belongs to no triangle")
        remaining = set(ts)
        stack = [ts[0]]
        remaining.discard(ts[0])
        while stack:
            t = stack.pop()
            a, b, c = tris[t].tolist()
            for pair in ((a, b), (b, c), (a, c)):
                if v not in pair:
                    continue
                for other in edge_tris[tuple(sorted(pair))]:
                    if other in remaining:
                        remaining.discard(other)
                        stack.append(other)
        if remaining:
            raise MeshStructureError(f"triangles around vertex {v} do not form a single fan")


def build_complex(dimension: int,
                  vertices: np.ndarray,
                  top_cells: np.ndarray) -> SimplicialComplex:
    """Build a validated complex from its top-dimensional oriented cells.

    Args:
        dimension: 1 or 2.
        vertices: (N0, dimension-or-more) coordinates; 1D input may be a flat
            list of abscissae.
        top_cells: (N_n, n+1) vertex-index tuples.  2D cells must be
            counterclockwise; 1D cells are oriented as given.

    Raises:
        MeshStructureError: non-manifold incidence, duplicates, bad indices.
        MeshOrientationError: clockwise triangles or inconsistent neighbours.
        MeshGeometryError: degenerate simplices.
    """
    if dimension not in (1, 2):
        raise MeshStructureError(f"dimension must be 1 or 2, got {dimension}")
    verts = np.asarray(vertices, dtype=float)
    if verts.ndim == 1:
        verts = verts[:, None]
    if verts.ndim != 2 or verts.shape[1] < 1:
        raise MeshStructureError("vertices must be an (N, d) coordinate array")
    cells = np.asarray(top_cells, dtype=np.int64)
    if cells.size == 0:
        cells = cells.reshape(0, dimension + 1)
    _validate_cells(len(verts), cells, dimension + 1)
    if cells.shape[0] == 0:
        raise MeshStructureError("a complex needs at least one top cell")

    scale = _bbox_diagonal(verts)
    for row in cells:
        m = simplex_measure(verts[row])
        if m <= DEGENERACY_RTOL * scale**dimension:
            raise MeshGeometryError(f"degenerate cell {row.tolist()} (measure {m:g})")
    if dimension == 2:
        if verts.shape[1] != 2:
            raise MeshStructureError("2D complexes require planar coordinates")
        for row in cells:
            a, b, c = verts[row[0]], verts[row[1]], verts[row[2]]
            if _signed_area(a, b, c) <= 0:
                raise MeshOrientationError(
                    f"triangle {row.tolist()} is not counterclockwise"
                )

    if dimension == 1:
        simplices = (np.arange(len(verts), dtype=np.int64)[:, None], cells)
        inc1 = _boundary_matrix(simplices[0], cells)
        _check_manifold_1d(cells, inc1, len(verts))
        incidence = (inc1,)
    else:
        edge_list, _ = _enumerate_faces(cells, 3)
        edges = np.asarray(edge_list, dtype=np.int64)
        simplices = (np.arange(len(verts), dtype=np.int64)[:, None], edges, cells)
        inc1 = _boundary_matrix(simplices[0], edges)
        inc2 = _boundary_matrix(edges, cells)
        _check_manifold_2d(cells, edge_list, inc2, len(verts))
        incidence = (inc1, inc2)

    n = dimension
    chain = np.asarray(incidence[n - 1] @ np.ones(cells.shape[0], dtype=np.int64)).ravel()
    top_face_idx = np.nonzero(chain != 0)[0].astype(np.int64)
    layers = []
    boundary_vertex_set: set[int] = set()
    for i in top_face_idx:
        boundary_vertex_set.update(simplices[n - 1][i].tolist())
    for k in range(n):
        if k == n - 1:
            layers.append(BoundarySimplices(top_face_idx, chain[top_face_idx].astype(np.int64)))
        elif k == 0:
            idx = np.asarray(sorted(boundary_vertex_set), dtype=np.int64)
            layers.append(BoundarySimplices(idx, np.ones(len(idx), dtype=np.int64)))
        else:  # pragma: no cover - unreachable for n <= 2
            raise AssertionError
    return SimplicialComplex(
        dimension=dimension,
        vertices=verts,
        simplices=simplices,
        incidence=incidence,
        boundary_simplices=tuple(layers),
    )


def boundary_operator(K: SimplicialComplex, k: int) -> sp.csr_matrix:
    """The integer matrix of the boundary map on oriented k-simplices."""
    if not 1 <= k <= K.dimension:
        raise MeshStructureError(f"boundary operator degree {k} out of range")
    return K.incidence[k - 1]


def point_complex(vertices: np.ndarray) -> SimplicialComplex:
    """A 0-dimensional complex (vertices only); used for boundaries of lines."""
    verts = np.asarray(vertices, dtype=float)
    if verts.ndim == 1:
        verts = verts[:, None]
    simplices = (np.arange(len(verts), dtype=np.int64)[:, None],)
    return SimplicialComplex(
        dimension=0,
        vertices=verts,
        simplices=simplices,
        incidence=(),
        boundary_simplices=(),
    )


@dataclass(frozen=True, eq=False)
class BoundaryComplex:
    """The boundary of a complex with index maps back to the parent.

    ``simplex_maps[k]`` sends a k-simplex index of ``complex`` to the index of
    the corresponding k-simplex in the parent.
    """

    complex: SimplicialComplex
    vertex_map: np.ndarray
    simplex_maps: tuple[np.ndarray, ...]


def boundary_complex(K: SimplicialComplex) -> BoundaryComplex:
    """The (n-1)-dimensional boundary with its induced orientation.

    Closed complexes (and 0-dimensional ones) yield an empty boundary.
    """
    empty = BoundaryComplex(
        complex=point_complex(np.zeros((0, max(K.ambient_dimension, 1)))),
        vertex_map=np.zeros(0, dtype=np.int64),
        simplex_maps=(np.zeros(0, dtype=np.int64),),
    )
    if K.dimension == 0 or K.is_closed:
        return empty
    n = K.dimension
    layer = K.boundary_simplices[n - 1]
    if n == 1:
        vmap = layer.indices
        return BoundaryComplex(
            complex=point_complex(K.vertices[vmap]),
            vertex_map=vmap.astype(np.int64),
            simplex_maps=(np.arange(len(vmap), dtype=np.int64),),
        )
    vmap = K.boundary_simplices[0].indices
    relabel = {int(v): i for i, v in enumerate(vmap)}
    oriented = []
    for idx, sign in zip(layer.indices, layer.signs):
        a, b = K.simplices[1][idx].tolist()
        if sign < 0:
            a, b = b, a
        oriented.append((relabel[a], relabel[b]))
    bc = build_complex(1, K.vertices[vmap], np.asarray(oriented, dtype=np.int64))
    return BoundaryComplex(
        complex=bc,
        vertex_map=vmap.astype(np.int64),
        simplex_maps=(vmap.astype(np.int64), layer.indices.astype(np.int64)),
    )


def uniform_interval(n_edges: int, length: float = 1.0, origin: float = 0.0) -> SimplicialComplex:
    """A uniform 1D complex with ``n_edges`` left-to-right edges."""
    if n_edges < 1:
        raise MeshStructureError("need at least one edge")
    if length <= 0:
        raise MeshGeometryError("length must be positive")
    xs = origin + np.linspace(0.0, length, n_edges + 1)
    cells = np.column_stack([np.arange(n_edges), np.arange(1, n_edges + 1)])
    return build_complex(1, xs, cells)


# ---------------------------------------------------------------------------
# Text format: `dimension` line, `vertices <count>` section with coordinate
# rows, `cells <count>` section with vertex-index rows.  '#' starts a comment.
# ---------------------------------------------------------------------------

def mesh_from_text(text: str) -> SimplicialComplex:
    """Parse the mesh text format; raises MeshFormatError with line numbers."""
    lines = text.splitlines()
    tokens: list[tuple[int, list[str]]] = []
    for i, raw in enumerate(lines, start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            tokens.append((i, body.split()))
    pos = 0

    def take() -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(tokens):
            raise MeshFormatError("unexpected end of file", len(lines))
        item = tokens[pos]
        pos += 1
        return item

    line, tok = take()
    if len(tok) != 2 or tok[0] != "dimension":
        raise MeshFormatError("expected 'dimension <n>'", line)
    try:
        dim = int(tok[1])
    except ValueError:
        raise MeshFormatError(f"bad dimension {tok[1]!r}", line) from None

    line, tok = take()
    if len(tok) != 2 or tok[0] != "vertices":
        raise MeshFormatError("expected 'vertices <count>'", line)
    try:
        nv = int(tok[1])
    except ValueError:
        raise MeshFormatError(f"bad vertex count {tok[1]!r}", line) from None
    coords = []
    for _ in range(nv):
        line, tok = take()
        try:
            row = [float(t) for t in tok]
        except ValueError:
            raise MeshFormatError(f"bad coordinate row {' '.join(tok)!r}", line) from None
        if len(row) != dim:
            raise MeshFormatError(f"expected {dim} coordinates, got {len(row)}", line)
        coords.append(row)

    line, tok = take()
    if len(tok) != 2 or tok[0] != "cells":
        raise MeshFormatError("expected 'cells <count>'", line)
    try:
        nc = int(tok[1])
    except ValueError:
        raise MeshFormatError(f"bad cell count {tok[1]!r}", line) from None
    cells = []
    for _ in range(nc):
        line, tok = take()
        try:
            row = [int(t) for t in tok]
        except ValueError:
            raise MeshFormatError(f"bad cell row {' '.join(tok)!r}", line) from None
        if len(row) != dim + 1:
            raise MeshFormatError(f"expected {dim + 1} vertex indices, got {len(row)}", line)
        cells.append(row)
    if pos != len(tokens):
        line, tok = tokens[pos]
        raise MeshFormatError(f"unexpected trailing content {' '.join(tok)!r}", line)
    return build_complex(dim, np.asarray(coords, dtype=float), np.asarray(cells, dtype=np.int64))


def mesh_to_text(K: SimplicialComplex) -> str:
    """Serialize a complex in the text format accepted by mesh_from_text."""
    if K.ambient_dimension != K.dimension:
        raise MeshStructureError("text format requires ambient dimension == complex dimension")
    out = [f"dimension {K.dimension}", f"vertices {K.num_simplices(0)}"]
    for row in K.vertices:
        out.append(" ".join(repr(float(x)) for x in row))
    top = K.simplices[K.dimension]
    out.append(f"cells {top.shape[0]}")
    for row in top:
        out.append(" ".join(str(int(v)) for v in row))
    return "\n".join(out) + "\n"
