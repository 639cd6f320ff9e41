"""Well-centered test meshes used across the suite."""

import math

import numpy as np

from decphs import build_complex, SimplicialComplex


def equilateral_strip(m: int) -> SimplicialComplex:
    """A strip of 2m-1 equilateral triangles (m pointing up, m-1 down)."""
    h = math.sqrt(3.0) / 2.0
    bottom = [(float(k), 0.0) for k in range(m + 1)]
    top = [(k + 0.5, h) for k in range(m)]
    verts = np.asarray(bottom + top)
    tris = []
    for k in range(m):
        tris.append((k, k + 1, m + 1 + k))
    for k in range(m - 1):
        tris.append((k + 1, m + 2 + k, m + 1 + k))
    return build_complex(2, verts, np.asarray(tris))


def hexagon_fan() -> SimplicialComplex:
    """Six equilateral triangles fanned around the origin."""
    ring = [(math.cos(2 * math.pi * k / 6), math.sin(2 * math.pi * k / 6))
            for k in range(6)]
    verts = np.asarray([(0.0, 0.0)] + ring)
    tris = [(0, 1 + k, 1 + (k + 1) % 6) for k in range(6)]
    return build_complex(2, verts, np.asarray(tris))


def nonuniform_line() -> SimplicialComplex:
    """A 1D complex with uneven segment lengths."""
    xs = np.array([0.0, 0.3, 0.45, 0.9, 1.0])
    cells = np.column_stack([np.arange(4), np.arange(1, 5)])
    return build_complex(1, xs, cells)


def obtuse_triangle() -> SimplicialComplex:
    """A single obtuse (not well-centered) counterclockwise triangle."""
    verts = np.array([[0.0, 0.0], [4.0, 0.0], [2.0, 0.5]])
    return build_complex(2, verts, np.array([[0, 1, 2]]))
