import math

import numpy as np
import pytest

import decphs as d
from meshgen import obtuse_triangle


def test_circumcenter_segment():
    c = d.circumcenter(np.array([[0.0, 0.0], [1.0, 0.0]]))
    assert np.allclose(c, [0.5, 0.0])


def test_circumcenter_right_triangle():
    c = d.circumcenter(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    assert np.allclose(c, [0.5, 0.5])


def test_circumcenter_equilateral():
    # solved from the two perpendicular bisector equations
    c = d.circumcenter(np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]]))
    assert np.allclose(c, [0.5, math.sqrt(3) / 6], atol=1e-14)


def test_circumcenter_degenerate():
    with pytest.raises(d.MeshGeometryError):
        d.circumcenter(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]))


def test_well_centered_reports(test_meshes):
    for K in test_meshes:
        assert d.is_well_centered(K).ok


def test_obtuse_triangle_flagged():
    report = d.is_well_centered(obtuse_triangle())
    assert not report.ok
    assert (2, 0) in report.violations


def test_1d_always_well_centered(line4):
    assert d.is_well_centered(line4).ok


def test_build_dual_refuses_obtuse():
    with pytest.raises(d.NotWellCenteredError) as info:
        d.build_dual(obtuse_triangle())
    assert info.value.report.violations == ((2, 0),)


def test_1d_dual_measures():
    K = d.uniform_interval(2)  # two edges on [0, 1]
    dual = d.build_dual(K)
    assert np.allclose(dual.dual_measure[0], [0.25, 0.5, 0.25])
    assert np.allclose(dual.dual_measure[1], [1.0, 1.0])
    # interior cell of the middle vertex is [0.25, 0.75]
    cell = dual.interior_cells[0][1]
    assert np.allclose(sorted(cell[:, 0]), [0.25, 0.75])
    # boundary dual cells are the endpoints themselves
    assert np.allclose(dual.boundary_cells[0][0], [[0.0]])
    assert np.allclose(dual.boundary_cells[0][1], [[1.0]])
    assert np.allclose(dual.boundary_dual_measure[0], [1.0, 1.0])


def test_kite_dual_edge_connects_circumcenters(kite):
    K = kite.complex
    dual = d.build_dual(K)
    shared = [j for j in range(5) if j not in K.boundary_simplices[1].indices]
    assert len(shared) == 1
    cell = dual.interior_cells[1][shared[0]]
    ccs = dual.circumcenters[2]
    assert np.allclose(sorted(cell[:, 0].tolist()), sorted(ccs[:, 0].tolist()))


def test_dual_cell_areas_partition(test_meshes):
    for K in test_meshes:
        dual = d.build_dual(K)
        total = dual.total_measure
        assert abs(dual.dual_measure[0].sum() - total) <= 1e-12 * total


def test_support_volumes_partition(test_meshes):
    for K in test_meshes:
        dual = d.build_dual(K)
        total = dual.total_measure
        for k in range(K.dimension + 1):
            s = dual.support_measure[k].sum()
            assert abs(s - total) <= 1e-12 * total, (K.dimension, k)


def test_primal_dual_orthogonality(test_meshes):
    for K in test_meshes:
        if K.dimension != 2:
            continue
        dual = d.build_dual(K)
        for j in range(K.num_simplices(1)):
            cell = dual.interior_cells[1][j]
            direction = cell[-1] - cell[0]
            edge = K.simplex_vertices(1, j)
            evec = edge[1] - edge[0]
            lim = 1e-12 * np.linalg.norm(direction) * np.linalg.norm(evec)
            assert abs(float(direction @ evec)) <= max(lim, 1e-250)


def test_boundary_dual_cells_tile_boundary(test_meshes):
    for K in test_meshes:
        if K.dimension != 2:
            continue
        dual = d.build_dual(K)
        bl = K.boundary_simplices[1]
        edge_len = {int(i): dual.primal_measure[1][i] for i in bl.indices}
        # independent recomputation: each boundary vertex collects half of
        # each adjacent boundary edge
        expected = {}
        for i in bl.indices:
            a, b = K.simplices[1][i].tolist()
            for v in (a, b):
                expected[v] = expected.get(v, 0.0) + edge_len[int(i)] / 2.0
        for r, v in enumerate(K.boundary_simplices[0].indices):
            got = dual.boundary_dual_measure[0][r]
            assert abs(got - expected[int(v)]) <= 1e-12 * expected[int(v)]
        total = sum(edge_len.values())
        cover = dual.boundary_dual_measure[0].sum()
        assert abs(cover - total) <= 1e-12 * total


def test_all_dual_measures_positive(test_meshes):
    for K in test_meshes:
        dual = d.build_dual(K)
        for k in range(K.dimension + 1):
            assert np.all(dual.dual_measure[k] > 0)
            assert np.all(dual.primal_measure[k] > 0)


def test_dual_dump_is_deterministic(kite):
    dual = d.build_dual(kite.complex)
    assert d.dual_to_text(dual) == d.dual_to_text(d.build_dual(kite.complex))
    assert "boundary_degree 0 count 4" in d.dual_to_text(dual)
