import numpy as np
import pytest

import decphs as d
from decphs.dirac import GraphElement


def _structures(kite, line4):
    K = kite.complex
    dual = d.build_dual(K)
    dual1 = d.build_dual(line4)
    return [
        d.build_dirac(K, dual, "A", 2, 1),
        d.build_dirac(K, dual, "B", 2, 1),
        d.build_dirac(line4, dual1, "A", 1, 1),
        d.build_dirac(line4, dual1, "B", 1, 1),
    ]


def test_degree_precondition(kite):
    K = kite.complex
    dual = d.build_dual(K)
    with pytest.raises(d.OperatorError):
        d.build_dirac(K, dual, "A", 2, 2)
    with pytest.raises(d.OperatorError):
        d.build_dirac(K, dual, "B", 3, 0)


def test_wave_block_layout(kite):
    K = kite.complex
    dual = d.build_dual(K)
    D = d.build_dirac(K, dual, "A", 2, 1)
    assert D.r == 3
    # (-1)^r d_i^1 = +d0^T, input block (-1)^r d_b^1 = -tr0^T, output +tr0
    assert np.array_equal(D.top_block.toarray(), d.coboundary(K, 0).toarray().T)
    assert np.array_equal(D.bottom_block.toarray(), d.coboundary(K, 0).toarray())
    assert np.array_equal(D.input_block.toarray(), -d.trace(K, 0).toarray().T)
    assert np.array_equal(D.output_block.toarray(), d.trace(K, 0).toarray())


def test_telegraph_block_layout(line4):
    dual = d.build_dual(line4)
    D = d.build_dirac(line4, dual, "B", 1, 1)
    assert D.r == 2
    assert np.array_equal(D.top_block.toarray(), d.coboundary(line4, 0).toarray())
    assert np.array_equal(D.bottom_block.toarray(),
                          d.dual_derivative_interior(line4, 0).toarray())
    assert np.array_equal(D.input_block.toarray(),
                          d.dual_derivative_boundary(line4, 0).toarray())
    assert np.array_equal(D.output_block.toarray(), -d.trace(line4, 0).toarray())


def test_pairing_of_zero_elements(kite):
    K = kite.complex
    D = d.build_dirac(K, d.build_dual(K), "A", 2, 1)
    z = d.graph_element(D, np.zeros(4), np.zeros(5), np.zeros(4))
    assert d.bilinear_pairing(D, z, z) == 0.0


def test_pairing_symmetry(kite, line4):
    rng = np.random.default_rng(0)
    for D in _structures(kite, line4):
        for _ in range(50):
            t1 = d.random_graph_element(D, rng)
            t2 = d.random_graph_element(D, rng)
            assert d.bilinear_pairing(D, t1, t2) == pytest.approx(
                d.bilinear_pairing(D, t2, t1), rel=1e-14, abs=1e-14
            )


def test_graph_isotropy(kite, line4):
    rng = np.random.default_rng(1)
    for D in _structures(kite, line4):
        for _ in range(100):
            t1 = d.random_graph_element(D, rng)
            t2 = d.random_graph_element(D, rng)
            scale = max(t1.norm() * t2.norm(), 1e-300)
            assert abs(d.bilinear_pairing(D, t1, t2)) <= 1e-12 * scale


def test_certify_passes(kite, line4):
    for D in _structures(kite, line4):
        cert = d.certify_dirac(D, trials=100, seed=7)
        assert cert.passed, (D.flavor, cert)
        assert cert.graph_dimension == cert.flow_dimension


def test_certified_dimensions_match_mesh_counts(kite, line4):
    K = kite.complex
    D = d.build_dirac(K, d.build_dual(K), "A", 2, 1)
    cert = d.certify_dirac(D, trials=10, seed=0)
    n_bv = len(K.boundary_simplices[0])
    assert cert.flow_dimension == K.num_simplices(0) + K.num_simplices(1) + n_bv
    D1 = d.build_dirac(line4, d.build_dual(line4), "B", 1, 1)
    cert1 = d.certify_dirac(D1, trials=10, seed=0)
    assert cert1.flow_dimension == line4.num_simplices(1) + line4.num_simplices(0) + 2


def test_sign_flip_breaks_isotropy(kite, line4):
    for D in _structures(kite, line4):
        for name in ("top_block", "bottom_block", "input_block", "output_block"):
            bad = d.flip_block(D, name)
            cert = d.certify_dirac(bad, trials=50, seed=3)
            assert not cert.isotropy_pass, (D.flavor, name)


def test_flip_unknown_block(kite):
    K = kite.complex
    D = d.build_dirac(K, d.build_dual(K), "A", 2, 1)
    with pytest.raises(d.OperatorError):
        d.flip_block(D, "sideways_block")


def test_poisson_certificate(kite, line4):
    for D in _structures(kite, line4):
        if D.flavor is d.Flavor.A:
            cert = d.certify_poisson(D, trials=100, seed=5)
            assert cert.passed
            assert cert.worst_residual <= 1e-12
        else:
            with pytest.raises(d.OperatorError):
                d.certify_poisson(D)


def test_poisson_zero_effort(kite):
    K = kite.complex
    D = d.build_dirac(K, d.build_dual(K), "A", 2, 1)
    fp = D.top_block.matrix @ np.zeros(5)
    fq = D.bottom_block.matrix @ np.zeros(4)
    val = D.pair_sign_p * (np.zeros(4) @ fp) + D.pair_sign_q * (np.zeros(5) @ fq)
    assert val == 0.0


def test_isotropy_scale_independent():
    K = d.uniform_interval(32)
    D = d.build_dirac(K, d.build_dual(K), "B", 1, 1)
    cert = d.certify_dirac(D, trials=50, seed=11)
    assert cert.passed


def test_certify_generated_meshes():
    from meshgen import equilateral_strip, hexagon_fan

    for K in (equilateral_strip(5), hexagon_fan()):
        dual = d.build_dual(K)
        for flavor, p, q in [("A", 2, 1), ("B", 2, 1), ("A", 1, 2), ("B", 1, 2)]:
            D = d.build_dirac(K, dual, flavor, p, q)
            cert = d.certify_dirac(D, trials=60, seed=0)
            assert cert.passed, (flavor, p, q)
            if flavor == "A":
                assert d.certify_poisson(D, trials=60, seed=0).passed


def test_pairing_accepts_tuples_from_graph(kite):
    K = kite.complex
    D = d.build_dirac(K, d.build_dual(K), "A", 2, 1)
    rng = np.random.default_rng(4)
    ep, eq, eb = rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 5), rng.uniform(-1, 1, 4)
    t = d.graph_element(D, ep, eq, eb)
    assert isinstance(t, GraphElement)
    assert np.array_equal(t.effort_p, ep)
    assert np.array_equal(t.flow_b, d.trace(K, 0).matrix @ ep)
