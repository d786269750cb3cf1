"""Tests for the partial transpose, the Choi map and the lifted detector."""

import numpy as np
import pytest

from belab.catalog import DensityMatrix, maximally_mixed, product, pure_state
from belab.linalg import min_eig
from belab.maps import (
    CHOI_UNITARY,
    SingleSiteMap,
    choi,
    choi_map,
    choi_u_detect,
    choi_u_values,
    conjugate_local,
    identity_map,
    is_ppt,
    lift_map,
    partial_transpose,
    transpose_map,
)
from conftest import bell_state, oracle_choi_u, random_unit

# Regression constants, computed once with the independent oracle in conftest
# (explicit block loop + LAPACK) and frozen here.
CHOI_U_TILES_EDGE = -0.007609136401785176
CHOI_U_GENTILES2_EDGE = -0.006217076317792613


def test_choi_map_identity():
    np.testing.assert_array_equal(choi_map(np.eye(3)), np.eye(3))


def test_choi_map_diagonal():
    np.testing.assert_array_equal(choi_map(np.diag([2.0, 0.0, 0.0])), np.diag([1.0, 0.0, 1.0]))


def test_choi_map_off_diagonal():
    e12 = np.zeros((3, 3))
    e12[0, 1] = 1.0
    np.testing.assert_array_equal(choi_map(e12), -0.5 * e12)


def test_choi_map_rejects_other_sizes():
    with pytest.raises(ValueError):
        choi_map(np.eye(2))


def test_choi_map_linear(rng):
    a, b = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
    np.testing.assert_allclose(choi_map(2.5 * a - b), 2.5 * choi_map(a) - choi_map(b), atol=1e-14)
    m = choi()
    np.testing.assert_allclose(m(a), choi_map(a), atol=1e-15)


def test_choi_map_positive_on_pure_states(rng):
    for _ in range(200):
        v = random_unit(rng, 3)
        assert np.linalg.eigvalsh(choi_map(np.outer(v, v)))[0] >= -1e-14


def test_choi_map_not_completely_positive():
    # Choi matrix of the map is not PSD, so some entangled state is detected
    psi = np.eye(3).ravel() / np.sqrt(3)
    rho = DensityMatrix(np.outer(psi, psi), (3, 3))
    assert min_eig(lift_map(choi(), rho)) < -0.1


def test_single_site_map_validation():
    with pytest.raises(ValueError):
        SingleSiteMap(2, np.eye(3))
    with pytest.raises(ValueError):
        identity_map(2)(np.eye(3))


def test_partial_transpose_bell():
    pt = partial_transpose(bell_state())
    assert np.linalg.eigvalsh(pt)[0] == pytest.approx(-0.5, abs=1e-15)
    assert not is_ppt(bell_state())


def test_partial_transpose_involution_and_trace(rng):
    a = rng.standard_normal((12, 12))
    a = a + a.T
    pt = partial_transpose(a, (4, 3))
    np.testing.assert_array_equal(partial_transpose(pt, (4, 3)), a)
    assert np.trace(pt) == pytest.approx(np.trace(a), abs=1e-12)


def test_partial_transpose_product_operator(rng):
    a, b = rng.standard_normal((4, 4)), rng.standard_normal((3, 3))
    np.testing.assert_allclose(partial_transpose(np.kron(a, b), (4, 3)), np.kron(a, b.T), atol=1e-15)


def test_partial_transpose_needs_dims():
    with pytest.raises(ValueError):
        partial_transpose(np.eye(4))
    with pytest.raises(ValueError):
        is_ppt(bell_state(), tol=0.0)


def test_lift_identity_and_transpose(tiles_edge, rng):
    np.testing.assert_array_equal(lift_map(identity_map(3), tiles_edge), tiles_edge.mat)
    a = rng.standard_normal((9, 9))
    a = a + a.T
    np.testing.assert_allclose(lift_map(transpose_map(3), a, (3, 3)), partial_transpose(a, (3, 3)), atol=1e-15)


def test_lift_dimension_mismatch():
    with pytest.raises(ValueError):
        lift_map(choi(), maximally_mixed((3, 2)))


def test_choi_unitary_orthogonal():
    np.testing.assert_allclose(CHOI_UNITARY.T @ CHOI_UNITARY, np.eye(3), atol=1e-15)
    assert np.linalg.det(CHOI_UNITARY) == pytest.approx(1.0, abs=1e-15)


def test_conjugate_local_keeps_spectrum(tiles_edge):
    rotated = conjugate_local(tiles_edge, CHOI_UNITARY)
    np.testing.assert_allclose(
        np.linalg.eigvalsh(rotated.mat), np.linalg.eigvalsh(tiles_edge.mat), atol=1e-14
    )
    with pytest.raises(ValueError):
        conjugate_local(tiles_edge, 2 * np.eye(3))
    with pytest.raises(ValueError):
        conjugate_local(tiles_edge, np.eye(2))


def test_choi_u_constants_against_oracle(tiles_edge, gentiles2_edge):
    assert oracle_choi_u(tiles_edge.mat, 3) == pytest.approx(CHOI_U_TILES_EDGE, abs=1e-13)
    assert oracle_choi_u(gentiles2_edge.mat, 4) == pytest.approx(CHOI_U_GENTILES2_EDGE, abs=1e-13)
    assert choi_u_detect(tiles_edge) == pytest.approx(CHOI_U_TILES_EDGE, abs=1e-12)
    assert choi_u_detect(gentiles2_edge) == pytest.approx(CHOI_U_GENTILES2_EDGE, abs=1e-12)


def test_choi_u_matches_oracle_on_random_states(rng):
    for dims in [(3, 3), (4, 3), (2, 3)]:
        D = dims[0] * dims[1]
        g = rng.standard_normal((D, D))
        mat = g @ g.T
        mat /= np.trace(mat)
        rho = DensityMatrix(mat, dims)
        assert choi_u_detect(rho) == pytest.approx(oracle_choi_u(mat, dims[0]), abs=1e-12)


def test_choi_u_nonnegative_on_product_states():
    rng = np.random.default_rng(11)
    for dims in [(3, 3), (4, 3)]:
        a = rng.standard_normal((5000, dims[0]))
        b = rng.standard_normal((5000, dims[1]))
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        b /= np.linalg.norm(b, axis=1, keepdims=True)
        v = np.einsum("ni,nj->nij", a, b).reshape(5000, -1)
        mats = np.einsum("ni,nj->nij", v, v)
        assert choi_u_values(mats, dims).min() >= -1e-10


def test_choi_u_maximally_mixed_positive():
    assert choi_u_detect(maximally_mixed((3, 3))) > 0
    assert choi_u_detect(pure_state(product((3, 3), 1, 2))) >= -1e-12


def test_choi_u_requires_qutrit_b():
    with pytest.raises(ValueError):
        choi_u_detect(bell_state())
    with pytest.raises(ValueError):
        choi_u_values(np.eye(4) / 4, (2, 2))
