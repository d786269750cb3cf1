"""Tests for the dense symmetric kernel."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from belab.linalg import ConvergenceError, eig_sym, kron, min_eig, projector_onto_span, rank
from conftest import bell_state
from belab.maps import partial_transpose


def test_kron_identity():
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))


def test_kron_basis_bookkeeping():
    e1 = np.diag([1.0, 0.0])
    e2 = np.diag([0.0, 1.0])
    out = kron(e1, e2)
    expected = np.zeros((4, 4))
    expected[1, 1] = 1.0
    np.testing.assert_array_equal(out, expected)


def test_kron_dims():
    assert kron(np.ones((4, 4)), np.ones((3, 3))).shape == (12, 12)


def test_kron_index_formula(rng):
    a, b = rng.standard_normal((3, 3)), rng.standard_normal((4, 4))
    k = kron(a, b)
    for i, j, p, q in [(0, 1, 2, 3), (2, 2, 0, 1), (1, 0, 3, 3)]:
        assert k[i * 4 + p, j * 4 + q] == a[i, j] * b[p, q]


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(
    arrays(float, (3, 3), elements=finite),
    arrays(float, (4, 4), elements=finite),
    arrays(float, (3, 3), elements=finite),
    arrays(float, (4, 4), elements=finite),
)
def test_kron_mixed_product(a, b, c, d):
    lhs = kron(a, b) @ kron(c, d)
    rhs = kron(a @ c, b @ d)
    scale = max(1.0, np.abs(lhs).max())
    assert np.abs(lhs - rhs).max() <= 1e-12 * scale


@settings(max_examples=30, deadline=None)
@given(arrays(float, (3, 3), elements=finite), arrays(float, (3, 3), elements=finite), finite)
def test_kron_bilinear(a, b, s):
    c = np.eye(4) * 0.5
    np.testing.assert_allclose(kron(s * a + b, c), s * kron(a, c) + kron(b, c), atol=1e-12)


@pytest.mark.parametrize(
    "mat, expected",
    [
        (np.eye(3), [1.0, 1.0, 1.0]),
        (np.diag([3.0, 1.0, 2.0]), [1.0, 2.0, 3.0]),
        (np.array([[0.0, 1.0], [1.0, 0.0]]), [-1.0, 1.0]),
    ],
)
def test_eig_sym_small_cases(mat, expected):
    np.testing.assert_allclose(eig_sym(mat).eigenvalues, expected, atol=1e-14)


def test_eig_sym_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        eig_sym(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        eig_sym(np.ones((2, 3)))


def test_eig_sym_reconstruction_1000_random():
    """1000 random symmetric matrices of sizes 1..12, checked against LAPACK too."""
    rng = np.random.default_rng(7)
    count = 0
    for n in range(1, 13):
        batch = 84 if n < 12 else 1000 - 84 * 11
        a = rng.standard_normal((batch, n, n)) * rng.uniform(0.1, 10.0, (batch, 1, 1))
        a = a + np.swapaxes(a, -1, -2)
        w, v = eig_sym(a)
        count += batch
        recon = v @ (w[..., None] * np.swapaxes(v, -1, -2))
        scale = np.maximum(1.0, np.abs(a).max(axis=(-2, -1)))
        assert np.all(np.abs(recon - a).max(axis=(-2, -1)) <= 1e-9 * scale)
        gram = np.swapaxes(v, -1, -2) @ v
        assert np.abs(gram - np.eye(n)).max() <= 1e-10
        norm = np.linalg.norm(a, ord=2, axis=(-2, -1))
        resid = np.linalg.norm(a @ v - v * w[..., None, :], axis=-2)
        assert np.all(resid <= 1e-10 * np.maximum(norm, 1.0)[..., None])
        np.testing.assert_allclose(w, np.linalg.eigvalsh(a), atol=1e-11 * scale.max())
        assert np.all(np.diff(w, axis=-1) >= 0)
    assert count == 1000


def test_eig_sym_deterministic(rng):
    a = rng.standard_normal((9, 9))
    a = a + a.T
    first, second = eig_sym(a), eig_sym(a.copy())
    np.testing.assert_array_equal(first.eigenvalues, second.eigenvalues)
    np.testing.assert_array_equal(first.eigenvectors, second.eigenvectors)


def test_eig_sym_nonconvergence_raises(rng):
    a = rng.standard_normal((6, 6))
    with pytest.raises(ConvergenceError):
        eig_sym(a + a.T, max_sweeps=1)


def test_min_eig_cases():
    assert min_eig(np.eye(9) / 9) == pytest.approx(1 / 9, abs=1e-15)
    p = np.diag([1.0, 1.0, 0.0, 0.0])
    assert min_eig(p) == pytest.approx(0.0, abs=1e-15)


def test_min_eig_bell_partial_transpose():
    """LAPACK on the explicit 4x4 partial transpose gives -1/2; the kernel must agree."""
    pt = partial_transpose(bell_state())
    oracle = np.linalg.eigvalsh(pt)[0]
    assert oracle == pytest.approx(-0.5, abs=1e-15)
    assert min_eig(pt) == pytest.approx(-0.5, abs=1e-14)


def test_rank_cases(tiles_edge):
    assert rank(np.eye(4), 1e-8) == 4
    assert rank(np.zeros((5, 5))) == 0
    assert rank(tiles_edge.mat) == 4
    with pytest.raises(ValueError):
        rank(np.eye(2), 0.0)


def test_projector_single_vector():
    e1 = np.array([1.0, 0.0, 0.0])
    np.testing.assert_array_equal(projector_onto_span([e1]), np.outer(e1, e1))


def test_projector_two_vectors():
    p = projector_onto_span([[1.0, 0, 0], [1.0, 1.0, 0]])
    np.testing.assert_allclose(p, np.diag([1.0, 1.0, 0.0]), atol=1e-15)


def test_projector_drops_dependent_vectors():
    p = projector_onto_span([[1.0, 1.0, 0], [2.0, 2.0, 0], [0, 0, 1.0]])
    assert rank(p) == 2


def test_projector_rejects_zero_vector():
    with pytest.raises(ValueError):
        projector_onto_span([[1.0, 0.0], [0.0, 0.0]])


def test_projector_tiles_span(tiles):
    p = projector_onto_span([v.vector for v in tiles])
    assert np.trace(p) == pytest.approx(5.0, abs=1e-12)
    assert rank(p) == 5
    assert np.abs(p @ p - p).max() <= 1e-10
    assert np.abs(p - p.T).max() == 0.0


def test_projector_random_spans_idempotent(rng):
    for _ in range(50):
        n, k = rng.integers(2, 13), rng.integers(1, 6)
        vecs = rng.standard_normal((k, n))
        p = projector_onto_span(vecs)
        assert np.abs(p @ p - p).max() <= 1e-10
        assert np.abs(p - p.T).max() == 0.0
        np.testing.assert_allclose(p @ vecs.T, vecs.T, atol=1e-10)
