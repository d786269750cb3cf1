"""Dense real symmetric matrix kernel.

Everything in this package is real: states, product vectors, maps and the
local unitary are all real, so matrices are plain ``float64`` ndarrays.
Functions accept stacks of matrices (leading batch axes) where that makes
sense; the eigensolver in particular is vectorized over the batch.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

__all__ = [
    "ConvergenceError",
    "EigenDecomposition",
    "kron",
    "eig_sym",
    "eigvals_sym",
    "min_eig",
    "rank",
    "projector_onto_span",
    "is_symmetric",
    "RANK_TOL",
]

RANK_TOL = 1e-8
SYMMETRY_TOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
SPAN_TOL = 1e-10


class ConvergenceError(RuntimeError):
    """Raised when the Jacobi iteration does not converge."""


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def kron(a, b) -> np.ndarray:
    """Kronecker product, ``(a⊗b)[i*db + k, j*db + l] = a[i, j] * b[k, l]``."""
    return np.kron(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def is_symmetric(a: np.ndarray, tol: float = SYMMETRY_TOL) -> bool:
    a = np.asarray(a, dtype=float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        return False
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    return bool(np.max(np.abs(a - np.swapaxes(a, -1, -2)), initial=0.0) <= tol * scale)


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    # Each round is a set of disjoint (p, q) pairs; together the n-1 rounds
    # (n rounds for odd n) visit every off-diagonal pair exactly once.
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            p, q = players[k], players[m - 1 - k]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> np.ndarray:
    # a has shape (n, n, batch)
    off = a * (1.0 - np.eye(a.shape[0]))[:, :, None]
    return np.sqrt(np.sum(off * off, axis=(0, 1)))


def _jacobi(a: np.ndarray, tol: float, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    """Jacobi on a batch stored as (n, n, batch); returns (w, v) in that layout."""
    n = a.shape[0]
    a = a.copy()
    v = np.repeat(np.eye(n)[:, :, None], a.shape[2], axis=2)
    if n == 1:
        return a[0].copy(), v
    rounds = _round_robin(n)
    bound = tol * np.maximum(1.0, np.sqrt(np.sum(a * a, axis=(0, 1))))
    for _ in range(max_sweeps):
        if np.all(_off_norm(a) < bound):
            break
        for p, q in rounds:
            apq = a[p, q]
            diff = a[q, q] - a[p, p]
            # skip pairs already negligible against their diagonal gap
            active = np.abs(apq) > 1e-300 + 1e-18 * np.abs(diff)
            theta = diff / (2.0 * np.where(active, apq, 1.0))
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            # rows: A <- J^T A
            cc = c[:, None, :]
            ss = s[:, None, :]
            ap = a[p]
            aq = a[q]
            a[p] = cc * ap - ss * aq
            a[q] = ss * ap + cc * aq
            # columns: A <- A J, V <- V J
            cc = c[None]
            ss = s[None]
            ap = a[:, p]
            aq = a[:, q]
            a[:, p] = cc * ap - ss * aq
            a[:, q] = ss * ap + cc * aq
            vp = v[:, p]
            vq = v[:, q]
            v[:, p] = cc * vp - ss * vq
            v[:, q] = ss * vp + cc * vq
            a[p, q] = 0.0
            a[q, p] = 0.0
    else:
        if not np.all(_off_norm(a) < bound):
            raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    return np.diagonal(a, axis1=0, axis2=1).T.copy(), v


def eig_sym(
    a,
    tol: float = JACOBI_TOL,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
) -> EigenDecomposition:
    """Eigendecomposition of a real symmetric matrix (or a stack of them).

    Cyclic Jacobi with round-robin pair ordering, so that each round of
    disjoint rotations is applied in one vectorized step. Stops once the
    off-diagonal Frobenius norm drops below ``tol * max(1, ||A||_F)``.

    Eigenvalues are returned ascending; eigenvector columns are sign
    normalized so their largest-magnitude entry is positive.

    Raises
    ------
    ValueError
        If the input is not square or not symmetric within 1e-10.
    ConvergenceError
        If ``max_sweeps`` sweeps do not reach the tolerance.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrix, got shape {a.shape}")
    if not is_symmetric(a):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    batch_shape = a.shape[:-2]
    n = a.shape[-1]
    flat = np.moveaxis(a.reshape(-1, n, n), 0, -1)
    w, v = _jacobi(flat, tol, max_sweeps)
    w = w.T.reshape(*batch_shape, n)
    v = np.moveaxis(v, -1, 0).reshape(*batch_shape, n, n)
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[..., None, :], axis=-1)
    lead = np.take_along_axis(v, np.argmax(np.abs(v), axis=-2)[..., None, :], axis=-2)
    v = v * np.where(lead < 0, -1.0, 1.0)
    return EigenDecomposition(w, v)


def eigvals_sym(a, **kwargs) -> np.ndarray:
    return eig_sym(a, **kwargs).eigenvalues


def min_eig(a) -> float | np.ndarray:
    """Smallest eigenvalue; an array of them for stacked input."""
    w = eig_sym(a).eigenvalues[..., 0]
    return float(w) if np.ndim(w) == 0 else w


def rank(a, tol: float = RANK_TOL) -> int:
    """Number of eigenvalues with magnitude above ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = np.asarray(a, dtype=float)
    if not np.any(a):
        return 0
    return int(np.count_nonzero(np.abs(eig_sym(a).eigenvalues) > tol))


def orthonormal_basis(vectors: Sequence, tol: float = SPAN_TOL) -> np.ndarray:
    """Orthonormal columns spanning ``vectors``; dependent inputs are dropped.

    Modified Gram-Schmidt with one reorthogonalization pass. A vector whose
    residual norm falls to ``tol`` or below is treated as dependent.
    """
    vecs = [np.asarray(x, dtype=float).ravel() for x in vectors]
    if not vecs:
        raise ValueError("need at least one vector")
    n = vecs[0].size
    if any(x.size != n for x in vecs):
        raise ValueError("vectors must have equal length")
    basis: list[np.ndarray] = []
    for x in vecs:
        norm = np.linalg.norm(x)
        if norm == 0.0:
            raise ValueError("zero vector in span input")
        r = x / norm
        for _ in range(2):
            for q in basis:
                r = r - (q @ r) * q
        rn = np.linalg.norm(r)
        if rn > tol:
            basis.append(r / rn)
    return np.array(basis).T.reshape(n, len(basis))


def projector_onto_span(vectors: Sequence, tol: float = SPAN_TOL) -> np.ndarray:
    """Orthogonal projector onto the span of ``vectors`` (exactly symmetric)."""
    q = orthonormal_basis(vectors, tol)
    p = q @ q.T
    return 0.5 * (p + p.T)
