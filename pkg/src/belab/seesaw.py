"""Alternating optimization of <a⊗b|X|a⊗b> over real unit vectors a, b.

With one factor fixed the objective is a quadratic form in the other, so
each half-step is an extremal eigenvector of a small compressed matrix.
All restarts run together as one batch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import eig_sym

__all__ = ["SeesawResult", "seesaw", "restart_rng"]

MAX_ITER = 500
STEP_TOL = 1e-12


def restart_rng(seed: int, k: int) -> np.random.Generator:
    """Generator for restart ``k``; independent of how many restarts run."""
    return np.random.default_rng([int(seed), int(k)])


@dataclass(frozen=True, eq=False)
class SeesawResult:
    values: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray
    iterations: np.ndarray
    seed: int
    maximize: bool

    @property
    def best_index(self) -> int:
        return int(np.argmax(self.values) if self.maximize else np.argmin(self.values))

    @property
    def value(self) -> float:
        return float(self.values[self.best_index])

    @property
    def restarts(self) -> int:
        return len(self.values)


def seesaw(
    op: np.ndarray,
    dims: tuple[int, int],
    restarts: int = 200,
    seed: int = 42,
    maximize: bool = False,
    max_iter: int = MAX_ITER,
    tol: float = STEP_TOL,
) -> SeesawResult:
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    d1, d2 = dims
    op = np.asarray(op, dtype=float)
    if op.shape != (d1 * d2, d1 * d2):
        raise ValueError(f"operator shape {op.shape} does not match dims {dims}")
    k = op.reshape(d1, d2, d1, d2)
    pick = -1 if maximize else 0

    betas = np.empty((restarts, d2))
    for r in range(restarts):
        b = restart_rng(seed, r).standard_normal(d2)
        betas[r] = b / np.linalg.norm(b)
    alphas = np.zeros((restarts, d1))
    values = np.full(restarts, np.inf)
    iterations = np.full(restarts, max_iter)
    active = np.ones(restarts, dtype=bool)

    for it in range(1, max_iter + 1):
        idx = np.flatnonzero(active)
        b = betas[idx]
        m_a = np.einsum("ikjl,rk,rl->rij", k, b, b)
        a = eig_sym(m_a).eigenvectors[:, :, pick]
        m_b = np.einsum("ikjl,ri,rj->rkl", k, a, a)
        w, v = eig_sym(m_b)
        new = w[:, pick]
        alphas[idx] = a
        betas[idx] = v[:, :, pick]
        done = np.abs(new - values[idx]) < tol
        values[idx] = new
        iterations[idx[done]] = it
        active[idx[done]] = False
        if not active.any():
            break

    return SeesawResult(values, alphas, betas, iterations, int(seed), maximize)
