"""Partial transpose, the Choi map and its lift to bipartite states.

A single-site map is stored as its transfer matrix on row-major vectorized
d x d matrices: ``vec(map(X)) = T @ vec(X)``. Lifting applies it to every
d2 x d2 block of a bipartite matrix, i.e. computes (I ⊗ map)(rho).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .catalog import DensityMatrix
from .linalg import min_eig

__all__ = [
    "SingleSiteMap",
    "CHOI_UNITARY",
    "partial_transpose",
    "is_ppt",
    "choi_map",
    "choi",
    "identity_map",
    "transpose_map",
    "conjugate_local",
    "lift_map",
    "choi_u_detect",
    "choi_u_values",
]

DETECT_TOL = 1e-10

# local rotation applied on party B before the Choi map
CHOI_UNITARY = np.array(
    [
        [0.5, np.sqrt(3.0) / 2.0, 0.0],
        [-np.sqrt(3.0) / 2.0, 0.5, 0.0],
        [0.0, 0.0, 1.0],
    ]
)


@dataclass(frozen=True, eq=False)
class SingleSiteMap:
    """Linear map on d x d real matrices, given by its d² x d² transfer matrix."""

    d: int
    transfer: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.array(self.transfer, dtype=float)
        if t.shape != (self.d * self.d, self.d * self.d):
            raise ValueError(f"transfer matrix must be {self.d**2}x{self.d**2}")
        t.setflags(write=False)
        object.__setattr__(self, "transfer", t)

    @classmethod
    def from_function(cls, d: int, f: Callable[[np.ndarray], np.ndarray], label: str = "") -> "SingleSiteMap":
        """Tabulate ``f`` on the matrix units E_kl."""
        t = np.zeros((d * d, d * d))
        for k in range(d):
            for l in range(d):
                e = np.zeros((d, d))
                e[k, l] = 1.0
                t[:, k * d + l] = np.asarray(f(e), dtype=float).reshape(d * d)
        return cls(d, t, label)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-2:] != (self.d, self.d):
            raise ValueError(f"expected {self.d}x{self.d} input")
        flat = x.reshape(*x.shape[:-2], self.d * self.d)
        return (flat @ self.transfer.T).reshape(x.shape)


def choi_map(x) -> np.ndarray:
    """The Choi map on 3x3 matrices.

    Diagonal: (a11+a22)/2, (a22+a33)/2, (a33+a11)/2; off-diagonals -a_ij/2.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (3, 3):
        raise ValueError(f"Choi map acts on 3x3 matrices, got {x.shape}")
    out = -0.5 * x
    out[0, 0] = 0.5 * (x[0, 0] + x[1, 1])
    out[1, 1] = 0.5 * (x[1, 1] + x[2, 2])
    out[2, 2] = 0.5 * (x[2, 2] + x[0, 0])
    return out


def choi() -> SingleSiteMap:
    return SingleSiteMap.from_function(3, choi_map, "choi")


def identity_map(d: int) -> SingleSiteMap:
    return SingleSiteMap(d, np.eye(d * d), "identity")


def transpose_map(d: int) -> SingleSiteMap:
    return SingleSiteMap.from_function(d, lambda x: x.T, "transpose")


def _as_array(rho, dims):
    if isinstance(rho, DensityMatrix):
        return rho.mat, rho.dims
    if dims is None:
        raise ValueError("dims required for a plain matrix")
    return np.asarray(rho, dtype=float), tuple(dims)


def _lift(mats: np.ndarray, dims: tuple[int, int], transfer: np.ndarray) -> np.ndarray:
    d1, d2 = dims
    lead = mats.shape[:-2]
    # (..., i, k, j, l) -> (..., i, j, k*d2 + l): block (i, j) flattened row-major
    blocks = mats.reshape(*lead, d1, d2, d1, d2).swapaxes(-3, -2).reshape(*lead, d1, d1, d2 * d2)
    out = blocks @ transfer.T
    return out.reshape(*lead, d1, d1, d2, d2).swapaxes(-3, -2).reshape(mats.shape)


def partial_transpose(rho, dims: tuple[int, int] | None = None) -> np.ndarray:
    """Transpose every d2 x d2 block (transpose on the second party)."""
    mats, dims = _as_array(rho, dims)
    d1, d2 = dims
    lead = mats.shape[:-2]
    t = mats.reshape(*lead, d1, d2, d1, d2).swapaxes(-3, -1)
    return t.reshape(mats.shape)


def is_ppt(rho: DensityMatrix, tol: float = DETECT_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return bool(min_eig(partial_transpose(rho)) >= -tol)


def conjugate_local(rho: DensityMatrix, u) -> DensityMatrix:
    """(I ⊗ u) rho (I ⊗ u)^T for a real orthogonal ``u`` on party B."""
    u = np.asarray(u, dtype=float)
    d1, d2 = rho.dims
    if u.shape != (d2, d2):
        raise ValueError(f"local operator must be {d2}x{d2}")
    if np.max(np.abs(u.T @ u - np.eye(d2))) > 1e-12:
        raise ValueError("local operator is not orthogonal")
    mat = _conjugate(rho.mat, rho.dims, u)
    return DensityMatrix(mat, rho.dims, label=rho.label, family=rho.family, lam=rho.lam)


def _conjugate(mats: np.ndarray, dims: tuple[int, int], u: np.ndarray) -> np.ndarray:
    big = np.kron(np.eye(dims[0]), u)
    return big @ mats @ big.T


def lift_map(m: SingleSiteMap, rho, dims: tuple[int, int] | None = None) -> np.ndarray:
    """(I ⊗ m)(rho), symmetrized.

    For a general map the image need not be symmetric; more than 1e-10 of
    asymmetry is an error since the result is meant for eigenvalues.
    """
    mats, dims = _as_array(rho, dims)
    if m.d != dims[1]:
        raise ValueError(f"map acts on dimension {m.d}, party B has {dims[1]}")
    out = _lift(mats, dims, m.transfer)
    asym = np.max(np.abs(out - np.swapaxes(out, -1, -2)), initial=0.0)
    if asym > 1e-10:
        raise ValueError(f"lifted image not symmetric (asymmetry {asym:.3g})")
    return 0.5 * (out + np.swapaxes(out, -1, -2))


_CHOI = None


def _choi_transfer() -> np.ndarray:
    global _CHOI
    if _CHOI is None:
        _CHOI = choi().transfer
    return _CHOI


def choi_u_values(mats: np.ndarray, dims: tuple[int, int], u=CHOI_UNITARY) -> np.ndarray:
    """Batched detector: min eigenvalue of (I⊗Λ)(I⊗u) rho (I⊗u)^T per matrix."""
    if dims[1] != 3:
        raise ValueError("the Choi detector needs party B of dimension 3")
    mats = np.asarray(mats, dtype=float)
    lifted = _lift(_conjugate(mats, dims, np.asarray(u, dtype=float)), dims, _choi_transfer())
    lifted = 0.5 * (lifted + np.swapaxes(lifted, -1, -2))
    return np.asarray(min_eig(lifted))


def choi_u_detect(rho: DensityMatrix) -> float:
    """Minimum eigenvalue of the Choi map (after the local rotation) lifted onto rho.

    The Choi map is positive, so the value is nonnegative on every separable
    state; a value below -1e-10 certifies entanglement.
    """
    if rho.dims[1] != 3:
        raise ValueError("the Choi detector needs party B of dimension 3")
    return float(choi_u_values(rho.mat, rho.dims))
