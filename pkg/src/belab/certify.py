"""Entanglement certification: UPB witnesses, λ sweeps and threshold location."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import __version__
from .catalog import DensityMatrix, Family, ProductBasis
from .linalg import is_symmetric, min_eig
from .maps import DETECT_TOL, choi_u_values, partial_transpose
from .seesaw import SeesawResult, seesaw

__all__ = [
    "Witness",
    "GridResult",
    "Detector",
    "SweepResult",
    "CertificationReport",
    "check_projector",
    "gamma_search",
    "estimate_gamma",
    "grid_overlap",
    "witness_from_basis",
    "witness_value",
    "make_detector",
    "sweep",
    "certify_state",
]

DEFAULT_RESTARTS = 200
DEFAULT_SEED = 42
PROJECTOR_TOL = 1e-10
BISECT_ITERS = 50
BISECT_WIDTH = 1e-10


def check_projector(pi, tol: float = PROJECTOR_TOL) -> np.ndarray:
    pi = np.asarray(pi, dtype=float)
    if pi.ndim != 2 or pi.shape[0] != pi.shape[1]:
        raise ValueError("projector must be a square matrix")
    if not is_symmetric(pi, tol):
        raise ValueError("projector must be symmetric")
    if np.max(np.abs(pi @ pi - pi), initial=0.0) > tol:
        raise ValueError("matrix is not idempotent")
    return pi


def gamma_search(pi, dims, restarts: int = DEFAULT_RESTARTS, seed: int = DEFAULT_SEED) -> SeesawResult:
    """Multistart seesaw minimization of <a⊗b|pi|a⊗b>; keeps every restart."""
    pi = check_projector(pi)
    return seesaw(pi, dims, restarts=restarts, seed=seed, maximize=False)


def estimate_gamma(pi, dims, restarts: int = DEFAULT_RESTARTS, seed: int = DEFAULT_SEED) -> float:
    """Smallest overlap of a real product state with the projector ``pi``.

    Found by seesaw, so the result is an upper bound on the true minimum.
    """
    return gamma_search(pi, dims, restarts, seed).value


class GridResult(NamedTuple):
    value: float
    alpha: np.ndarray
    beta: np.ndarray
    evaluations: int


def _sphere_points(angles: np.ndarray) -> np.ndarray:
    """Hyperspherical coordinates to unit vectors; angles has shape (n, d-1)."""
    n, m = angles.shape
    out = np.ones((n, m + 1))
    s = np.ones(n)
    for k in range(m):
        out[:, k] = s * np.cos(angles[:, k])
        s = s * np.sin(angles[:, k])
    out[:, m] = s
    return out


def _angle_grid(d: int, axes: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    if d == 1:
        return np.zeros((1, 0)), np.ones((1, 1))
    mesh = np.meshgrid(*axes, indexing="ij")
    ang = np.stack([g.ravel() for g in mesh], axis=1)
    return ang, _sphere_points(ang)


def _best_pairs(xa, xb, k2, sign, top):
    """Indices of the ``top`` best (a, b) grid pairs, scanning in row chunks."""
    kb = k2 @ xb.T
    best_vals = np.empty(0)
    best_idx = np.empty((0, 2), dtype=int)
    chunk = max(1, 2_000_000 // max(1, xb.shape[0]))
    for start in range(0, xa.shape[0], chunk):
        f = sign * (xa[start : start + chunk] @ kb)
        flat = f.ravel()
        t = min(top, flat.size)
        part = np.argpartition(flat, t - 1)[:t]
        rows, cols = np.unravel_index(part, f.shape)
        best_vals = np.concatenate([best_vals, flat[part]])
        best_idx = np.concatenate([best_idx, np.stack([rows + start, cols], axis=1)])
        if best_vals.size > top:
            keep = np.argsort(best_vals, kind="stable")[:top]
            best_vals, best_idx = best_vals[keep], best_idx[keep]
    order = np.argsort(best_vals, kind="stable")
    return best_vals[order], best_idx[order]


def grid_overlap(
    op,
    dims: tuple[int, int],
    coarse_step: float = 0.025,
    fine_step: float = 0.0025,
    top: int = 32,
    maximize: bool = False,
) -> GridResult:
    """Brute-force grid search of <a⊗b|op|a⊗b> over real unit vectors.

    Each factor is parametrized by hyperspherical angles in [0, π] (one
    representative per ±ray). Every pair on the coarse grid is evaluated;
    the ``top`` best cells are then re-gridded at ``fine_step`` over a box
    of ± one coarse step around them. No eigensolver is involved, which
    keeps this usable as an independent check on the seesaw.
    """
    d1, d2 = dims
    op = np.asarray(op, dtype=float)
    k2 = op.reshape(d1, d2, d1, d2).transpose(0, 2, 1, 3).reshape(d1 * d1, d2 * d2)
    sign = -1.0 if maximize else 1.0

    def outer_rows(v):
        return np.einsum("ni,nj->nij", v, v).reshape(v.shape[0], -1)

    n_coarse = int(np.ceil(np.pi / coarse_step)) + 1
    axis = np.linspace(0.0, np.pi, n_coarse)
    ang_a, va = _angle_grid(d1, [axis] * (d1 - 1))
    ang_b, vb = _angle_grid(d2, [axis] * (d2 - 1))
    xa, xb = outer_rows(va), outer_rows(vb)
    evaluations = xa.shape[0] * xb.shape[0]
    _, idx = _best_pairs(xa, xb, k2, sign, top)

    step = axis[1] - axis[0] if n_coarse > 1 else coarse_step
    offsets = np.arange(-step, step + 0.5 * fine_step, fine_step)
    best = (np.inf, None, None)
    for ia, ib in idx:
        la, fa = _angle_grid(d1, [ang_a[ia, k] + offsets for k in range(d1 - 1)])
        lb, fb = _angle_grid(d2, [ang_b[ib, k] + offsets for k in range(d2 - 1)])
        vals, loc = _best_pairs(outer_rows(fa), outer_rows(fb), k2, sign, 1)
        evaluations += fa.shape[0] * fb.shape[0]
        if vals[0] < best[0]:
            best = (vals[0], fa[loc[0, 0]], fb[loc[0, 1]])
    return GridResult(float(sign * best[0]), best[1], best[2], evaluations)


@dataclass(frozen=True, eq=False)
class Witness:
    """W = pi - gamma * I.

    ``gamma_kind`` is ``"supplied"`` for a user-given offset and
    ``"estimated"`` for a seesaw value; only supplied offsets are trusted
    for entanglement verdicts, since an estimate can sit above the true
    minimum.
    """

    pi: np.ndarray
    gamma: float
    gamma_kind: str = "supplied"
    dims: tuple[int, int] | None = None

    def __post_init__(self):
        pi = check_projector(self.pi).copy()
        pi.setflags(write=False)
        object.__setattr__(self, "pi", pi)
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.gamma_kind not in ("supplied", "estimated"):
            raise ValueError("gamma_kind must be 'supplied' or 'estimated'")

    def operator(self) -> np.ndarray:
        return self.pi - self.gamma * np.eye(self.pi.shape[0])


def witness_from_basis(
    basis: ProductBasis,
    gamma: float | None = None,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = DEFAULT_SEED,
) -> Witness:
    pi = basis.projector()
    if gamma is None:
        return Witness(pi, estimate_gamma(pi, basis.dims, restarts, seed), "estimated", basis.dims)
    return Witness(pi, float(gamma), "supplied", basis.dims)


def witness_value(w: Witness, rho: DensityMatrix) -> float:
    """Tr[(pi - gamma I) rho]."""
    if w.pi.shape != rho.mat.shape:
        raise ValueError("witness and state dimensions differ")
    return float(np.sum(w.pi * rho.mat) - w.gamma)


class Detector(NamedTuple):
    label: str
    evaluate: Callable[[np.ndarray, tuple[int, int]], np.ndarray]


def make_detector(name: str, witness: Witness | None = None) -> Detector:
    """``choi-u``, ``witness`` (needs ``witness``) or ``pt-mineig``."""
    key = name.replace("_", "-")
    if key == "choi-u":
        return Detector("choi-u", choi_u_values)
    if key == "pt-mineig":
        return Detector("pt-mineig", lambda mats, dims: np.asarray(min_eig(partial_transpose(mats, dims))))
    if key == "witness":
        if witness is None:
            raise ValueError("the witness detector needs a Witness")
        return Detector(
            f"witness(gamma={witness.gamma:.17g},{witness.gamma_kind})",
            lambda mats, dims: np.einsum("ij,...ij->...", witness.pi, mats) - witness.gamma,
        )
    raise ValueError(f"unknown detector {name!r}")


@dataclass(frozen=True, eq=False)
class SweepResult:
    family_label: str
    detector_label: str
    lambdas: np.ndarray
    values: np.ndarray
    threshold: float | None
    sign_changes: int
    tol: float = DETECT_TOL

    @property
    def multiple_sign_changes(self) -> bool:
        return self.sign_changes > 1

    def summary(self) -> str:
        t = "none" if self.threshold is None else format(self.threshold, ".17g")
        return f"threshold={t}"


def sweep(family: Family, grid, detector: Detector, tol: float = DETECT_TOL) -> SweepResult:
    """Evaluate ``detector`` on ``family(λ)`` over ``grid``.

    A value below ``-tol`` counts as negative. With exactly one sign change
    the crossing is refined by bisection; otherwise no threshold is given.
    """
    lams = np.asarray(grid, dtype=float).ravel()
    if lams.size == 0:
        raise ValueError("empty grid")
    if np.any(np.diff(lams) <= 0):
        raise ValueError("grid must be strictly increasing")
    if lams[0] < 0 or lams[-1] > 1:
        raise ValueError("grid must lie in [0, 1]")
    values = np.asarray(detector.evaluate(family.stack(lams), family.dims), dtype=float).reshape(lams.shape)

    def negative(v):
        return v < -tol

    neg = negative(values)
    flips = np.flatnonzero(neg[1:] != neg[:-1])
    threshold = None
    if flips.size == 1:
        lo, hi = lams[flips[0]], lams[flips[0] + 1]
        lo_neg = bool(neg[flips[0]])
        for _ in range(BISECT_ITERS):
            if hi - lo < BISECT_WIDTH:
                break
            mid = 0.5 * (lo + hi)
            v = float(detector.evaluate(family.stack([mid]), family.dims)[0])
            if negative(v) == lo_neg:
                lo = mid
            else:
                hi = mid
        threshold = 0.5 * (lo + hi)
    return SweepResult(family.label, detector.label, lams, values, threshold, int(flips.size), tol)


@dataclass
class CertificationReport:
    ppt: bool
    pt_min_eig: float
    choi_u: float | None
    witness: float | None
    gamma: float | None
    gamma_kind: str | None
    verdict: str
    tol: float = DETECT_TOL
    seed: int | None = None
    restarts: int | None = None
    label: str = ""
    version: str = field(default=__version__)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "ppt": self.ppt,
            "pt_min_eig": self.pt_min_eig,
            "choi_u": self.choi_u if self.choi_u is not None else "n/a",
            "witness": self.witness if self.witness is not None else "n/a",
            "gamma": self.gamma,
            "gamma_kind": self.gamma_kind,
            "verdict": self.verdict,
            "tol": self.tol,
            "seed": self.seed,
            "restarts": self.restarts,
            "version": self.version,
        }


def certify_state(
    rho: DensityMatrix,
    witness: Witness | None = None,
    tol: float = DETECT_TOL,
    seed: int | None = None,
    restarts: int | None = None,
) -> CertificationReport:
    """Combine the PPT test, the Choi detector (when party B is a qutrit) and an optional witness.

    "entangled-PPT" needs a PPT state with a negative Choi value or a
    negative witness value whose offset was supplied, not estimated.
    """
    pt = float(min_eig(partial_transpose(rho)))
    ppt = pt >= -tol
    cu = float(choi_u_values(rho.mat, rho.dims)) if rho.dims[1] == 3 else None
    wv = witness_value(witness, rho) if witness is not None else None
    if not ppt:
        verdict = "NPT"
    elif (cu is not None and cu < -tol) or (
        wv is not None and wv < -tol and witness.gamma_kind == "supplied"
    ):
        verdict = "entangled-PPT"
    else:
        verdict = "separable-undetected"
    return CertificationReport(
        ppt=ppt,
        pt_min_eig=pt,
        choi_u=cu,
        witness=wv,
        gamma=None if witness is None else witness.gamma,
        gamma_kind=None if witness is None else witness.gamma_kind,
        verdict=verdict,
        tol=tol,
        seed=seed,
        restarts=restarts,
        label=rho.label,
    )
