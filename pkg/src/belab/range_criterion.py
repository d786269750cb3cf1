"""Range-criterion analysis for real, partial-transpose invariant states.

For such states it is enough to exhibit real product vectors spanning the
range. Failure to find them is reported as evidence only: the product
search is a multistart heuristic, not an exhaustive enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx
import numpy as np

from . import __version__
from .catalog import DensityMatrix, ProductBasis, ProductVector, edge_state
from .linalg import RANK_TOL, eig_sym, orthonormal_basis
from .maps import choi_u_detect, partial_transpose
from .seesaw import seesaw

__all__ = [
    "RangeReport",
    "ProductSearchResult",
    "UcpbEvidence",
    "range_projector",
    "check_range_criterion",
    "product_search",
    "verify_completion",
    "ucpb_evidence",
]

IN_RANGE_TOL = 1e-8
PT_INVARIANCE_TOL = 1e-10
FOUND_OVERLAP = 1 - 1e-8
FOUND_RESIDUAL = 1e-6
DEDUP_OVERLAP = 1 - 1e-6
COMPLETION_TOL = 1e-10

SATISFIED = "satisfied-by-candidates"
INSUFFICIENT = "candidates-insufficient"
DEFICIT = "product-deficit-evidence"


def range_projector(rho: DensityMatrix, tol: float = RANK_TOL) -> np.ndarray:
    """Projector onto the eigenvectors of ``rho`` with eigenvalue above ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    w, v = eig_sym(rho.mat)
    q = v[:, w > tol]
    p = q @ q.T
    return 0.5 * (p + p.T)


def _span_rank(vectors: Sequence[np.ndarray]) -> int:
    if not vectors:
        return 0
    return orthonormal_basis(vectors).shape[1]


@dataclass
class RangeReport:
    state_rank: int
    candidates_in_range: int
    span_rank_of_candidates: int
    verdict: str
    candidates_total: int = 0
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "state_rank": self.state_rank,
            "candidates_total": self.candidates_total,
            "candidates_in_range": self.candidates_in_range,
            "span_rank_of_candidates": self.span_rank_of_candidates,
            "verdict": self.verdict,
            "version": __version__,
        }


def check_range_criterion(
    rho: DensityMatrix,
    candidates: Sequence[ProductVector],
    from_search: bool = False,
) -> RangeReport:
    """Check whether real product ``candidates`` span the range of ``rho``.

    Candidates count as in range when ``||(I - P)x|| <= 1e-8``. The verdict
    is ``satisfied-by-candidates`` when all of them are in range and they
    span it. Otherwise it is ``product-deficit-evidence`` when the list came
    from :func:`product_search` on the range and some but too few product
    vectors were found, and ``candidates-insufficient`` in every other case.

    Raises ``ValueError`` for states that are not partial-transpose
    invariant: those need the two-sided criterion with partially conjugated
    vectors, which is not implemented.
    """
    if np.max(np.abs(partial_transpose(rho) - rho.mat)) > PT_INVARIANCE_TOL:
        raise ValueError(
            "state is not invariant under partial transpose; the one-sided real check does "
            "not apply, use the general two-sided range criterion instead"
        )
    p = range_projector(rho)
    r = int(round(np.trace(p)))
    inside = []
    for c in candidates:
        if c.dims != rho.dims:
            raise ValueError("candidate dimensions differ from the state")
        x = c.vector
        if np.linalg.norm(x - p @ x) <= IN_RANGE_TOL:
            inside.append(x)
    span = _span_rank(inside)
    if inside and len(inside) == len(candidates) and span == r:
        verdict = SATISFIED
    elif from_search and inside and span < r:
        verdict = DEFICIT
    else:
        verdict = INSUFFICIENT
    return RangeReport(r, len(inside), span, verdict, len(candidates), rho.label)


@dataclass(frozen=True, eq=False)
class ProductSearchResult:
    found: list[tuple[ProductVector, float]]
    best_overlap: float
    best_vector: ProductVector
    restarts: int
    seed: int

    @property
    def vectors(self) -> list[ProductVector]:
        return [v for v, _ in self.found]

    def to_dict(self) -> dict:
        return {
            "found_count": len(self.found),
            "found": [
                {"alpha": v.alpha.tolist(), "beta": v.beta.tolist(), "overlap": o} for v, o in self.found
            ],
            "best_overlap": self.best_overlap,
            "restarts": self.restarts,
            "seed": self.seed,
        }


def _sort_key(v: ProductVector):
    return tuple(np.round(np.concatenate([v.alpha, v.beta]), 9))


def product_search(
    p,
    dims: tuple[int, int],
    restarts: int = 200,
    seed: int = 42,
) -> ProductSearchResult:
    """Look for product vectors inside the range of the projector ``p``.

    Maximizes <a⊗b|p|a⊗b> by seesaw from ``restarts`` seeded starts and keeps
    the distinct maxima with overlap above 1 - 1e-8 (and residual at most
    1e-6), identified up to sign.
    """
    p = np.asarray(p, dtype=float)
    if np.max(np.abs(p @ p - p), initial=0.0) > 1e-10 or np.max(np.abs(p - p.T), initial=0.0) > 1e-10:
        raise ValueError("p must be a symmetric idempotent matrix")
    res = seesaw(p, dims, restarts=restarts, seed=seed, maximize=True)
    hits: list[ProductVector] = []
    for k in np.argsort(-res.values, kind="stable"):
        v = ProductVector(res.alphas[k], res.betas[k]).canonical()
        x = v.vector
        ov = float(x @ p @ x)
        if ov <= FOUND_OVERLAP or np.linalg.norm(x - p @ x) > FOUND_RESIDUAL:
            continue
        if any(abs(v.overlap(h)) > DEDUP_OVERLAP for h in hits):
            continue
        hits.append(v)
    hits.sort(key=_sort_key)
    found = [(v, float(v.vector @ p @ v.vector)) for v in hits]
    b = res.best_index
    best = ProductVector(res.alphas[b], res.betas[b]).canonical()
    return ProductSearchResult(found, res.value, best, restarts, int(seed))


def verify_completion(basis: ProductBasis | Sequence[ProductVector], completion: Sequence[ProductVector]) -> bool:
    """True iff basis plus completion are pairwise orthogonal and fill the space."""
    vecs = list(basis) + list(completion)
    if not vecs:
        return False
    dims = vecs[0].dims
    if any(v.dims != dims for v in vecs):
        return False
    if len(vecs) != dims[0] * dims[1]:
        return False
    m = np.array([v.vector for v in vecs])
    return bool(np.max(np.abs(m @ m.T - np.eye(len(vecs)))) <= COMPLETION_TOL)


def _largest_orthogonal_set(vectors: Sequence[ProductVector]) -> list[ProductVector]:
    g = nx.Graph()
    g.add_nodes_from(range(len(vectors)))
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            if abs(vectors[i].overlap(vectors[j])) <= COMPLETION_TOL:
                g.add_edge(i, j)
    if not vectors:
        return []
    cliques = sorted((sorted(c) for c in nx.find_cliques(g)), key=lambda c: (-len(c), c))
    return [vectors[i] for i in cliques[0]]


@dataclass
class UcpbEvidence:
    label: str
    complement_dim: int
    complement_state: DensityMatrix
    choi_u: float | None
    best_overlap: float
    found_count: int
    orthogonal_found: list[ProductVector]
    completable: bool
    restarts: int
    seed: int
    tol: float = 1e-10
    version: str = field(default=__version__)

    @property
    def orthogonal_count(self) -> int:
        return len(self.orthogonal_found)

    @property
    def deficit(self) -> bool:
        """Fewer orthogonal product vectors found than the complement dimension."""
        return self.orthogonal_count < self.complement_dim

    @property
    def entangled(self) -> bool:
        return self.choi_u is not None and self.choi_u < -self.tol

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "complement_dim": self.complement_dim,
            "choi_u": self.choi_u if self.choi_u is not None else "n/a",
            "entangled_by_choi_u": self.entangled,
            "best_overlap": self.best_overlap,
            "found_count": self.found_count,
            "orthogonal_found_count": self.orthogonal_count,
            "found_below_dimension": self.deficit,
            "completable": self.completable,
            "restarts": self.restarts,
            "seed": self.seed,
            "version": self.version,
        }


def ucpb_evidence(basis_subset: ProductBasis, restarts: int = 200, seed: int = 42) -> UcpbEvidence:
    """Evidence on whether an orthogonal product set is completable.

    Builds the normalized complement projector, runs the Choi detector on
    it when party B is a qutrit (a negative value means the complement is
    entangled, so the set cannot be completed), searches the complement for
    product vectors and tries to complete the set with the largest mutually
    orthogonal group among them.
    """
    rho = edge_state(basis_subset)
    D = basis_subset.total_dim
    k = D - len(basis_subset)
    p = np.eye(D) - basis_subset.projector()
    cu = choi_u_detect(rho) if basis_subset.dims[1] == 3 else None
    search = product_search(p, basis_subset.dims, restarts, seed)
    ortho = _largest_orthogonal_set(search.vectors)
    return UcpbEvidence(
        label=basis_subset.label,
        complement_dim=k,
        complement_state=rho,
        choi_u=cu,
        best_overlap=search.best_overlap,
        found_count=len(search.found),
        orthogonal_found=ortho,
        completable=verify_completion(basis_subset, ortho),
        restarts=restarts,
        seed=int(seed),
    )
