"""Product bases and the density-matrix families built from them.

Kets are written the usual way, 1-based, e.g. ``"1-2"`` is |1> - |2>;
internally party indices are 0-based. Every basis and state here is real.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import kron, min_eig, projector_onto_span

__all__ = [
    "ProductVector",
    "ProductBasis",
    "DensityMatrix",
    "Family",
    "ket",
    "product",
    "tiles_upb",
    "tiles_completion",
    "gentiles2_4x3_upb",
    "tiles_plus_partners",
    "extended_tiles_4x3_upb",
    "edge_state",
    "complement_state",
    "mix",
    "maximally_mixed",
    "pure_state",
    "embed_party_a",
    "sigma2_family",
    "sigma2_pair",
    "sigma1_family",
    "rho1_family",
    "rho2_family",
    "rho3_family",
    "rho_families",
    "family_from_selector",
    "sigma3_family",
    "sigma4_family",
    "ucpb_complement",
]

ORTHO_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


def ket(d: int, expr: str | int) -> np.ndarray:
    """Unnormalized real ket from a 1-based expression like ``"1+2-3"``."""
    text = str(expr).replace(" ", "")
    if not re.fullmatch(r"[+-]?\d+([+-]\d+)*", text):
        raise ValueError(f"malformed ket expression {expr!r}")
    out = np.zeros(d)
    for sign, num in re.findall(r"([+-]?)(\d+)", text):
        k = int(num)
        if not 1 <= k <= d:
            raise ValueError(f"ket index {k} outside 1..{d}")
        out[k - 1] += -1.0 if sign == "-" else 1.0
    return out


@dataclass(frozen=True, eq=False)
class ProductVector:
    """A bipartite product vector stored as its two unit-norm factors."""

    alpha: np.ndarray
    beta: np.ndarray
    label: str = ""

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=float).ravel()
        b = np.asarray(self.beta, dtype=float).ravel()
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        if na == 0.0 or nb == 0.0:
            raise ValueError("product vector factors must be nonzero")
        a = a / na
        b = b / nb
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.alpha.size, self.beta.size)

    @property
    def factors(self) -> tuple[np.ndarray, np.ndarray]:
        return (self.alpha, self.beta)

    @property
    def vector(self) -> np.ndarray:
        return kron(self.alpha, self.beta)

    def projector(self) -> np.ndarray:
        x = self.vector
        return np.outer(x, x)

    def overlap(self, other: "ProductVector") -> float:
        return float((self.alpha @ other.alpha) * (self.beta @ other.beta))

    def canonical(self) -> "ProductVector":
        """Same ray with each factor's largest-magnitude entry made positive."""
        a, b = self.alpha, self.beta
        if a[np.argmax(np.abs(a))] < 0:
            a = -a
        if b[np.argmax(np.abs(b))] < 0:
            b = -b
        # + 0.0 turns -0.0 into 0.0 so canonical forms print identically
        return ProductVector(a + 0.0, b + 0.0, self.label)

    def embedded(self, dims: tuple[int, int]) -> "ProductVector":
        """Zero-pad both factors into larger local dimensions."""
        a = np.zeros(dims[0])
        b = np.zeros(dims[1])
        a[: self.alpha.size] = self.alpha
        b[: self.beta.size] = self.beta
        return ProductVector(a, b, self.label)

    def __repr__(self):
        name = self.label or "ProductVector"
        return f"{name}({np.round(self.alpha, 6).tolist()} ⊗ {np.round(self.beta, 6).tolist()})"


def product(dims: tuple[int, int], a: str | int, b: str | int, label: str = "") -> ProductVector:
    """Normalized |a>|b> from ket expressions, e.g. ``product((3, 3), 1, "1-2")``."""
    return ProductVector(ket(dims[0], a), ket(dims[1], b), label)


@dataclass(frozen=True, eq=False)
class ProductBasis:
    """Ordered, mutually orthogonal product vectors.

    ``stopper_index`` is 0-based and marks the uniform-superposition member
    whose removal leaves a completable set; it must be declared, it is not
    detected.
    """

    vectors: tuple[ProductVector, ...]
    dims: tuple[int, int]
    stopper_index: int | None = None
    label: str = ""

    def __post_init__(self):
        vecs = tuple(self.vectors)
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "dims", dims)
        if not vecs:
            raise ValueError("empty product basis")
        if any(v.dims != dims for v in vecs):
            raise ValueError("all vectors must have the basis dimensions")
        if len(vecs) > dims[0] * dims[1]:
            raise ValueError("more vectors than the total dimension")
        gram = self.gram()
        off = np.abs(gram - np.eye(len(vecs)))
        if off.max() > ORTHO_TOL:
            raise ValueError(f"basis vectors not orthogonal (max overlap {off.max():.3g})")
        if self.stopper_index is not None and not 0 <= self.stopper_index < len(vecs):
            raise ValueError("stopper_index out of range")

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]

    @property
    def total_dim(self) -> int:
        return self.dims[0] * self.dims[1]

    def matrix(self) -> np.ndarray:
        """Vectors as rows."""
        return np.array([v.vector for v in self.vectors])

    def gram(self) -> np.ndarray:
        m = self.matrix()
        return m @ m.T

    def projector(self) -> np.ndarray:
        """Projector onto the span (a sum of rank-one terms, they are orthonormal)."""
        m = self.matrix()
        p = m.T @ m
        return 0.5 * (p + p.T)

    def subset(self, indices: Sequence[int], label: str | None = None) -> "ProductBasis":
        idx = list(indices)
        stopper = idx.index(self.stopper_index) if self.stopper_index in idx else None
        return ProductBasis(
            tuple(self.vectors[i] for i in idx),
            self.dims,
            stopper,
            self.label if label is None else label,
        )

    def without(self, *indices: int) -> "ProductBasis":
        drop = set(indices)
        keep = [i for i in range(len(self)) if i not in drop]
        tag = ",".join(str(i + 1) for i in sorted(drop))
        return self.subset(keep, f"{self.label} minus {tag}")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Real symmetric unit-trace PSD matrix on a d1 x d2 system."""

    mat: np.ndarray
    dims: tuple[int, int]
    label: str = ""
    family: str = ""
    lam: float | None = None

    def __post_init__(self):
        m = np.array(self.mat, dtype=float)
        dims = tuple(int(d) for d in self.dims)
        D = dims[0] * dims[1]
        if m.shape != (D, D):
            raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
        asym = np.max(np.abs(m - m.T))
        if asym > 1e-10:
            raise ValueError(f"density matrix not symmetric (max asymmetry {asym:.3g})")
        m = 0.5 * (m + m.T)
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr!r} differs from 1")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def checked(cls, mat, dims, **kwargs) -> "DensityMatrix":
        """Construct and also verify positivity (one eigendecomposition)."""
        rho = cls(mat, dims, **kwargs)
        lo = min_eig(rho.mat)
        if lo < -PSD_TOL:
            raise ValueError(f"matrix not positive semidefinite (min eigenvalue {lo:.3g})")
        return rho

    @property
    def total_dim(self) -> int:
        return self.dims[0] * self.dims[1]

    def relabel(self, label: str | None = None, family: str | None = None, lam=None) -> "DensityMatrix":
        return DensityMatrix(
            self.mat,
            self.dims,
            self.label if label is None else label,
            self.family if family is None else family,
            self.lam if lam is None else lam,
        )


def maximally_mixed(dims: tuple[int, int]) -> DensityMatrix:
    D = dims[0] * dims[1]
    return DensityMatrix(np.eye(D) / D, dims, label="maximally mixed", family="identity")


def pure_state(v: ProductVector | np.ndarray, dims: tuple[int, int] | None = None, label: str = "") -> DensityMatrix:
    if isinstance(v, ProductVector):
        dims = v.dims
        label = label or v.label
        x = v.vector
    else:
        x = np.asarray(v, dtype=float).ravel()
        x = x / np.linalg.norm(x)
        if dims is None:
            raise ValueError("dims required for a plain vector")
    return DensityMatrix(np.outer(x, x), dims, label=label, family="pure")


def edge_state(basis: ProductBasis) -> DensityMatrix:
    """Normalized projector onto the orthogonal complement of ``basis``."""
    D = basis.total_dim
    n = len(basis)
    if n >= D:
        raise ValueError("basis spans the whole space, no complement")
    mat = (np.eye(D) - basis.projector()) / (D - n)
    return DensityMatrix(mat, basis.dims, label=f"edge({basis.label})", family="edge")


def complement_state(basis: ProductBasis, missing: Sequence[int] = ()) -> DensityMatrix:
    """Normalized complement projector of ``basis`` with the ``missing`` (0-based) members removed."""
    sub = basis.without(*missing) if missing else basis
    rho = edge_state(sub)
    return rho.relabel(label=f"complement({sub.label})", family="complement")


def mix(a: DensityMatrix, b: DensityMatrix, lam: float) -> DensityMatrix:
    """``lam * a + (1 - lam) * b``."""
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch {a.dims} vs {b.dims}")
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    if lam == 0.0:
        mat = b.mat
    elif lam == 1.0:
        mat = a.mat
    else:
        mat = lam * a.mat + (1.0 - lam) * b.mat
    return DensityMatrix(mat, a.dims, lam=lam)


@dataclass(frozen=True, eq=False)
class Family:
    """One-parameter family ``lam * noise + (1 - lam) * edge``.

    Keeps the two endpoints so sweeps do not rebuild the edge state per
    grid point. ``upb`` is the product basis whose span projector gives the
    natural witness for this family, when there is one.
    """

    label: str
    edge: DensityMatrix
    noise: DensityMatrix
    upb: ProductBasis | None = None

    def __post_init__(self):
        if self.edge.dims != self.noise.dims:
            raise ValueError("edge and noise dimensions differ")

    @property
    def dims(self) -> tuple[int, int]:
        return self.edge.dims

    def __call__(self, lam: float) -> DensityMatrix:
        rho = mix(self.noise, self.edge, lam)
        return rho.relabel(label=f"{self.label}({lam:g})", family=self.label, lam=float(lam))

    def stack(self, lams) -> np.ndarray:
        """Matrices for many λ at once, shape (len(lams), D, D)."""
        lams = np.asarray(lams, dtype=float)[:, None, None]
        return lams * self.noise.mat + (1.0 - lams) * self.edge.mat


def tiles_upb() -> ProductBasis:
    """The five-state Tiles UPB in 3x3; the last state is the stopper."""
    d = (3, 3)
    vecs = (
        product(d, 1, "1-2", "psi1"),
        product(d, "1-2", 3, "psi2"),
        product(d, 3, "2-3", "psi3"),
        product(d, "2-3", 1, "psi4"),
        product(d, "1+2+3", "1+2+3", "psi5"),
    )
    return ProductBasis(vecs, d, stopper_index=4, label="tiles")


def tiles_completion() -> list[ProductVector]:
    """Five product states completing Tiles-without-stopper to a full 3x3 basis."""
    d = (3, 3)
    return [
        product(d, 1, "1+2", "c1"),
        product(d, "1+2", 3, "c2"),
        product(d, 3, "2+3", "c3"),
        product(d, "2+3", 1, "c4"),
        product(d, 2, 2, "c5"),
    ]


def gentiles2_4x3_upb() -> ProductBasis:
    """The seven-state real GenTiles2 UPB in 4x3; the last state is the stopper."""
    d = (4, 3)
    vecs = (
        product(d, 1, "1-2", "phi1"),
        product(d, 2, "2-3", "phi2"),
        product(d, 3, "3-1", "phi3"),
        product(d, "2-4", 1, "phi4"),
        product(d, "3-4", 2, "phi5"),
        product(d, "1-4", 3, "phi6"),
        product(d, "1+2+3+4", "1+2+3", "phi7"),
    )
    return ProductBasis(vecs, d, stopper_index=6, label="gentiles2")


def tiles_plus_partners() -> list[ProductVector]:
    """The six "plus" partners of the GenTiles2 states; they span the σ1 range."""
    d = (4, 3)
    return [
        product(d, 1, "1+2", "phi1'"),
        product(d, 2, "2+3", "phi2'"),
        product(d, 3, "3+1", "phi3'"),
        product(d, "2+4", 1, "phi4'"),
        product(d, "3+4", 2, "phi5'"),
        product(d, "1+4", 3, "phi6'"),
    ]


def extended_tiles_4x3_upb() -> ProductBasis:
    """Tiles embedded in 4x3 plus |41>, |42>, |43>."""
    d = (4, 3)
    vecs = tuple(v.embedded(d) for v in tiles_upb())
    vecs += tuple(product(d, 4, b, f"4{b}") for b in (1, 2, 3))
    return ProductBasis(vecs, d, stopper_index=4, label="extended-tiles")


def embed_party_a(rho: DensityMatrix, d1: int) -> DensityMatrix:
    """Pad party A with zero rows/columns up to dimension ``d1``."""
    a, b = rho.dims
    if d1 < a:
        raise ValueError("cannot embed into a smaller dimension")
    t = np.zeros((d1, b, d1, b))
    t[:a, :, :a, :] = rho.mat.reshape(a, b, a, b)
    return DensityMatrix(t.reshape(d1 * b, d1 * b), (d1, b), label=rho.label, family=rho.family)


def sigma2_pair(upb: ProductBasis, subset_indices: Sequence[int]) -> Family:
    """Edge state of ``upb`` mixed with the normalized projector onto a subset.

    The subset (0-based) must contain the stopper.
    """
    idx = sorted(set(int(i) for i in subset_indices))
    if not idx:
        raise ValueError("subset must be nonempty")
    if upb.stopper_index is None:
        raise ValueError("basis declares no stopper")
    if upb.stopper_index not in idx:
        raise ValueError("subset must contain the stopper")
    if idx[0] < 0 or idx[-1] >= len(upb):
        raise ValueError("subset index out of range")
    p = projector_onto_span([upb[i].vector for i in idx]) / len(idx)
    tag = ",".join(str(i + 1) for i in idx)
    noise = DensityMatrix(p, upb.dims, label=f"P[{tag}]", family="subset-projector")
    return Family(f"sigma2[{upb.label}:{tag}]", edge_state(upb), noise, upb)


def sigma2_family(upb: ProductBasis, subset_indices: Sequence[int], lam: float) -> DensityMatrix:
    return sigma2_pair(upb, subset_indices)(lam)


def sigma1_family() -> Family:
    """GenTiles2 edge state mixed with its stopper."""
    upb = gentiles2_4x3_upb()
    fam = sigma2_pair(upb, [upb.stopper_index])
    return Family("sigma1", fam.edge, fam.noise, upb)


def rho1_family(i: int = 1) -> Family:
    """Tiles edge state mixed with the Tiles state |psi_i> (1-based)."""
    upb = tiles_upb()
    if not 1 <= i <= len(upb):
        raise ValueError(f"rho1 variant must be 1..{len(upb)}, got {i}")
    return Family(f"rho1:{i}", edge_state(upb), pure_state(upb[i - 1]), upb)


def rho2_family() -> Family:
    upb = tiles_upb()
    return Family("rho2", edge_state(upb), maximally_mixed(upb.dims), upb)


def rho3_family(ab: int | str = 41) -> Family:
    """Tiles edge state (embedded in 4x3) mixed with |ab>, ab in {41, 42, 43}."""
    ab = str(ab)
    if ab not in ("41", "42", "43"):
        raise ValueError(f"rho3 variant must be 41, 42 or 43, got {ab}")
    edge = embed_party_a(edge_state(tiles_upb()), 4)
    noise = pure_state(product((4, 3), int(ab[0]), int(ab[1]), f"|{ab}>"))
    return Family(f"rho3:{ab}", edge, noise, extended_tiles_4x3_upb())


def family_from_selector(selector: str) -> Family:
    """Parse ``rho1:i``, ``rho2``, ``rho3:ab``, ``sigma1`` or ``sigma2:i,j,...`` (1-based)."""
    name, _, arg = selector.partition(":")
    if name == "rho1":
        return rho1_family(int(arg or 1))
    if name == "rho2" and not arg:
        return rho2_family()
    if name == "rho3":
        return rho3_family(arg or "41")
    if name == "sigma1" and not arg:
        return sigma1_family()
    if name == "sigma2":
        upb = gentiles2_4x3_upb()
        idx = [int(x) - 1 for x in arg.split(",") if x.strip()] if arg else [upb.stopper_index]
        return sigma2_pair(upb, idx)
    raise ValueError(f"unknown family selector {selector!r}")


def rho_families(lam: float, variant: str) -> DensityMatrix:
    """One-shot ρ1(λ), ρ2(λ) or ρ3(λ); ``variant`` is ``rho1:i``, ``rho2`` or ``rho3:ab``."""
    if not variant.startswith("rho"):
        raise ValueError(f"unknown rho variant {variant!r}")
    try:
        fam = family_from_selector(variant)
    except ValueError as exc:
        raise ValueError(f"invalid rho variant {variant!r}: {exc}") from None
    return fam(lam)


def sigma3_family(ucpb: ProductBasis, extra: Sequence[ProductVector]) -> Family:
    """Family from a UCPB whose complement projector is separable.

    ``extra`` are product states in the complement that together with the
    UCPB form a UPB. The noise is their uniform mixture and the edge state
    is that of the full UPB.
    """
    if not extra:
        raise ValueError("need at least one complement product state")
    full = ProductBasis(tuple(ucpb) + tuple(extra), ucpb.dims, label=f"{ucpb.label}+extra")
    noise = sum(v.projector() for v in extra) / len(extra)
    delta = DensityMatrix(noise, ucpb.dims, label="delta1", family="separable")
    return Family(f"sigma3[{ucpb.label}]", edge_state(full), delta, full)


def sigma4_family(separable: DensityMatrix, edge: DensityMatrix, upb: ProductBasis | None = None) -> Family:
    """Generic separable-noise-plus-edge family; ρ3 is one instance."""
    return Family("sigma4", edge, separable, upb)


def ucpb_complement(upb: ProductBasis, prefix_count: int) -> tuple[DensityMatrix, tuple[float, float]]:
    """Complement state of the first ``prefix_count`` members and its mixture weights.

    The complement state equals ``w1 * edge_state(upb) + w2 * noise`` with
    noise the uniform mixture of the remaining members; this identity is
    checked to 1e-12.
    """
    n = len(upb)
    D = upb.total_dim
    k = int(prefix_count)
    if not 0 < k < n:
        raise ValueError(f"prefix_count must be in 1..{n - 1}")
    head = upb.subset(range(k), f"{upb.label}[:{k}]")
    rest = [upb[i] for i in range(k, n)]
    rho = edge_state(head).relabel(label=f"complement({head.label})", family="ucpb-complement")
    w1 = (D - n) / (D - k)
    w2 = (n - k) / (D - k)
    noise = sum(v.projector() for v in rest) / len(rest)
    recon = w1 * edge_state(upb).mat + w2 * noise
    err = np.max(np.abs(recon - rho.mat))
    if err > 1e-12:
        raise ArithmeticError(f"complement decomposition mismatch {err:.3g}")
    return rho, (w1, w2)
