"""
Normal matrices a = sum_i lambda_i p_i and their eigenprojection families.

The unitary orbit of a and the orbit of the pinching defined by its
eigenprojections share the isotropy group. The two orbits are linked by
p_i (u a - a u) p_j = (lambda_j - lambda_i) p_i u p_j, with lambda_0 = 0 on
the kernel.
"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
import scipy.linalg

from src.errors import DimensionMismatch, NotNormal
from src.linalg.core import UnitaryMatrix, as_matrix, dagger, max_abs, op_norm
from src.norms.symmetric import SymmetricNorm, ideal_norm
from src.orbit.isotropy import in_isotropy_G
from src.pinching.family import ProjectionFamily, family_from_blocks

logger = logging.getLogger(__name__)

TOL_NORMAL = 1e-10
TOL_CLUSTER = 1e-8


@dataclass(frozen=True, eq=False)
class NormalOperatorSpec:
    """Distinct nonzero eigenvalues, their eigenprojections, and the kernel rank."""

    eigenvalues: tuple[complex, ...]
    fam: ProjectionFamily

    def __post_init__(self):
        lam = tuple(complex(x) for x in self.eigenvalues)
        if len(lam) != self.fam.w:
            raise DimensionMismatch(f"{len(lam)} eigenvalues for {self.fam.w} blocks")
        if any(x == 0 for x in lam):
            raise ValueError("eigenvalues must be nonzero; the kernel is block 0")
        if len(set(lam)) != len(lam):
            raise ValueError(f"eigenvalues must be distinct: {lam}")
        object.__setattr__(self, "eigenvalues", lam)
        a = self.matrix
        residual = max_abs(a @ dagger(a) - dagger(a) @ a)
        if residual > 1e-12 * max(1.0, op_norm(a) ** 2):
            raise NotNormal(f"reconstruction is not normal: residual {residual:.3e}")

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return self.fam.ranks[1:]

    @property
    def kernel_rank(self) -> int:
        return self.fam.p0_rank

    @property
    def dim(self) -> int:
        return self.fam.dim

    def eigenvalue(self, i: int) -> complex:
        """lambda_i, with lambda_0 = 0."""
        return 0j if i == 0 else self.eigenvalues[i - 1]

    @property
    def matrix(self) -> np.ndarray:
        return sum(lam * self.fam.projection(i) for i, lam in enumerate(self.eigenvalues, start=1))

    def min_gap(self) -> float:
        """Smallest |lambda_i - lambda_j| over distinct blocks, lambda_0 included when p0 != 0."""
        blocks = [i for i in range(self.fam.w + 1) if self.fam.ranks[i]]
        gaps = [abs(self.eigenvalue(i) - self.eigenvalue(j)) for i in blocks for j in blocks if i < j]
        return min(gaps, default=np.inf)


def normal_from_spec(eigenvalues, multiplicities=None, kernel_rank: int = 0, basis=None) -> NormalOperatorSpec:
    """
    Build a = sum lambda_i p_i on consecutive coordinate blocks.

    Args:
        eigenvalues: Distinct nonzero lambda_1..lambda_w
        multiplicities: Ranks of p_1..p_w (default all 1)
        kernel_rank: Rank of p0 = ker(a)
        basis: Optional unitary replacing the standard basis
    """
    eigenvalues = list(eigenvalues)
    sizes = [1] * len(eigenvalues) if multiplicities is None else [int(m) for m in multiplicities]
    if len(sizes) != len(eigenvalues):
        raise DimensionMismatch("one multiplicity per eigenvalue")
    if any(m < 1 for m in sizes) or kernel_rank < 0:
        raise ValueError("multiplicities must be positive and the kernel rank nonnegative")
    fam = family_from_blocks(sum(sizes) + kernel_rank, sizes, basis)
    return NormalOperatorSpec(eigenvalues=tuple(eigenvalues), fam=fam)


def spectral_family(a, tol_cluster: float = TOL_CLUSTER) -> NormalOperatorSpec:
    """
    Eigenprojections of a normal matrix.

    Eigenvalues within tol_cluster (relative to |a|_op) merge into one block;
    those within tol_cluster of 0 form the kernel block p0. Blocks are ordered
    by decreasing modulus, then by argument.

    Raises:
        NotNormal: |a a* - a* a|_max > 1e-10 (scaled by |a|^2)
    """
    a = as_matrix(a, square=True)
    scale = max(1.0, op_norm(a))
    residual = max_abs(a @ dagger(a) - dagger(a) @ a)
    if residual > TOL_NORMAL * scale**2:
        raise NotNormal(f"|a a* - a* a|_max = {residual:.3e}")

    t, z = scipy.linalg.schur(a, output="complex")
    lam = np.diag(t)
    clusters: list[list[int]] = []
    centers: list[complex] = []
    for idx, value in enumerate(lam):
        if abs(value) <= tol_cluster * scale:
            continue
        for c, center in enumerate(centers):
            if abs(value - center) <= tol_cluster * scale:
                clusters[c].append(idx)
                break
        else:
            clusters.append([idx])
            centers.append(value)

    means = [complex(np.mean(lam[c])) for c in clusters]
    order = sorted(range(len(clusters)), key=lambda c: (-abs(means[c]), np.angle(means[c])))
    frames = tuple(z[:, clusters[c]] for c in order)
    fam = ProjectionFamily(dim=a.shape[0], frames=frames)
    spec = NormalOperatorSpec(eigenvalues=tuple(means[c] for c in order), fam=fam)
    logger.debug("spectral_family: %d clusters, kernel rank %d", fam.w, fam.p0_rank)
    return spec


@dataclass(frozen=True, eq=False)
class GapReport:
    """One row per ordered pair (i, j), i != j."""

    rows: pd.DataFrame
    commutator: float

    @property
    def holds(self) -> bool:
        return bool((self.rows["lhs"] <= self.rows["rhs"] + 1e-10).all())

    @property
    def max_identity_residual(self) -> float:
        return float(self.rows["identity_residual"].max()) if len(self.rows) else 0.0

    @property
    def max_ratio(self) -> float:
        valid = self.rows[self.rows["rhs"] > 0]
        return float((valid["lhs"] / valid["rhs"]).max()) if len(valid) else 0.0


def gap_inequality_check(spec: NormalOperatorSpec, u: UnitaryMatrix, norm: SymmetricNorm) -> GapReport:
    """
    Check |p_i u p_j|_Phi <= |lambda_i - lambda_j|^{-1} |u a - a u|_Phi for all i != j.

    Args:
        spec: Normal operator with its eigenprojections
        u: Unitary
        norm: Norming function

    Returns:
        GapReport; rows also carry the residual of the underlying identity
    """
    u = np.asarray(u)
    if u.shape != (spec.dim, spec.dim):
        raise DimensionMismatch(f"unitary shape {u.shape} for dimension {spec.dim}")
    a = spec.matrix
    comm = u @ a - a @ u
    comm_norm = ideal_norm(norm, comm)
    fam = spec.fam
    blocks = [i for i in range(fam.w + 1) if fam.ranks[i]]

    rows = []
    for i in blocks:
        pi = fam.projection(i)
        for j in blocks:
            if i == j:
                continue
            pj = fam.projection(j)
            gap = spec.eigenvalue(j) - spec.eigenvalue(i)
            corner = pi @ u @ pj
            rows.append({
                "i": i,
                "j": j,
                "gap": abs(gap),
                "lhs": ideal_norm(norm, corner),
                "rhs": comm_norm / abs(gap),
                "identity_residual": max_abs(pi @ comm @ pj - gap * corner),
            })
    columns = ["i", "j", "gap", "lhs", "rhs", "identity_residual"]
    return GapReport(rows=pd.DataFrame(rows, columns=columns), commutator=comm_norm)


def isotropy_coincidence(spec: NormalOperatorSpec, u: UnitaryMatrix, tol: float = 1e-9) -> tuple[bool, bool]:
    """
    (u commutes with a, u is block diagonal) with matched tolerances.

    |u a - a u| <= tol forces every off-diagonal corner below tol / gap.
    """
    commutes = op_norm(np.asarray(u) @ spec.matrix - spec.matrix @ np.asarray(u)) <= tol
    blocks = spec.fam.w + 1
    block_tol = tol * blocks**2 / spec.min_gap()
    return commutes, in_isotropy_G(spec.fam, u, tol=block_tol)


def orbit_element_form(spec: NormalOperatorSpec, u: UnitaryMatrix, norm: SymmetricNorm) -> tuple[float, float]:
    """
    (|u a u* - a|_Phi, 2 |a|_op |u - 1|_Phi).

    u a u* - a = a (u* - 1) + (u - 1) a u*, so the first never exceeds the second.
    """
    u = np.asarray(u)
    a = spec.matrix
    lhs = ideal_norm(norm, u @ a @ dagger(u) - a)
    bound = 2.0 * op_norm(a) * ideal_norm(norm, u - np.eye(spec.dim))
    return lhs, bound
