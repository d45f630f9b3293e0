"""
Local cross sections of the orbit map u -> L_u P L_{u*}.

The polar section sends Q to the unitary part of s = sum_{i=0}^{w} q_i p_i.
The blockwise section glues the standard sections of each projection
orbit, psi(q) = unitary part of q p + (1 - q)(1 - p). Both satisfy
sigma p_i sigma* = q_i whenever they are defined.
"""
from dataclasses import dataclass

import numpy as np

from src.errors import DimensionMismatch, SingularFactor
from src.linalg.core import UnitaryMatrix, as_matrix, dagger, max_abs, op_norm, polar
from src.norms.symmetric import SymmetricNorm
from src.pinching.estimate import super_norm_estimate
from src.pinching.family import ProjectionFamily
from src.pinching.orbit_point import OrbitPoint, conjugate, point_difference
from src.pinching.superop import matrix_units

# sufficient radius for invertibility of s in the operator-norm ideal
COMPACT_SECTION_RADIUS = 1.0 / 3.0


@dataclass(frozen=True)
class LipschitzConstant:
    """
    Constants of |u p_i u* - p_i|_Phi <= 2 w C |L_u P L_{u*} - P|.

    C is the largest rank among the blocks other than ``distinguished``.
    """

    w: int
    rank_bound: int
    distinguished: int

    @property
    def factor(self) -> float:
        return 2.0 * self.w * self.rank_bound

    @property
    def radius(self) -> float:
        """Advisory trust region 1/(2wC) for the blockwise section."""
        return np.inf if self.factor == 0 else 1.0 / self.factor


def lipschitz_constant(fam: ProjectionFamily, distinguished: int | None = None) -> LipschitzConstant:
    """
    Lipschitz data for the maps Q -> q_i.

    Args:
        fam: Projection family
        distinguished: Block excluded from C; defaults to a block of largest rank,
            which makes C smallest

    Returns:
        LipschitzConstant recording the distinguished block
    """
    ranks = fam.ranks
    if distinguished is None:
        distinguished = max(range(fam.w + 1), key=lambda i: (ranks[i], -i))
    others = [ranks[i] for i in range(fam.w + 1) if i != distinguished]
    return LipschitzConstant(w=fam.w, rank_bound=max(others, default=0), distinguished=distinguished)


def lipschitz_radius(fam: ProjectionFamily) -> tuple[float, int]:
    """Trust radius 1/(2wC) and the distinguished block it was computed with."""
    lip = lipschitz_constant(fam)
    return lip.radius, lip.distinguished


def f_map(fam: ProjectionFamily, i: int, Q: OrbitPoint) -> np.ndarray:
    """q_i = u p_i u*, independent of the witness u."""
    if Q.base.dim != fam.dim or Q.base.w != fam.w:
        raise DimensionMismatch("orbit point belongs to a different family")
    return Q.q(i)


def section_factor(fam: ProjectionFamily, Q: OrbitPoint) -> np.ndarray:
    """s(Q) = sum_{i=0}^{w} q_i p_i."""
    return sum(f_map(fam, i, Q) @ fam.projection(i) for i in range(fam.w + 1))


def cross_section(fam: ProjectionFamily, Q: OrbitPoint) -> UnitaryMatrix:
    """
    sigma(Q) = s |s|^{-1}, a unitary with sigma p_i sigma* = q_i.

    Raises:
        SingularFactor: s(Q) is not invertible
    """
    unitary, _ = polar(section_factor(fam, Q))
    return unitary


def projection_section(p, q) -> UnitaryMatrix:
    """
    Unitary psi with psi p psi* = q for projections of equal rank.

    Raises:
        SingularFactor: |q - p|_op >= 1 (no section through p reaches q)
    """
    p, q = as_matrix(p, square=True), as_matrix(q, square=True)
    one = np.eye(p.shape[0])
    try:
        unitary, _ = polar(q @ p + (one - q) @ (one - p))
    except SingularFactor as exc:
        raise SingularFactor(f"projections too far apart: |q - p| = {op_norm(q - p):.6f}") from exc
    return unitary


def blockwise_cross_section(fam: ProjectionFamily, Q: OrbitPoint) -> UnitaryMatrix:
    """sum_{i=0}^{w} psi_i(q_i) p_i, defined while every |q_i - p_i| < 1."""
    sigma = sum(
        projection_section(fam.projection(i), f_map(fam, i, Q)).matrix @ fam.projection(i)
        for i in range(fam.w + 1)
    )
    return UnitaryMatrix(sigma)


def reconjugation_residual(fam: ProjectionFamily, sigma: UnitaryMatrix, Q: OrbitPoint) -> float:
    """Largest entry of (L_sigma P L_{sigma*} - Q)(E_kl) over all matrix units."""
    moved = conjugate(sigma, OrbitPoint.at_base(fam))
    return max_abs(point_difference(moved, Q).apply(matrix_units(fam.dim)))


def section_residual(fam: ProjectionFamily, sigma: UnitaryMatrix, Q: OrbitPoint) -> float:
    """max_i |sigma p_i sigma* - q_i|_max."""
    s = sigma.matrix
    return max(max_abs(s @ fam.projection(i) @ dagger(s) - f_map(fam, i, Q)) for i in range(fam.w + 1))


# ============================================================
# Displacement estimates
# ============================================================

def s_gap(fam: ProjectionFamily, Q: OrbitPoint) -> float:
    """|s(Q) - 1|_op."""
    return op_norm(section_factor(fam, Q) - np.eye(fam.dim))


def two_point_s_gap(fam: ProjectionFamily, a: OrbitPoint, b: OrbitPoint) -> float:
    """|sum_{i=0}^{w} (a_i - b_i) p_i|_op for two orbit points a, b."""
    total = sum((f_map(fam, i, a) - f_map(fam, i, b)) @ fam.projection(i) for i in range(fam.w + 1))
    return op_norm(total)


def compact_witnesses(fam: ProjectionFamily, Q: OrbitPoint) -> list[np.ndarray]:
    """
    Operator-norm unit witnesses for |Q - P| in the operator-norm ideal.

    With e = 1 - p0, (Q - P)(e) carries the off-diagonal row of u* and, when
    the witness u is known, (Q - P)(u e) carries that of u.
    """
    e = fam.support.astype(np.complex128)
    out = [e]
    if Q.witness is not None:
        out.append(Q.witness.matrix @ e)
    return out


def compact_displacement_lower(fam: ProjectionFamily, Q: OrbitPoint, seed=0) -> float:
    """Certified lower bound on |Q - P| as a map of the operator-norm ideal."""
    diff = point_difference(Q, OrbitPoint.at_base(fam))
    estimate = super_norm_estimate(
        diff, SymmetricNorm.operator(), budget=10, seed=seed, restarts=0,
        extra_seeds=compact_witnesses(fam, Q),
    )
    return estimate.lower
