"""
Isotropy of the pinching P under the unitary group.

G = {u : L_u P = P L_u} is the group of block-diagonal unitaries.
H = {u : L_u P L_{u*} = P} adds rank-preserving block permutations.
"""
import numpy as np

from src.errors import DimensionMismatch
from src.linalg.core import SkewHermitian, UnitaryMatrix, as_generator, dagger, op_norm, random_unitary
from src.orbit.permutation import BlockPermutation
from src.pinching.equality import pinching_equal
from src.pinching.family import ProjectionFamily, off_block_part
from src.pinching.orbit_point import OrbitPoint, orbit_point, point_difference
from src.pinching.superop import Compose, LeftMul, Pinch, agree_on_basis, super_norm_s2


def _check(fam: ProjectionFamily, u) -> np.ndarray:
    arr = np.asarray(u)
    if arr.shape != (fam.dim, fam.dim):
        raise DimensionMismatch(f"unitary shape {arr.shape} does not match family dimension {fam.dim}")
    return arr


def off_block_norm(fam: ProjectionFamily, x) -> float:
    """|x - sum_{i=0}^{w} p_i x p_i|_op."""
    return op_norm(off_block_part(fam, _check(fam, x)))


def in_isotropy_G(fam: ProjectionFamily, u: UnitaryMatrix, tol: float = 1e-9) -> bool:
    """True iff u is block diagonal with respect to p_0..p_w, within tol."""
    return off_block_norm(fam, u) <= tol


def commutes_with_pinching(fam: ProjectionFamily, u: UnitaryMatrix, tol: float = 1e-9) -> bool:
    """L_u P = P L_u, compared on every matrix unit."""
    lu = LeftMul(_check(fam, u))
    p = Pinch(fam)
    return agree_on_basis(Compose(lu, p), Compose(p, lu), tol=tol)


def isotropy_displacement(fam: ProjectionFamily, u: UnitaryMatrix) -> float:
    """super_norm_s2(L_u P L_{u*} - P)."""
    return super_norm_s2(point_difference(orbit_point(fam, u), OrbitPoint.at_base(fam)))


def off_block_displacement_bound(fam: ProjectionFamily, u: UnitaryMatrix) -> float:
    """2 sum_{i != j} |p_i u p_j|_op, an upper bound on isotropy_displacement."""
    arr = _check(fam, u)
    blocks = [fam.projection(i) for i in range(fam.w + 1)]
    return 2.0 * sum(
        op_norm(p @ arr @ q) for i, p in enumerate(blocks) for j, q in enumerate(blocks) if i != j
    )


def in_isotropy_H(fam: ProjectionFamily, u: UnitaryMatrix, tol: float = 1e-8) -> BlockPermutation | None:
    """
    Find sigma with u p_i u* = p_sigma(i) for all i, if any.

    Args:
        fam: Projection family
        u: Unitary
        tol: Principal-angle tolerance for matching projections

    Returns:
        sigma, or None when u does not fix P
    """
    _check(fam, u)
    moved = orbit_point(fam, u if isinstance(u, UnitaryMatrix) else UnitaryMatrix(u))
    return pinching_equal(moved.conjugated, fam, tol=tol)


# ============================================================
# Random isotropy elements
# ============================================================

def random_block_unitary(fam: ProjectionFamily, rng=None) -> UnitaryMatrix:
    """Haar unitary on each block p_0..p_w, assembled block-diagonally."""
    gen = as_generator(rng)
    u = np.zeros((fam.dim, fam.dim), dtype=np.complex128)
    for i in range(fam.w + 1):
        f = fam.frame(i)
        if f.shape[1]:
            u += f @ random_unitary(f.shape[1], gen).matrix @ dagger(f)
    return UnitaryMatrix(u)


def random_block_skew(fam: ProjectionFamily, rng=None, scale: float = 1.0) -> SkewHermitian:
    """Block-diagonal skew-hermitian matrix, an element of the isotropy algebra."""
    gen = as_generator(rng)
    z = np.zeros((fam.dim, fam.dim), dtype=np.complex128)
    for i in range(fam.w + 1):
        f = fam.frame(i)
        r = f.shape[1]
        if r:
            a = gen.standard_normal((r, r)) + 1j * gen.standard_normal((r, r))
            z += f @ ((a - dagger(a)) / 2) @ dagger(f)
    return SkewHermitian.project(scale * z)
