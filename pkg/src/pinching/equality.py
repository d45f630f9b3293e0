"""Deciding when two families define the same pinching."""
import numpy as np
import scipy.linalg

from src.errors import DimensionMismatch
from src.orbit.permutation import BlockPermutation
from src.pinching.family import ProjectionFamily
from src.pinching.superop import DENSE_LIMIT, Pinch, agree_on_basis


def max_principal_angle(a: np.ndarray, b: np.ndarray) -> float:
    """Largest principal angle between the column spaces of two frames."""
    return float(np.max(scipy.linalg.subspace_angles(a, b)))


def pinching_equal(
    fam_a: ProjectionFamily,
    fam_b: ProjectionFamily,
    tol: float = 1e-8,
) -> BlockPermutation | None:
    """
    Match the blocks of two families whose pinchings coincide.

    Each block of ``fam_a`` is paired with the unused block of ``fam_b`` of
    equal rank whose range it matches (max principal angle <= tol). The match
    is then confirmed on the matrix-unit basis when n is small enough.

    Args:
        fam_a: First family
        fam_b: Second family
        tol: Principal angle tolerance

    Returns:
        sigma with range(a_i) = range(b_sigma(i)) and sigma(0) = 0, or None
    """
    if fam_a.dim != fam_b.dim:
        raise DimensionMismatch(f"families live in dimensions {fam_a.dim} and {fam_b.dim}")
    if fam_a.w != fam_b.w:
        return None

    sigma = [0] * (fam_a.w + 1)
    used: set[int] = set()
    for i in range(1, fam_a.w + 1):
        fa = fam_a.frame(i)
        match = None
        for j in range(1, fam_b.w + 1):
            fb = fam_b.frame(j)
            if j in used or fb.shape[1] != fa.shape[1]:
                continue
            if max_principal_angle(fa, fb) <= tol:
                match = j
                break
        if match is None:
            return None
        used.add(match)
        sigma[i] = match

    if fam_a.dim <= DENSE_LIMIT and not agree_on_basis(Pinch(fam_a), Pinch(fam_b), tol=10 * tol):
        return None
    return BlockPermutation(tuple(sigma))
