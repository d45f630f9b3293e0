"""
Block permutations r_sigma and the covering fiber {sigma . Q}.

Two orbit points in the same fiber map to the same point of the
co-adjoint orbit; distinct ones are at least 1 apart.
"""
import logging
from itertools import combinations

import numpy as np

from src.errors import DimensionMismatch, FiberTooLarge, NotOrthogonal
from src.linalg.core import UnitaryMatrix, dagger
from src.orbit.isotropy import in_isotropy_H
from src.orbit.permutation import BlockPermutation, count_rank_preserving, rank_preserving_permutations
from src.pinching.family import ProjectionFamily
from src.pinching.orbit_point import OrbitPoint, point_difference
from src.pinching.superop import super_norm_s2

logger = logging.getLogger(__name__)

FIBER_CAP = 10_000


def _block_bases(fam: ProjectionFamily, bases) -> list[np.ndarray]:
    if bases is None:
        return [fam.frame(i) for i in range(fam.w + 1)]
    bases = [np.asarray(b, dtype=np.complex128) for b in bases]
    if len(bases) != fam.w + 1:
        raise DimensionMismatch(f"expected {fam.w + 1} bases (block 0 included), got {len(bases)}")
    for i, b in enumerate(bases):
        if b.shape != (fam.dim, fam.ranks[i]):
            raise DimensionMismatch(f"basis {i} has shape {b.shape}, expected {(fam.dim, fam.ranks[i])}")
        if np.max(np.abs(b @ dagger(b) - fam.projection(i)), initial=0.0) > 1e-10:
            raise NotOrthogonal(f"basis {i} is not an orthonormal basis of R(p_{i})")
    return bases


def permutation_operator(fam: ProjectionFamily, sigma: BlockPermutation, bases=None) -> UnitaryMatrix:
    """
    r_sigma: sends the j-th basis vector of block i to the j-th basis vector of block sigma(i).

    Args:
        fam: Projection family
        sigma: Rank-preserving permutation fixing 0
        bases: Orthonormal basis per block, block 0 first; defaults to the family frames

    Returns:
        Unitary with r p_i r* = p_sigma(i)

    Raises:
        RankMismatch: sigma moves a block to one of different rank
    """
    sigma.check_ranks(fam.ranks)
    b = _block_bases(fam, bases)
    r = sum(b[sigma(i)] @ dagger(b[i]) for i in range(fam.w + 1) if fam.ranks[i])
    return UnitaryMatrix(r)


def act(sigma: BlockPermutation, Q: OrbitPoint) -> OrbitPoint:
    """
    sigma . Q = L_{u r_sigma} P L_{r_sigma* u*}, whose i-th projection is q_sigma(i).

    With the frames as bases, u r_sigma F_i = u F_sigma(i), so the witness stays consistent.
    """
    fam = Q.base
    sigma.check_ranks(fam.ranks)
    frames = tuple(Q.conjugated.frame(sigma(i)) for i in range(1, fam.w + 1))
    witness = None
    if Q.witness is not None:
        witness = Q.witness @ permutation_operator(fam, sigma)
    return OrbitPoint(base=fam, conjugated=ProjectionFamily(dim=fam.dim, frames=frames), witness=witness)


def fiber(fam: ProjectionFamily, Q: OrbitPoint, bases=None, cap: int = FIBER_CAP) -> list[OrbitPoint]:
    """
    All sigma . Q for rank-preserving sigma, in lexicographic order of sigma.

    Raises:
        FiberTooLarge: more than ``cap`` permutations
    """
    size = count_rank_preserving(fam.ranks)
    if size > cap:
        raise FiberTooLarge(f"fiber has {size} points, cap is {cap}")
    if bases is not None:
        _block_bases(fam, bases)
    logger.debug("enumerating fiber of size %d", size)
    return [act(sigma, Q) for sigma in rank_preserving_permutations(fam.ranks)]


def separation_witness(a: OrbitPoint, b: OrbitPoint) -> tuple[np.ndarray, float]:
    """
    Rank-one y = xi eta* with |y| = 1 and |(A - B)(y)|_op = max_i |a_i - b_i|_op.

    eta is a unit vector of R(p_i); xi is the top singular vector of a_i - b_i.
    Between distinct fiber points the value is exactly 1.
    """
    fam = a.base
    if b.base.dim != fam.dim or b.base.ranks != fam.ranks:
        raise DimensionMismatch("orbit points come from different families")
    best_i, best_val, best_xi = 1, -1.0, None
    for i in range(1, fam.w + 1):
        _, s, vh = np.linalg.svd(a.q(i) - b.q(i))
        if s[0] > best_val:
            best_i, best_val, best_xi = i, float(s[0]), np.conj(vh[0])
    eta = fam.frame(best_i)[:, 0]
    return np.outer(best_xi, np.conj(eta)), best_val


def min_fiber_separation(points: list[OrbitPoint]) -> float:
    """Smallest super_norm_s2 distance between distinct points; inf for a single point."""
    return min(
        (super_norm_s2(point_difference(p, q)) for p, q in combinations(points, 2)),
        default=np.inf,
    )


def h_decomposition(fam: ProjectionFamily, u: UnitaryMatrix, tol: float = 1e-8):
    """
    Factor u in H as r_sigma g with g block diagonal.

    Returns:
        (sigma, g), or None when u does not fix P
    """
    sigma = in_isotropy_H(fam, u, tol=tol)
    if sigma is None:
        return None
    r = permutation_operator(fam, sigma)
    u = u if isinstance(u, UnitaryMatrix) else UnitaryMatrix(u)
    return sigma, r.adjoint @ u
