"""
Two-sided bounds on the rectifiable distance from P to an orbit point Q.

Upper: the one-parameter curve t -> e^{t log(u e^y)} reaches the fiber of Q
for every block-diagonal skew y, so its length |log(u e^y)|_Phi bounds the
distance. y is improved by coordinate descent over a real basis of the
isotropy algebra.

Lower: |Q - P| <= 2 |u - 1|_op <= 2 c |log u|_Phi along any such curve,
with c the operator-norm dominance constant of Phi.
"""
import logging
from dataclasses import dataclass

import numpy as np

from src.errors import LogBranchFailure
from src.finsler.quotient import DEFAULT_SOLVER, SolverConfig
from src.linalg.core import UnitaryMatrix, as_generator, dagger, expm_skew, logm_unitary
from src.norms.symmetric import SymmetricNorm, ideal_norm
from src.orbit.isotropy import random_block_skew
from src.orbit.section import cross_section
from src.pinching.family import ProjectionFamily
from src.pinching.orbit_point import OrbitPoint, point_difference, reduce_to_base
from src.pinching.superop import super_norm_s2

logger = logging.getLogger(__name__)

_MIN_STEP = 1e-7


@dataclass(frozen=True)
class DistanceBounds:
    lower: float
    upper: float
    converged: bool


def isotropy_basis(fam: ProjectionFamily) -> list[np.ndarray]:
    """Real basis of the block-diagonal skew-hermitian matrices, block 0 included."""
    basis = []
    for i in range(fam.w + 1):
        f = fam.frame(i)
        r = f.shape[1]
        for a in range(r):
            basis.append(1j * np.outer(f[:, a], np.conj(f[:, a])))
            for b in range(a + 1, r):
                e = np.outer(f[:, a], np.conj(f[:, b]))
                basis.append(e - dagger(e))
                basis.append(1j * (e + dagger(e)))
    return basis


def _fiber_curve_length(u: np.ndarray, y: np.ndarray, norm: SymmetricNorm) -> float:
    return ideal_norm(norm, logm_unitary(u @ expm_skew(y).matrix).matrix)


def _coordinate_descent(u, y, basis, norm: SymmetricNorm, cfg: SolverConfig, step: float):
    """Compass search over ``basis``; points off the log branch count as +inf."""

    def value(candidate):
        try:
            return _fiber_curve_length(u, candidate, norm)
        except LogBranchFailure:
            return np.inf

    best = value(y)
    for _ in range(cfg.distance_iters):
        improved = False
        for direction in basis:
            for sign in (1.0, -1.0):
                candidate = y + sign * step * direction
                val = value(candidate)
                if val < best - 1e-15:
                    y, best, improved = candidate, val, True
                    break
        if not improved:
            step /= 2
            if step < _MIN_STEP:
                return best, y, True
    return best, y, False


def distance_bounds(
    fam: ProjectionFamily,
    Q: OrbitPoint,
    norm: SymmetricNorm,
    cfg: SolverConfig = DEFAULT_SOLVER,
    seed=0,
) -> DistanceBounds:
    """
    Bounds on the rectifiable distance d(P, Q).

    Args:
        fam: Projection family defining P
        Q: Orbit point; without a witness the cross section supplies one
        norm: Norming function
        cfg: ``cfg.restarts`` seeded restarts, ``cfg.distance_iters`` sweeps each
        seed: Seed for the restarts; extra restarts never change earlier ones

    Returns:
        DistanceBounds with lower <= upper

    Raises:
        LogBranchFailure: log u itself is undefined
    """
    u = (Q.witness if Q.witness is not None else cross_section(fam, Q)).matrix
    # |x|_op <= |x|_Phi for every normalized Phi
    lower = super_norm_s2(point_difference(Q, OrbitPoint.at_base(fam))) / 2.0

    zero = np.zeros((fam.dim, fam.dim), dtype=np.complex128)
    start = _fiber_curve_length(u, zero, norm)
    if start == 0:
        return DistanceBounds(lower=lower, upper=0.0, converged=True)

    basis = isotropy_basis(fam)
    upper, _, converged = _coordinate_descent(u, zero, basis, norm, cfg, step=0.5)
    rng = as_generator(seed)
    for _ in range(cfg.restarts):
        y0 = random_block_skew(fam, rng, scale=np.pi / 2).matrix
        val, _, ok = _coordinate_descent(u, y0, basis, norm, cfg, step=0.5)
        if val < upper:
            upper, converged = val, ok
    if not converged:
        logger.warning("distance_bounds(%s): descent stopped at the sweep cap", norm)
    logger.debug("distance_bounds(%s): lower %.6g upper %.6g", norm, lower, upper)
    return DistanceBounds(lower=lower, upper=upper, converged=converged)


def pair_distance_bounds(
    fam: ProjectionFamily,
    a: OrbitPoint,
    b: OrbitPoint,
    norm: SymmetricNorm,
    cfg: SolverConfig = DEFAULT_SOLVER,
    seed=0,
) -> DistanceBounds:
    """d(a, b) through the isometric action: d(a, b) = d(P, w_a* . b)."""
    return distance_bounds(fam, reduce_to_base(a, b), norm, cfg, seed=seed)


def unitary_distance_upper(u: UnitaryMatrix, v: UnitaryMatrix, norm: SymmetricNorm) -> float:
    """|log(u* v)|_Phi, the length of a one-parameter curve from u to v."""
    return ideal_norm(norm, logm_unitary(dagger(u.matrix) @ v.matrix).matrix)
