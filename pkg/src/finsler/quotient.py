"""
Quotient norm |[L_z, P]|_P = inf { |z + y|_Phi : y block-diagonal skew-hermitian }.

Schatten-2 is solved in closed form: the block-diagonal part is the
orthogonal projection onto the isotropy algebra, so the optimum is the
off-block part of z. Other norms use projected subgradient descent in the
coordinates h = diag(z) + y, started at h = 0. The trajectory then depends
only on the off-block part of z, which makes the value independent of the
representative z.
"""
import logging
from dataclasses import dataclass

import numpy as np

from src.errors import DimensionMismatch
from src.linalg.core import SkewHermitian
from src.norms.symmetric import NormKind, SymmetricNorm, ideal_norm, phi_subgradient
from src.pinching.family import ProjectionFamily, block_diagonal_part, off_block_part

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """Iteration knobs shared by the metric solvers."""

    max_iter: int = 2000
    stall_window: int = 50
    stall_tol: float = 1e-10
    nodes: int = 16
    restarts: int = 4
    distance_iters: int = 200


DEFAULT_SOLVER = SolverConfig()


@dataclass(frozen=True, eq=False)
class QuotientNormResult:
    value: float
    minimizer: SkewHermitian
    iterations: int
    converged: bool


def _is_s2(norm: SymmetricNorm) -> bool:
    return norm.kind is NormKind.SCHATTEN and norm.p == 2


def _descend(fam: ProjectionFamily, z_off: np.ndarray, norm: SymmetricNorm, cfg: SolverConfig):
    """Minimize |z_off + h|_Phi over block-diagonal skew h; returns (value, h, iterations, converged)."""
    h = np.zeros_like(z_off)
    start = ideal_norm(norm, z_off)
    best_val, best_h = start, h
    if start == 0:
        return 0.0, h, 0, True

    step0 = 0.5 * start
    history = [best_val]
    for k in range(1, cfg.max_iter + 1):
        u, s, vh = np.linalg.svd(z_off + h)
        g = phi_subgradient(norm, s)
        grad = (u[:, : s.size] * g) @ vh[: s.size]
        d = block_diagonal_part(fam, (grad - grad.conj().T) / 2)
        size = np.linalg.norm(d)
        if size < 1e-14:
            return best_val, best_h, k, True
        h = h - (step0 / k) * d / size
        val = ideal_norm(norm, z_off + h)
        if val < best_val:
            best_val, best_h = val, h
        history.append(best_val)
        if k >= cfg.stall_window and history[-cfg.stall_window - 1] - best_val < cfg.stall_tol:
            return best_val, best_h, k, True
    logger.warning("quotient_norm(%s) hit the iteration cap %d at %.6g", norm, cfg.max_iter, best_val)
    return best_val, best_h, cfg.max_iter, False


def quotient_norm(
    fam: ProjectionFamily,
    z,
    norm: SymmetricNorm,
    cfg: SolverConfig = DEFAULT_SOLVER,
) -> QuotientNormResult:
    """
    Quotient norm of the tangent vector [L_z, P].

    Args:
        fam: Projection family defining P
        z: Skew-hermitian generator
        norm: Norming function
        cfg: Solver knobs

    Returns:
        QuotientNormResult; ``converged`` is False when the iteration cap was hit
    """
    z = z if isinstance(z, SkewHermitian) else SkewHermitian(z)
    if z.dim != fam.dim:
        raise DimensionMismatch(f"generator of dimension {z.dim} for a family in dimension {fam.dim}")
    diag = block_diagonal_part(fam, z.matrix)
    z_off = z.matrix - diag

    if _is_s2(norm):
        return QuotientNormResult(
            value=float(np.linalg.norm(z_off)),
            minimizer=SkewHermitian.project(-diag),
            iterations=0,
            converged=True,
        )

    value, h, iterations, converged = _descend(fam, z_off, norm, cfg)
    minimizer = h - diag
    plain = ideal_norm(norm, z.matrix)
    if plain < value:
        value, minimizer = plain, np.zeros_like(minimizer)
    logger.debug("quotient_norm(%s) = %.12g after %d steps", norm, value, iterations)
    return QuotientNormResult(
        value=value,
        minimizer=SkewHermitian.project(minimizer),
        iterations=iterations,
        converged=converged,
    )


def horizontal_part(fam: ProjectionFamily, z, norm: SymmetricNorm, cfg: SolverConfig = DEFAULT_SOLVER) -> SkewHermitian:
    """z + y* where y* attains the quotient norm; generates the same orbit velocity."""
    z = z if isinstance(z, SkewHermitian) else SkewHermitian(z)
    if _is_s2(norm):
        return SkewHermitian.project(off_block_part(fam, z.matrix))
    result = quotient_norm(fam, z, norm, cfg)
    return SkewHermitian.project(z.matrix + result.minimizer.matrix)
