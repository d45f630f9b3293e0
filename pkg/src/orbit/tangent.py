"""
Tangent vectors to the orbit and the projection E onto the tangent space.

For a superoperator S the generator z_hat(S) is built from the values
S(p_i) only; E(S) = [L_{z_hat(S)}, P]. Two formulas are available,
depending on which block plays the role of the distinguished one:

    DistinguishedP0:    z_hat = A - A*,  A = sum_{i>=1} sum_{j<i} p_j S(p_i)
    DistinguishedBlock: blocks reordered as (0, i0, rest); the (i0, 0)
                        corner comes from -sum_k S(eta_k xi*) xi eta_k*
                        with eta_k running through an orthonormal basis of R(p0)

For S = [L_z, P] both give z - sum_{i=0}^{w} p_i z p_i.
"""
from dataclasses import dataclass

import numpy as np

from src.errors import BadVariant
from src.linalg.core import SkewHermitian
from src.pinching.family import ProjectionFamily
from src.pinching.orbit_point import OrbitPoint
from src.pinching.superop import Compose, Difference, LeftMul, SuperOperator


@dataclass(frozen=True)
class DistinguishedP0:
    """Variant with the complement block treated as the distinguished one."""


@dataclass(frozen=True, eq=False)
class DistinguishedBlock:
    """Variant with block ``index`` distinguished, tested with the unit vector ``vector`` in its range."""

    index: int
    vector: np.ndarray


Variant = DistinguishedP0 | DistinguishedBlock


@dataclass(frozen=True, eq=False)
class TangentVector:
    generator: SkewHermitian
    at: OrbitPoint
    as_super: SuperOperator


def tangent_vector(z, point: OrbitPoint) -> TangentVector:
    """[L_z, Q] at the orbit point Q."""
    gen = z if isinstance(z, SkewHermitian) else SkewHermitian(z)
    lz, q = LeftMul(gen.matrix), point.as_super()
    return TangentVector(generator=gen, at=point, as_super=Difference(Compose(lz, q), Compose(q, lz)))


def default_variant(fam: ProjectionFamily) -> Variant:
    """DistinguishedP0 when p0 != 0, else block 1 with its first frame column."""
    if fam.p0_rank > 0:
        return DistinguishedP0()
    return DistinguishedBlock(index=1, vector=fam.frame(1)[:, 0])


def _check_variant(fam: ProjectionFamily, variant: DistinguishedBlock) -> np.ndarray:
    if not 1 <= variant.index <= fam.w:
        raise BadVariant(f"distinguished block {variant.index} outside 1..{fam.w}")
    xi = np.asarray(variant.vector, dtype=np.complex128).reshape(-1)
    if xi.shape != (fam.dim,):
        raise BadVariant(f"vector has length {xi.size}, expected {fam.dim}")
    if abs(np.linalg.norm(xi) - 1.0) > 1e-10:
        raise BadVariant("distinguishing vector must have unit norm")
    if np.linalg.norm(xi - fam.projection(variant.index) @ xi) > 1e-10:
        raise BadVariant(f"vector is not in the range of p_{variant.index}")
    return xi


def tangent_generator(fam: ProjectionFamily, S: SuperOperator, variant: Variant | None = None) -> SkewHermitian:
    """z_hat(S) for the chosen variant (default: see ``default_variant``)."""
    variant = default_variant(fam) if variant is None else variant
    proj = [fam.projection(i) for i in range(fam.w + 1)]
    images = {i: S(proj[i]) for i in range(1, fam.w + 1)}

    if isinstance(variant, DistinguishedP0):
        order, first = list(range(fam.w + 1)), 1
        xi = None
    else:
        xi = _check_variant(fam, variant)
        i0 = variant.index
        order, first = [0, i0] + [i for i in range(1, fam.w + 1) if i != i0], 2

    a = np.zeros((fam.dim, fam.dim), dtype=np.complex128)
    for pos in range(first, len(order)):
        i = order[pos]
        for j in order[:pos]:
            a = a + proj[j] @ images[i]
    if xi is not None:
        for eta in fam.p0_frame.T:
            a = a - S(np.outer(eta, np.conj(xi))) @ np.outer(xi, np.conj(eta))
    # 2i Im(a) = a - a*
    return SkewHermitian.project(2 * a)


def tangent_project(fam: ProjectionFamily, S: SuperOperator, variant: Variant | None = None) -> TangentVector:
    """
    E(S) = [L_{z_hat(S)}, P], the tangent vector at P extracted from S.

    Args:
        fam: Projection family defining P
        S: Any superoperator of matching dimension
        variant: ``DistinguishedP0()`` or ``DistinguishedBlock(i0, xi)``

    Returns:
        TangentVector at the base point

    Raises:
        BadVariant: xi is not a unit vector in R(p_{i0})
    """
    z_hat = tangent_generator(fam, S, variant)
    return tangent_vector(z_hat, OrbitPoint.at_base(fam))
