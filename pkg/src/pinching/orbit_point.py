"""Points L_u P L_{u*} of the unitary orbit of a pinching."""
from dataclasses import dataclass

import numpy as np

from src.errors import DimensionMismatch, RankMismatch
from src.linalg.core import UnitaryMatrix, dagger
from src.pinching.family import ProjectionFamily
from src.pinching.superop import Difference, PairedPinch, SuperOperator


@dataclass(frozen=True, eq=False)
class OrbitPoint:
    """
    Orbit point represented by the conjugated frames u F_i.

    ``witness`` is the unitary u when known. Any two witnesses of the same
    point differ by a block-diagonal unitary on the right.
    """

    base: ProjectionFamily
    conjugated: ProjectionFamily
    witness: UnitaryMatrix | None = None

    def __post_init__(self):
        if self.base.dim != self.conjugated.dim:
            raise DimensionMismatch("base and conjugated families differ in dimension")
        if self.base.ranks != self.conjugated.ranks:
            raise RankMismatch(f"ranks {self.conjugated.ranks} differ from base ranks {self.base.ranks}")
        if self.witness is not None and self.witness.dim != self.base.dim:
            raise DimensionMismatch("witness dimension differs from the family")

    @classmethod
    def at_base(cls, fam: ProjectionFamily) -> "OrbitPoint":
        """The base point P itself, witnessed by the identity."""
        return cls(base=fam, conjugated=fam, witness=UnitaryMatrix.identity(fam.dim))

    @property
    def dim(self) -> int:
        return self.base.dim

    def q(self, i: int) -> np.ndarray:
        """q_i = u p_i u*, with q_0 = 1 - sum_{i>=1} q_i."""
        return self.conjugated.projection(i)

    def as_super(self) -> SuperOperator:
        """y -> sum_{i>=1} q_i y p_i."""
        return PairedPinch(self.conjugated, self.base)


def orbit_point(fam: ProjectionFamily, u: UnitaryMatrix) -> OrbitPoint:
    """L_u P L_{u*} with witness u."""
    return conjugate(u, OrbitPoint.at_base(fam))


def conjugate(u: UnitaryMatrix, point: OrbitPoint) -> OrbitPoint:
    """
    Act on an orbit point: frames become u F_i and the witness becomes u w.

    Raises:
        DimensionMismatch: u and the point live in different dimensions
    """
    if not isinstance(u, UnitaryMatrix):
        u = UnitaryMatrix(u)
    if u.dim != point.dim:
        raise DimensionMismatch(f"unitary of dimension {u.dim} acting on dimension {point.dim}")
    frames = tuple(u.matrix @ f for f in point.conjugated.frames)
    witness = None if point.witness is None else u @ point.witness
    return OrbitPoint(
        base=point.base,
        conjugated=ProjectionFamily(dim=point.dim, frames=frames),
        witness=witness,
    )


def point_difference(a: OrbitPoint, b: OrbitPoint) -> SuperOperator:
    """The superoperator a - b."""
    return Difference(a.as_super(), b.as_super())


def reduce_to_base(a: OrbitPoint, b: OrbitPoint) -> OrbitPoint:
    """
    Translate the pair (a, b) to (P, b') by acting with the inverse witness of a.

    The orbit metric is invariant under this action, so distances between a
    and b equal distances between P and b'.
    """
    if a.witness is None:
        raise ValueError("the first point needs a witness")
    return conjugate(UnitaryMatrix(dagger(a.witness.matrix)), b)
