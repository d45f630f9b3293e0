"""
Projection families and the pinching operator.

A family is a tuple of orthonormal column frames, one per block p_i
(i = 1..w). Block 0 is the complement p0 = 1 - sum p_i; it is derived on
demand and never stored as a member.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from src.errors import DimensionMismatch, NotOrthogonal, OverComplete, IndexOutOfRange
from src.linalg.core import TOL_CONSTRUCT, as_matrix, dagger, max_abs


@dataclass(frozen=True, eq=False)
class ProjectionFamily:
    """Mutually orthogonal projections p_1..p_w given by orthonormal frames."""

    dim: int
    frames: tuple[np.ndarray, ...]

    def __post_init__(self):
        frames = []
        for i, frame in enumerate(self.frames, start=1):
            f = np.array(np.asarray(frame, dtype=np.complex128))
            if f.ndim == 1:
                f = f.reshape(-1, 1)
            if f.ndim != 2 or f.shape[0] != self.dim:
                raise DimensionMismatch(f"frame {i} has shape {f.shape}, ambient dimension is {self.dim}")
            if f.shape[1] == 0:
                raise ValueError(f"frame {i} is empty")
            f.setflags(write=False)
            frames.append(f)
        if not frames:
            raise ValueError("a projection family needs at least one block")
        if sum(f.shape[1] for f in frames) > self.dim:
            raise OverComplete(f"ranks {[f.shape[1] for f in frames]} exceed dimension {self.dim}")
        for i, fi in enumerate(frames, start=1):
            gram = dagger(fi) @ fi
            if max_abs(gram - np.eye(fi.shape[1])) > TOL_CONSTRUCT:
                raise NotOrthogonal(f"frame {i} is not orthonormal")
            for j in range(i, len(frames)):
                if max_abs(dagger(fi) @ frames[j]) > TOL_CONSTRUCT:
                    raise NotOrthogonal(f"frames {i} and {j + 1} are not orthogonal")
        object.__setattr__(self, "frames", tuple(frames))

    @property
    def w(self) -> int:
        """Number of blocks, excluding p0."""
        return len(self.frames)

    @property
    def ranks(self) -> tuple[int, ...]:
        """Ranks of p_0, p_1, ..., p_w."""
        return (self.p0_rank,) + tuple(f.shape[1] for f in self.frames)

    @property
    def p0_rank(self) -> int:
        return self.dim - sum(f.shape[1] for f in self.frames)

    @cached_property
    def p0_frame(self) -> np.ndarray:
        """Orthonormal basis of the range of p0 (n x 0 when p0 = 0)."""
        if self.p0_rank == 0:
            return np.zeros((self.dim, 0), dtype=np.complex128)
        stacked = np.hstack(self.frames)
        basis = scipy.linalg.null_space(dagger(stacked))
        return basis[:, : self.p0_rank]

    def frame(self, i: int) -> np.ndarray:
        """Frame of block i; block 0 is the complement."""
        if not 0 <= i <= self.w:
            raise IndexOutOfRange(f"block index {i} outside 0..{self.w}")
        return self.p0_frame if i == 0 else self.frames[i - 1]

    def projection(self, i: int) -> np.ndarray:
        if i == 0:
            return np.eye(self.dim) - sum(f @ dagger(f) for f in self.frames)
        f = self.frame(i)
        return f @ dagger(f)

    def projections(self, include_p0: bool = True) -> list[np.ndarray]:
        start = 0 if include_p0 else 1
        return [self.projection(i) for i in range(start, self.w + 1)]

    @cached_property
    def support(self) -> np.ndarray:
        """1 - p0 = sum of the block projections."""
        return sum(f @ dagger(f) for f in self.frames)


def family_new(frames, dim: int | None = None) -> ProjectionFamily:
    """
    Validate frames and build a projection family.

    Args:
        frames: Sequence of n x r_i column frames (1-D arrays are single vectors)
        dim: Ambient dimension; inferred from the first frame when omitted

    Returns:
        ProjectionFamily

    Raises:
        NotOrthogonal: frames not orthonormal or not mutually orthogonal
        OverComplete: ranks sum past the dimension
        DimensionMismatch: frames of different heights
    """
    frames = [np.asarray(f) for f in frames]
    if dim is None:
        if not frames:
            raise ValueError("cannot infer dimension from an empty frame list")
        dim = frames[0].shape[0]
    return ProjectionFamily(dim=int(dim), frames=tuple(frames))


def family_from_blocks(dim: int, sizes, basis=None) -> ProjectionFamily:
    """
    Family of consecutive coordinate blocks of the given sizes.

    Args:
        dim: Ambient dimension
        sizes: Block ranks, in order; leftover coordinates form p0
        basis: Optional unitary whose columns replace the standard basis
    """
    cols = np.eye(dim, dtype=np.complex128) if basis is None else as_matrix(basis, square=True)
    if cols.shape[0] != dim:
        raise DimensionMismatch(f"basis has dimension {cols.shape[0]}, expected {dim}")
    if sum(sizes) > dim:
        raise OverComplete(f"block sizes {tuple(sizes)} exceed dimension {dim}")
    frames, start = [], 0
    for size in sizes:
        frames.append(cols[:, start:start + size])
        start += size
    return ProjectionFamily(dim=dim, frames=tuple(frames))


def _check_dim(fam: ProjectionFamily, x: np.ndarray) -> None:
    if x.shape[-2:] != (fam.dim, fam.dim):
        raise DimensionMismatch(f"matrix shape {x.shape[-2:]} does not match family dimension {fam.dim}")


def pinch(fam: ProjectionFamily, x) -> np.ndarray:
    """
    P(x) = sum_{i>=1} p_i x p_i, block 0 excluded.

    Accepts a stack of matrices with shape (..., n, n).
    """
    x = np.asarray(x, dtype=np.complex128)
    _check_dim(fam, x)
    out = np.zeros_like(x)
    for f in fam.frames:
        out = out + f @ (dagger(f) @ x @ f) @ dagger(f)
    return out


def block_diagonal_part(fam: ProjectionFamily, x) -> np.ndarray:
    """sum_{i=0}^{w} p_i x p_i, the full pinching including block 0."""
    x = np.asarray(x, dtype=np.complex128)
    out = pinch(fam, x)
    f0 = fam.p0_frame
    if f0.shape[1]:
        out = out + f0 @ (dagger(f0) @ x @ f0) @ dagger(f0)
    return out


def off_block_part(fam: ProjectionFamily, x) -> np.ndarray:
    """x - sum_{i=0}^{w} p_i x p_i."""
    x = np.asarray(x, dtype=np.complex128)
    return x - block_diagonal_part(fam, x)


def compress(fam: ProjectionFamily, x, i: int, j: int) -> np.ndarray:
    """p_i x p_j."""
    pi, pj = fam.projection(i), fam.projection(j)
    return pi @ np.asarray(x) @ pj
