"""
Symbolic superoperators: linear maps on n x n matrix space.

Expressions are trees over left/right multiplication, pinchings and the
identity, combined with +, -, scalar * and @ (composition). Application
works on a single matrix or a stack of shape (..., n, n). Adjoints are
taken with respect to the Hilbert-Schmidt inner product.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, svds

from src.errors import DimensionMismatch, DimensionTooLarge
from src.linalg.core import as_matrix, dagger
from src.pinching.family import ProjectionFamily, pinch

DENSE_LIMIT = 32
MAX_DIM = 64


class SuperOperator(ABC):
    """Linear map on matrix space."""

    dim: int

    @abstractmethod
    def apply(self, y: np.ndarray) -> np.ndarray:
        """Evaluate on a matrix or a stack of matrices."""

    @abstractmethod
    def adjoint(self) -> "SuperOperator":
        """Hilbert-Schmidt adjoint."""

    def __call__(self, y) -> np.ndarray:
        return super_apply(self, y)

    def __add__(self, other: "SuperOperator") -> "SuperOperator":
        return Sum((self, other))

    def __sub__(self, other: "SuperOperator") -> "SuperOperator":
        return Difference(self, other)

    def __neg__(self) -> "SuperOperator":
        return Scale(-1.0, self)

    def __mul__(self, scalar: complex) -> "SuperOperator":
        return Scale(complex(scalar), self)

    __rmul__ = __mul__

    def __matmul__(self, inner: "SuperOperator") -> "SuperOperator":
        return Compose(self, inner)


def _same_dim(*ops: SuperOperator) -> int:
    dims = {op.dim for op in ops}
    if len(dims) != 1:
        raise DimensionMismatch(f"superoperators act on different dimensions {sorted(dims)}")
    return dims.pop()


@dataclass(frozen=True, eq=False)
class Identity(SuperOperator):
    dim: int

    def apply(self, y):
        return np.array(y, dtype=np.complex128)

    def adjoint(self):
        return self


@dataclass(frozen=True, eq=False)
class LeftMul(SuperOperator):
    """L_a(y) = a y."""

    a: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", as_matrix(self.a, square=True))

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    def apply(self, y):
        return self.a @ y

    def adjoint(self):
        return LeftMul(dagger(self.a))


@dataclass(frozen=True, eq=False)
class RightMul(SuperOperator):
    """R_a(y) = y a."""

    a: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", as_matrix(self.a, square=True))

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    def apply(self, y):
        return y @ self.a

    def adjoint(self):
        return RightMul(dagger(self.a))


@dataclass(frozen=True, eq=False)
class Pinch(SuperOperator):
    fam: ProjectionFamily

    @property
    def dim(self) -> int:
        return self.fam.dim

    def apply(self, y):
        return pinch(self.fam, y)

    def adjoint(self):
        return self


@dataclass(frozen=True, eq=False)
class PairedPinch(SuperOperator):
    """
    y -> sum_{i>=1} q_i y p_i for index-aligned families {q_i}, {p_i}.

    With q_i = u p_i u* this is L_u P L_{u*}.
    """

    left: ProjectionFamily
    right: ProjectionFamily

    def __post_init__(self):
        if self.left.dim != self.right.dim or self.left.w != self.right.w:
            raise DimensionMismatch("paired families must share dimension and block count")

    @property
    def dim(self) -> int:
        return self.right.dim

    def apply(self, y):
        y = np.asarray(y, dtype=np.complex128)
        out = np.zeros_like(y)
        for g, f in zip(self.left.frames, self.right.frames):
            out = out + g @ (dagger(g) @ y @ f) @ dagger(f)
        return out

    def adjoint(self):
        return self


@dataclass(frozen=True, eq=False)
class Sum(SuperOperator):
    terms: tuple[SuperOperator, ...]

    def __post_init__(self):
        flat = []
        for t in self.terms:
            flat.extend(t.terms if isinstance(t, Sum) else (t,))
        object.__setattr__(self, "terms", tuple(flat))
        _same_dim(*self.terms)

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    def apply(self, y):
        out = self.terms[0].apply(y)
        for t in self.terms[1:]:
            out = out + t.apply(y)
        return out

    def adjoint(self):
        return Sum(tuple(t.adjoint() for t in self.terms))


@dataclass(frozen=True, eq=False)
class Difference(SuperOperator):
    left: SuperOperator
    right: SuperOperator

    def __post_init__(self):
        _same_dim(self.left, self.right)

    @property
    def dim(self) -> int:
        return self.left.dim

    def apply(self, y):
        return self.left.apply(y) - self.right.apply(y)

    def adjoint(self):
        return Difference(self.left.adjoint(), self.right.adjoint())


@dataclass(frozen=True, eq=False)
class Scale(SuperOperator):
    factor: complex
    op: SuperOperator

    @property
    def dim(self) -> int:
        return self.op.dim

    def apply(self, y):
        return self.factor * self.op.apply(y)

    def adjoint(self):
        return Scale(np.conj(self.factor), self.op.adjoint())


@dataclass(frozen=True, eq=False)
class Compose(SuperOperator):
    """(outer @ inner)(y) = outer(inner(y))."""

    outer: SuperOperator
    inner: SuperOperator

    def __post_init__(self):
        _same_dim(self.outer, self.inner)

    @property
    def dim(self) -> int:
        return self.outer.dim

    def apply(self, y):
        return self.outer.apply(self.inner.apply(y))

    def adjoint(self):
        return Compose(self.inner.adjoint(), self.outer.adjoint())


# ============================================================
# Operations
# ============================================================

def super_apply(S: SuperOperator, y) -> np.ndarray:
    """
    Evaluate the expression tree on y.

    Raises:
        DimensionMismatch: y is not n x n (or a stack of such)
    """
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim < 2 or y.shape[-2:] != (S.dim, S.dim):
        raise DimensionMismatch(f"input shape {y.shape} does not match superoperator dimension {S.dim}")
    return S.apply(y)


def commutator_super(z, fam: ProjectionFamily) -> SuperOperator:
    """[L_z, P] = L_z P - P L_z, i.e. y -> sum_i (z p_i - p_i z) y p_i."""
    lz = LeftMul(z)
    if lz.dim != fam.dim:
        raise DimensionMismatch(f"z has dimension {lz.dim}, family has {fam.dim}")
    p = Pinch(fam)
    return Difference(Compose(lz, p), Compose(p, lz))


def matrix_units(n: int) -> np.ndarray:
    """Stack of the n^2 matrix units E_kl in row-major order."""
    return np.eye(n * n, dtype=np.complex128).reshape(n * n, n, n)


def matricize(S: SuperOperator) -> np.ndarray:
    """
    n^2 x n^2 matrix of S against row-major vectorization.

    Column k is vec(S(E_k)); vec is an isometry from Schatten-2 onto C^{n^2}.
    """
    n = S.dim
    if n > MAX_DIM:
        raise DimensionTooLarge(f"matricization needs n <= {MAX_DIM}, got {n}")
    images = S.apply(matrix_units(n))
    return images.reshape(n * n, n * n).T


def _linear_operator(S: SuperOperator) -> LinearOperator:
    n = S.dim
    adj = S.adjoint()
    return LinearOperator(
        (n * n, n * n),
        matvec=lambda v: S.apply(np.asarray(v).reshape(n, n)).reshape(-1),
        rmatvec=lambda v: adj.apply(np.asarray(v).reshape(n, n)).reshape(-1),
        dtype=np.complex128,
    )


def super_norm_s2(S: SuperOperator) -> float:
    """
    Induced norm of S on Schatten-2: top singular value of its matricization.

    Dense for n <= 32, Lanczos (``svds``) on the matrix-free operator above.

    Raises:
        DimensionTooLarge: n > 64
    """
    n = S.dim
    if n > MAX_DIM:
        raise DimensionTooLarge(f"super_norm_s2 supports n <= {MAX_DIM}, got {n}")
    if n <= DENSE_LIMIT:
        return float(np.linalg.norm(matricize(S), 2))
    top = svds(_linear_operator(S), k=1, return_singular_vectors=False, random_state=0)
    return float(top[0])


def s2_extremizer(S: SuperOperator) -> np.ndarray | None:
    """Unit Schatten-2 matrix attaining super_norm_s2, or None above the dense limit."""
    n = S.dim
    if n > DENSE_LIMIT:
        return None
    _, _, vh = np.linalg.svd(matricize(S))
    return np.conj(vh[0]).reshape(n, n)


def agree_on_basis(S: SuperOperator, T: SuperOperator, tol: float = 1e-10) -> bool:
    """True when S and T coincide on every matrix unit (entrywise within tol)."""
    _same_dim(S, T)
    units = matrix_units(S.dim)
    return bool(np.max(np.abs(S.apply(units) - T.apply(units))) <= tol)
