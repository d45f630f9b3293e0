"""
Dense complex matrix foundation.

Decompositions and matrix functions used by every other package. Matrices
are plain ``numpy`` complex arrays; ``SkewHermitian`` and ``UnitaryMatrix``
wrap one and check their defining identity on construction.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from src.errors import LogBranchFailure, MalformedMatrix, SingularFactor

TOL_CONSTRUCT = 1e-12
TOL_SINGULAR = 1e-10
TOL_LOG_GAP = 1e-8

SeedLike = int | np.random.Generator | np.random.SeedSequence | None


def as_matrix(m, square: bool = False) -> np.ndarray:
    """
    Coerce input to a finite complex128 2-D array.

    Args:
        m: Array-like, ``SkewHermitian`` or ``UnitaryMatrix``
        square: Reject non-square input when True

    Returns:
        complex128 ndarray (a copy only when a conversion was needed)
    """
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise MalformedMatrix(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise MalformedMatrix("matrix has NaN or Inf entries")
    if square and arr.shape[0] != arr.shape[1]:
        raise MalformedMatrix(f"expected a square matrix, got shape {arr.shape}")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.swapaxes(m, -1, -2))


def op_norm(m) -> float:
    """Operator (spectral) norm."""
    return float(np.linalg.norm(np.asarray(m), 2))


def max_abs(m) -> float:
    """Largest entry modulus, 0 for an empty array."""
    arr = np.asarray(m)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def rank_one(xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """The operator h -> <h, eta> xi, i.e. xi eta*."""
    xi = np.asarray(xi, dtype=np.complex128).reshape(-1)
    eta = np.asarray(eta, dtype=np.complex128).reshape(-1)
    return np.outer(xi, np.conj(eta))


def as_generator(rng: SeedLike) -> np.random.Generator:
    """Accept an int seed, SeedSequence or Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


# ============================================================
# Wrapped types
# ============================================================

@dataclass(frozen=True, eq=False)
class SkewHermitian:
    """Square matrix z with z* = -z."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(as_matrix(self.matrix, square=True))
        residual = max_abs(m + dagger(m))
        if residual > TOL_CONSTRUCT:
            raise MalformedMatrix(f"not skew-hermitian: |z + z*|_max = {residual:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def project(cls, m) -> "SkewHermitian":
        """Skew-hermitian part (m - m*)/2, exact by construction."""
        arr = as_matrix(m, square=True)
        return cls((arr - dagger(arr)) / 2)

    @classmethod
    def zeros(cls, n: int) -> "SkewHermitian":
        return cls(np.zeros((n, n), dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __add__(self, other: "SkewHermitian") -> "SkewHermitian":
        return SkewHermitian.project(self.matrix + np.asarray(other))

    def __mul__(self, scalar: float) -> "SkewHermitian":
        return SkewHermitian.project(float(scalar) * self.matrix)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """Square matrix u with u u* = 1."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(as_matrix(self.matrix, square=True))
        residual = max_abs(m @ dagger(m) - np.eye(m.shape[0]))
        if residual > TOL_CONSTRUCT:
            raise MalformedMatrix(f"not unitary: |u u* - 1|_max = {residual:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, n: int) -> "UnitaryMatrix":
        return cls(np.eye(n, dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def adjoint(self) -> "UnitaryMatrix":
        return UnitaryMatrix(dagger(self.matrix))

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __matmul__(self, other):
        if isinstance(other, UnitaryMatrix):
            return UnitaryMatrix(self.matrix @ other.matrix)
        return self.matrix @ np.asarray(other)


# ============================================================
# Decompositions and matrix functions
# ============================================================

def svd(m) -> tuple[UnitaryMatrix, np.ndarray, UnitaryMatrix]:
    """
    Full singular value decomposition m = U diag(s) V*.

    Args:
        m: Finite matrix (rectangular allowed)

    Returns:
        (U, s, V) with U, V square unitaries and s nonincreasing, length min(rows, cols)
    """
    arr = as_matrix(m)
    u, s, vh = np.linalg.svd(arr, full_matrices=True)
    return UnitaryMatrix(u), s, UnitaryMatrix(dagger(vh))


def singular_values(m) -> np.ndarray:
    """Nonincreasing singular values."""
    return np.linalg.svd(as_matrix(m), compute_uv=False)


def polar(m, tol_singular: float = TOL_SINGULAR) -> tuple[UnitaryMatrix, np.ndarray]:
    """
    Right polar decomposition m = u |m| with |m| = (m* m)^(1/2).

    Args:
        m: Square invertible matrix
        tol_singular: Smallest admissible singular value

    Returns:
        (u, |m|)

    Raises:
        SingularFactor: smallest singular value <= tol_singular
    """
    arr = as_matrix(m, square=True)
    smallest = float(singular_values(arr)[-1])
    if smallest <= tol_singular:
        raise SingularFactor(f"smallest singular value {smallest:.3e} <= {tol_singular:.1e}")
    u, positive = scipy.linalg.polar(arr, side="right")
    positive = (positive + dagger(positive)) / 2
    return UnitaryMatrix(_reunitarize(u)), positive


def expm_skew(z) -> UnitaryMatrix:
    """
    Exponential of a skew-hermitian matrix.

    Uses the spectral decomposition of the hermitian matrix -i z, so the
    result is unitary to working precision.
    """
    z_arr = np.asarray(z) if isinstance(z, SkewHermitian) else SkewHermitian(z).matrix
    theta, w = np.linalg.eigh(-1j * z_arr)
    return UnitaryMatrix(_reunitarize((w * np.exp(1j * theta)) @ dagger(w)))


def logm_unitary(u, tol_log_gap: float = TOL_LOG_GAP) -> SkewHermitian:
    """
    Principal logarithm of a unitary, with spectrum in the open arc (-pi, pi).

    Args:
        u: Unitary matrix
        tol_log_gap: Minimum distance of every eigenvalue from -1

    Returns:
        SkewHermitian z with expm_skew(z) = u and |z|_op < pi

    Raises:
        LogBranchFailure: an eigenvalue lies within tol_log_gap of -1
    """
    u_arr = np.asarray(u) if isinstance(u, UnitaryMatrix) else UnitaryMatrix(u).matrix
    t, vecs = scipy.linalg.schur(u_arr, output="complex")
    lam = np.diag(t)
    gap = float(np.min(np.abs(lam + 1.0)))
    if gap <= tol_log_gap:
        raise LogBranchFailure(f"eigenvalue within {gap:.3e} of -1")
    # normal input: Schur vectors are eigenvectors
    theta = np.angle(lam)
    return SkewHermitian.project((vecs * (1j * theta)) @ dagger(vecs))


def _reunitarize(u: np.ndarray) -> np.ndarray:
    """One Newton step toward the nearest unitary; removes rounding drift."""
    return 1.5 * u - 0.5 * u @ dagger(u) @ u


# ============================================================
# Seeded random generation
# ============================================================

def random_matrix(n: int, rng: SeedLike = None, cols: int | None = None) -> np.ndarray:
    """Complex matrix with independent standard-normal real and imaginary parts."""
    gen = as_generator(rng)
    shape = (n, n if cols is None else cols)
    return gen.standard_normal(shape) + 1j * gen.standard_normal(shape)


def random_skew_hermitian(n: int, rng: SeedLike = None, scale: float = 1.0) -> SkewHermitian:
    """Seeded skew-hermitian matrix normalized to operator norm ``scale``."""
    a = random_matrix(n, rng)
    z = (a - dagger(a)) / 2
    norm = op_norm(z)
    return SkewHermitian.project(z * (scale / norm if norm > 0 else 0.0))


def random_unitary(n: int, rng: SeedLike = None) -> UnitaryMatrix:
    """Haar-distributed unitary from the QR factorization of a Ginibre matrix."""
    q, r = np.linalg.qr(random_matrix(n, rng))
    phases = np.diag(r) / np.abs(np.diag(r))
    return UnitaryMatrix(_reunitarize(q * phases))


def random_unitary_near_identity(n: int, scale: float, seed: SeedLike) -> UnitaryMatrix:
    """
    expm_skew(scale * z) for a seeded random skew-hermitian z with |z|_op = 1.

    Deterministic per seed; |u - 1|_op <= scale.
    """
    if scale < 0:
        raise ValueError(f"scale must be nonnegative, got {scale}")
    if scale == 0:
        return UnitaryMatrix.identity(n)
    return expm_skew(random_skew_hermitian(n, seed, scale=scale))
