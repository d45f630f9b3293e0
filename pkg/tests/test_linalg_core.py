import pytest
import numpy as np
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.errors import LogBranchFailure, MalformedMatrix, SingularFactor
from src.linalg.core import (
    SkewHermitian,
    UnitaryMatrix,
    expm_skew,
    logm_unitary,
    op_norm,
    polar,
    random_skew_hermitian,
    random_unitary,
    random_unitary_near_identity,
    rank_one,
    singular_values,
)


# ============================================================
# Fixtures
# ============================================================

@pytest.fixture
def rng():
    """Seeded generator shared by the random tests."""
    return np.random.default_rng(1234)


def rotation(t):
    return np.array([[np.cos(t), np.sin(t)], [-np.sin(t), np.cos(t)]], dtype=complex)


# ============================================================
# Singular values
# ============================================================

def test_singular_values_diagonal():
    """diag(3, 1) has singular values (3, 1)."""
    assert np.allclose(singular_values(np.diag([3.0, 1.0])), [3.0, 1.0])


def test_singular_values_rank_one():
    """A rank-one operator of unit vectors has singular values (1, 0, ...)."""
    xi = np.array([1, 1j, 0]) / np.sqrt(2)
    eta = np.array([0, 1, 0])
    assert np.allclose(singular_values(rank_one(xi, eta)), [1.0, 0.0, 0.0])


def test_singular_values_nilpotent():
    """[[0, 1], [0, 0]] has singular values (1, 0)."""
    assert np.allclose(singular_values([[0, 1], [0, 0]]), [1.0, 0.0])


def test_malformed_input_rejected():
    """NaN entries and non-2-D input raise MalformedMatrix."""
    with pytest.raises(MalformedMatrix):
        singular_values([[np.nan, 0], [0, 1]])
    with pytest.raises(MalformedMatrix):
        singular_values([1.0, 2.0])


# ============================================================
# Wrapped types
# ============================================================

def test_skew_hermitian_rejects_hermitian():
    """A hermitian matrix is not accepted as skew-hermitian."""
    with pytest.raises(MalformedMatrix):
        SkewHermitian(np.eye(2))


def test_unitary_rejects_non_unitary():
    """2 * identity is not unitary."""
    with pytest.raises(MalformedMatrix):
        UnitaryMatrix(2 * np.eye(2))


def test_wrapping_does_not_freeze_caller_array():
    """The caller's array stays writable after wrapping."""
    z = np.array([[0, 1], [-1, 0]], dtype=complex)
    SkewHermitian(z)
    z[0, 1] = 2.0
    assert z[0, 1] == 2.0


def test_unitary_product_stays_unitary(rng):
    """UnitaryMatrix @ UnitaryMatrix is a UnitaryMatrix."""
    u, v = random_unitary(3, rng), random_unitary(3, rng)
    assert isinstance(u @ v, UnitaryMatrix)
    assert np.allclose((u @ u.adjoint).matrix, np.eye(3))


# ============================================================
# Polar decomposition
# ============================================================

def test_polar_of_unitary(rng):
    """A unitary is its own polar part with identity modulus."""
    u = random_unitary(4, rng)
    w, p = polar(u.matrix)
    assert np.allclose(w.matrix, u.matrix)
    assert np.allclose(p, np.eye(4))


def test_polar_of_positive_diagonal():
    """diag(2, 3) has polar part identity."""
    w, p = polar(np.diag([2.0, 3.0]))
    assert np.allclose(w.matrix, np.eye(2))
    assert np.allclose(p, np.diag([2.0, 3.0]))


def test_polar_two_by_two():
    """[[0, 2], [1, 0]] = [[0, 1], [1, 0]] diag(1, 2)."""
    w, p = polar([[0, 2], [1, 0]])
    assert np.allclose(w.matrix, [[0, 1], [1, 0]])
    assert np.allclose(p, np.diag([1.0, 2.0]))


def test_polar_singular():
    """A singular matrix raises SingularFactor."""
    with pytest.raises(SingularFactor):
        polar([[1, 0], [0, 0]])


# ============================================================
# Exponential and logarithm
# ============================================================

def test_expm_of_zero():
    """expm_skew(0) is the identity."""
    assert np.allclose(expm_skew(np.zeros((3, 3))).matrix, np.eye(3))


def test_expm_rotation():
    """The exponential of [[0, t], [-t, 0]] is the rotation by t."""
    t = 0.7
    u = expm_skew(np.array([[0, t], [-t, 0]], dtype=complex))
    assert np.allclose(u.matrix, rotation(t))


def test_expm_large_generator_is_unitary(rng):
    """|z|_op = pi/2 still gives eigenvalues on the unit circle."""
    z = random_skew_hermitian(5, rng, scale=np.pi / 2)
    eig = np.linalg.eigvals(expm_skew(z).matrix)
    assert np.allclose(np.abs(eig), 1.0)


def test_logm_identity():
    """log 1 = 0."""
    assert np.allclose(logm_unitary(np.eye(3)).matrix, 0.0)


def test_logm_rotation():
    """The log of a rotation by t is its generator."""
    t = 1.1
    z = logm_unitary(rotation(t))
    assert np.allclose(z.matrix, [[0, t], [-t, 0]])


def test_logm_round_trip(rng):
    """log(expm(z)) = z when |z|_op < pi - 0.1."""
    z = random_skew_hermitian(6, rng, scale=np.pi - 0.2)
    back = logm_unitary(expm_skew(z))
    assert np.max(np.abs(back.matrix - z.matrix)) < 1e-9


def test_logm_branch_failure():
    """An eigenvalue at -1 has no principal logarithm."""
    with pytest.raises(LogBranchFailure):
        logm_unitary(np.diag([-1.0, 1.0]))


# ============================================================
# Seeded random unitaries
# ============================================================

def test_near_identity_scale_zero():
    """Scale 0 gives the identity for any seed."""
    assert np.allclose(random_unitary_near_identity(3, 0.0, 99).matrix, np.eye(3))


def test_near_identity_deterministic():
    """The same (n, scale, seed) gives the same unitary."""
    a = random_unitary_near_identity(4, 0.3, 5)
    b = random_unitary_near_identity(4, 0.3, 5)
    assert np.array_equal(a.matrix, b.matrix)


def test_near_identity_bound():
    """|u - 1|_op <= scale."""
    u = random_unitary_near_identity(2, 0.1, 7)
    assert op_norm(u.matrix - np.eye(2)) <= 0.1 + 1e-12
