import pytest
import numpy as np
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.errors import DimensionMismatch, IndexOutOfRange, NotOrthogonal, OverComplete
from src.linalg.core import random_matrix, random_unitary
from src.norms.symmetric import SymmetricNorm, ideal_norm
from src.pinching.equality import pinching_equal
from src.pinching.estimate import super_norm_estimate
from src.pinching.family import (
    ProjectionFamily,
    block_diagonal_part,
    compress,
    family_from_blocks,
    family_new,
    off_block_part,
    pinch,
)
from src.pinching.orbit_point import OrbitPoint, conjugate, orbit_point, reduce_to_base
from src.pinching.superop import (
    Identity,
    LeftMul,
    Pinch,
    RightMul,
    agree_on_basis,
    commutator_super,
    matricize,
    super_apply,
    super_norm_s2,
)


# ============================================================
# Fixtures
# ============================================================

@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def e1_in_c2():
    """{e1} in C^2: one rank-one block and p0 = e2 e2*."""
    return family_new([np.array([1.0, 0.0])])


@pytest.fixture
def rotated_family(rng):
    """Blocks of ranks 1 and 2 in C^5 in a Haar-random basis, p0 of rank 2."""
    return family_from_blocks(5, [1, 2], basis=random_unitary(5, rng).matrix)


J = np.array([[0, 1], [-1, 0]], dtype=complex)


# ============================================================
# Projection families
# ============================================================

def test_full_basis_has_no_p0():
    """A single frame spanning C^3 leaves p0 = 0."""
    fam = family_new([np.eye(3)])
    assert fam.w == 1
    assert fam.p0_rank == 0
    assert np.allclose(fam.projection(0), 0.0)


def test_single_vector_family(e1_in_c2):
    """{e1} in C^2 has w = 1 and p0 of rank 1."""
    assert e1_in_c2.w == 1
    assert e1_in_c2.ranks == (1, 1)
    assert np.allclose(e1_in_c2.projection(0), np.diag([0.0, 1.0]))


def test_repeated_direction_not_orthogonal():
    """{e1, e1} is rejected."""
    with pytest.raises(NotOrthogonal):
        family_new([np.array([1.0, 0.0]), np.array([1.0, 0.0])])


def test_over_complete():
    """Ranks summing past n raise OverComplete."""
    with pytest.raises(OverComplete):
        family_from_blocks(3, [2, 2])


def test_frame_index_checked(e1_in_c2):
    """Block indices outside 0..w raise IndexOutOfRange."""
    with pytest.raises(IndexOutOfRange):
        e1_in_c2.frame(2)


def test_frames_of_different_heights():
    """Frames from different ambient spaces are rejected."""
    with pytest.raises(DimensionMismatch):
        ProjectionFamily(dim=3, frames=(np.eye(2)[:, :1],))


def test_p0_frame_spans_complement(rotated_family):
    """The derived p0 frame is orthonormal and orthogonal to every block."""
    f0 = rotated_family.p0_frame
    assert f0.shape == (5, 2)
    assert np.allclose(f0.conj().T @ f0, np.eye(2))
    assert np.allclose(rotated_family.support @ f0, 0.0)


# ============================================================
# Pinching
# ============================================================

def test_pinch_rank_one_block(e1_in_c2):
    """P([[1, 2], [3, 4]]) = [[1, 0], [0, 0]]: block 0 is excluded."""
    assert np.allclose(pinch(e1_in_c2, [[1, 2], [3, 4]]), [[1, 0], [0, 0]])


def test_block_diagonal_part_includes_p0(e1_in_c2):
    """The full block-diagonal part keeps the p0 corner."""
    assert np.allclose(block_diagonal_part(e1_in_c2, [[1, 2], [3, 4]]), np.diag([1, 4]))
    assert np.allclose(off_block_part(e1_in_c2, [[1, 2], [3, 4]]), [[0, 2], [3, 0]])


def test_pinch_fixes_block_supported(rotated_family, rng):
    """x = sum p_i x p_i is unchanged by P."""
    x = pinch(rotated_family, random_matrix(5, rng))
    assert np.allclose(pinch(rotated_family, x), x)


def test_pinch_contraction(rotated_family, rng):
    """|P(x)|_Phi <= |x|_Phi with equality on block-supported x."""
    for norm in (SymmetricNorm.operator(), SymmetricNorm.schatten(1), SymmetricNorm.ky_fan(2)):
        x = random_matrix(5, rng)
        assert ideal_norm(norm, pinch(rotated_family, x)) <= ideal_norm(norm, x) + 1e-12
        px = pinch(rotated_family, x)
        assert ideal_norm(norm, pinch(rotated_family, px)) == pytest.approx(ideal_norm(norm, px))


def test_pinch_on_stack(rotated_family, rng):
    """A stack of matrices is pinched slice by slice."""
    stack = np.stack([random_matrix(5, rng) for _ in range(3)])
    out = pinch(rotated_family, stack)
    assert np.allclose(out[1], pinch(rotated_family, stack[1]))


def test_compress(rotated_family, rng):
    """compress(x, i, j) = p_i x p_j."""
    x = random_matrix(5, rng)
    expected = rotated_family.projection(1) @ x @ rotated_family.projection(0)
    assert np.allclose(compress(rotated_family, x, 1, 0), expected)


# ============================================================
# Superoperators
# ============================================================

def test_commutator_example(e1_in_c2, rng):
    """[L_z, P] with z = [[0, 1], [-1, 0]] is y -> [[0, -1], [-1, 0]] y p1."""
    S = commutator_super(J, e1_in_c2)
    y = random_matrix(2, rng)
    a = np.array([[0, -1], [-1, 0]])
    assert np.allclose(S(y), a @ y @ np.diag([1, 0]))


def test_commutator_of_block_diagonal_vanishes(rotated_family, rng):
    """[L_z, P] = 0 for block-diagonal z, including scalars."""
    z = block_diagonal_part(rotated_family, random_matrix(5, rng))
    zero = 0.0 * Identity(5)
    assert agree_on_basis(commutator_super(z, rotated_family), zero)
    assert agree_on_basis(commutator_super(2.5 * np.eye(5), rotated_family), zero)


def test_superop_algebra(rotated_family, rng):
    """Identity, delegation to pinch, and S - S = 0."""
    y = random_matrix(5, rng)
    S = LeftMul(random_matrix(5, rng)) @ RightMul(random_matrix(5, rng))
    assert np.allclose(Identity(5)(y), y)
    assert np.allclose(Pinch(rotated_family)(y), pinch(rotated_family, y))
    assert np.allclose((S - S)(y), 0.0)


def test_super_apply_dimension_mismatch():
    """Applying to a matrix of the wrong size raises DimensionMismatch."""
    with pytest.raises(DimensionMismatch):
        super_apply(Identity(3), np.eye(2))


def test_matricize_identity():
    """The identity matricizes to the n^2 identity."""
    assert np.allclose(matricize(Identity(3)), np.eye(9))


def test_super_norm_s2_values(e1_in_c2, rotated_family):
    """Identity and P have norm 1; the commutator example has norm 1."""
    assert super_norm_s2(Identity(4)) == pytest.approx(1.0)
    assert super_norm_s2(Pinch(rotated_family)) == pytest.approx(1.0)
    assert super_norm_s2(commutator_super(J, e1_in_c2)) == pytest.approx(1.0)


def test_adjoint_matches_matricization(rotated_family, rng):
    """The symbolic adjoint matricizes to the conjugate transpose."""
    S = LeftMul(random_matrix(5, rng)) @ Pinch(rotated_family) @ RightMul(random_matrix(5, rng))
    assert np.allclose(matricize(S.adjoint()), matricize(S).conj().T)


# ============================================================
# Norm estimates
# ============================================================

def test_estimate_identity():
    """The identity has estimate 1 in every norm."""
    for norm in (SymmetricNorm.operator(), SymmetricNorm.schatten(1), SymmetricNorm.ky_fan(2)):
        est = super_norm_estimate(Identity(3), norm, budget=5, restarts=0)
        assert est.lower == pytest.approx(1.0)
        assert ideal_norm(norm, est.witness) == pytest.approx(1.0)


def test_estimate_below_s2_norm(rotated_family, rng):
    """In Schatten-2 the certified lower bound never exceeds the exact norm."""
    S = commutator_super(random_matrix(5, rng), rotated_family)
    est = super_norm_estimate(S, SymmetricNorm.schatten(2), budget=20, seed=3)
    assert est.lower <= super_norm_s2(S) + 1e-10
    assert est.lower >= 0.99 * super_norm_s2(S)


def test_estimate_commutator_corners(rotated_family, rng):
    """The estimate dominates every corner |p_i x p_j|_op with i >= 1, j != i."""
    x = random_matrix(5, rng)
    est = super_norm_estimate(commutator_super(x, rotated_family), SymmetricNorm.schatten(1), budget=10, restarts=0)
    for i in (1, 2):
        for j in (0, 1, 2):
            if i != j:
                corner = np.linalg.norm(compress(rotated_family, x, i, j), 2)
                assert est.lower >= corner - 1e-10


# ============================================================
# Pinching equality
# ============================================================

def test_pinching_equal_same_family(rotated_family):
    """A family equals itself under the identity permutation."""
    sigma = pinching_equal(rotated_family, rotated_family)
    assert sigma is not None and sigma.is_identity


def test_pinching_equal_swapped_blocks():
    """Listing blocks 1 and 2 in swapped order gives the transposition (1 2)."""
    a = family_new([np.array([1.0, 0, 0]), np.array([0, 1.0, 0])])
    b = family_new([np.array([0, 1.0, 0]), np.array([1.0, 0, 0])])
    sigma = pinching_equal(a, b)
    assert sigma is not None
    assert sigma.sigma == (0, 2, 1)


def test_pinching_equal_different():
    """{e1} and {e2} in C^2 define different pinchings."""
    a = family_new([np.array([1.0, 0.0])])
    b = family_new([np.array([0.0, 1.0])])
    assert pinching_equal(a, b) is None
    assert not agree_on_basis(Pinch(a), Pinch(b))


# ============================================================
# Orbit points
# ============================================================

def test_conjugate_identity(rotated_family):
    """Conjugating by 1 gives the same point."""
    P = OrbitPoint.at_base(rotated_family)
    Q = conjugate(np.eye(5), P)
    assert agree_on_basis(Q.as_super(), P.as_super())


def test_orbit_point_projections(rotated_family, rng):
    """q_i = u p_i u*."""
    u = random_unitary(5, rng)
    Q = orbit_point(rotated_family, u)
    for i in range(rotated_family.w + 1):
        expected = u.matrix @ rotated_family.projection(i) @ u.matrix.conj().T
        assert np.allclose(Q.q(i), expected)


def test_reduce_to_base(rotated_family, rng):
    """Translating (a, a) gives P."""
    a = orbit_point(rotated_family, random_unitary(5, rng))
    reduced = reduce_to_base(a, a)
    assert agree_on_basis(reduced.as_super(), Pinch(rotated_family), tol=1e-10)
