import pytest
import numpy as np
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.errors import BadVariant, SingularFactor
from src.linalg.core import (
    UnitaryMatrix,
    expm_skew,
    random_matrix,
    random_skew_hermitian,
)
from src.norms.symmetric import SymmetricNorm, ideal_norm
from src.orbit.isotropy import (
    commutes_with_pinching,
    in_isotropy_G,
    in_isotropy_H,
    isotropy_displacement,
    off_block_displacement_bound,
    off_block_norm,
    random_block_skew,
    random_block_unitary,
)
from src.orbit.section import (
    blockwise_cross_section,
    cross_section,
    f_map,
    lipschitz_constant,
    lipschitz_radius,
    projection_section,
    reconjugation_residual,
    s_gap,
    section_residual,
)
from src.orbit.tangent import (
    DistinguishedBlock,
    DistinguishedP0,
    tangent_generator,
    tangent_project,
)
from src.pinching.family import family_from_blocks, off_block_part
from src.pinching.orbit_point import OrbitPoint, orbit_point, point_difference
from src.pinching.superop import (
    Compose,
    Identity,
    LeftMul,
    RightMul,
    Sum,
    commutator_super,
    matricize,
    super_norm_s2,
)


# ============================================================
# Fixtures
# ============================================================

@pytest.fixture
def rng():
    return np.random.default_rng(77)


@pytest.fixture
def fam():
    """Ranks 1 and 2 in C^5 on coordinate blocks; p0 spans e4, e5."""
    return family_from_blocks(5, [1, 2])


@pytest.fixture
def full_fam():
    """Two rank-one blocks and one rank-two block covering C^4 (p0 = 0)."""
    return family_from_blocks(4, [1, 1, 2])


def mixing_rotation(n, a, b, angle):
    """Rotation by angle in the (e_a, e_b) plane."""
    u = np.eye(n, dtype=complex)
    c, s = np.cos(angle), np.sin(angle)
    u[a, a], u[a, b], u[b, a], u[b, b] = c, -s, s, c
    return UnitaryMatrix(u)


# ============================================================
# Isotropy
# ============================================================

def test_identity_in_isotropy(fam):
    """1 is in G and commutes with P."""
    assert in_isotropy_G(fam, np.eye(5))
    assert commutes_with_pinching(fam, np.eye(5))


def test_block_exponential_in_isotropy(fam, rng):
    """The exponential of a block-diagonal skew matrix lies in G."""
    u = expm_skew(random_block_skew(fam, rng))
    assert in_isotropy_G(fam, u)
    assert commutes_with_pinching(fam, u)


def test_mixing_rotation_not_in_isotropy(fam):
    """Mixing R(p1) with R(p0) by 0.3 leaves G; the off-block norm is sin 0.3."""
    u = mixing_rotation(5, 0, 3, 0.3)
    assert not in_isotropy_G(fam, u)
    assert not commutes_with_pinching(fam, u)
    assert off_block_norm(fam, u) == pytest.approx(np.sin(0.3))


def test_h_isotropy_of_g_element(fam, rng):
    """Elements of G fix P with the identity permutation."""
    sigma = in_isotropy_H(fam, random_block_unitary(fam, rng))
    assert sigma is not None and sigma.is_identity


def test_h_isotropy_of_block_swap():
    """Swapping two equal-rank blocks gives that transposition."""
    fam = family_from_blocks(3, [1, 1])
    swap = UnitaryMatrix(np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex))
    sigma = in_isotropy_H(fam, swap)
    assert sigma is not None
    assert sigma.sigma == (0, 2, 1)


def test_h_isotropy_rejects_mixing():
    """Mixing two blocks by 0.3 does not fix P."""
    fam = family_from_blocks(3, [1, 1])
    assert in_isotropy_H(fam, mixing_rotation(3, 0, 1, 0.3)) is None


def test_off_block_displacement_bound(fam, rng):
    """|L_u P L_u* - P| <= 2 sum_{i != j} |p_i u p_j|_op."""
    for _ in range(5):
        u = expm_skew(random_skew_hermitian(5, rng, 0.4))
        assert isotropy_displacement(fam, u) <= off_block_displacement_bound(fam, u) + 1e-10


# ============================================================
# Tangent projection
# ============================================================

def test_tangent_of_zero(fam):
    """E(0) = 0."""
    zero = 0.0 * Identity(5)
    assert np.allclose(tangent_generator(fam, zero).matrix, 0.0)


def test_tangent_recovers_off_block_generator(fam, full_fam, rng):
    """z_hat([L_z, P]) = z for off-block z, for both variants."""
    for family in (fam, full_fam):
        z = off_block_part(family, random_skew_hermitian(family.dim, rng).matrix)
        variants = [DistinguishedBlock(index=1, vector=family.frame(1)[:, 0])]
        if family.p0_rank:
            variants.append(DistinguishedP0())
        for variant in variants:
            z_hat = tangent_generator(family, commutator_super(z, family), variant)
            assert np.max(np.abs(z_hat.matrix - z)) < 1e-10


def test_tangent_projection_idempotent(fam, rng):
    """E o E = E on a random superoperator."""
    S = Sum(tuple(Compose(LeftMul(random_matrix(5, rng)), RightMul(random_matrix(5, rng))) for _ in range(3)))
    for variant in (DistinguishedP0(), DistinguishedBlock(index=2, vector=fam.frame(2)[:, 1])):
        once = tangent_project(fam, S, variant).as_super
        twice = tangent_project(fam, once, variant).as_super
        assert np.allclose(matricize(twice), matricize(once), atol=1e-9)


def test_bad_variant(fam):
    """A vector outside R(p_i0) is rejected."""
    with pytest.raises(BadVariant):
        tangent_generator(fam, Identity(5), DistinguishedBlock(index=1, vector=np.eye(5)[:, 3]))
    with pytest.raises(BadVariant):
        tangent_generator(fam, Identity(5), DistinguishedBlock(index=3, vector=np.eye(5)[:, 0]))


# ============================================================
# Cross sections
# ============================================================

def test_f_map_at_base(fam):
    """f_map(i, P) = p_i."""
    P = OrbitPoint.at_base(fam)
    for i in range(fam.w + 1):
        assert np.allclose(f_map(fam, i, P), fam.projection(i))


def test_cross_section_at_base(fam):
    """sigma(P) = 1."""
    assert np.allclose(cross_section(fam, OrbitPoint.at_base(fam)).matrix, np.eye(5))


def test_cross_section_near_base(fam, rng):
    """sigma(Q) reconjugates P onto Q for Q near P."""
    for _ in range(5):
        Q = orbit_point(fam, expm_skew(random_skew_hermitian(5, rng, 0.05)))
        sigma = cross_section(fam, Q)
        assert reconjugation_residual(fam, sigma, Q) <= 1e-9
        assert section_residual(fam, sigma, Q) <= 1e-9


def test_cross_section_singular():
    """Swapping the two blocks of C^2 makes s(Q) = 0."""
    fam = family_from_blocks(2, [1, 1])
    Q = orbit_point(fam, UnitaryMatrix(np.array([[0, 1], [1, 0]], dtype=complex)))
    with pytest.raises(SingularFactor):
        cross_section(fam, Q)


def test_projection_section_too_far():
    """Orthogonal rank-one projections are at distance 1: no section."""
    with pytest.raises(SingularFactor):
        projection_section(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))


def test_blockwise_section(fam, rng):
    """The blockwise section satisfies psi p_i psi* = q_i inside the radius."""
    lip = lipschitz_constant(fam)
    Q = orbit_point(fam, expm_skew(random_skew_hermitian(5, rng, 0.25 * lip.radius)))
    assert section_residual(fam, blockwise_cross_section(fam, Q), Q) <= 1e-9


def test_s_estimate_near_base(fam, rng):
    """|s(Q) - 1|_op <= 3 |Q - P|_S2 near P."""
    P = OrbitPoint.at_base(fam)
    for _ in range(5):
        Q = orbit_point(fam, expm_skew(random_skew_hermitian(5, rng, 0.1)))
        assert s_gap(fam, Q) <= 3 * super_norm_s2(point_difference(Q, P)) + 1e-9


# ============================================================
# Lipschitz constants
# ============================================================

def test_lipschitz_constant_picks_largest_block():
    """Ranks (1, 2, 1, 1): block 1 is distinguished, C = 1, factor 2 w C = 6."""
    lip = lipschitz_constant(family_from_blocks(5, [2, 1, 1]))
    assert lip.distinguished == 1
    assert lip.rank_bound == 1
    assert lip.factor == 6.0
    assert lip.radius == pytest.approx(1 / 6)


def test_lipschitz_s2_bound(fam, rng):
    """|u p_i u* - p_i|_S2 <= 2 w C |L_u P L_u* - P|_S2."""
    lip = lipschitz_constant(fam)
    s2 = SymmetricNorm.schatten(2)
    P = OrbitPoint.at_base(fam)
    for _ in range(5):
        Q = orbit_point(fam, expm_skew(random_skew_hermitian(5, rng, 0.2)))
        disp = super_norm_s2(point_difference(Q, P))
        for i in range(fam.w + 1):
            assert ideal_norm(s2, f_map(fam, i, Q) - fam.projection(i)) <= lip.factor * disp + 1e-8


def test_lipschitz_radius_reports_distinguished_block():
    """Ranks (0, 2, 1, 1) in C^4: radius 1/6 with block 1 distinguished."""
    radius, distinguished = lipschitz_radius(family_from_blocks(4, [2, 1, 1]))
    assert radius == pytest.approx(1 / 6)
    assert distinguished == 1
