"""Checks for isotropy, tangent projection, cross sections, Lipschitz constants and the covering fiber."""
from itertools import combinations

import numpy as np

from src.linalg.core import dagger, expm_skew, max_abs, op_norm, random_matrix, random_skew_hermitian, random_unitary
from src.norms.symmetric import SymmetricNorm, ideal_norm
from src.orbit.covering import fiber, h_decomposition, min_fiber_separation, permutation_operator, separation_witness
from src.orbit.isotropy import commutes_with_pinching, in_isotropy_G, off_block_norm, random_block_unitary
from src.orbit.permutation import count_rank_preserving, rank_preserving_permutations
from src.orbit.section import (
    blockwise_cross_section,
    compact_displacement_lower,
    cross_section,
    f_map,
    lipschitz_constant,
    lipschitz_radius,
    reconjugation_residual,
    s_gap,
    section_residual,
    two_point_s_gap,
)
from src.orbit.tangent import DistinguishedBlock, DistinguishedP0, tangent_generator, tangent_project
from src.pinching.estimate import super_norm_estimate
from src.pinching.family import ProjectionFamily, family_from_blocks, off_block_part
from src.pinching.orbit_point import OrbitPoint, orbit_point, point_difference
from src.pinching.superop import Compose, LeftMul, RightMul, Sum, commutator_super, matricize, super_norm_s2
from src.suites.base import Measurement, Suite, TrialContext, check


def _variants(fam: ProjectionFamily):
    return [DistinguishedP0(), DistinguishedBlock(index=1, vector=fam.frame(1)[:, 0])]


def _displacement(fam: ProjectionFamily, Q: OrbitPoint) -> float:
    return super_norm_s2(point_difference(Q, OrbitPoint.at_base(fam)))


def _near_point(ctx: TrialContext, t_max: float = 0.1) -> OrbitPoint:
    z = random_skew_hermitian(ctx.fam.dim, ctx.rng)
    return orbit_point(ctx.fam, expm_skew(t_max * ctx.rng.random() * z.matrix))


def _any_point(ctx: TrialContext) -> OrbitPoint:
    """Near P half the time, Haar-random otherwise."""
    if ctx.rng.random() < 0.5:
        return _near_point(ctx, t_max=0.5)
    return orbit_point(ctx.fam, random_unitary(ctx.fam.dim, ctx.rng))


# ============================================================
# Isotropy and tangent projection
# ============================================================

@check("isotropy: block-diagonal iff L_u commutes with P")
def isotropy_characterization(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    u = random_block_unitary(fam, ctx.rng) if ctx.rng.random() < 0.5 else random_unitary(fam.dim, ctx.rng)
    disagree = in_isotropy_G(fam, u) != commutes_with_pinching(fam, u)
    return Measurement(float(disagree), 0.0, 0.0)


@check("commutator: |[L_x, P]| >= |p_i x p_j|_op for i >= 1, j != i")
def commutator_lower_bound(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    x = random_matrix(fam.dim, ctx.rng)
    corners = max(
        op_norm(fam.projection(i) @ x @ fam.projection(j))
        for i in range(1, fam.w + 1)
        for j in range(fam.w + 1)
        if i != j
    )
    est = super_norm_estimate(commutator_super(x, fam), ctx.norm, budget=10, seed=ctx.seed(), restarts=0)
    return Measurement(corners, est.lower, 1e-10)


@check("commutator: |[L_x, P]| >= |x (1 - p0)| in the operator-norm ideal when p_i x p_i = 0")
def compact_lower_bound(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    x = random_matrix(fam.dim, ctx.rng)
    x = x - sum(fam.projection(i) @ x @ fam.projection(i) for i in range(1, fam.w + 1))
    est = super_norm_estimate(commutator_super(x, fam), SymmetricNorm.operator(), budget=10, seed=ctx.seed(), restarts=0)
    return Measurement(op_norm(x @ fam.support), est.lower, 1e-10)


def _random_superop(ctx: TrialContext):
    n = ctx.fam.dim
    return Sum(tuple(
        Compose(LeftMul(random_matrix(n, ctx.rng)), RightMul(random_matrix(n, ctx.rng))) for _ in range(3)
    ))


@check("tangent projection: E o E = E for both variants")
def tangent_idempotent(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    S = _random_superop(ctx)
    worst = 0.0
    for variant in _variants(fam):
        once = tangent_project(fam, S, variant).as_super
        twice = tangent_project(fam, once, variant).as_super
        worst = max(worst, max_abs(matricize(twice) - matricize(once)))
    return Measurement(worst, 0.0, 1e-9)


@check("tangent projection: z_hat([L_z, P]) = z - sum p_i z p_i")
def tangent_recovers_generator(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    z = random_skew_hermitian(fam.dim, ctx.rng).matrix
    target = off_block_part(fam, z)
    worst = max(
        max_abs(tangent_generator(fam, commutator_super(z, fam), v).matrix - target) for v in _variants(fam)
    )
    return Measurement(worst, 0.0, 1e-10)


# ============================================================
# Cross sections
# ============================================================

@check("cross section: sigma(Q) P sigma(Q)* = Q and sigma p_i sigma* = q_i")
def section_reconjugation(ctx: TrialContext) -> Measurement:
    Q = _near_point(ctx)
    sigma = cross_section(ctx.fam, Q)
    residual = max(reconjugation_residual(ctx.fam, sigma, Q), section_residual(ctx.fam, sigma, Q))
    return Measurement(residual, 0.0, 1e-9)


@check("cross section: q_i does not depend on the witness")
def f_map_well_defined(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    u = random_unitary(fam.dim, ctx.rng)
    g = random_block_unitary(fam, ctx.rng)
    a, b = orbit_point(fam, u), orbit_point(fam, u @ g)
    worst = max(max_abs(f_map(fam, i, a) - f_map(fam, i, b)) for i in range(fam.w + 1))
    return Measurement(worst, 0.0, 1e-10)


@check("cross section: |s(Q) - 1|_op <= 3 |Q - P|_S2 for Q = exp(t z) P, t <= 0.1")
def s_estimate(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    Q = _near_point(ctx)
    return Measurement(s_gap(fam, Q), 3.0 * _displacement(fam, Q), 1e-9)


@check("cross section: |u p0 u* - p0|_op <= 2 |Q - P|_S2")
def p0_estimate(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    Q = _any_point(ctx)
    return Measurement(op_norm(f_map(fam, 0, Q) - fam.projection(0)), 2.0 * _displacement(fam, Q), 1e-8)


@check("cross section: |s(Q_u) - s(Q_v)|_op <= 3 |Q_u - Q_v|_S2")
def two_point_estimate(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    a, b = _near_point(ctx, 0.3), _near_point(ctx, 0.3)
    return Measurement(two_point_s_gap(fam, a, b), 3.0 * super_norm_s2(point_difference(a, b)), 1e-9)


@check("compact witnesses: the certified lower bound dominates |(Q - P)(1 - p0)|_op")
def compact_witness(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    Q = _any_point(ctx)
    at_support = op_norm(point_difference(Q, OrbitPoint.at_base(fam)).apply(fam.support))
    return Measurement(compact_displacement_lower(fam, Q, seed=ctx.seed()), at_support, 1e-10, relation="ge")


@check("cross section: blockwise section reproduces q_i inside the Lipschitz radius")
def blockwise_section(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    lip = lipschitz_constant(fam)
    scale = 0.2 if np.isinf(lip.radius) else 0.25 * lip.radius
    z = random_skew_hermitian(fam.dim, ctx.rng, scale=scale)
    Q = orbit_point(fam, expm_skew(z))
    sigma = blockwise_cross_section(fam, Q)
    return Measurement(section_residual(fam, sigma, Q), 0.0, 1e-9, detail=f"radius {lip.radius:.6g}")


# ============================================================
# Lipschitz constants
# ============================================================

@check("Lipschitz: |u p_i u* - p_i|_S2 <= 2 w C |L_u P L_u* - P|_S2")
def lipschitz_s2(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    lip = lipschitz_constant(fam)
    Q = _any_point(ctx)
    s2 = SymmetricNorm.schatten(2)
    moved = max(ideal_norm(s2, f_map(fam, i, Q) - fam.projection(i)) for i in range(fam.w + 1))
    detail = f"distinguished block {lip.distinguished}, C = {lip.rank_bound}, w = {lip.w}"
    return Measurement(moved, lip.factor * _displacement(fam, Q), 1e-8, detail=detail)


@check("Lipschitz: |u p0 u* - p0|_op <= 2 |L_u P L_u* - P|")
def lipschitz_p0(ctx: TrialContext) -> Measurement:
    return p0_estimate(ctx)


@check("Lipschitz: trust radius 1/(2 w C) is positive")
def trust_radius(ctx: TrialContext) -> Measurement:
    radius, distinguished = lipschitz_radius(ctx.fam)
    return Measurement(radius, 0.0, 0.0, relation="ge", detail=f"distinguished block {distinguished}")


# ============================================================
# Covering fiber
# ============================================================

@check("fiber: cardinality is the product of factorials of the rank classes")
def fiber_cardinality(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    Q = orbit_point(fam, random_unitary(fam.dim, ctx.rng))
    points = fiber(fam, Q)
    expected = count_rank_preserving(fam.ranks)
    return Measurement(float(abs(len(points) - expected)), 0.0, 0.0, detail=f"{len(points)} points")


@check("fiber: distinct fiber points are at least 1 apart")
def fiber_separation(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    Q = orbit_point(fam, random_unitary(fam.dim, ctx.rng))
    sep = min_fiber_separation(fiber(fam, Q))
    return Measurement(min(sep, 1e300), 1.0, 1e-9, relation="ge")


@check("fiber: rank-one witness separates distinct fiber points by 1")
def fiber_witness(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    Q = orbit_point(fam, random_unitary(fam.dim, ctx.rng))
    points = fiber(fam, Q)
    worst = 1.0
    for a, b in combinations(points, 2):
        y, _ = separation_witness(a, b)
        worst = min(worst, op_norm(point_difference(a, b).apply(y)) / op_norm(y))
    return Measurement(worst, 1.0, 1e-9, relation="ge")


@check("fiber: r_sigma p_i r_sigma* = p_sigma(i)")
def permutation_conjugation(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    worst = 0.0
    for sigma in rank_preserving_permutations(fam.ranks):
        r = permutation_operator(fam, sigma).matrix
        for i in range(fam.w + 1):
            worst = max(worst, max_abs(r @ fam.projection(i) @ dagger(r) - fam.projection(sigma(i))))
    return Measurement(worst, 0.0, 1e-10)


@check("fiber: every u fixing P factors as r_sigma g with g block diagonal")
def isotropy_factorization(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    perms = rank_preserving_permutations(fam.ranks)
    sigma = perms[int(ctx.rng.integers(len(perms)))]
    u = permutation_operator(fam, sigma) @ random_block_unitary(fam, ctx.rng)
    found = h_decomposition(fam, u)
    if found is None or found[0] != sigma:
        return Measurement(np.inf, 0.0, 1e-9, detail="permutation not recovered")
    return Measurement(off_block_norm(fam, found[1]), 0.0, 1e-9, detail=str(sigma))


@check("fiber: cosets r_sigma G are at operator distance >= 1")
def coset_separation(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    perms = rank_preserving_permutations(fam.ranks)
    worst = np.inf
    for s, t in combinations(perms[:6], 2):
        a = permutation_operator(fam, s) @ random_block_unitary(fam, ctx.rng)
        b = permutation_operator(fam, t) @ random_block_unitary(fam, ctx.rng)
        worst = min(worst, op_norm(a.matrix - b.matrix))
    return Measurement(min(worst, 1e300), 1.0, 1e-9, relation="ge")


def equal_rank_family(config, rng) -> ProjectionFamily:
    """Configured blocks in the standard basis; fiber checks need no random frame."""
    return family_from_blocks(config.dimension, config.blocks)


SECTION_SUITE = Suite(
    name="section",
    checks={
        "section_reconjugation": section_reconjugation,
        "f_map_well_defined": f_map_well_defined,
        "s_estimate": s_estimate,
        "p0_estimate": p0_estimate,
        "two_point_estimate": two_point_estimate,
        "compact_witness": compact_witness,
        "blockwise_section": blockwise_section,
    },
)

LIPSCHITZ_SUITE = Suite(
    name="lipschitz",
    checks={
        "lipschitz_radius": trust_radius,
        "lipschitz_s2": lipschitz_s2,
        "lipschitz_p0": lipschitz_p0,
        "blockwise_section": blockwise_section,
    },
    once=frozenset({"lipschitz_radius"}),
)

FIBER_SUITE = Suite(
    name="fiber",
    checks={
        "fiber_cardinality": fiber_cardinality,
        "fiber_separation": fiber_separation,
        "fiber_witness": fiber_witness,
        "permutation_conjugation": permutation_conjugation,
        "isotropy_factorization": isotropy_factorization,
        "coset_separation": coset_separation,
    },
    once=frozenset({"permutation_conjugation"}),
    family=equal_rank_family,
)
