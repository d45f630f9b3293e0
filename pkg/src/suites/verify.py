"""The full invariant sweep: pinching axioms plus the cheaper geometry and metric checks."""
import numpy as np

from src.finsler.curves import PiecewiseExpCurve, curve_length_group, curve_length_orbit
from src.finsler.distance import distance_bounds
from src.finsler.quotient import SolverConfig, quotient_norm
from src.linalg.core import (
    SkewHermitian,
    dagger,
    expm_skew,
    max_abs,
    op_norm,
    random_matrix,
    random_skew_hermitian,
    random_unitary,
)
from src.norms.symmetric import SymmetricNorm, ideal_norm
from src.orbit.isotropy import isotropy_displacement, off_block_displacement_bound, random_block_skew
from src.pinching.equality import pinching_equal
from src.pinching.family import block_diagonal_part, family_from_blocks, family_new, off_block_part, pinch
from src.pinching.orbit_point import orbit_point
from src.pinching.superop import Pinch, agree_on_basis, commutator_super, super_norm_s2
from src.suites import geometry
from src.suites.base import Measurement, Suite, TrialContext, check


# ============================================================
# Pinching axioms
# ============================================================

@check("pinching: P o P = P")
def pinching_idempotent(ctx: TrialContext) -> Measurement:
    x = random_matrix(ctx.fam.dim, ctx.rng)
    px = pinch(ctx.fam, x)
    return Measurement(max_abs(pinch(ctx.fam, px) - px), 0.0, 1e-12)


@check("pinching: <P(x), y> = <x, P(y)>")
def pinching_self_adjoint(ctx: TrialContext) -> Measurement:
    x, y = random_matrix(ctx.fam.dim, ctx.rng), random_matrix(ctx.fam.dim, ctx.rng)
    lhs = np.trace(dagger(y) @ pinch(ctx.fam, x))
    rhs = np.trace(dagger(pinch(ctx.fam, y)) @ x)
    return Measurement(float(abs(lhs - rhs)), 0.0, 1e-10)


@check("pinching: P(x)* = P(x*)")
def pinching_star(ctx: TrialContext) -> Measurement:
    x = random_matrix(ctx.fam.dim, ctx.rng)
    return Measurement(max_abs(dagger(pinch(ctx.fam, x)) - pinch(ctx.fam, dagger(x))), 0.0, 1e-12)


@check("pinching: |P(x)|_Phi <= |x|_Phi")
def pinching_contraction(ctx: TrialContext) -> Measurement:
    x = random_matrix(ctx.fam.dim, ctx.rng)
    return Measurement(ideal_norm(ctx.norm, pinch(ctx.fam, x)), ideal_norm(ctx.norm, x), 1e-10)


@check("pinching: |P| = 1 on Schatten-2")
def pinching_unit_norm(ctx: TrialContext) -> Measurement:
    return Measurement(abs(super_norm_s2(Pinch(ctx.fam)) - 1.0), 0.0, 1e-9)


@check("pinching: P(a x b) = a P(x) b for block-diagonal a, b")
def pinching_bimodule(ctx: TrialContext) -> Measurement:
    fam, n = ctx.fam, ctx.fam.dim
    a = block_diagonal_part(fam, random_matrix(n, ctx.rng))
    b = block_diagonal_part(fam, random_matrix(n, ctx.rng))
    x = random_matrix(n, ctx.rng)
    return Measurement(max_abs(pinch(fam, a @ x @ b) - a @ pinch(fam, x) @ b), 0.0, 1e-10)


def _random_composition(n: int, rng) -> list[int]:
    """Block sizes summing to at most n; p0 may be nonzero."""
    total = int(rng.integers(1, n + 1))
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, total), size=int(rng.integers(0, total)), replace=False))
    edges = [0, *cuts, total]
    return [b - a for a, b in zip(edges, edges[1:])]


@check("pinching: two families define the same P iff P agrees on every matrix unit")
def pinching_equality_oracle(ctx: TrialContext) -> Measurement:
    n = 4
    fam_a = family_from_blocks(n, _random_composition(n, ctx.rng), basis=random_unitary(n, ctx.rng).matrix)
    if ctx.rng.random() < 0.5:
        # same ranges, blocks shuffled and rotated internally
        order = [int(i) + 1 for i in ctx.rng.permutation(fam_a.w)]
        frames = [fam_a.frame(i) @ random_unitary(fam_a.ranks[i], ctx.rng).matrix for i in order]
        fam_b = family_new(frames, dim=n)
    else:
        fam_b = family_from_blocks(n, _random_composition(n, ctx.rng), basis=random_unitary(n, ctx.rng).matrix)
    found = pinching_equal(fam_a, fam_b) is not None
    oracle = agree_on_basis(Pinch(fam_a), Pinch(fam_b), tol=1e-8)
    return Measurement(float(found != oracle), 0.0, 0.0)


@check("commutator: |[L_z, P]| <= 2 |z|_op")
def commutator_upper_bound(ctx: TrialContext) -> Measurement:
    z = random_skew_hermitian(ctx.fam.dim, ctx.rng)
    return Measurement(super_norm_s2(commutator_super(z.matrix, ctx.fam)), 2.0 * op_norm(z.matrix), 1e-10)


@check("isotropy: |L_u P L_u* - P| <= 2 sum_{i != j} |p_i u p_j|_op")
def off_block_displacement(ctx: TrialContext) -> Measurement:
    u = expm_skew(random_skew_hermitian(ctx.fam.dim, ctx.rng, 0.5))
    return Measurement(isotropy_displacement(ctx.fam, u), off_block_displacement_bound(ctx.fam, u), 1e-10)


# ============================================================
# Quotient metric
# ============================================================

@check("quotient norm: never above |z|_Phi")
def quotient_below_plain(ctx: TrialContext) -> Measurement:
    z = random_skew_hermitian(ctx.fam.dim, ctx.rng)
    result = quotient_norm(ctx.fam, z, ctx.norm, ctx.solver)
    return Measurement(result.value, ideal_norm(ctx.norm, z.matrix), 1e-10)


@check("quotient norm: Schatten-2 value is the off-block Schatten-2 norm")
def quotient_s2_oracle(ctx: TrialContext) -> Measurement:
    s2 = SymmetricNorm.schatten(2)
    z = random_skew_hermitian(ctx.fam.dim, ctx.rng)
    value = quotient_norm(ctx.fam, z, s2).value
    exact = float(np.linalg.norm(off_block_part(ctx.fam, z.matrix)))
    # no block-diagonal shift does better
    y = random_block_skew(ctx.fam, ctx.rng).matrix
    shifted = ideal_norm(s2, z.matrix + y)
    return Measurement(max(abs(value - exact), value - shifted), 0.0, 1e-12)


@check("quotient norm: invariant under block-diagonal shifts of z")
def quotient_shift_invariance(ctx: TrialContext) -> Measurement:
    fam = family_from_blocks(ctx.fam.dim, ctx.config.blocks)
    z = SkewHermitian.project(off_block_part(fam, random_skew_hermitian(fam.dim, ctx.rng).matrix))
    w = random_block_skew(fam, ctx.rng)
    base = quotient_norm(fam, z, ctx.norm, ctx.solver).value
    w_norm = ideal_norm(ctx.norm, w.matrix)
    if w_norm > 0:
        w = w * (3.0 * ideal_norm(ctx.norm, z.matrix) / w_norm)
    shifted = quotient_norm(fam, z + w, ctx.norm, ctx.solver).value
    return Measurement(abs(base - shifted), 0.0, 1e-9)


@check("orbit length: projected curve is never longer than the lifted one")
def orbit_length_contractive(ctx: TrialContext) -> Measurement:
    n = ctx.fam.dim
    curve = PiecewiseExpCurve(
        base=random_unitary(n, ctx.rng),
        segments=((0.5, random_skew_hermitian(n, ctx.rng, 0.5)), (0.5, random_skew_hermitian(n, ctx.rng, 0.5))),
    )
    orbit = curve_length_orbit(ctx.fam, curve, ctx.norm, ctx.solver)
    return Measurement(orbit.value, curve_length_group(curve, ctx.norm), 1e-9 + orbit.error)


@check("distance: lower bound <= upper bound")
def distance_consistent(ctx: TrialContext) -> Measurement:
    z = random_skew_hermitian(ctx.fam.dim, ctx.rng, scale=0.5)
    Q = orbit_point(ctx.fam, expm_skew(z))
    bounds = distance_bounds(ctx.fam, Q, ctx.norm, SolverConfig(restarts=0, distance_iters=30), seed=ctx.seed())
    return Measurement(bounds.lower, bounds.upper, 1e-9)


VERIFY_SUITE = Suite(
    name="verify",
    checks={
        "pinching_idempotent": pinching_idempotent,
        "pinching_self_adjoint": pinching_self_adjoint,
        "pinching_star": pinching_star,
        "pinching_contraction": pinching_contraction,
        "pinching_unit_norm": pinching_unit_norm,
        "pinching_bimodule": pinching_bimodule,
        "pinching_equality_oracle": pinching_equality_oracle,
        "commutator_upper_bound": commutator_upper_bound,
        "off_block_displacement": off_block_displacement,
        "isotropy_characterization": geometry.isotropy_characterization,
        "commutator_lower_bound": geometry.commutator_lower_bound,
        "compact_lower_bound": geometry.compact_lower_bound,
        "tangent_idempotent": geometry.tangent_idempotent,
        "tangent_recovers_generator": geometry.tangent_recovers_generator,
        "section_reconjugation": geometry.section_reconjugation,
        "s_estimate": geometry.s_estimate,
        "lipschitz_s2": geometry.lipschitz_s2,
        "quotient_below_plain": quotient_below_plain,
        "quotient_s2_oracle": quotient_s2_oracle,
        "quotient_shift_invariance": quotient_shift_invariance,
        "orbit_length_contractive": orbit_length_contractive,
        "distance_consistent": distance_consistent,
    },
    once=frozenset({"pinching_unit_norm"}),
    solver=SolverConfig(max_iter=500, nodes=4),
)
