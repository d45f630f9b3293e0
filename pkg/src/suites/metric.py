"""Checks for the distance bounds and the horizontal lifting of orbit curves."""
import numpy as np

from src.finsler.distance import distance_bounds, pair_distance_bounds
from src.finsler.lifting import PARTITIONS, SmoothOrbitCurve, lift_convergence
from src.finsler.quotient import SolverConfig
from src.linalg.core import SkewHermitian, expm_skew, op_norm, random_skew_hermitian, random_unitary
from src.norms.symmetric import SymmetricNorm, ideal_norm
from src.pinching.family import off_block_part
from src.pinching.orbit_point import OrbitPoint, conjugate, orbit_point
from src.suites.base import Measurement, Suite, TrialContext, check

SLOPE_CURVES = 10


def _off_block_generator(ctx: TrialContext, size: float) -> SkewHermitian:
    z = off_block_part(ctx.fam, random_skew_hermitian(ctx.fam.dim, ctx.rng).matrix)
    scale = op_norm(z)
    return SkewHermitian.project(z * (size / scale if scale > 0 else 0.0))


def _point(ctx: TrialContext, scale: float = 0.4) -> OrbitPoint:
    return orbit_point(ctx.fam, expm_skew(random_skew_hermitian(ctx.fam.dim, ctx.rng, scale)))


@check("distance: lower bound <= upper bound")
def distance_lower_le_upper(ctx: TrialContext) -> Measurement:
    bounds = distance_bounds(ctx.fam, _point(ctx), ctx.norm, ctx.solver, seed=ctx.seed())
    return Measurement(bounds.lower, bounds.upper, 1e-9)


@check("distance: d(P, e^z . P) <= |z|_Phi")
def distance_upper_le_generator(ctx: TrialContext) -> Measurement:
    z = _off_block_generator(ctx, 0.3)
    Q = orbit_point(ctx.fam, expm_skew(z))
    bounds = distance_bounds(ctx.fam, Q, ctx.norm, ctx.solver, seed=ctx.seed())
    return Measurement(bounds.upper, ideal_norm(ctx.norm, z.matrix), 1e-9)


@check("distance: bounds are invariant under the unitary action")
def distance_isometric(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    Q = _point(ctx)
    v = random_unitary(fam.dim, ctx.rng)
    cfg = SolverConfig(restarts=0, distance_iters=ctx.solver.distance_iters)
    direct = distance_bounds(fam, Q, ctx.norm, cfg)
    moved = pair_distance_bounds(fam, conjugate(v, OrbitPoint.at_base(fam)), conjugate(v, Q), ctx.norm, cfg)
    drift = max(abs(direct.lower - moved.lower), abs(direct.upper - moved.upper))
    return Measurement(drift, 0.0, 1e-6)


@check("distance: more restarts never raise the upper bound")
def distance_restart_monotone(ctx: TrialContext) -> Measurement:
    Q = _point(ctx, 0.8)
    seed = ctx.seed()
    single = distance_bounds(ctx.fam, Q, ctx.norm, SolverConfig(restarts=0, distance_iters=ctx.solver.distance_iters), seed)
    more = distance_bounds(ctx.fam, Q, ctx.norm, ctx.solver, seed)
    return Measurement(more.upper, single.upper, 1e-12)


@check("distance: d(P, Q2) <= d(P, Q1) + d(Q1, Q2)")
def distance_triangle(ctx: TrialContext) -> Measurement:
    fam = ctx.fam
    q1, q2 = _point(ctx, 0.3), _point(ctx, 0.3)
    direct = distance_bounds(fam, q2, ctx.norm, ctx.solver, seed=ctx.seed())
    first = distance_bounds(fam, q1, ctx.norm, ctx.solver, seed=ctx.seed())
    second = pair_distance_bounds(fam, q1, q2, ctx.norm, ctx.solver, seed=ctx.seed())
    return Measurement(direct.lower, first.upper + second.upper, 1e-9)


# ============================================================
# Horizontal lifting
# ============================================================

@check("lifting: endpoint gap of the piecewise lift decays like 1/n on every sampled curve")
def lift_convergence_slope(ctx: TrialContext) -> Measurement:
    slopes = []
    for _ in range(SLOPE_CURVES):
        target = SmoothOrbitCurve.random(ctx.fam, ctx.rng)
        _, slope = lift_convergence(target, SymmetricNorm.schatten(2), PARTITIONS, ctx.solver, fine_nodes=64)
        slopes.append(slope)
    worst = max(slopes, key=lambda s: abs(s - 1.0))
    detail = f"slopes {min(slopes):.4f} to {max(slopes):.4f} over {SLOPE_CURVES} curves"
    return Measurement(abs(worst - 1.0), 0.3, 0.0, detail=detail)


@check("lifting: gap within the inductive bound and length within epsilon of the target")
def lift_within_bounds(ctx: TrialContext) -> Measurement:
    target = SmoothOrbitCurve.random(ctx.fam, ctx.rng)
    table, _ = lift_convergence(target, ctx.norm, (4, 8), ctx.solver, fine_nodes=32)
    excess = np.maximum(
        table["endpoint_gap"] - table["inductive_bound"],
        table["lifted_length"] - table["target_length"] - table["epsilon"],
    )
    return Measurement(float(excess.max()), 0.0, 1e-9)


DISTANCE_SUITE = Suite(
    name="distance",
    checks={
        "distance_lower_le_upper": distance_lower_le_upper,
        "distance_upper_le_generator": distance_upper_le_generator,
        "distance_isometric": distance_isometric,
        "distance_restart_monotone": distance_restart_monotone,
        "distance_triangle": distance_triangle,
        "lift_convergence_slope": lift_convergence_slope,
        "lift_within_bounds": lift_within_bounds,
    },
    once=frozenset({"lift_convergence_slope", "lift_within_bounds"}),
    solver=SolverConfig(restarts=1, distance_iters=60),
)
