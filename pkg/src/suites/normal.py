"""Checks for unitary orbits of normal operators and the topology-gap sequence."""
from functools import lru_cache

import numpy as np
import pandas as pd

from src.config.settings import ExperimentConfig
from src.linalg.core import expm_skew, random_skew_hermitian, random_unitary
from src.norms.symmetric import parse_norm
from src.normal.sequences import Scenario, swap_sequence_table, topology_gap_table
from src.normal.spectral import (
    NormalOperatorSpec,
    gap_inequality_check,
    isotropy_coincidence,
    normal_from_spec,
    orbit_element_form,
)
from src.orbit.isotropy import random_block_unitary
from src.suites.base import Measurement, Suite, TrialContext, check


def _spec(ctx: TrialContext) -> NormalOperatorSpec:
    return NormalOperatorSpec(eigenvalues=ctx.config.resolved_eigenvalues(), fam=ctx.fam)


def _unitary(ctx: TrialContext):
    n = ctx.fam.dim
    if ctx.rng.random() < 0.5:
        return expm_skew(random_skew_hermitian(n, ctx.rng, 0.2))
    return random_unitary(n, ctx.rng)


# ============================================================
# Normal orbits
# ============================================================

@check("normal orbit: p_i (u a - a u) p_j = (lambda_j - lambda_i) p_i u p_j")
def gap_identity(ctx: TrialContext) -> Measurement:
    report = gap_inequality_check(_spec(ctx), _unitary(ctx), ctx.norm)
    return Measurement(report.max_identity_residual, 0.0, 1e-11)


@check("normal orbit: |p_i u p_j|_Phi <= |u a - a u|_Phi / |lambda_i - lambda_j|")
def gap_inequality(ctx: TrialContext) -> Measurement:
    report = gap_inequality_check(_spec(ctx), _unitary(ctx), ctx.norm)
    return Measurement(report.max_ratio, 1.0, 1e-9)


@check("normal orbit: |u a u* - a|_Phi <= 2 |a| |u - 1|_Phi")
def orbit_element_bound(ctx: TrialContext) -> Measurement:
    lhs, bound = orbit_element_form(_spec(ctx), _unitary(ctx), ctx.norm)
    return Measurement(lhs, bound, 1e-10)


@check("normal orbit: u commutes with a iff u is block diagonal")
def isotropy_agreement(ctx: TrialContext) -> Measurement:
    spec = _spec(ctx)
    u = random_block_unitary(spec.fam, ctx.rng) if ctx.rng.random() < 0.5 else random_unitary(spec.dim, ctx.rng)
    commutes, block_diagonal = isotropy_coincidence(spec, u)
    return Measurement(float(commutes != block_diagonal), 0.0, 0.0)


def _swap_table(ctx: TrialContext) -> pd.DataFrame | None:
    spec = _spec(ctx)
    if spec.fam.w < 2:
        return None
    return swap_sequence_table(spec, ctx.norm)


@check("swap sequence: |u_n a u_n* - a|_op = |lambda_{n+1} - lambda_{n+2}|")
def swap_gap(ctx: TrialContext) -> Measurement:
    table = _swap_table(ctx)
    if table is None:
        return Measurement(0.0, 0.0, 0.0, detail="fewer than two blocks")
    return Measurement(float((table["a_disp_op"] - table["gap"]).abs().max()), 0.0, 1e-10)


@check("swap sequence: u_n P u_n* stays at distance >= 1 from P")
def swap_stays_apart(ctx: TrialContext) -> Measurement:
    table = _swap_table(ctx)
    if table is None:
        return Measurement(1.0, 1.0, 0.0, relation="ge", detail="fewer than two blocks")
    worst = float(np.minimum(table["p_disp_lower"], table["p_disp_s2"]).min())
    return Measurement(worst, 1.0, 1e-9, relation="ge")


def normal_tables(config: ExperimentConfig) -> dict[str, pd.DataFrame]:
    """Swap sequence on coordinate blocks with the configured eigenvalues."""
    if len(config.blocks) < 2:
        return {}
    spec = normal_from_spec(
        config.resolved_eigenvalues(),
        multiplicities=config.blocks,
        kernel_rank=config.dimension - sum(config.blocks),
    )
    return {"swap sequence": swap_sequence_table(spec, parse_norm(config.norm))}


NORMAL_SUITE = Suite(
    name="normal-orbit",
    checks={
        "gap_identity": gap_identity,
        "gap_inequality": gap_inequality,
        "orbit_element_bound": orbit_element_bound,
        "isotropy_agreement": isotropy_agreement,
        "swap_gap": swap_gap,
        "swap_stays_apart": swap_stays_apart,
    },
    once=frozenset({"swap_gap", "swap_stays_apart"}),
    tables=normal_tables,
)


# ============================================================
# Topology gap
# ============================================================

@lru_cache(maxsize=16)
def _gap_table(norm: str, k_max: int, scenario: Scenario) -> pd.DataFrame:
    return topology_gap_table(parse_norm(norm), k_max, scenario)


def _ctx_tables(ctx: TrialContext) -> list[pd.DataFrame]:
    return [_gap_table(ctx.config.norm, ctx.config.k_max, scenario) for scenario in Scenario]


def _worst(ctx: TrialContext, excess) -> float:
    return max(float(excess(table).max()) for table in _ctx_tables(ctx))


@check("topology gap: |z_k|_Phi = 1 in both scenarios")
def zk_unit_norm(ctx: TrialContext) -> Measurement:
    return Measurement(_worst(ctx, lambda t: (t["z_phi"] - 1.0).abs()), 0.0, 1e-12)


@check("topology gap: |e^{z_k} . P - P| <= 2 (e^{|z_k|_op} - 1) in both scenarios")
def zk_displacement_bound(ctx: TrialContext) -> Measurement:
    return Measurement(_worst(ctx, lambda t: t["displacement"] - t["bound"]), 0.0, 1e-9)


@check("topology gap: |e^{z_k} . P - P| <= 2 |e^{z_k} - 1|_op in both scenarios")
def zk_group_bound(ctx: TrialContext) -> Measurement:
    return Measurement(_worst(ctx, lambda t: t["displacement"] - t["group_bound"]), 0.0, 1e-9)


@check("topology gap: displacement of e^{z_k} is nonincreasing in k in both scenarios")
def zk_monotone(ctx: TrialContext) -> Measurement:
    tables = _ctx_tables(ctx)
    rise = max(
        (float(np.diff(t["displacement"].to_numpy()).max()) for t in tables if len(t) > 1),
        default=0.0,
    )
    detail = "a_2k bounded, |z_k|_op constant" if tables[0].attrs.get("degenerate") else ""
    return Measurement(rise, 0.0, 1e-9, detail=detail)


def topology_tables(config: ExperimentConfig) -> dict[str, pd.DataFrame]:
    """Both scenarios of the z_k sequence."""
    norm = parse_norm(config.norm)
    return {
        f"z_k ({scenario.value})": topology_gap_table(norm, config.k_max, scenario)
        for scenario in Scenario
    }


TOPOLOGY_SUITE = Suite(
    name="topology-gap",
    checks={
        "zk_unit_norm": zk_unit_norm,
        "zk_displacement_bound": zk_displacement_bound,
        "zk_group_bound": zk_group_bound,
        "zk_monotone": zk_monotone,
    },
    once=frozenset({"zk_unit_norm", "zk_displacement_bound", "zk_group_bound", "zk_monotone"}),
    tables=topology_tables,
)
