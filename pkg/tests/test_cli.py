import pytest
import json
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np

from src.config.settings import COMMANDS, build_config
from src.errors import SingularFactor
from src.finsler.quotient import SolverConfig
from src.norms.symmetric import parse_norm
from src.pinching.family import family_from_blocks
from src.pinching.orbit_point import point_difference
from src.pinching.superop import super_norm_s2
from src.report.emit import emit
from src.run_experiments import build_parser, main, run
from src.suites import geometry, metric, normal
from src.suites.base import Measurement, Suite, TrialContext, check, run_suite
from src.suites.registry import SUITES


# ============================================================
# Fixtures
# ============================================================

@pytest.fixture
def fiber_config():
    """Four rank-one blocks in C^4: a fiber of 24 points."""
    return build_config(
        {"command": "fiber", "dimension": 4, "blocks": "1,1,1,1", "seed": 7, "trials": 2},
        environ={},
    )


def by_name(report):
    return {r.check: r for r in report.records}


def make_context(dim, blocks, seed, norm="s2", **settings):
    config = build_config({"dimension": dim, "blocks": blocks, "norm": norm, **settings}, environ={})
    fam = family_from_blocks(dim, config.blocks)
    return TrialContext(
        config=config, fam=fam, norm=parse_norm(norm), rng=np.random.default_rng(seed),
        solver=SolverConfig(restarts=1, distance_iters=60),
    )


# ============================================================
# Registry
# ============================================================

def test_every_command_has_a_suite():
    """SUITES covers exactly the CLI commands."""
    assert set(SUITES) == set(COMMANDS)


def test_every_check_has_an_anchor():
    """Each check states the property it verifies."""
    for suite in SUITES.values():
        for name, fn in suite.checks.items():
            assert getattr(fn, "anchor", ""), name


# ============================================================
# Running suites
# ============================================================

def test_fiber_suite_passes(fiber_config):
    """Every fiber check passes and the fiber has 24 points."""
    report = run(fiber_config)
    assert report.ok, [r for r in report.records if r.status == "fail"]
    cardinality = by_name(report)["fiber_cardinality"]
    assert cardinality.measured == 0
    assert "24 points" in cardinality.anchor


def test_runs_are_deterministic(fiber_config):
    """The same config gives byte-identical JSON."""
    assert emit(run(fiber_config)) == emit(run(fiber_config))


def test_threads_do_not_change_results(fiber_config):
    """A thread pool gives the same records as a single thread."""
    pooled = fiber_config.model_copy(update={"threads": 2})
    assert run(pooled).records == run(fiber_config).records


def test_verify_suite_passes():
    """The invariant sweep passes on the default family."""
    config = build_config({"dimension": 6, "blocks": "1,2", "seed": 42, "trials": 2}, environ={})
    report = run(config)
    assert report.ok, [r for r in report.records if r.status == "fail"]


def test_topology_gap_suite_passes():
    """The z_k sequence checks pass for Schatten-1."""
    config = build_config({"command": "topology-gap", "norm": "s1", "k_max": 6, "trials": 1}, environ={})
    assert run(config).ok


def test_normal_orbit_suite_passes():
    """Gap inequality and swap sequence checks pass on diag(1, 1/2, 1/3, 1/4)."""
    config = build_config(
        {"command": "normal-orbit", "dimension": 4, "blocks": "1,1,1,1", "norm": "s1", "trials": 3},
        environ={},
    )
    assert run(config).ok


def test_library_errors_become_failures():
    """A check raising a library error fails with the error name in its anchor."""

    @check("always singular")
    def explode(ctx):
        raise SingularFactor("no polar part")

    @check("trivially true")
    def fine(ctx):
        return Measurement(0.0, 1.0, 0.0)

    suite = Suite(name="boom", checks={"explode": explode, "fine": fine})
    config = build_config({"trials": 2}, environ={})
    records = {r.check: r for r in run_suite(suite, config)}
    assert records["explode"].status == "fail"
    assert records["explode"].anchor == "always singular [SingularFactor]"
    assert records["fine"].status == "pass"


def test_once_checks_run_in_first_trial_only():
    """Checks in ``once`` are measured a single time."""
    calls = []

    @check("counted")
    def counted(ctx):
        calls.append(1)
        return Measurement(0.0, 0.0, 0.0)

    suite = Suite(name="once", checks={"counted": counted}, once=frozenset({"counted"}))
    run_suite(suite, build_config({"trials": 4}, environ={}))
    assert len(calls) == 1


# ============================================================
# Command line
# ============================================================

def test_parser_maps_flags_to_config_keys():
    """--dim and --k-max land on the config field names."""
    args = build_parser().parse_args(["--command", "topology-gap", "--dim", "6", "--k-max", "5"])
    assert args.command == "topology-gap"
    assert args.dimension == 6
    assert args.k_max == 5


def test_main_writes_json(tmp_path, monkeypatch):
    """A passing run writes the report and exits 0."""
    monkeypatch.delenv("PINCHLAB_THREADS", raising=False)
    out = tmp_path / "fiber.json"
    code = main(["--command", "fiber", "--dim", "4", "--blocks", "1,1,1,1", "--trials", "1", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["summary"]["failed"] == 0
    assert payload["config"]["blocks"] == [1, 1, 1, 1]
    assert "wall_clock" not in payload


def test_main_timing_flag(tmp_path, monkeypatch):
    """--timing adds the wall-clock time."""
    monkeypatch.delenv("PINCHLAB_THREADS", raising=False)
    out = tmp_path / "fiber.json"
    main(["--command", "fiber", "--dim", "3", "--blocks", "1,1", "--trials", "1", "--out", str(out), "--timing"])
    assert json.loads(out.read_text(encoding="utf-8"))["wall_clock"] >= 0


def test_main_csv(tmp_path, monkeypatch):
    """--format csv writes one row per check."""
    monkeypatch.delenv("PINCHLAB_THREADS", raising=False)
    out = tmp_path / "fiber.csv"
    main(["--command", "fiber", "--dim", "3", "--blocks", "1,1", "--trials", "1", "--out", str(out), "--format", "csv"])
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("check,anchor,status")
    assert len(lines) == len(SUITES["fiber"].checks) + 1


def test_main_bad_blocks():
    """Blocks larger than the dimension exit with 2."""
    assert main(["--dim", "4", "--blocks", "3,3"]) == 2


def test_main_unknown_config_key(tmp_path):
    """An unknown key in --config exits with 2."""
    conf = tmp_path / "bad.conf"
    conf.write_text("dimension=4\nwidth=3\n", encoding="utf-8")
    assert main(["--config", str(conf)]) == 2


# ============================================================
# Check bounds
# ============================================================

def test_s_estimate_bound_is_three_s2_displacement():
    """The s-estimate compares against 3 |Q - P|_S2 at a point near P."""
    ctx, replay = make_context(5, "1,2,1", 11), make_context(5, "1,2,1", 11)
    m = geometry.s_estimate(ctx)
    Q = geometry._near_point(replay)
    assert m.bound == pytest.approx(3.0 * geometry._displacement(replay.fam, Q))
    assert m.passed


def test_two_point_bound_is_three_s2_distance():
    """With w = 3 the two-point bound is still 3 |Q_u - Q_v|_S2."""
    ctx, replay = make_context(5, "1,2,1", 12), make_context(5, "1,2,1", 12)
    m = geometry.two_point_estimate(ctx)
    a, b = geometry._near_point(replay, 0.3), geometry._near_point(replay, 0.3)
    assert m.bound == pytest.approx(3.0 * super_norm_s2(point_difference(a, b)))
    assert m.passed


def test_section_suite_passes_with_three_blocks():
    """Every section check passes with w = 3 and p0 of rank one."""
    config = build_config({"command": "section", "dimension": 5, "blocks": "1,2,1", "seed": 3, "trials": 4}, environ={})
    report = run(config)
    assert report.ok, [r for r in report.records if r.status == "fail"]
    assert "compact_witness" in by_name(report)


def test_lift_slope_fits_ten_curves():
    """The slope check fits one slope per sampled curve."""
    m = metric.lift_convergence_slope(make_context(3, "1,1", 5))
    assert m.passed
    assert f"over {metric.SLOPE_CURVES} curves" in m.detail
    assert metric.SLOPE_CURVES == 10


@pytest.mark.parametrize("norm", ["s1", "s2", "kyfan:2"])
def test_topology_checks_cover_both_scenarios(norm):
    """z_k has unit norm to 1e-12 in the growing-w and two-large-block systems."""
    ctx = make_context(4, "1,1", 0, norm=norm, k_max=4)
    assert len(normal._ctx_tables(ctx)) == 2
    m = normal.zk_unit_norm(ctx)
    assert m.tolerance == 1e-12
    assert m.passed
    for fn in (normal.zk_displacement_bound, normal.zk_group_bound, normal.zk_monotone):
        assert fn(ctx).passed
