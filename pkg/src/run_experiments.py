import argparse
import logging
import sys
import time
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config.settings import COMMANDS, ExperimentConfig, build_config
from src.errors import ConfigError
from src.report.emit import write_report
from src.report.models import Report
from src.suites.base import run_suite
from src.suites.registry import SUITES


def config_echo(config: ExperimentConfig) -> dict:
    """JSON-safe copy of the config for the report header."""
    echo = config.model_dump(mode="json", exclude={"eigenvalues", "timing"})
    echo["eigenvalues"] = [str(c) for c in config.resolved_eigenvalues()]
    return echo


def run(config: ExperimentConfig) -> Report:
    """
    Run the suite named by config.command.

    Args:
        config: Validated experiment configuration

    Returns:
        Report with one record per check
    """
    start = time.perf_counter()
    records = run_suite(SUITES[config.command], config)
    return Report.build(config=config_echo(config), records=records, wall_clock=time.perf_counter() - start)


def build_parser():
    parser = argparse.ArgumentParser(description="Run pinching-orbit experiments and emit a report")
    parser.add_argument("--command", choices=COMMANDS, help="Suite to run (default: verify)")
    parser.add_argument("--dim", type=int, dest="dimension", help="Ambient dimension n")
    parser.add_argument("--norm", help="op | s1 | s2 | sp:<p> | kyfan:<k>")
    parser.add_argument("--blocks", help="Comma-separated block sizes, e.g. 1,2")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--trials", type=int)
    parser.add_argument("--out", dest="output", help="Report path")
    parser.add_argument("--format", choices=("json", "csv"))
    parser.add_argument("--config", dest="config_file", help="key=value config file")
    parser.add_argument("--k-max", type=int, dest="k_max", help="Largest k for topology-gap")
    parser.add_argument("--eigenvalues", help="Comma-separated eigenvalues for normal-orbit")
    parser.add_argument("--timing", action="store_true", default=None, help="Write wall-clock time to JSON")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    return parser


def main(argv=None) -> int:
    """
    Parse flags, run the suite and write the report.

    Returns:
        0 if every check passed, 1 if any failed, 2 on a configuration error
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)

    overrides = {k: v for k, v in vars(args).items() if k not in ("config_file", "verbose")}

    print("=" * 60)
    print("PINCHLAB EXPERIMENTS")
    print("=" * 60)

    # Step 1: Config
    print("\n[1/3] CONFIG")
    print("-" * 40)
    try:
        config = build_config(overrides, config_file=args.config_file)
    except ConfigError as exc:
        print(f"  Config error: {exc}", file=sys.stderr)
        return 2
    print(f"  command: {config.command}")
    print(f"  dimension: {config.dimension}, blocks: {','.join(map(str, config.blocks))}, norm: {config.norm}")
    print(f"  seed: {config.seed}, trials: {config.trials}, threads: {config.threads}")

    # Step 2: Run suite
    print(f"\n[2/3] RUN SUITE {config.command.upper()}")
    print("-" * 40)
    report = run(config)
    for record in report.records:
        print(f"  {record.status.upper():4s}  {record.check}: {record.measured:.6g} vs {record.bound:.6g}")

    suite = SUITES[config.command]
    if suite.tables is not None:
        for title, table in suite.tables(config).items():
            print(f"\n  {title}")
            print(table.to_string(index=False))
            if table.attrs.get("degenerate"):
                print("  a_2k stays bounded for this norm: |z_k|_op does not shrink")

    # Step 3: Report
    print("\n[3/3] REPORT")
    print("-" * 40)
    if config.output is not None:
        path = write_report(report, config.output, config.format, timing=config.timing)
        print(f"  Report written to: {path}")
    else:
        print("  No --out given; report not written")

    # Summary
    print("\n" + "=" * 60)
    print("SUMMARY")
    print("=" * 60)
    print(f"\nChecks run: {report.summary.total}")
    print(f"Passed: {report.summary.passed}")
    print(f"Failed: {report.summary.failed}")
    if not report.ok:
        print("\nFailing checks:")
        for record in report.records:
            if record.status == "fail":
                print(f"  {record.check}: {record.anchor}")
    print(f"\nWall clock: {report.wall_clock:.2f}s")

    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
