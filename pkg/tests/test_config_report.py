import pytest
import math
import json
import sys
from pathlib import Path

from pydantic import ValidationError

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config.settings import ExperimentConfig, build_config, load_config_file
from src.errors import ConfigError
from src.report.emit import CSV_COLUMNS, JSON_FLOAT_MAX, emit, read_report, write_report
from src.report.models import CheckRecord, Report, Summary

CONFIG_DIR = Path(__file__).parent.parent / "config"


# ============================================================
# Fixtures
# ============================================================

@pytest.fixture
def records():
    """One passing and one failing record."""
    return [
        CheckRecord(check="pinching_idempotent", anchor="P o P = P", status="pass",
                    measured=1 / 3, bound=0.0, tolerance=1e-12),
        CheckRecord(check="fiber_separation", anchor="distinct fiber points are 1 apart", status="fail",
                    measured=0.5, bound=1.0, tolerance=1e-9),
    ]


@pytest.fixture
def report(records):
    return Report.build(config={"seed": 42, "norm": "s2"}, records=records, wall_clock=1.25)


def write_conf(tmp_path, text):
    path = tmp_path / "run.conf"
    path.write_text(text, encoding="utf-8")
    return path


# ============================================================
# Configuration
# ============================================================

def test_defaults():
    """No flags, file or environment gives the documented defaults."""
    config = build_config({}, environ={})
    assert config.command == "verify"
    assert config.dimension == 6
    assert config.blocks == (1, 2)
    assert config.norm == "s2"
    assert config.seed == 42
    assert config.trials == 20
    assert config.threads == 1
    assert config.output is None


def test_blocks_and_norm_parsed():
    """Comma lists become tuples and norms print canonically."""
    config = build_config({"blocks": "1, 1,2", "norm": " S1 "}, environ={})
    assert config.blocks == (1, 1, 2)
    assert config.norm == "s1"


def test_default_eigenvalues():
    """Without eigenvalues, block i gets 1/i."""
    config = build_config({"blocks": "1,1,1"}, environ={})
    assert config.resolved_eigenvalues() == (1.0, 0.5, 1 / 3)


def test_complex_eigenvalues():
    """Eigenvalues accept complex literals."""
    config = build_config({"blocks": "1,1", "eigenvalues": "1, 0.5j"}, environ={})
    assert config.resolved_eigenvalues() == (1 + 0j, 0.5j)


@pytest.mark.parametrize("overrides", [
    {"blocks": "4,4"},
    {"blocks": "0,1"},
    {"norm": "nope"},
    {"trials": 0},
    {"command": "plot"},
    {"blocks": "1,1", "eigenvalues": "1"},
])
def test_invalid_values(overrides):
    """Invalid values surface as ConfigError."""
    with pytest.raises(ConfigError):
        build_config(overrides, environ={})


def test_config_file(tmp_path):
    """key=value files load with comments and blank lines skipped."""
    path = write_conf(tmp_path, "# run\n\ndimension=4\nblocks=1,1\nseed=7\n")
    config = build_config({}, config_file=path, environ={})
    assert config.dimension == 4
    assert config.blocks == (1, 1)
    assert config.seed == 7


def test_flags_override_file(tmp_path):
    """Flags beat the file; None flags are ignored."""
    path = write_conf(tmp_path, "seed=7\ntrials=3\n")
    config = build_config({"seed": 9, "trials": None}, config_file=path, environ={})
    assert config.seed == 9
    assert config.trials == 3


def test_unknown_key_reports_line(tmp_path):
    """An unknown key names its line."""
    path = write_conf(tmp_path, "seed=7\n# note\ncolour=blue\n")
    with pytest.raises(ConfigError, match=r"run\.conf:3: unknown key 'colour'"):
        load_config_file(path)


def test_malformed_line(tmp_path):
    """A line without '=' is rejected."""
    path = write_conf(tmp_path, "seed 7\n")
    with pytest.raises(ConfigError, match="expected key=value"):
        load_config_file(path)


def test_missing_file(tmp_path):
    """An unreadable file is a ConfigError."""
    with pytest.raises(ConfigError):
        load_config_file(tmp_path / "absent.conf")


def test_threads_from_environment(tmp_path):
    """PINCHLAB_THREADS sets the pool size; the file overrides it."""
    assert build_config({}, environ={"PINCHLAB_THREADS": "3"}).threads == 3
    path = write_conf(tmp_path, "threads=2\n")
    assert build_config({}, config_file=path, environ={"PINCHLAB_THREADS": "3"}).threads == 2


def test_shipped_config_files():
    """Every config under config/ builds."""
    for path in sorted(CONFIG_DIR.glob("*.conf")):
        config = build_config({}, config_file=path, environ={})
        assert isinstance(config, ExperimentConfig)
    fiber = build_config({}, config_file=CONFIG_DIR / "fiber.conf", environ={})
    assert fiber.command == "fiber"
    assert fiber.blocks == (1, 1, 1, 1)


# ============================================================
# Report models
# ============================================================

def test_summary_counts(report):
    """build() counts passes and failures."""
    assert report.summary == Summary(total=2, passed=1, failed=1)
    assert not report.ok


def test_summary_must_match(records):
    """A summary disagreeing with the records is rejected."""
    with pytest.raises(ValidationError):
        Report(config={}, records=records, summary=Summary(total=2, passed=2, failed=0))


def test_empty_report():
    """No records is a passing report."""
    empty = Report.build(config={}, records=[])
    assert empty.ok
    assert empty.summary.total == 0


# ============================================================
# Emitting
# ============================================================

def test_json_sorted_and_rounded(report):
    """Keys are sorted and floats keep 12 significant digits."""
    data = emit(report, "json")
    payload = json.loads(data)
    assert list(payload) == sorted(payload)
    assert payload["records"][0]["measured"] == 0.333333333333


def test_json_timing_optional(report):
    """wall_clock is only written when timing is requested."""
    assert "wall_clock" not in json.loads(emit(report, "json"))
    assert json.loads(emit(report, "json", timing=True))["wall_clock"] == 1.25


def test_json_nan_round_trip(records):
    """NaN measurements are written as null and read back as NaN."""
    records[1] = records[1].model_copy(update={"measured": math.nan, "bound": math.nan})
    data = emit(Report.build(config={}, records=records), "json")
    assert json.loads(data)["records"][1]["measured"] is None
    back = read_report(data, "json")
    assert math.isnan(back.records[1].measured)
    assert back.summary.failed == 1


def test_json_infinity_is_clamped(records):
    """Infinite values are written as finite JSON numbers of the same sign."""
    def reject(token):
        raise ValueError(token)

    records[1] = records[1].model_copy(update={"measured": math.inf, "bound": -math.inf})
    data = emit(Report.build(config={}, records=records), "json")
    payload = json.loads(data, parse_constant=reject)
    assert payload["records"][1]["measured"] == JSON_FLOAT_MAX
    assert payload["records"][1]["bound"] == -JSON_FLOAT_MAX
    assert read_report(data, "json").summary.failed == 1


def test_json_deterministic(report):
    """The same report always gives the same bytes."""
    assert emit(report, "json") == emit(report, "json")


def test_csv_header_and_read_back(report):
    """CSV has one row per record under a fixed header."""
    data = emit(report, "csv")
    lines = data.decode("utf-8").splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3
    back = read_report(data, "csv")
    assert [r.check for r in back.records] == [r.check for r in report.records]
    assert back.records[0].measured == pytest.approx(1 / 3)


def test_write_report_creates_parents(report, tmp_path):
    """write_report makes missing directories."""
    path = write_report(report, tmp_path / "out" / "report.json")
    assert path.exists()
    assert read_report(path).summary.total == 2


def test_unknown_format(report):
    """Only json and csv are supported."""
    with pytest.raises(ValueError):
        emit(report, "xml")
