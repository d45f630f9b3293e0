"""
Experiment configuration: flags, key=value files and PINCHLAB_THREADS.

Precedence is flags, then the config file, then the model defaults.
"""
import os
from pathlib import Path
from typing import Literal

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.errors import ConfigError
from src.norms.symmetric import parse_norm

COMMANDS = ("verify", "fiber", "section", "distance", "topology-gap", "normal-orbit", "lipschitz")
THREADS_ENV = "PINCHLAB_THREADS"


def _split(value) -> list[str]:
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    return list(value)


class ExperimentConfig(BaseModel):
    """Validated settings for one run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Literal["verify", "fiber", "section", "distance", "topology-gap", "normal-orbit", "lipschitz"] = "verify"
    dimension: int = Field(6, ge=1, le=64)
    norm: str = "s2"
    blocks: tuple[int, ...] = (1, 2)
    seed: int = 42
    trials: int = Field(20, ge=1)
    output: Path | None = None
    format: Literal["json", "csv"] = "json"
    threads: int = Field(1, ge=1)
    k_max: int = Field(8, ge=1)
    eigenvalues: tuple[complex, ...] | None = None
    timing: bool = False

    @field_validator("norm")
    @classmethod
    def norm_parses(cls, v: str) -> str:
        return str(parse_norm(v))

    @field_validator("blocks", mode="before")
    @classmethod
    def split_blocks(cls, v):
        sizes = [int(s) for s in _split(v)]
        if not sizes:
            raise ValueError("at least one block is required")
        if any(s < 1 for s in sizes):
            raise ValueError(f"block sizes must be positive, got {sizes}")
        return tuple(sizes)

    @field_validator("eigenvalues", mode="before")
    @classmethod
    def split_eigenvalues(cls, v):
        if v is None or v == "":
            return None
        return tuple(complex(str(s).replace(" ", "")) for s in _split(v))

    @model_validator(mode="after")
    def blocks_fit(self) -> "ExperimentConfig":
        if sum(self.blocks) > self.dimension:
            raise ValueError(f"block sizes {self.blocks} exceed dimension {self.dimension}")
        if self.eigenvalues is not None and len(self.eigenvalues) != len(self.blocks):
            raise ValueError(f"{len(self.eigenvalues)} eigenvalues for {len(self.blocks)} blocks")
        return self

    def resolved_eigenvalues(self) -> tuple[complex, ...]:
        """Configured eigenvalues, or 1/i over the blocks."""
        if self.eigenvalues is not None:
            return self.eigenvalues
        return tuple(complex(1.0 / i) for i in range(1, len(self.blocks) + 1))


FIELDS = frozenset(ExperimentConfig.model_fields)


def load_config_file(path) -> dict[str, str]:
    """
    Read a key=value file.

    Blank lines and # comments are skipped; every other line must be
    key=value with a known key.

    Raises:
        ConfigError: unreadable file, malformed line or unknown key, with its line number
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, _ = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        if key not in FIELDS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return {k: v for k, v in dotenv_values(path).items() if v is not None}


def build_config(overrides: dict | None = None, config_file=None, environ=None) -> ExperimentConfig:
    """
    Merge defaults, an optional config file and flag overrides.

    Args:
        overrides: Flag values; None entries are ignored
        config_file: Optional key=value file
        environ: Environment mapping (defaults to os.environ) for PINCHLAB_THREADS

    Raises:
        ConfigError: invalid values, naming every failing field
    """
    environ = os.environ if environ is None else environ
    merged: dict = {}
    if environ.get(THREADS_ENV):
        merged["threads"] = environ[THREADS_ENV]
    if config_file is not None:
        merged.update(load_config_file(config_file))
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return ExperimentConfig(**merged)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in exc.errors()
        )
        raise ConfigError(problems) from exc
