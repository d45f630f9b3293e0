"""
Running registries of named checks over seeded trials.

A suite is a dict {check_name: function}, like a rule registry. Each check
receives a TrialContext and returns a Measurement. Trials are seeded from
SeedSequence(config.seed).spawn(trials) and may run on a thread pool; the
record for a check keeps the trial with the smallest margin.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import pandas as pd

from src.config.settings import ExperimentConfig
from src.errors import PinchlabError
from src.finsler.quotient import SolverConfig
from src.linalg.core import random_unitary
from src.norms.symmetric import SymmetricNorm, parse_norm
from src.pinching.family import ProjectionFamily, family_from_blocks
from src.report.models import CheckRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Measurement:
    """measured <= bound + tolerance (relation "le") or measured >= bound - tolerance ("ge")."""

    measured: float
    bound: float
    tolerance: float
    relation: str = "le"
    detail: str = ""

    @property
    def margin(self) -> float:
        if self.relation == "ge":
            value = self.measured - (self.bound - self.tolerance)
        else:
            value = self.bound + self.tolerance - self.measured
        return -math.inf if math.isnan(value) else float(value)

    @property
    def passed(self) -> bool:
        return self.margin >= 0


@dataclass(frozen=True, eq=False)
class TrialContext:
    config: ExperimentConfig
    fam: ProjectionFamily
    norm: SymmetricNorm
    rng: np.random.Generator
    solver: SolverConfig

    def seed(self) -> int:
        """A fresh integer seed for library calls that take one."""
        return int(self.rng.integers(2**32))


CheckFn = Callable[[TrialContext], Measurement]


def check(anchor: str):
    """Attach the property statement a check verifies."""

    def wrap(fn):
        fn.anchor = anchor
        return fn

    return wrap


def random_family(config: ExperimentConfig, rng: np.random.Generator) -> ProjectionFamily:
    """Consecutive blocks of the configured sizes in a Haar-random basis."""
    basis = random_unitary(config.dimension, rng)
    return family_from_blocks(config.dimension, config.blocks, basis=basis.matrix)


@dataclass(frozen=True)
class Suite:
    """
    Named checks plus optional tables.

    Checks listed in ``once`` only run in the first trial.
    """

    name: str
    checks: dict[str, CheckFn]
    once: frozenset[str] = frozenset()
    solver: SolverConfig = SolverConfig()
    family: Callable[[ExperimentConfig, np.random.Generator], ProjectionFamily] = random_family
    tables: Callable[[ExperimentConfig], dict[str, pd.DataFrame]] | None = field(default=None)


def _run_check(name: str, fn: CheckFn, ctx: TrialContext) -> Measurement:
    try:
        return fn(ctx)
    except PinchlabError as exc:
        logger.warning("check %s raised %s: %s", name, type(exc).__name__, exc)
        return Measurement(math.nan, math.nan, 0.0, detail=type(exc).__name__)


def _run_trial(suite: Suite, config: ExperimentConfig, index: int, seq: np.random.SeedSequence):
    fam_seq, *check_seqs = seq.spawn(len(suite.checks) + 1)
    fam = suite.family(config, np.random.default_rng(fam_seq))
    norm = parse_norm(config.norm)
    out = {}
    for (name, fn), check_seq in zip(suite.checks.items(), check_seqs):
        if index > 0 and name in suite.once:
            continue
        ctx = TrialContext(config=config, fam=fam, norm=norm, rng=np.random.default_rng(check_seq), solver=suite.solver)
        out[name] = _run_check(name, fn, ctx)
    return out


def aggregate(suite: Suite, trials: list[dict[str, Measurement]]) -> list[CheckRecord]:
    """One record per check, from the trial with the smallest margin."""
    records = []
    for name, fn in suite.checks.items():
        measured = [t[name] for t in trials if name in t]
        worst = min(measured, key=lambda m: m.margin)
        anchor = fn.anchor if not worst.detail else f"{fn.anchor} [{worst.detail}]"
        records.append(CheckRecord(
            check=name,
            anchor=anchor,
            status="pass" if all(m.passed for m in measured) else "fail",
            measured=worst.measured,
            bound=worst.bound,
            tolerance=worst.tolerance,
        ))
    return records


def run_suite(suite: Suite, config: ExperimentConfig) -> list[CheckRecord]:
    """
    Run every check of the suite over config.trials seeded trials.

    Args:
        suite: Suite to run
        config: Experiment configuration (seed, trials, threads)

    Returns:
        CheckRecords in registry order
    """
    seqs = np.random.SeedSequence(config.seed).spawn(config.trials)
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        trials = list(pool.map(lambda item: _run_trial(suite, config, *item), enumerate(seqs)))
    return aggregate(suite, trials)
