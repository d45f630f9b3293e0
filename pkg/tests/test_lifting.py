import pytest
import numpy as np
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.errors import BadPartition
from src.finsler.lifting import (
    SmoothOrbitCurve,
    endpoint_gap,
    lift_convergence,
    lift_curve,
    sample_lift,
)
from src.linalg.core import random_skew_hermitian
from src.norms.symmetric import SymmetricNorm, ideal_norm
from src.pinching.family import family_from_blocks


# ============================================================
# Fixtures
# ============================================================

S2 = SymmetricNorm.schatten(2)


@pytest.fixture
def fam():
    return family_from_blocks(4, [1, 2])


@pytest.fixture
def target(fam):
    """Product of two one-parameter groups through P."""
    return SmoothOrbitCurve.random(fam, np.random.default_rng(8), pieces=2, scale=0.6)


@pytest.fixture(scope="module")
def convergence():
    """Lift table for the Schatten-2 metric, shared across tests."""
    fam = family_from_blocks(4, [1, 2])
    curve = SmoothOrbitCurve.random(fam, np.random.default_rng(8), pieces=2, scale=0.6)
    return lift_convergence(curve, S2, fine_nodes=128)


# ============================================================
# Building lifts
# ============================================================

def test_single_sample(fam):
    """One sample gives a one-segment curve e^{tz}."""
    z = random_skew_hermitian(4, 1)
    curve = lift_curve(fam, [(0.0, z)])
    assert len(curve.segments) == 1
    assert curve.segments[0][0] == 1.0


def test_equal_samples_merge(fam):
    """Consecutive equal generators collapse into one segment."""
    z = random_skew_hermitian(4, 1)
    w = random_skew_hermitian(4, 2)
    curve = lift_curve(fam, [(0.0, z), (1 / 3, z), (2 / 3, w)])
    assert len(curve.segments) == 2
    assert curve.segments[0][0] == pytest.approx(2 / 3)
    assert sum(dt for dt, _ in curve.segments) == pytest.approx(1.0, abs=1e-15)


def test_samples_off_partition(fam):
    """Sample times must be i/n."""
    z = random_skew_hermitian(4, 1)
    with pytest.raises(BadPartition):
        lift_curve(fam, [(0.0, z), (0.3, z)])
    with pytest.raises(BadPartition):
        lift_curve(fam, [])


def test_sample_lift_rejects_zero(target):
    """A partition needs at least one interval."""
    with pytest.raises(BadPartition):
        sample_lift(target, 0, S2)


def test_horizontal_generator_speed(target):
    """In Schatten-2 the horizontal generator has the orbit speed as its norm."""
    for t in (0.0, 0.4, 0.9):
        x = target.horizontal_generator(t, S2)
        assert ideal_norm(S2, x.matrix) == pytest.approx(target.speed(t, S2).value)


def test_finer_lift_lands_closer(fam, target):
    """Doubling the partition shrinks the endpoint gap."""
    coarse = endpoint_gap(fam, lift_curve(fam, sample_lift(target, 8, S2)), target)
    fine = endpoint_gap(fam, lift_curve(fam, sample_lift(target, 32, S2)), target)
    assert fine < coarse


# ============================================================
# Convergence
# ============================================================

def test_convergence_slope(convergence):
    """The endpoint gap decays like 1/n."""
    _, slope = convergence
    assert 0.7 <= slope <= 1.3


def test_gap_within_bound(convergence):
    """Every endpoint gap respects 2 (2M/n + omega)."""
    table, _ = convergence
    assert (table["endpoint_gap"] <= table["inductive_bound"] + 1e-12).all()


def test_lifted_length_near_target(convergence):
    """Lifted lengths exceed the target by at most epsilon."""
    table, _ = convergence
    assert (table["lifted_length"] <= table["target_length"] + table["epsilon"] + 1e-9).all()
    assert list(table["n"]) == [4, 8, 16, 32, 64]
