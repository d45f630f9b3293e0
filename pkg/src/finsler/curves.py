"""
Piecewise-exponential curves in the unitary group and their lengths.

Gamma(t) = e^{(t - t_{k-1}) x_k} ... e^{dt_1 x_1} base on the k-th segment.
In the group the speed |x_k Gamma|_Phi = |x_k|_Phi is constant per segment.
The projected curve t -> L_Gamma P L_Gamma* has speed given by the quotient
norm of Gamma* x_k Gamma, integrated numerically.
"""
from dataclasses import dataclass

import numpy as np

from src.errors import BadPartition, DimensionMismatch
from src.finsler.quotient import DEFAULT_SOLVER, SolverConfig, quotient_norm
from src.linalg.core import SkewHermitian, UnitaryMatrix, dagger, expm_skew
from src.norms.symmetric import SymmetricNorm, ideal_norm
from src.pinching.family import ProjectionFamily
from src.pinching.orbit_point import OrbitPoint, orbit_point


@dataclass(frozen=True, eq=False)
class PiecewiseExpCurve:
    """Durations sum to 1; each segment is (duration, generator)."""

    base: UnitaryMatrix
    segments: tuple[tuple[float, SkewHermitian], ...]

    def __post_init__(self):
        segments = tuple((float(dt), x if isinstance(x, SkewHermitian) else SkewHermitian(x)) for dt, x in self.segments)
        if not segments:
            raise BadPartition("a curve needs at least one segment")
        if any(dt <= 0 for dt, _ in segments):
            raise BadPartition("segment durations must be positive")
        total = sum(dt for dt, _ in segments)
        if abs(total - 1.0) > 1e-12:
            raise BadPartition(f"durations sum to {total!r}, expected 1")
        if any(x.dim != self.base.dim for _, x in segments):
            raise DimensionMismatch("generator and base dimensions differ")
        object.__setattr__(self, "segments", segments)

    @classmethod
    def single(cls, z, base: UnitaryMatrix | None = None) -> "PiecewiseExpCurve":
        """t -> e^{tz} base."""
        z = z if isinstance(z, SkewHermitian) else SkewHermitian(z)
        base = UnitaryMatrix.identity(z.dim) if base is None else base
        return cls(base=base, segments=((1.0, z),))

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def breakpoints(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum([dt for dt, _ in self.segments])])

    def refine(self, parts: int) -> "PiecewiseExpCurve":
        """Split every segment into ``parts`` equal pieces with the same generator."""
        return PiecewiseExpCurve(
            base=self.base,
            segments=tuple((dt / parts, x) for dt, x in self.segments for _ in range(parts)),
        )

    def segment_at(self, t: float) -> int:
        k = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        return min(max(k, 0), len(self.segments) - 1)

    def at(self, t: float) -> UnitaryMatrix:
        """Gamma(t) for t in [0, 1]."""
        if not 0.0 <= t <= 1.0 + 1e-12:
            raise ValueError(f"t = {t} outside [0, 1]")
        value = self.base.matrix
        start = 0.0
        for dt, x in self.segments:
            tau = min(dt, max(t - start, 0.0))
            if tau > 0:
                value = expm_skew(tau * x.matrix).matrix @ value
            start += dt
            if start >= t:
                break
        return UnitaryMatrix(value)

    def point(self, fam: ProjectionFamily, t: float) -> OrbitPoint:
        return orbit_point(fam, self.at(t))


@dataclass(frozen=True)
class LengthEstimate:
    """value with an a-posteriori quadrature error estimate."""

    value: float
    error: float
    converged: bool


def curve_length_group(curve: PiecewiseExpCurve, norm: SymmetricNorm) -> float:
    """sum_k dt_k |x_k|_Phi."""
    return float(sum(dt * ideal_norm(norm, x.matrix) for dt, x in curve.segments))


def orbit_speed(fam: ProjectionFamily, curve: PiecewiseExpCurve, t: float, norm: SymmetricNorm, cfg: SolverConfig = DEFAULT_SOLVER):
    """Quotient norm of the projected velocity at t."""
    g = curve.at(t).matrix
    x = curve.segments[curve.segment_at(t)][1].matrix
    return quotient_norm(fam, SkewHermitian.project(dagger(g) @ x @ g), norm, cfg)


def _midpoint(speed, a: float, b: float, nodes: int) -> tuple[float, bool]:
    h = (b - a) / nodes
    total, ok = 0.0, True
    for m in range(nodes):
        result = speed(a + (m + 0.5) * h)
        total += result.value
        ok = ok and result.converged
    return total * h, ok


def integrate_speed(speed, intervals, nodes: int) -> LengthEstimate:
    """
    Composite midpoint rule over the given intervals.

    The error estimate compares ``nodes`` against ``nodes // 2`` per interval.
    """
    fine = coarse = 0.0
    converged = True
    for a, b in intervals:
        val, ok = _midpoint(speed, a, b, nodes)
        fine += val
        converged = converged and ok
        if nodes >= 2:
            coarse += _midpoint(speed, a, b, nodes // 2)[0]
    error = abs(fine - coarse) / 3.0 if nodes >= 2 else np.inf
    return LengthEstimate(value=fine, error=error, converged=converged)


def curve_length_orbit(
    fam: ProjectionFamily,
    curve: PiecewiseExpCurve,
    norm: SymmetricNorm,
    cfg: SolverConfig = DEFAULT_SOLVER,
) -> LengthEstimate:
    """
    Length of pi o Gamma in the quotient Finsler metric.

    Args:
        fam: Projection family
        curve: Curve in the unitary group
        norm: Norming function
        cfg: Solver knobs; ``cfg.nodes`` midpoint nodes per segment

    Returns:
        LengthEstimate, never longer than the group length up to the error
    """
    if curve.dim != fam.dim:
        raise DimensionMismatch("curve and family dimensions differ")
    br = curve.breakpoints
    return integrate_speed(
        lambda t: orbit_speed(fam, curve, t, norm, cfg),
        list(zip(br[:-1], br[1:])),
        cfg.nodes,
    )
