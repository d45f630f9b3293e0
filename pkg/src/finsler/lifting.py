"""
Lifting smooth orbit curves to piecewise-exponential curves in the group.

A target gamma(t) = L_c P L_c* with c(t) = e^{t a_1} ... e^{t a_m} is sampled
at t_i = i/n. Each sample is the horizontal generator x(t_i), the velocity
c' c* corrected by an element of the isotropy algebra at gamma(t_i) so that
|x(t_i)|_Phi equals the orbit speed. The lift follows e^{t x_i} on each
segment; its endpoint approaches gamma(1) like 1/n.
"""
from dataclasses import dataclass

import numpy as np
import pandas as pd

from src.errors import BadPartition, DimensionMismatch
from src.finsler.curves import LengthEstimate, PiecewiseExpCurve, curve_length_group, integrate_speed
from src.finsler.quotient import DEFAULT_SOLVER, SolverConfig, horizontal_part, quotient_norm
from src.linalg.core import SkewHermitian, UnitaryMatrix, as_generator, dagger, expm_skew, op_norm, random_skew_hermitian
from src.norms.symmetric import SymmetricNorm
from src.orbit.tangent import TangentVector
from src.pinching.family import ProjectionFamily
from src.pinching.orbit_point import OrbitPoint, orbit_point, point_difference
from src.pinching.superop import super_norm_s2

PARTITIONS = (4, 8, 16, 32, 64)


@dataclass(frozen=True, eq=False)
class SmoothOrbitCurve:
    """gamma(t) = L_{c(t)} P L_{c(t)*} for a product of one-parameter groups."""

    fam: ProjectionFamily
    generators: tuple[SkewHermitian, ...]

    def __post_init__(self):
        gens = tuple(g if isinstance(g, SkewHermitian) else SkewHermitian(g) for g in self.generators)
        if not gens:
            raise ValueError("need at least one generator")
        if any(g.dim != self.fam.dim for g in gens):
            raise DimensionMismatch("generator and family dimensions differ")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def random(cls, fam: ProjectionFamily, rng=None, pieces: int = 2, scale: float = 0.6) -> "SmoothOrbitCurve":
        gen = as_generator(rng)
        return cls(fam=fam, generators=tuple(random_skew_hermitian(fam.dim, gen, scale) for _ in range(pieces)))

    def _partials(self, t: float) -> list[np.ndarray]:
        """e^{t a_1} ... e^{t a_k} for k = 0..m."""
        out = [np.eye(self.fam.dim, dtype=np.complex128)]
        for a in self.generators:
            out.append(out[-1] @ expm_skew(t * a.matrix).matrix)
        return out

    def unitary(self, t: float) -> UnitaryMatrix:
        return UnitaryMatrix(self._partials(t)[-1])

    def point(self, t: float) -> OrbitPoint:
        return orbit_point(self.fam, self.unitary(t))

    def velocity(self, t: float) -> np.ndarray:
        """c'(t) c(t)* = sum_k C_{k-1} a_k C_{k-1}*."""
        partials = self._partials(t)
        return sum(c @ a.matrix @ dagger(c) for c, a in zip(partials, self.generators))

    def horizontal_generator(self, t: float, norm: SymmetricNorm, cfg: SolverConfig = DEFAULT_SOLVER) -> SkewHermitian:
        """c' c* plus the isotropy correction at gamma(t) attaining the quotient norm."""
        c = self.unitary(t).matrix
        local = SkewHermitian.project(dagger(c) @ self.velocity(t) @ c)
        return SkewHermitian.project(c @ horizontal_part(self.fam, local, norm, cfg).matrix @ dagger(c))

    def speed(self, t: float, norm: SymmetricNorm, cfg: SolverConfig = DEFAULT_SOLVER):
        c = self.unitary(t).matrix
        return quotient_norm(self.fam, SkewHermitian.project(dagger(c) @ self.velocity(t) @ c), norm, cfg)

    def length(self, norm: SymmetricNorm, cfg: SolverConfig = DEFAULT_SOLVER, nodes: int = 256) -> LengthEstimate:
        """Orbit length of gamma on [0, 1]."""
        return integrate_speed(lambda t: self.speed(t, norm, cfg), [(0.0, 1.0)], nodes)


def sample_lift(curve: SmoothOrbitCurve, n: int, norm: SymmetricNorm, cfg: SolverConfig = DEFAULT_SOLVER):
    """[(i/n, x(i/n)) for i < n], the horizontal generators at the left endpoints."""
    if n < 1:
        raise BadPartition(f"partition size must be >= 1, got {n}")
    return [(i / n, curve.horizontal_generator(i / n, norm, cfg)) for i in range(n)]


def lift_curve(fam: ProjectionFamily, samples) -> PiecewiseExpCurve:
    """
    Piecewise-exponential curve from generators sampled on a uniform partition.

    Args:
        fam: Projection family (fixes the dimension)
        samples: (t_i, x_i) with t_i = i/n; x_i a SkewHermitian or TangentVector

    Returns:
        Curve starting at the identity; consecutive equal generators are merged

    Raises:
        BadPartition: times are not i/n
    """
    n = len(samples)
    if n == 0:
        raise BadPartition("no samples")
    segments: list[tuple[float, SkewHermitian]] = []
    for i, (t, x) in enumerate(samples):
        if abs(t - i / n) > 1e-12:
            raise BadPartition(f"sample {i} at t = {t}, expected {i / n}")
        gen = x.generator if isinstance(x, TangentVector) else x
        gen = gen if isinstance(gen, SkewHermitian) else SkewHermitian(gen)
        if gen.dim != fam.dim:
            raise DimensionMismatch(f"generator {i} has dimension {gen.dim}")
        if segments and np.array_equal(segments[-1][1].matrix, gen.matrix):
            segments[-1] = (segments[-1][0] + 1.0 / n, gen)
        else:
            segments.append((1.0 / n, gen))
    # merged durations drift by a few ulps
    total = sum(dt for dt, _ in segments)
    segments[-1] = (segments[-1][0] + (1.0 - total), segments[-1][1])
    return PiecewiseExpCurve(base=UnitaryMatrix.identity(fam.dim), segments=tuple(segments))


def endpoint_gap(fam: ProjectionFamily, lifted: PiecewiseExpCurve, target: SmoothOrbitCurve) -> float:
    """super_norm_s2(pi(Gamma(1)) - gamma(1))."""
    return super_norm_s2(point_difference(lifted.point(fam, 1.0), target.point(1.0)))


def lift_bound(target: SmoothOrbitCurve, samples, norm: SymmetricNorm, cfg: SolverConfig = DEFAULT_SOLVER, sub: int = 8) -> float:
    """
    2 (2 M / n + omega_n) with M = max |x(t)|_op and omega_n the summed oscillation of x per segment.

    Both are sampled on ``sub`` interior nodes per segment.
    """
    n = len(samples)
    speed_max, omega = 0.0, 0.0
    for t0, x0 in samples:
        osc = 0.0
        speed_max = max(speed_max, op_norm(x0.matrix))
        for m in range(1, sub + 1):
            x = target.horizontal_generator(t0 + m / (sub * n), norm, cfg).matrix
            speed_max = max(speed_max, op_norm(x))
            osc = max(osc, op_norm(x - x0.matrix))
        omega += osc / n
    return 2.0 * (2.0 * speed_max / n + omega)


def lift_convergence(
    target: SmoothOrbitCurve,
    norm: SymmetricNorm,
    partitions=PARTITIONS,
    cfg: SolverConfig = DEFAULT_SOLVER,
    fine_nodes: int = 256,
) -> tuple[pd.DataFrame, float]:
    """
    Endpoint gap and lengths of the lifts over a range of partition sizes.

    Args:
        target: Smooth orbit curve
        norm: Norming function for the lengths
        partitions: Partition sizes n
        cfg: Solver knobs
        fine_nodes: Midpoint nodes for the target length

    Returns:
        (table, slope) where slope is minus the log-log fit of gap against n
    """
    fam = target.fam
    target_length = target.length(norm, cfg, nodes=fine_nodes)
    grid = (np.arange(fine_nodes + 1)) / fine_nodes
    speeds = np.array([target.speed(t, norm, cfg).value for t in grid])
    variation = float(np.sum(np.abs(np.diff(speeds))))

    rows = []
    for n in partitions:
        samples = sample_lift(target, n, norm, cfg)
        lifted = lift_curve(fam, samples)
        rows.append({
            "n": n,
            "endpoint_gap": endpoint_gap(fam, lifted, target),
            "inductive_bound": lift_bound(target, samples, norm, cfg),
            "lifted_length": curve_length_group(lifted, norm),
            "target_length": target_length.value,
            "epsilon": 2.0 * variation / n + target_length.error,
        })
    table = pd.DataFrame(rows)
    gaps = np.maximum(table["endpoint_gap"].to_numpy(), np.finfo(float).tiny)
    slope = -float(np.polyfit(np.log(table["n"].to_numpy(dtype=float)), np.log(gaps), 1)[0])
    table.attrs["slope"] = slope
    return table, slope
