"""
Sequences separating the orbit topologies.

z_k = a_{2k}^{-1} sum_{i=1}^{k} (xi_{2i-1} xi_{2i}* - xi_{2i} xi_{2i-1}*) has
|z_k|_Phi = 1 while |z_k|_op = 1/a_{2k}; the orbit displacement of e^{z_k}
goes to 0 whenever a_k is unbounded.

u_n swaps the leading basis vectors of blocks n+1 and n+2 of a normal a.
With eigenvalue gaps shrinking, u_n a u_n* approaches a while u_n P u_n*
stays at distance 1 from P.
"""
from enum import Enum

import numpy as np
import pandas as pd

from src.errors import DimensionTooSmall, IndexOutOfRange
from src.linalg.core import SkewHermitian, UnitaryMatrix, dagger, expm_skew, op_norm
from src.norms.symmetric import SymmetricNorm, ideal_norm, phi_counting
from src.normal.spectral import NormalOperatorSpec
from src.pinching.family import ProjectionFamily, family_from_blocks
from src.pinching.orbit_point import OrbitPoint, orbit_point, point_difference
from src.pinching.superop import commutator_super, super_norm_s2


class Scenario(str, Enum):
    GROWING_W = "growing-w"
    TWO_LARGE_BLOCKS = "two-large-blocks"


def z_system(scenario: Scenario, k: int) -> ProjectionFamily:
    """
    Family in dimension 2k carrying the pairs (xi_{2i-1}, xi_{2i}) = (e_{2i-1}, e_{2i}).

    GROWING_W: 2k rank-one blocks. TWO_LARGE_BLOCKS: odd and even coordinates.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = 2 * k
    if Scenario(scenario) is Scenario.GROWING_W:
        return family_from_blocks(n, [1] * n)
    eye = np.eye(n, dtype=np.complex128)
    return ProjectionFamily(dim=n, frames=(eye[:, 0::2], eye[:, 1::2]))


def gap_sequence_zk(fam: ProjectionFamily, norm: SymmetricNorm, k: int, vectors=None) -> SkewHermitian:
    """
    The k-th element of the topology-gap sequence.

    Args:
        fam: Family whose dimension hosts the system
        norm: Norming function fixing a_{2k}
        k: Index, k >= 1
        vectors: Orthonormal columns xi_1..xi_{2k}; defaults to the standard basis

    Returns:
        z_k with all 2k singular values equal to 1/a_{2k}

    Raises:
        DimensionTooSmall: fewer than 2k dimensions
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if fam.dim < 2 * k:
        raise DimensionTooSmall(f"z_{k} needs dimension {2 * k}, family has {fam.dim}")
    xi = np.eye(fam.dim, dtype=np.complex128) if vectors is None else np.asarray(vectors, dtype=np.complex128)
    z = np.zeros((fam.dim, fam.dim), dtype=np.complex128)
    for i in range(k):
        odd, even = xi[:, 2 * i], xi[:, 2 * i + 1]
        z += np.outer(odd, np.conj(even)) - np.outer(even, np.conj(odd))
    return SkewHermitian(z / phi_counting(norm, 2 * k))


def zk_degenerate(norm: SymmetricNorm, k_max: int) -> bool:
    """True when a_{2k} stays at 1 up to k_max, so |z_k|_op never shrinks."""
    return phi_counting(norm, 2 * k_max) <= 1.0 + 1e-12


def topology_gap_table(norm: SymmetricNorm, k_max: int = 8, scenario: Scenario = Scenario.GROWING_W) -> pd.DataFrame:
    """
    Rows k = 1..k_max for the z_k sequence.

    Columns:
        z_op, z_phi: |z_k|_op and |z_k|_Phi
        displacement: super_norm_s2(L_{e^{z_k}} P L_{e^{-z_k}} - P)
        group_bound: 2 |e^{z_k} - 1|_op
        bound: 2 (e^{|z_k|_op} - 1)
        tangent_norm, tangent_ratio: super_norm_s2([L_{z_k}, P]) and its ratio to |z_k|_Phi
    """
    scenario = Scenario(scenario)
    rows = []
    for k in range(1, k_max + 1):
        fam = z_system(scenario, k)
        z = gap_sequence_zk(fam, norm, k)
        u = expm_skew(z)
        z_op = op_norm(z.matrix)
        z_phi = ideal_norm(norm, z.matrix)
        tangent = super_norm_s2(commutator_super(z.matrix, fam))
        rows.append({
            "k": k,
            "z_op": z_op,
            "z_phi": z_phi,
            "displacement": super_norm_s2(point_difference(orbit_point(fam, u), OrbitPoint.at_base(fam))),
            "group_bound": 2.0 * op_norm(u.matrix - np.eye(fam.dim)),
            "bound": 2.0 * (np.exp(z_op) - 1.0),
            "tangent_norm": tangent,
            "tangent_ratio": tangent / z_phi,
        })
    table = pd.DataFrame(rows)
    table.attrs["scenario"] = scenario.value
    table.attrs["degenerate"] = zk_degenerate(norm, k_max)
    return table


# ============================================================
# Swap sequence
# ============================================================

def swap_sequence_un(spec: NormalOperatorSpec, n: int, bases=None) -> UnitaryMatrix:
    """
    u_n = xi2 xi1* + xi1 xi2* + (1 - xi1 xi1* - xi2 xi2*).

    xi1, xi2 are the first basis vectors of blocks n+1 and n+2.

    Raises:
        IndexOutOfRange: n < 0 or n + 2 > w
    """
    fam = spec.fam
    if n < 0 or n + 2 > fam.w:
        raise IndexOutOfRange(f"swap index {n} needs blocks {n + 1}, {n + 2} of {fam.w}")
    if bases is None:
        xi1, xi2 = fam.frame(n + 1)[:, 0], fam.frame(n + 2)[:, 0]
    else:
        xi1 = np.asarray(bases[n + 1], dtype=np.complex128).reshape(fam.dim, -1)[:, 0]
        xi2 = np.asarray(bases[n + 2], dtype=np.complex128).reshape(fam.dim, -1)[:, 0]
    e1, e2 = np.outer(xi1, np.conj(xi1)), np.outer(xi2, np.conj(xi2))
    swap = np.outer(xi2, np.conj(xi1)) + np.outer(xi1, np.conj(xi2))
    return UnitaryMatrix(swap + np.eye(fam.dim) - e1 - e2)


def swap_witness(spec: NormalOperatorSpec, n: int) -> np.ndarray:
    """xi1 xi1*: mapped by L_{u_n} P L_{u_n*} - P to -xi1 xi1*, ratio 1 in every norm."""
    xi1 = spec.fam.frame(n + 1)[:, 0]
    return np.outer(xi1, np.conj(xi1))


def swap_sequence_table(spec: NormalOperatorSpec, norm: SymmetricNorm) -> pd.DataFrame:
    """
    One row per admissible n.

    Columns:
        gap: |lambda_{n+1} - lambda_{n+2}|
        a_disp_op, a_disp_phi: |u_n a u_n* - a| in the operator norm and in Phi
        p_disp_lower: Phi-ratio of the rank-one witness, a lower bound on the P displacement
        p_disp_s2: exact super_norm_s2 of the P displacement
    """
    a = spec.matrix
    fam = spec.fam
    rows = []
    for n in range(fam.w - 1):
        u = swap_sequence_un(spec, n)
        moved = u.matrix @ a @ dagger(u.matrix) - a
        diff = point_difference(orbit_point(fam, u), OrbitPoint.at_base(fam))
        witness = swap_witness(spec, n)
        rows.append({
            "n": n,
            "gap": abs(spec.eigenvalue(n + 1) - spec.eigenvalue(n + 2)),
            "a_disp_op": op_norm(moved),
            "a_disp_phi": ideal_norm(norm, moved),
            "p_disp_lower": ideal_norm(norm, diff(witness)) / ideal_norm(norm, witness),
            "p_disp_s2": super_norm_s2(diff),
        })
    return pd.DataFrame(rows, columns=["n", "gap", "a_disp_op", "a_disp_phi", "p_disp_lower", "p_disp_s2"])
