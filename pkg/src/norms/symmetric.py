"""
Symmetric norming functions and the unitarily invariant norms they induce.

A norming function is evaluated on the moduli of a finite sequence sorted
nonincreasingly; applied to singular values it gives a matrix norm.
"""
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from src.errors import InvalidNorm
from src.linalg.core import singular_values

_AXIOM_TOL = 1e-9


class NormKind(str, Enum):
    OPERATOR = "op"
    SCHATTEN = "schatten"
    KY_FAN = "kyfan"
    CUSTOM = "custom"


@dataclass(frozen=True)
class SymmetricNorm:
    """A symmetric norming function. Build with the classmethods, not directly."""

    kind: NormKind
    p: float | None = None
    k: int | None = None
    phi: Callable[[np.ndarray], float] | None = field(default=None, compare=False)
    name: str = ""

    @classmethod
    def operator(cls) -> "SymmetricNorm":
        return cls(NormKind.OPERATOR, name="op")

    @classmethod
    def schatten(cls, p: float) -> "SymmetricNorm":
        p = float(p)
        if not p >= 1:
            raise InvalidNorm(f"Schatten exponent must be >= 1, got {p}")
        if np.isinf(p):
            return cls.operator()
        label = f"s{int(p)}" if p.is_integer() and p in (1.0, 2.0) else f"sp:{p:g}"
        return cls(NormKind.SCHATTEN, p=p, name=label)

    @classmethod
    def ky_fan(cls, k: int) -> "SymmetricNorm":
        if int(k) != k or k < 1:
            raise InvalidNorm(f"Ky Fan index must be a positive integer, got {k}")
        return cls(NormKind.KY_FAN, k=int(k), name=f"kyfan:{int(k)}")

    @classmethod
    def custom(cls, phi: Callable[[np.ndarray], float], name: str = "custom") -> "SymmetricNorm":
        """
        Wrap a user norming function after testing it against the norm axioms.

        Norms evaluate phi on sorted moduli, but phi itself must be invariant
        under permutation and sign of its arguments.
        """
        norm = cls(NormKind.CUSTOM, phi=phi, name=name)
        _validate_custom(norm)
        return norm

    def __str__(self) -> str:
        return self.name


def parse_norm(spec: str) -> SymmetricNorm:
    """
    Parse a command-line norm spec.

    Args:
        spec: One of ``op``, ``s1``, ``s2``, ``sp:<p>``, ``kyfan:<k>``

    Returns:
        SymmetricNorm
    """
    text = spec.strip().lower()
    if text in ("op", "operator", "sinf"):
        return SymmetricNorm.operator()
    if text in ("s1", "s2"):
        return SymmetricNorm.schatten(float(text[1]))
    head, _, arg = text.partition(":")
    try:
        if head == "sp" and arg:
            return SymmetricNorm.schatten(float(arg))
        if head == "kyfan" and arg:
            return SymmetricNorm.ky_fan(int(arg))
    except ValueError as exc:
        raise InvalidNorm(f"bad norm spec {spec!r}: {exc}") from exc
    raise InvalidNorm(f"unknown norm spec {spec!r} (expected op, s1, s2, sp:<p> or kyfan:<k>)")


def _sorted_moduli(seq) -> np.ndarray:
    a = np.abs(np.asarray(seq, dtype=float).reshape(-1))
    if not np.all(np.isfinite(a)):
        raise ValueError("sequence has NaN or Inf entries")
    return np.sort(a)[::-1]


def phi_eval(norm: SymmetricNorm, seq) -> float:
    """
    Evaluate the norming function on |seq| sorted nonincreasingly.

    Args:
        norm: Norming function
        seq: Finite real sequence (sign and order are irrelevant)

    Returns:
        Nonnegative value, at least max |seq_i|
    """
    a = _sorted_moduli(seq)
    if a.size == 0:
        return 0.0
    if norm.kind is NormKind.OPERATOR:
        return float(a[0])
    if norm.kind is NormKind.SCHATTEN:
        return float(np.linalg.norm(a, ord=norm.p))
    if norm.kind is NormKind.KY_FAN:
        return float(np.sum(a[: norm.k]))
    return float(norm.phi(a))


def ideal_norm(norm: SymmetricNorm, m) -> float:
    """|m|_Phi: the norming function applied to the singular values of m."""
    return phi_eval(norm, singular_values(m))


def phi_counting(norm: SymmetricNorm, k: int) -> float:
    """a_k = Phi(1, ..., 1) with k ones."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return phi_eval(norm, np.ones(k))


# ============================================================
# Subgradients (used by the norm estimators and the quotient solver)
# ============================================================

def phi_subgradient(norm: SymmetricNorm, s: np.ndarray) -> np.ndarray:
    """
    A subgradient of Phi at a nonincreasing nonnegative sequence s.

    Exact for the built-in kinds; central differences for custom ones.
    """
    s = np.asarray(s, dtype=float)
    g = np.zeros_like(s)
    if s.size == 0 or s[0] == 0:
        return g
    if norm.kind is NormKind.OPERATOR:
        g[0] = 1.0
    elif norm.kind is NormKind.KY_FAN:
        g[: norm.k] = 1.0
    elif norm.kind is NormKind.SCHATTEN:
        if norm.p == 1:
            g[s > 0] = 1.0
        else:
            total = np.linalg.norm(s, ord=norm.p)
            g = (s / total) ** (norm.p - 1)
    else:
        h = 1e-7 * max(1.0, float(s[0]))
        for j in range(s.size):
            step = np.zeros_like(s)
            step[j] = h
            g[j] = (phi_eval(norm, s + step) - phi_eval(norm, np.maximum(s - step, 0))) / (2 * h)
    return g


def dual_direction(norm: SymmetricNorm, t: np.ndarray) -> np.ndarray:
    """
    A sequence h with Phi(h) = 1 maximizing sum(t * h), t nonincreasing.

    Exact for Schatten norms; otherwise the best of the extreme candidates
    (1, ..., 1, 0, ...) / a_j, which is exact for operator and Ky Fan norms.
    """
    t = np.asarray(t, dtype=float)
    if t.size == 0 or t[0] == 0:
        out = np.zeros_like(t)
        if t.size:
            out[0] = 1.0
        return out
    if norm.kind is NormKind.SCHATTEN and norm.p > 1:
        q = norm.p / (norm.p - 1)
        h = t ** (q - 1)
        return h / phi_eval(norm, h)
    best, best_val = None, -np.inf
    for j in range(1, t.size + 1):
        h = np.zeros_like(t)
        h[:j] = 1.0 / phi_counting(norm, j)
        val = float(np.dot(t, h))
        if val > best_val:
            best, best_val = h, val
    return best


# ============================================================
# Validation of custom norming functions
# ============================================================

def _validate_custom(norm: SymmetricNorm) -> None:
    """Test normalization, symmetry, monotonicity, homogeneity and triangle on sample sequences."""
    if norm.phi is None:
        raise InvalidNorm("custom norm requires a callable")

    def call(seq, sort: bool = True) -> float:
        try:
            return float(norm.phi(_sorted_moduli(seq) if sort else np.asarray(seq, dtype=float)))
        except Exception as exc:  # user callables fail in arbitrary ways
            raise InvalidNorm(f"custom norming function raised: {exc}") from exc

    for unit in ([1.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0, 0.0]):
        if abs(call(unit) - 1.0) > _AXIOM_TOL:
            raise InvalidNorm(f"normalization fails: Phi{tuple(unit)} != 1")

    rng = np.random.default_rng(0)
    for _ in range(8):
        a = rng.uniform(0, 1, 5)
        b = rng.uniform(0, 1, 5)
        fa, fb = call(a), call(b)
        if fa < np.max(a) - _AXIOM_TOL:
            raise InvalidNorm("value below the largest entry")
        shuffled = rng.choice([-1.0, 1.0], a.size) * rng.permutation(a)
        if abs(call(shuffled, sort=False) - fa) > _AXIOM_TOL * max(1.0, fa):
            raise InvalidNorm("not invariant under permutation and sign")
        if call(np.maximum(a, b)) < max(fa, fb) - _AXIOM_TOL:
            raise InvalidNorm("not monotone")
        if abs(call(2.5 * a) - 2.5 * fa) > _AXIOM_TOL * max(1.0, fa):
            raise InvalidNorm("not homogeneous")
        # sorted sequences realize the worst case of the triangle inequality
        if call(np.sort(a)[::-1] + np.sort(b)[::-1]) > fa + fb + _AXIOM_TOL:
            raise InvalidNorm("triangle inequality fails")
