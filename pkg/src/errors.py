"""Exception hierarchy shared by every pinchlab module."""


class PinchlabError(Exception):
    """Base class for all library errors."""


class MalformedMatrix(PinchlabError, ValueError):
    """Input is not a finite 2-D complex array of the expected shape."""


class SingularFactor(PinchlabError, ArithmeticError):
    """A polar factor was requested for a (numerically) singular matrix."""


class LogBranchFailure(PinchlabError, ArithmeticError):
    """The principal logarithm is undefined: an eigenvalue sits at -1."""


class InvalidNorm(PinchlabError, ValueError):
    """A norming function violates normalization, symmetry or monotonicity."""


class NotOrthogonal(PinchlabError, ValueError):
    """Frames are not orthonormal or not mutually orthogonal."""


class OverComplete(PinchlabError, ValueError):
    """Ranks of a projection family sum past the ambient dimension."""


class DimensionMismatch(PinchlabError, ValueError):
    """Operands live on different ambient dimensions."""


class DimensionTooLarge(PinchlabError, ValueError):
    """Dimension exceeds what a dense computation supports."""


class DimensionTooSmall(PinchlabError, ValueError):
    """Not enough ambient room for the requested construction."""


class BadVariant(PinchlabError, ValueError):
    """A tangent projection variant references an invalid block or vector."""


class RankMismatch(PinchlabError, ValueError):
    """A block permutation moves a block onto one of different rank."""


class InvalidPermutation(PinchlabError, ValueError):
    """A block permutation is not a bijection fixing block 0."""


class FiberTooLarge(PinchlabError, ValueError):
    """Fiber enumeration would exceed the configured cap."""


class NotNormal(PinchlabError, ValueError):
    """Matrix does not commute with its adjoint."""


class IndexOutOfRange(PinchlabError, IndexError):
    """Block or sequence index outside the valid range."""


class BadPartition(PinchlabError, ValueError):
    """Sample times do not form the expected uniform partition."""


class ConfigError(PinchlabError, ValueError):
    """Experiment configuration is malformed; message carries diagnostics."""
