"""Block permutations: bijections of {0..w} fixing 0."""
from dataclasses import dataclass
from itertools import permutations, product
from math import factorial, prod

from src.errors import InvalidPermutation, RankMismatch


@dataclass(frozen=True)
class BlockPermutation:
    """sigma as a tuple: sigma[i] is the image of block i; sigma[0] == 0."""

    sigma: tuple[int, ...]

    def __post_init__(self):
        sigma = tuple(int(s) for s in self.sigma)
        if not sigma or sigma[0] != 0:
            raise InvalidPermutation(f"{sigma} does not fix block 0")
        if sorted(sigma) != list(range(len(sigma))):
            raise InvalidPermutation(f"{sigma} is not a permutation of 0..{len(sigma) - 1}")
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def identity(cls, w: int) -> "BlockPermutation":
        return cls(tuple(range(w + 1)))

    @property
    def w(self) -> int:
        return len(self.sigma) - 1

    def __call__(self, i: int) -> int:
        return self.sigma[i]

    @property
    def is_identity(self) -> bool:
        return all(i == s for i, s in enumerate(self.sigma))

    @property
    def moved(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.sigma) if i != s)

    def inverse(self) -> "BlockPermutation":
        inv = [0] * len(self.sigma)
        for i, s in enumerate(self.sigma):
            inv[s] = i
        return BlockPermutation(tuple(inv))

    def compose(self, other: "BlockPermutation") -> "BlockPermutation":
        """(self o other)(i) = self(other(i))."""
        if other.w != self.w:
            raise InvalidPermutation("cannot compose permutations of different sizes")
        return BlockPermutation(tuple(self.sigma[other.sigma[i]] for i in range(len(self.sigma))))

    def check_ranks(self, ranks) -> None:
        """
        Raise unless sigma only moves blocks between equal ranks.

        Args:
            ranks: Ranks of p_0..p_w
        """
        if len(ranks) != len(self.sigma):
            raise RankMismatch(f"permutation has {len(self.sigma)} entries, family has {len(ranks)} blocks")
        for i, s in enumerate(self.sigma):
            if ranks[i] != ranks[s]:
                raise RankMismatch(f"block {i} (rank {ranks[i]}) sent to block {s} (rank {ranks[s]})")

    def __str__(self) -> str:
        cycles, seen = [], set()
        for start in range(1, len(self.sigma)):
            if start in seen or self.sigma[start] == start:
                continue
            cycle, i = [], start
            while i not in seen:
                seen.add(i)
                cycle.append(i)
                i = self.sigma[i]
            cycles.append("(" + " ".join(map(str, cycle)) + ")")
        return "".join(cycles) or "id"


def rank_classes(ranks) -> list[list[int]]:
    """Indices 1..w grouped by equal rank, in order of first appearance."""
    groups: dict[int, list[int]] = {}
    for i in range(1, len(ranks)):
        groups.setdefault(ranks[i], []).append(i)
    return list(groups.values())


def count_rank_preserving(ranks) -> int:
    """|F|: product of factorials of the rank-multiplicity classes."""
    return prod(factorial(len(g)) for g in rank_classes(ranks))


def rank_preserving_permutations(ranks) -> list[BlockPermutation]:
    """All rank-preserving block permutations fixing 0, lexicographically sorted."""
    classes = rank_classes(ranks)
    out = []
    for images in product(*(permutations(g) for g in classes)):
        sigma = list(range(len(ranks)))
        for group, image in zip(classes, images):
            for src, dst in zip(group, image):
                sigma[src] = dst
        out.append(BlockPermutation(tuple(sigma)))
    return sorted(out, key=lambda p: p.sigma)
