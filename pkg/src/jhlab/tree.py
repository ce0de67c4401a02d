"""Dyadic-tree primitives: nodes, the prefix order, segments, truncated branches.

A node is a finite 0/1 path from the root, stored as a plain bit string
("" is the root).  The tree order is prefix extension: a <= b iff a is a
prefix of b.  A segment S(a, b) is the chain {c : a <= c <= b}; a family of
segments is admissible when all of them run between a common pair of levels
and are pairwise disjoint.  Branches are truncated to a finite depth: every
evaluation in this package acts on finitely supported vectors, so only
finitely many bits of a branch ever matter.

Everything here is an immutable value and every operation is pure.
"""

import itertools
from dataclasses import dataclass
from typing import Iterator

from .errors import InputError

Node = str


def validate_node(node: str) -> Node:
    """Check that *node* is a bit string and return it."""
    if any(c not in "01" for c in node):
        raise InputError(f"not a 0/1 node path: {node!r}")
    return node


def node_leq(a: Node, b: Node) -> bool:
    """Tree order: True iff a is a prefix of b (the root "" precedes all)."""
    return len(a) <= len(b) and b[: len(a)] == a


def incomparable(a: Node, b: Node) -> bool:
    """True iff neither node is a prefix of the other."""
    return not node_leq(a, b) and not node_leq(b, a)


def descendants_at_level(root: Node, level: int) -> list[Node]:
    """All descendants of *root* at depth *level*, in lexicographic order."""
    if level < len(root):
        raise InputError(
            f"invalid level {level} for a node of length {len(root)}"
        )
    return [root + "".join(tail)
            for tail in itertools.product("01", repeat=level - len(root))]


@dataclass(frozen=True)
class Segment:
    """The chain of nodes from *start* down to *end* (inclusive).

    A segment with |start| = m and |end| = n is called an m-n segment; its
    member set has n - m + 1 nodes, one per level.
    """

    start: Node
    end: Node

    def __post_init__(self) -> None:
        validate_node(self.start)
        validate_node(self.end)
        if not node_leq(self.start, self.end):
            raise InputError(
                f"segment end {self.end!r} is not a descendant of {self.start!r}"
            )

    @property
    def levels(self) -> tuple[int, int]:
        return len(self.start), len(self.end)

    def members(self) -> frozenset[Node]:
        return frozenset(self.end[:i] for i in range(len(self.start), len(self.end) + 1))

    def passes_through(self, node: Node) -> bool:
        return node_leq(self.start, node) and node_leq(node, self.end)

    def __str__(self) -> str:
        return f"{self.start}..{self.end}"

    @classmethod
    def parse(cls, text: str) -> "Segment":
        try:
            start, end = text.split("..")
        except ValueError:
            raise InputError(f"segment text must look like 'start..end': {text!r}")
        return cls(validate_node(start), validate_node(end))


def is_admissible(family: list[Segment]) -> bool:
    """True iff all segments run between one common level pair and are
    pairwise disjoint.  The empty family is admissible."""
    if not family:
        return True
    if len({seg.levels for seg in family}) != 1:
        return False
    seen: set[Node] = set()
    for seg in family:
        members = seg.members()
        if seen & members:
            return False
        seen |= members
    return True


@dataclass(frozen=True)
class Branch:
    """A maximal chain truncated to a finite depth.

    Passes through exactly one node per level 0..depth; acting on any vector
    supported within that depth is independent of how the branch would
    continue below it.
    """

    bits: str

    def __post_init__(self) -> None:
        validate_node(self.bits)

    @property
    def depth(self) -> int:
        return len(self.bits)

    def node_at(self, level: int) -> Node:
        if not 0 <= level <= self.depth:
            raise InputError(f"level {level} outside branch depth {self.depth}")
        return self.bits[:level]

    def nodes(self) -> Iterator[Node]:
        return (self.bits[:i] for i in range(self.depth + 1))

    def passes_through(self, node: Node) -> bool:
        return len(node) <= self.depth and self.bits[: len(node)] == node

    def __str__(self) -> str:
        return self.bits
