"""The tree space at desk scale: finitely supported vectors and their norm.

The norm of a vector x is the supremum, over admissible segment families
{S_1, ..., S_r}, of sum_i |S_i x|.  Two structural facts make this an exact
finite computation:

* an admissible family holds at most one m-n segment per level-m node (two
  segments with the same start share that node), and segments started at
  distinct level-m nodes are automatically disjoint, so for a fixed level
  pair (m, n) the best family picks, independently for every level-m node,
  the descendant path with the largest absolute path sum;
* path sums are constant once a path leaves the closure of the support, so
  both the level range and the path search are confined to the support
  closure.

The supremum is therefore a maximum over level pairs up to the support
depth, each evaluated by one bottom-up pass (``jh_norm``).  An independent
brute-force enumeration of every admissible family (``jh_norm_bruteforce``)
is kept as the oracle; it assumes neither fact.

Scalars are exact rationals by default; floats work throughout as an
alternate mode at the usual floating accuracy.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import InputError, OracleTooLargeError, TruncationError
from .tree import Branch, Node, Segment, is_admissible, validate_node

Scalar = Union[Fraction, int, float]

BRUTE_FORCE_DEPTH_BOUND = 4


class TreeVector:
    """A finitely supported function on the dyadic tree.

    Zero entries are never stored.  Instances are immutable; arithmetic
    returns new vectors.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[Node, Scalar] | None = None):
        cleaned = {}
        if entries:
            for node, value in entries.items():
                validate_node(node)
                if value != 0:
                    cleaned[node] = value
        self._entries = cleaned

    @classmethod
    def basis(cls, node: Node) -> "TreeVector":
        """The unit vector e_node."""
        return cls({node: Fraction(1)})

    @property
    def entries(self) -> Mapping[Node, Scalar]:
        return dict(self._entries)

    @property
    def support(self) -> frozenset[Node]:
        return frozenset(self._entries)

    @property
    def support_depth(self) -> int:
        """Max level of a stored node; 0 for the zero vector."""
        return max((len(n) for n in self._entries), default=0)

    def get(self, node: Node) -> Scalar:
        return self._entries.get(node, 0)

    def is_zero(self) -> bool:
        return not self._entries

    def __add__(self, other: "TreeVector") -> "TreeVector":
        out = dict(self._entries)
        for node, value in other._entries.items():
            out[node] = out.get(node, 0) + value
        return TreeVector(out)

    def __sub__(self, other: "TreeVector") -> "TreeVector":
        return self + (-1) * other

    def __rmul__(self, scalar: Scalar) -> "TreeVector":
        return TreeVector({n: scalar * v for n, v in self._entries.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TreeVector) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(frozenset(self._entries.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{n!r}: {v}" for n, v in sorted(self._entries.items()))
        return f"TreeVector({{{inner}}})"


# ---------------------------------------------------------------------------
# Functionals

@dataclass(frozen=True)
class NodeFunctional:
    """Evaluation at a single node: x -> x(node)."""

    node: Node

    def __post_init__(self) -> None:
        validate_node(self.node)

    def weight(self, node: Node) -> int:
        """Value on the basis vector of *node*."""
        return 1 if node == self.node else 0

    def evaluate(self, x: TreeVector) -> Scalar:
        return x.get(self.node)


@dataclass(frozen=True)
class BranchFunctional:
    """Sum of x along a truncated branch.

    The truncation depth must cover the support of every vector the
    functional is applied to; otherwise the value could depend on bits that
    were cut off, and a TruncationError is raised instead.
    """

    branch: Branch

    def weight(self, node: Node) -> int:
        if len(node) > self.branch.depth:
            raise TruncationError(
                f"branch of depth {self.branch.depth} applied at level {len(node)}"
            )
        return 1 if self.branch.passes_through(node) else 0

    def evaluate(self, x: TreeVector) -> Scalar:
        if x.support_depth > self.branch.depth:
            raise TruncationError(
                f"branch of depth {self.branch.depth} applied to a vector of "
                f"support depth {x.support_depth}"
            )
        return sum((v for n, v in x.entries.items()
                    if self.branch.passes_through(n)), Fraction(0))


@dataclass(frozen=True)
class SignedFamilyFunctional:
    """A +-1 combination of an admissible segment family.

    Admissibility makes the dual norm at most 1: the absolute signed sum is
    dominated by sum_i |S_i x|, which the space norm takes a supremum over.
    """

    terms: tuple[tuple[int, Segment], ...]

    def __post_init__(self) -> None:
        for sign, _ in self.terms:
            if sign not in (1, -1):
                raise InputError(f"sign must be +-1, got {sign}")
        if not is_admissible([seg for _, seg in self.terms]):
            raise InputError("segment family is not admissible")

    def weight(self, node: Node) -> int:
        return sum(sign for sign, seg in self.terms if seg.passes_through(node))

    def evaluate(self, x: TreeVector) -> Scalar:
        total = Fraction(0)
        for sign, seg in self.terms:
            total += sign * sum((x.get(n) for n in seg.members()), Fraction(0))
        return total


Functional = Union[NodeFunctional, BranchFunctional, SignedFamilyFunctional]


def evaluate(functional: Functional, x: TreeVector) -> Scalar:
    """Apply a functional to a vector."""
    return functional.evaluate(x)


def dual_certificate_lower_bound(x: TreeVector,
                                 candidates: Iterable[Functional]) -> Scalar:
    """max |f(x)| over the candidates; 0 if there are none.

    Every supported functional kind has dual norm <= 1, so the result never
    exceeds jh_norm(x).
    """
    best: Scalar = Fraction(0)
    for f in candidates:
        value = abs(f.evaluate(x))
        if value > best:
            best = value
    return best


# ---------------------------------------------------------------------------
# The norm

def _support_closure(x: TreeVector) -> dict[int, list[Node]]:
    """Ancestors of the support, grouped by level."""
    closure: set[Node] = set()
    for node in x.support:
        for i in range(len(node) + 1):
            closure.add(node[:i])
    by_level: dict[int, list[Node]] = {}
    for node in closure:
        by_level.setdefault(len(node), []).append(node)
    return by_level


def jh_norm(x: TreeVector) -> Scalar:
    """Exact space norm of *x*: the best admissible-family value.

    For each level pair m <= n up to the support depth, a bottom-up pass
    computes, per closure node, the max and min path sum down to level n
    (a path may exit the closure at any point, freezing its sum); the level
    pair's value is the sum over level-m closure nodes of the larger
    absolute extreme.  The norm is the max over level pairs.
    """
    if x.is_zero():
        return Fraction(0)
    by_level = _support_closure(x)
    closure = {n for nodes in by_level.values() for n in nodes}
    depth = x.support_depth
    best: Scalar = Fraction(0)
    for n in range(depth + 1):
        hi: dict[Node, Scalar] = {}
        lo: dict[Node, Scalar] = {}
        for level in range(n, -1, -1):
            for node in by_level.get(level, ()):
                value = x.get(node)
                if level == n:
                    hi[node] = value
                    lo[node] = value
                    continue
                hi_options = []
                lo_options = []
                for bit in "01":
                    child = node + bit
                    if child in closure:
                        hi_options.append(hi[child])
                        lo_options.append(lo[child])
                    else:
                        # exiting the closure: the rest of the path sums to 0
                        hi_options.append(Fraction(0))
                        lo_options.append(Fraction(0))
                hi[node] = value + max(hi_options)
                lo[node] = value + min(lo_options)
        for m in range(n + 1):
            total: Scalar = Fraction(0)
            for node in by_level.get(m, ()):
                total += max(hi[node], -lo[node])
            if total > best:
                best = total
    return best


def jh_norm_bruteforce(x: TreeVector,
                       depth_bound: int = BRUTE_FORCE_DEPTH_BOUND) -> Scalar:
    """Independent oracle: enumerate every admissible family in the full
    binary tree of the support depth and take the best value.

    Disjointness is checked on explicit member sets and no structural
    shortcut is taken, which keeps this slow (hence the depth bound) but
    independent of jh_norm.
    """
    if x.is_zero():
        return Fraction(0)
    depth = x.support_depth
    if depth > depth_bound:
        raise OracleTooLargeError(
            f"support depth {depth} exceeds the brute-force bound {depth_bound}"
        )
    best: Scalar = Fraction(0)
    for m in range(depth + 1):
        for n in range(m, depth + 1):
            segments = []
            for bits in itertools.product("01", repeat=n):
                end = "".join(bits)
                seg = Segment(end[:m], end)
                members = seg.members()
                value = abs(sum((x.get(node) for node in members), Fraction(0)))
                segments.append((members, value))

            def extend(index: int, used: frozenset[Node], acc: Scalar) -> None:
                nonlocal best
                if acc > best:
                    best = acc
                if index == len(segments):
                    return
                extend(index + 1, used, acc)
                members, value = segments[index]
                if used.isdisjoint(members):
                    extend(index + 1, used | members, acc + value)

            extend(0, frozenset(), Fraction(0))
    return best


def project_tail(level: int, x: TreeVector) -> TreeVector:
    """Keep the entries at levels >= *level*, zero the rest.

    This is a norm-1 projection: it never increases jh_norm.
    """
    if level < 0:
        raise InputError(f"projection level must be >= 0, got {level}")
    return TreeVector({n: v for n, v in x.entries.items() if len(n) >= level})
