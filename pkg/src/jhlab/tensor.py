"""Finite tensors over the tree space and two-sided norm bounds.

An element here is a finitely supported map (left node, right node) ->
coefficient, standing for sum c(a, b) e_a (x) e_b in the injective tensor
product of the space with itself.  The exact injective norm of a general
element is out of reach (it quantifies over the full dual ball), so the
module returns certified two-sided bounds instead and reports exactness
when they meet:

* upper: entries grouped by level pair split into bipartite components;
  nodes at one common level are pairwise incomparable, so each component
  spans isometric l-1 bases on both sides and its norm is exactly sigma of
  its coefficient matrix; the triangle inequality sums the pieces.
* lower: sigma of a pairing matrix against any functional family whose
  sign combinations stay in the dual ball - singleton-segment families per
  level pair, and deeper tail-segment families through the maximal support
  nodes when their cut-level prefixes are distinct.

For a single-level-pair element both routes give sigma of the coefficient
matrix and the bounds are tight.
"""

from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

from .errors import InputError
from .matrices import EXACT_SIGMA_BOUND, SquareMatrix, sigma_rows
from .space import Functional, Scalar, SignedFamilyFunctional, TreeVector
from .tree import Node, Segment, validate_node

TensorKey = tuple[Node, Node]


class TensorElement:
    """Sparse node-pair tensor; zero coefficients are never stored."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[TensorKey, Scalar] | None = None):
        cleaned = {}
        if entries:
            for (left, right), value in entries.items():
                validate_node(left)
                validate_node(right)
                if value != 0:
                    cleaned[(left, right)] = value
        self._entries = cleaned

    @classmethod
    def rank_one(cls, left: Node, right: Node, value: Scalar = Fraction(1)) -> "TensorElement":
        return cls({(left, right): value})

    @property
    def entries(self) -> Mapping[TensorKey, Scalar]:
        return dict(self._entries)

    @property
    def left_support(self) -> frozenset[Node]:
        return frozenset(k[0] for k in self._entries)

    @property
    def right_support(self) -> frozenset[Node]:
        return frozenset(k[1] for k in self._entries)

    def get(self, left: Node, right: Node) -> Scalar:
        return self._entries.get((left, right), 0)

    def is_zero(self) -> bool:
        return not self._entries

    def __add__(self, other: "TensorElement") -> "TensorElement":
        out = dict(self._entries)
        for k, v in other._entries.items():
            out[k] = out.get(k, 0) + v
        return TensorElement(out)

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + (-1) * other

    def __rmul__(self, scalar: Scalar) -> "TensorElement":
        return TensorElement({k: scalar * v for k, v in self._entries.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TensorElement) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(frozenset(self._entries.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"({l!r}, {r!r}): {v}"
                          for (l, r), v in sorted(self._entries.items()))
        return f"TensorElement({{{inner}}})"


def combine(terms: Iterable[tuple[Scalar, TensorElement]]) -> TensorElement:
    """Linear combination sum(coefficient * element)."""
    out: dict[TensorKey, Scalar] = {}
    for coefficient, element in terms:
        if coefficient == 0:
            continue
        for k, v in element._entries.items():
            out[k] = out.get(k, 0) + coefficient * v
    return TensorElement(out)


# ---------------------------------------------------------------------------
# functional action

def apply_left(W: TensorElement, functional: Functional) -> TreeVector:
    """Apply the functional to the left legs: the vector
    sum_b (sum_a c(a, b) f(e_a)) e_b."""
    out: dict[Node, Scalar] = {}
    for (left, right), value in W._entries.items():
        weight = functional.weight(left)
        if weight:
            out[right] = out.get(right, 0) + weight * value
    return TreeVector(out)


def pair(W: TensorElement, f: Functional, g: Functional) -> Scalar:
    """The bilinear pairing sum c(a, b) f(e_a) g(e_b); identical to
    evaluating g on apply_left(W, f)."""
    total: Scalar = Fraction(0)
    for (left, right), value in W._entries.items():
        weight = f.weight(left)
        if weight:
            total += weight * value * g.weight(right)
    return total


def pairing_matrix(W: TensorElement, fs: Sequence[Functional],
                   gs: Sequence[Functional]) -> SquareMatrix:
    """Square matrix of pair(W, fs[i], gs[j]) values."""
    if not fs or not gs:
        raise InputError("functional lists must be nonempty")
    if len(fs) != len(gs):
        raise InputError("functional lists must have equal length for a square matrix")
    return SquareMatrix([[pair(W, f, g) for g in gs] for f in fs])


# ---------------------------------------------------------------------------
# norm bounds

class EpsBounds(NamedTuple):
    lo: Union[Fraction, float]
    hi: Union[Fraction, float]
    coarse: bool


def _bipartite_components(keys: list[TensorKey]) -> list[list[TensorKey]]:
    """Connected components of the entry set, linking entries that share a
    left or a right node."""
    by_left: dict[Node, list[int]] = {}
    by_right: dict[Node, list[int]] = {}
    for idx, (left, right) in enumerate(keys):
        by_left.setdefault(left, []).append(idx)
        by_right.setdefault(right, []).append(idx)
    seen = [False] * len(keys)
    components = []
    for start in range(len(keys)):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        component = []
        while stack:
            idx = stack.pop()
            component.append(keys[idx])
            left, right = keys[idx]
            for nxt in by_left[left] + by_right[right]:
                if not seen[nxt]:
                    seen[nxt] = True
                    stack.append(nxt)
        components.append(component)
    return components


def _component_sigma(W: TensorElement, component: list[TensorKey],
                     bound: int) -> tuple[Scalar, bool]:
    """(sigma of the component's coefficient matrix, coarse flag); falls
    back to the absolute entry sum when the component is too large to
    enumerate."""
    lefts = sorted({k[0] for k in component})
    rights = sorted({k[1] for k in component})
    if len(lefts) > bound:
        return sum(abs(W.get(*k)) for k in component), True
    rows = [[W.get(left, right) for right in rights] for left in lefts]
    return sigma_rows(rows, bound=bound), False


def _segment_family(prefixes: list[Node], bottoms: list[Node]) -> list[SignedFamilyFunctional]:
    """One single-segment functional per (prefix, bottom) pair; all sign
    combinations of the family stay in the dual ball because the segments
    are pairwise disjoint with common levels."""
    return [SignedFamilyFunctional(((1, Segment(p, b)),))
            for p, b in zip(prefixes, bottoms)]


def _maximal_nodes(nodes: Iterable[Node]) -> list[Node]:
    nodes = sorted(nodes)
    return [n for n in nodes
            if not any(m != n and m[: len(n)] == n for m in nodes)]


def _tail_candidates(support: frozenset[Node]) -> list[list[SignedFamilyFunctional]]:
    """Admissible tail-segment families through the maximal support nodes,
    one per viable cut level."""
    if not support:
        return []
    maximal = _maximal_nodes(support)
    deepest = max(len(n) for n in maximal)
    bottoms = [n + "0" * (deepest - len(n)) for n in maximal]
    levels = sorted({len(n) for n in support} | {0})
    families = []
    for cut in levels:
        if cut > min(len(n) for n in maximal):
            continue
        prefixes = [b[:cut] for b in bottoms]
        if len(set(prefixes)) != len(prefixes):
            continue  # two tails would overlap: not an admissible family
        families.append(_segment_family(prefixes, bottoms))
    return families


def eps_norm_bounds(W: TensorElement, bound: int = EXACT_SIGMA_BOUND) -> EpsBounds:
    """Certified (lo, hi) bounds on the injective tensor norm of W.

    lo == hi whenever every entry sits at one level pair (then both equal
    sigma of the coefficient matrix).  The coarse flag reports that some
    component was too large for exact sigma and entered hi as an absolute
    entry sum.
    """
    if W.is_zero():
        return EpsBounds(Fraction(0), Fraction(0), False)
    groups: dict[tuple[int, int], list[TensorKey]] = {}
    for key in W._entries:
        groups.setdefault((len(key[0]), len(key[1])), []).append(key)

    hi: Scalar = Fraction(0)
    lo: Scalar = max(abs(v) for v in W._entries.values())
    coarse = False
    for keys in groups.values():
        group_lo: Scalar = Fraction(0)
        for component in _bipartite_components(keys):
            value, is_coarse = _component_sigma(W, component, bound)
            hi += value
            if is_coarse:
                coarse = True
            else:
                # singleton-segment families across a level-pair group are
                # admissible, so the per-component sigmas add up as a bound
                group_lo += value
        if group_lo > lo:
            lo = group_lo

    left_families = _tail_candidates(W.left_support)
    right_families = _tail_candidates(W.right_support)
    for fs in left_families:
        if len(fs) > bound:
            continue
        for gs in right_families:
            rows = [[pair(W, f, g) for g in gs] for f in fs]
            value = sigma_rows(rows, bound=bound)
            if value > lo:
                lo = value
    return EpsBounds(lo, hi, coarse)
