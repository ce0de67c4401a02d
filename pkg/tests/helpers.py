"""Shared test utilities: independent oracles and random input builders.

The oracles here deliberately avoid every optimized path in the library:
plain double loops over sign vectors, explicit enumeration of admissible
segment families, pure Fraction arithmetic.  Tests freeze oracle outputs
or compare library results against these directly.
"""

from fractions import Fraction
from itertools import product
from random import Random

from jhlab import Segment, SquareMatrix, TreeVector, is_admissible


# ---------------------------------------------------------------------------
# sigma oracles

def naive_sigma(matrix: SquareMatrix) -> Fraction:
    """The paper-shaped sup: max over a, b in {+-1}^n of the bilinear
    form sum a_i b_j M(i,j), by full double enumeration."""
    n = matrix.n
    best = None
    for a in product((1, -1), repeat=n):
        for b in product((1, -1), repeat=n):
            total = Fraction(0)
            for i in range(n):
                for j in range(n):
                    total += a[i] * b[j] * matrix.entry(i + 1, j + 1)
            if best is None or total > best:
                best = total
    return best


def naive_sigma_rows(rows) -> Fraction:
    """Single-sign form on a rectangular row list: max over a in {+-1}^n
    of sum_j |sum_i a_i rows[i][j]|."""
    n = len(rows)
    m = len(rows[0])
    best = Fraction(0)
    for a in product((1, -1), repeat=n):
        total = Fraction(0)
        for j in range(m):
            total += abs(sum(a[i] * Fraction(rows[i][j]) for i in range(n)))
        if total > best:
            best = total
    return best


def grid_sigma(matrix: SquareMatrix, points=(-1, Fraction(-1, 2), 0,
                                             Fraction(1, 2), 1)) -> Fraction:
    """The bilinear sup restricted to a grid inside the cube [-1,1]^n x
    [-1,1]^n; never exceeds the vertex optimum."""
    n = matrix.n
    best = Fraction(0)
    for a in product(points, repeat=n):
        for b in product(points, repeat=n):
            total = Fraction(0)
            for i in range(n):
                for j in range(n):
                    total += a[i] * b[j] * matrix.entry(i + 1, j + 1)
            if total > best:
                best = total
    return best


# ---------------------------------------------------------------------------
# tree-space oracle: full admissible-family enumeration at tiny depth

def all_nodes(depth: int) -> list[str]:
    """Every node of the dyadic tree down to *depth*."""
    out = [""]
    for d in range(1, depth + 1):
        out.extend("".join(bits) for bits in product("01", repeat=d))
    return out


def all_segments(depth: int) -> list[Segment]:
    """Every segment living inside the depth-*depth* tree."""
    out = []
    for start in all_nodes(depth):
        for end in all_nodes(depth):
            if len(end) >= len(start) and end[: len(start)] == start:
                out.append(Segment(start, end))
    return out


def tiny_norm(x: TreeVector, depth: int = 2) -> Fraction:
    """JH norm by enumerating every admissible family in the depth-2 tree.

    Recursion over the segment list with incremental disjointness
    pruning; exponential, usable only at tiny depth.
    """
    if x.support_depth > depth:
        raise ValueError("tiny_norm oracle only handles tiny depth")
    segments = all_segments(depth)
    best = Fraction(0)

    def segment_sum(seg: Segment) -> Fraction:
        return sum((x.get(n) for n in seg.members()), Fraction(0))

    def descend(index: int, taken: list[Segment], value: Fraction) -> None:
        nonlocal best
        if value > best:
            best = value
        for next_index in range(index, len(segments)):
            seg = segments[next_index]
            if taken and seg.levels != taken[0].levels:
                continue
            if not is_admissible(taken + [seg]):
                continue
            taken.append(seg)
            descend(next_index + 1, taken, value + abs(segment_sum(seg)))
            taken.pop()

    descend(0, [], Fraction(0))
    return best


# ---------------------------------------------------------------------------
# random builders (all seeded by the caller)

def random_fraction(rng: Random, numerator: int = 9,
                    denominator: int = 4) -> Fraction:
    return Fraction(rng.randint(-numerator, numerator),
                    rng.randint(1, denominator))


def random_nonzero_fraction(rng: Random, numerator: int = 9,
                            denominator: int = 4) -> Fraction:
    while True:
        value = random_fraction(rng, numerator, denominator)
        if value != 0:
            return value


def random_matrix(rng: Random, n: int, numerator: int = 9,
                  denominator: int = 4) -> SquareMatrix:
    return SquareMatrix([[random_fraction(rng, numerator, denominator)
                          for _ in range(n)] for _ in range(n)])


def random_tree_vector(rng: Random, depth: int,
                       max_nonzeros: int = 8) -> TreeVector:
    nodes = all_nodes(depth)
    count = rng.randint(1, min(max_nonzeros, len(nodes)))
    chosen = rng.sample(nodes, count)
    return TreeVector({node: random_nonzero_fraction(rng) for node in chosen})
