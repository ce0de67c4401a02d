"""The matrix-norm engine.

sigma(M) is the norm of M as a map from l-infinity(n) to l-1(n):

    sigma(M) = sup { sum_{i,j} a_i b_j M(i,j) : |a_i|, |b_j| <= 1 }.

The objective is convex in a for fixed b and vice versa, so the supremum
over the cube is attained at a sign-vector vertex, and for fixed signs a the
optimal b_j is the sign of the j-th column sum.  sigma is therefore the
exact maximum over a in {+-1}^n of sum_j |sum_i a_i M(i,j)|, computed here
by exhaustive sign enumeration (rational arithmetic, Gray-code order with
incremental column-sum updates) up to a dimension bound, and by alternating
maximization from random sign starts beyond it (a certified lower bound:
the reported value is the exact objective at the best sign vector found).

Indices in all formulas are 1-based, matching (-1)^(min(i,j)+1) and the
main-triangle rule i + j <= n + 1; the 0-based storage converts at the
boundary.
"""

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import ExactBoundExceededError, InputError

EXACT_SIGMA_BOUND = 26

# suffix rows batched per numpy step in the exact enumeration
_SUFFIX_BITS = 14

# int64 headroom: |column sum| * n_cols summed must stay well below 2^63
_INT64_SAFE = 2 ** 62


class SquareMatrix:
    """A dense square matrix with 1-based entry access.

    Rows are stored as immutable tuples; all operations return new
    matrices.  Scalars may be exact rationals (default throughout the
    package) or floats.
    """

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence]):
        rows = tuple(tuple(r) for r in rows)
        if not rows:
            raise InputError("matrix must have dimension >= 1")
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise InputError("matrix must be square")
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, name, value):
        raise AttributeError("SquareMatrix is immutable")

    @property
    def n(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int):
        """Entry at 1-based position (i, j)."""
        return self.rows[i - 1][j - 1]

    def map_entries(self, fn: Callable[[int, int], object]) -> "SquareMatrix":
        """New matrix with entry (i, j) = fn(i, j), indices 1-based."""
        n = self.n
        return SquareMatrix([[fn(i, j) for j in range(1, n + 1)]
                             for i in range(1, n + 1)])

    def scale(self, factor) -> "SquareMatrix":
        return SquareMatrix([[factor * v for v in row] for row in self.rows])

    def transpose(self) -> "SquareMatrix":
        return SquareMatrix(list(zip(*self.rows)))

    def entrywise_product(self, other: "SquareMatrix") -> "SquareMatrix":
        if other.n != self.n:
            raise InputError("dimension mismatch in entrywise product")
        return SquareMatrix([[a * b for a, b in zip(ra, rb)]
                             for ra, rb in zip(self.rows, other.rows)])

    def add(self, other: "SquareMatrix") -> "SquareMatrix":
        if other.n != self.n:
            raise InputError("dimension mismatch in matrix sum")
        return SquareMatrix([[a + b for a, b in zip(ra, rb)]
                             for ra, rb in zip(self.rows, other.rows)])

    def is_zero(self) -> bool:
        return all(v == 0 for row in self.rows for v in row)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SquareMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"SquareMatrix({[list(r) for r in self.rows]!r})"

    @classmethod
    def identity(cls, n: int) -> "SquareMatrix":
        return cls([[Fraction(1) if i == j else Fraction(0) for j in range(n)]
                    for i in range(n)])

    @classmethod
    def zero(cls, n: int) -> "SquareMatrix":
        return cls([[Fraction(0)] * n for _ in range(n)])


# ---------------------------------------------------------------------------
# sigma on raw row lists (rectangular allowed; used for tensor blocks too)

def _rows_to_integers(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], int]:
    """Scale rational rows to integers; returns (int rows, common factor)."""
    scale = 1
    for row in rows:
        for v in row:
            scale = scale * v.denominator // math.gcd(scale, v.denominator)
    return [[int(v * scale) for v in row] for row in rows], scale


def _sigma_int_batched(rows: list[list[int]]) -> int:
    """Exact integer enumeration: batch the last rows' sign patterns in one
    numpy table, walk the leading rows' signs in Gray-code order updating
    their column-sum contribution incrementally."""
    A = np.array(rows, dtype=np.int64)
    n, _ = A.shape
    k = min(n, _SUFFIX_BITS)
    p = n - k
    codes = np.arange(2 ** k, dtype=np.uint32)
    bits = ((codes[:, None] >> np.arange(k, dtype=np.uint32)[None, :]) & 1)
    suffix_signs = 2 * bits.astype(np.int64) - 1
    suffix_sums = suffix_signs @ A[p:]
    if p == 0:
        # global sign symmetry: fix the last row's sign to +1
        half = suffix_sums[suffix_signs[:, -1] == 1]
        return int(np.abs(half).sum(axis=1).max())
    prefix = A[:p].sum(axis=0)
    state = np.ones(p, dtype=np.int64)
    best = int(np.abs(suffix_sums + prefix).sum(axis=1).max())
    # row 0 stays +1 (sign symmetry); Gray-walk rows 1..p-1
    for step in range(1, 2 ** (p - 1) if p > 1 else 1):
        flip = (step & -step).bit_length()
        state[flip] = -state[flip]
        prefix = prefix + 2 * state[flip] * A[flip]
        value = int(np.abs(suffix_sums + prefix).sum(axis=1).max())
        if value > best:
            best = value
    return best


def _sigma_int_bigint(rows: list[list[int]]) -> int:
    """Pure-Python Gray-code walk; exact for integers of any size."""
    n = len(rows)
    ncols = len(rows[0])
    sums = [sum(rows[i][j] for i in range(n)) for j in range(ncols)]
    signs = [1] * n
    best = sum(abs(s) for s in sums)
    for step in range(1, 2 ** (n - 1) if n > 1 else 1):
        flip = (step & -step).bit_length()
        signs[flip] = -signs[flip]
        delta = 2 * signs[flip]
        row = rows[flip]
        for j in range(ncols):
            sums[j] += delta * row[j]
        value = sum(abs(s) for s in sums)
        if value > best:
            best = value
    return best


def sigma_rows(rows: Sequence[Sequence], bound: int = EXACT_SIGMA_BOUND):
    """Exact sigma of a (possibly rectangular) coefficient array.

    Rational input gives an exact Fraction; float input is enumerated in
    float64.  The row count must not exceed *bound* (2^rows scaling).
    """
    n = len(rows)
    if n == 0:
        return Fraction(0)
    if n > bound:
        raise ExactBoundExceededError(
            f"{n} rows exceeds the exact enumeration bound {bound}; "
            "use the heuristic lower bound"
        )
    if any(isinstance(v, float) for row in rows for v in row):
        A = np.array([[float(v) for v in row] for row in rows], dtype=np.float64)
        best = 0.0
        signs = np.ones(n)
        sums = A.sum(axis=0)
        best = float(np.abs(sums).sum())
        for step in range(1, 2 ** (n - 1) if n > 1 else 1):
            flip = (step & -step).bit_length()
            signs[flip] = -signs[flip]
            sums = sums + 2 * signs[flip] * A[flip]
            best = max(best, float(np.abs(sums).sum()))
        return best
    exact_rows = [[Fraction(v) for v in row] for row in rows]
    int_rows, scale = _rows_to_integers(exact_rows)
    ncols = len(int_rows[0])
    magnitude = max((abs(v) for row in int_rows for v in row), default=0)
    if magnitude * len(int_rows) * max(ncols, 1) < _INT64_SAFE:
        value = _sigma_int_batched(int_rows)
    else:
        value = _sigma_int_bigint(int_rows)
    return Fraction(value, scale)


def sigma_exact(M: SquareMatrix, bound: int = EXACT_SIGMA_BOUND):
    """Exact sigma(M) by full sign enumeration; raises beyond *bound*."""
    return sigma_rows(M.rows, bound=bound)


def sigma_heuristic(M: SquareMatrix, restarts: int = 64, seed: int = 0):
    """Certified lower bound on sigma(M) by alternating maximization.

    From each random sign start: fix a, set b to the signs of the column
    sums; fix b, set a to the signs of the row sums; repeat to a fixpoint.
    Zero sums take sign +1 so reruns are reproducible.  The search runs in
    float, but the returned value is the objective at the best sign vector
    re-evaluated in the matrix's own arithmetic, hence never above sigma(M).
    """
    if restarts < 1:
        raise InputError("restarts must be >= 1")
    rng = random.Random(seed)
    n = M.n
    A = np.array([[float(v) for v in row] for row in M.rows], dtype=np.float64)
    exact = not any(isinstance(v, float) for row in M.rows for v in row)
    best = Fraction(0) if exact else 0.0
    for _ in range(restarts):
        a = np.array([rng.choice((-1.0, 1.0)) for _ in range(n)])
        for _ in range(4 * n + 16):
            b = np.where(a @ A >= 0, 1.0, -1.0)
            a_next = np.where(A @ b >= 0, 1.0, -1.0)
            if np.array_equal(a_next, a):
                break
            a = a_next
        signs = [int(v) for v in a]
        if exact:
            value = Fraction(0)
            for j in range(n):
                value += abs(sum(signs[i] * M.rows[i][j] for i in range(n)))
        else:
            value = float(np.abs(np.array(signs, dtype=np.float64) @ A).sum())
        if value > best:
            best = value
    return best


# ---------------------------------------------------------------------------
# sign transforms and the main triangle

def alternating_sign_transform(M: SquareMatrix) -> SquareMatrix:
    """Flip entry (i, j) by (-1)^(min(i,j)+1); an involution."""
    return M.map_entries(
        lambda i, j: M.entry(i, j) if min(i, j) % 2 == 1 else -M.entry(i, j)
    )


def triangle_sign_pattern(n: int) -> SquareMatrix:
    """The +-1 matrix that is +1 on the main triangle i + j <= n + 1 and
    -1 strictly below it."""
    if n < 1:
        raise InputError("dimension must be >= 1")
    return SquareMatrix([[Fraction(1) if i + j <= n + 1 else Fraction(-1)
                          for j in range(1, n + 1)] for i in range(1, n + 1)])


def main_triangle_projection(M: SquareMatrix) -> SquareMatrix:
    """Keep the entries with i + j <= n + 1, zero the rest; idempotent.

    Equivalently (M + pattern .* M) / 2 for the triangle sign pattern.
    """
    n = M.n
    zero = Fraction(0) if not isinstance(M.entry(1, 1), float) else 0.0
    return M.map_entries(lambda i, j: M.entry(i, j) if i + j <= n + 1 else zero)


# ---------------------------------------------------------------------------
# the odds-then-evens permutation and its sign identity

@dataclass(frozen=True)
class SignPermutation:
    """A permutation of {1..n}, stored as the 1-based image tuple."""

    values: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.values)
        if sorted(self.values) != list(range(1, n + 1)):
            raise InputError(f"not a permutation of 1..{n}: {self.values}")

    @property
    def n(self) -> int:
        return len(self.values)

    def apply(self, i: int) -> int:
        return self.values[i - 1]

    def inverse(self) -> "SignPermutation":
        inv = [0] * self.n
        for i, v in enumerate(self.values, start=1):
            inv[v - 1] = i
        return SignPermutation(tuple(inv))

    @classmethod
    def identity(cls, n: int) -> "SignPermutation":
        return cls(tuple(range(1, n + 1)))


def odd_even_permutation(n: int) -> SignPermutation:
    """Odd integers of {1..n} in increasing order, then the even ones in
    decreasing order: (1, 3, 5, ..., 6, 4, 2)."""
    if n < 1:
        raise InputError("dimension must be >= 1")
    odds = list(range(1, n + 1, 2))
    evens = list(range(n if n % 2 == 0 else n - 1, 0, -2))
    return SignPermutation(tuple(odds + evens))


def odd_even_identity_holds(n: int) -> bool:
    """Exhaustively check, for pi the odds-then-evens permutation, that
    (-1)^(min(pi(i),pi(j))+1) = 1 exactly when i + j <= n + 1."""
    pi = odd_even_permutation(n)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            positive = min(pi.apply(i), pi.apply(j)) % 2 == 1
            if positive != (i + j <= n + 1):
                return False
    return True


def conjugate_by_permutation(N: SquareMatrix, p: SignPermutation) -> SquareMatrix:
    """The matrix M(i, j) = N(p^-1(i), p^-1(j)).

    sigma is invariant under this relabeling, and with the odds-then-evens
    permutation the alternating transform of the result has the same sigma
    as the triangle-sign-flipped original.
    """
    if p.n != N.n:
        raise InputError(f"permutation size {p.n} != matrix size {N.n}")
    inv = p.inverse()
    return N.map_entries(lambda i, j: N.entry(inv.apply(i), inv.apply(j)))
