"""Candidate matrix families for the log-growth measurement.

The growth pipeline takes a candidate family N_n, scales it to sigma = 1,
relabels rows and columns by the odds-then-evens permutation, and measures
sigma of the alternating transform of the result.  The constant reported is
a measurement of the families implemented here, not a certified extremal
order; alternative families can be registered as plug-ins.

The default candidate is the antisymmetric Hilbert kernel 1/(i - j), the
classical witness for unbounded triangular truncation.  The "hankel"
variant 1/(i + j - n - 1), singular along the main anti-diagonal that the
triangle rule cuts on, grows noticeably faster in this norm and is kept as
a second registered family.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .errors import InputError
from .matrices import (SquareMatrix, alternating_sign_transform,
                       conjugate_by_permutation, odd_even_permutation,
                       sigma_exact, sigma_heuristic)

EXACT = "exact"
HEURISTIC = "heuristic-lower-bound"


def hilbert_candidate(n: int) -> SquareMatrix:
    """N(i, j) = 1/(i - j) off the diagonal, 0 on it; antisymmetric."""
    if n < 1:
        raise InputError("dimension must be >= 1")
    return SquareMatrix([[Fraction(0) if i == j else Fraction(1, i - j)
                          for j in range(1, n + 1)] for i in range(1, n + 1)])


def hankel_candidate(n: int) -> SquareMatrix:
    """N(i, j) = 1/(i + j - n - 1) off the main anti-diagonal, 0 on it."""
    if n < 1:
        raise InputError("dimension must be >= 1")
    return SquareMatrix([[Fraction(0) if i + j == n + 1 else Fraction(1, i + j - n - 1)
                          for j in range(1, n + 1)] for i in range(1, n + 1)])


CANDIDATE_FAMILIES: dict[str, Callable[[int], SquareMatrix]] = {
    "hilbert": hilbert_candidate,
    "hankel": hankel_candidate,
}


def register_candidate(name: str, builder: Callable[[int], SquareMatrix]) -> None:
    """Plug-in point for alternative candidate families."""
    CANDIDATE_FAMILIES[name] = builder


def candidate(family: str, n: int) -> SquareMatrix:
    try:
        builder = CANDIDATE_FAMILIES[family]
    except KeyError:
        known = ", ".join(sorted(CANDIDATE_FAMILIES))
        raise InputError(f"unknown candidate family {family!r} (known: {known})")
    return builder(n)


def normalize_sigma(N: SquareMatrix, exact: bool = True,
                    restarts: int = 64, seed: int = 0) -> SquareMatrix:
    """Scale N so that sigma becomes 1.

    In exact mode the scale is the exact sigma and the result has sigma
    exactly 1.  In heuristic mode the scale is a lower bound on sigma, so
    the result is only approximately normalized (sigma >= 1); callers must
    flag it as such.
    """
    if N.is_zero():
        raise InputError("cannot sigma-normalize the zero matrix")
    scale = sigma_exact(N) if exact else sigma_heuristic(N, restarts=restarts, seed=seed)
    return N.scale(Fraction(1) / scale if isinstance(scale, Fraction) else 1.0 / scale)


@dataclass(frozen=True)
class GrowthRecord:
    """One measured size of a growth sweep.

    sigma_m is sigma of the normalized, relabeled candidate (1 in exact
    mode); sigma_em is sigma of its alternating transform, exact or a
    certified lower bound per *exactness*; measured_ratio is
    sigma_em / log(n) (None at n = 1, where log n = 0).
    """

    n: int
    sigma_m: Union[Fraction, float]
    sigma_em: Union[Fraction, float]
    exactness: str
    measured_ratio: Optional[float]


def build_normalized_matrix(family: str, n: int, exact: bool = True,
                            restarts: int = 64, seed: int = 0) -> SquareMatrix:
    """Candidate -> sigma-normalized -> odds-then-evens relabeling."""
    N = candidate(family, n)
    normalized = normalize_sigma(N, exact=exact, restarts=restarts, seed=seed)
    return conjugate_by_permutation(normalized, odd_even_permutation(n))


def growth_sweep(family: str, sizes: Sequence[int], mode: str = "exact",
                 restarts: int = 64, seed: int = 0) -> list[GrowthRecord]:
    """Measure sigma of the alternating transform across *sizes*.

    Records in one sweep share a single mode; heuristic records are flagged
    and must not be mixed with exact ones in a fitted slope.
    """
    if not sizes:
        raise InputError("sizes must be nonempty")
    if list(sizes) != sorted(set(sizes)):
        raise InputError("sizes must be strictly ascending")
    if mode not in ("exact", "heuristic"):
        raise InputError(f"mode must be 'exact' or 'heuristic', got {mode!r}")
    exact = mode == "exact"
    records = []
    for n in sizes:
        if candidate(family, n).is_zero():
            # degenerate size (the antisymmetric families vanish at n=1):
            # nothing to normalize, record a zero row
            records.append(GrowthRecord(n=n, sigma_m=Fraction(0),
                                        sigma_em=Fraction(0),
                                        exactness=EXACT if exact else HEURISTIC,
                                        measured_ratio=None if n == 1 else 0.0))
            continue
        M = build_normalized_matrix(family, n, exact=exact,
                                    restarts=restarts, seed=seed)
        EM = alternating_sign_transform(M)
        if exact:
            sigma_m = sigma_exact(M)
            sigma_em = sigma_exact(EM)
        else:
            sigma_m = sigma_heuristic(M, restarts=restarts, seed=seed + n)
            sigma_em = sigma_heuristic(EM, restarts=restarts, seed=seed + n + 1)
        ratio = None if n == 1 else float(sigma_em) / math.log(n)
        records.append(GrowthRecord(n=n, sigma_m=sigma_m, sigma_em=sigma_em,
                                    exactness=EXACT if exact else HEURISTIC,
                                    measured_ratio=ratio))
    return records


def fit_growth_slope(records: Sequence[GrowthRecord]) -> tuple[float, float]:
    """Least-squares slope and intercept of sigma_em against log(n).

    Mixing exact and heuristic records in one fit compares bounds of
    different kinds and is refused.
    """
    usable = [r for r in records if r.n > 1]
    if len(usable) < 2:
        raise InputError("need at least two records with n > 1 to fit a slope")
    if len({r.exactness for r in usable}) != 1:
        raise InputError("refusing to fit a slope across mixed exact/heuristic records")
    xs = [math.log(r.n) for r in usable]
    ys = [float(r.sigma_em) for r in usable]
    mean_x = sum(xs) / len(xs)
    mean_y = sum(ys) / len(ys)
    sxx = sum((x - mean_x) ** 2 for x in xs)
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    slope = sxy / sxx
    return slope, mean_y - slope * mean_x
