"""The refutation pipeline: scaffold, U_l, convex blocks, diverging
branches, the alternating-sum pairing identity, and the reports."""

from fractions import Fraction
from random import Random

import pytest

from jhlab import (
    Branch,
    BranchFunctional,
    ConvexBlocking,
    InputError,
    MatrixSchedule,
    SelfCheckError,
    SquareMatrix,
    TensorElement,
    TreeVector,
    alternating_sign_transform,
    alternating_sum_pairing,
    apply_left,
    build_normalized_matrix,
    build_scaffold,
    build_U,
    build_V,
    build_xi,
    divergence_report,
    eps_norm_bounds,
    incomparable,
    pair,
    sigma_exact,
    weak_cauchy_evidence,
    wuc_constant,
)

from helpers import naive_sigma


# ---------------------------------------------------------------------------
# scaffold construction

def test_scaffold_smallest_case():
    sc = build_scaffold(1)
    assert sc.psi == ("0",)
    assert sc.n_seq == (2,)
    assert sc.s == (0, 1)
    assert sc.phi == ("00",)
    assert sc.gamma[0].bits.startswith("00")
    assert set(sc.gamma[0].bits[2:]) <= {"0"}


def test_scaffold_two_blocks():
    sc = build_scaffold(2)
    assert sc.psi[1] == "10"
    assert sc.n_seq == (2, 4)
    # block 2 support nodes: spine "10" plus the 2-bit encodings of t-1
    assert sc.phi == ("00", "1000", "1001")
    assert sc.s == (0, 1, 3)


def test_scaffold_third_block_encoding():
    sc = build_scaffold(3)
    assert sc.psi[2] == "110"
    assert sc.phi[3:] == ("110000", "110001", "110010")
    assert sc.universe_depth == sc.n_seq[-1] + 1


def test_spine_nodes_pairwise_incomparable():
    sc = build_scaffold(6)
    for a in sc.psi:
        for b in sc.psi:
            if a != b:
                assert incomparable(a, b)


def test_scaffold_well_formedness_up_to_eight_blocks():
    sc = build_scaffold(8)
    assert len(set(sc.phi)) == sc.s[-1]  # phi pairwise distinct
    for k in range(1, 9):
        for i in sc.block_indices(k):
            assert len(sc.phi[i - 1]) == sc.n_seq[k - 1]
            assert sc.phi[i - 1].startswith(sc.psi[k - 1])
            assert sc.gamma[i - 1].passes_through(sc.phi[i - 1])
            assert sc.block_of(i) == k


def test_scaffold_accepts_custom_level_rules():
    by_list = build_scaffold(3, n_rule=[3, 5, 8])
    assert by_list.n_seq == (3, 5, 8)
    by_callable = build_scaffold(3, n_rule=lambda k: 3 * k)
    assert by_callable.n_seq == (3, 6, 9)


def test_scaffold_rejects_bad_level_rules():
    with pytest.raises(InputError):
        build_scaffold(3, n_rule=[2, 2, 6])        # not strictly increasing
    with pytest.raises(InputError):
        build_scaffold(3, n_rule=lambda k: k)      # no room for k descendants
    with pytest.raises(InputError):
        build_scaffold(0)


def test_node_on_branch_at_examples():
    sc = build_scaffold(3)
    assert sc.node_on_branch_at(1, 1) == sc.phi[0]
    assert sc.node_on_branch_at(1, 2) == sc.phi[0] + "00"  # zeros rule
    for k in range(1, 4):
        for i in sc.block_indices(k):
            for later in range(k, 4):
                assert len(sc.node_on_branch_at(i, later)) == sc.n_seq[later - 1]
    with pytest.raises(InputError):
        sc.node_on_branch_at(2, 1)  # i=2 is outside block 1 (s_1 = 1)


# ---------------------------------------------------------------------------
# schedules

def test_schedule_blocks_must_match_their_index():
    with pytest.raises(InputError):
        MatrixSchedule.from_blocks([SquareMatrix.identity(2)])
    with pytest.raises(InputError):
        MatrixSchedule.from_blocks([])


def test_schedule_summed_sigma():
    blocks = [SquareMatrix([[2]]), SquareMatrix([[1, 0], [0, 1]])]
    sched = MatrixSchedule.from_blocks(blocks)
    assert sched.summed_sigma == 2 + 2
    assert sched.k_max == 2
    assert sched.block(1) == blocks[0]
    assert MatrixSchedule.zero(3).summed_sigma == 0


def test_random_schedule_is_seeded_and_respects_r_list():
    first = MatrixSchedule.random(4, seed=5)
    second = MatrixSchedule.random(4, seed=5)
    assert first.blocks == second.blocks
    sparse = MatrixSchedule.random(4, r_list=[2], seed=5)
    assert not sparse.block(2).is_zero()
    assert sparse.block(1).is_zero() and sparse.block(3).is_zero()
    with pytest.raises(InputError):
        MatrixSchedule.random(3, r_list=[4])


def test_growth_schedule_halving_rule():
    """R_{r_m} = M_{r_m} / 2^m: the m-th scheduled block is the conjugated
    sigma-normalized extremal matrix scaled by 2^-m."""
    sched = MatrixSchedule.growth([2, 4], k_max=5)
    assert sched.block(2) == build_normalized_matrix("hilbert", 2).scale(Fraction(1, 2))
    assert sched.block(4) == build_normalized_matrix("hilbert", 4).scale(Fraction(1, 4))
    assert sched.block(1).is_zero() and sched.block(3).is_zero()
    assert sched.block(5).is_zero()


def test_growth_schedule_validation():
    with pytest.raises(InputError):
        MatrixSchedule.growth([4, 2])
    with pytest.raises(InputError):
        MatrixSchedule.growth([])
    with pytest.raises(InputError):
        MatrixSchedule.growth([2, 4], k_max=3)


# ---------------------------------------------------------------------------
# convex blockings

def test_blocking_validation():
    with pytest.raises(InputError):
        ConvexBlocking((2, 1), ((Fraction(1),), (Fraction(1),)))
    with pytest.raises(InputError):  # weights do not sum to 1
        ConvexBlocking((2,), ((Fraction(1, 2), Fraction(1, 3)),))
    with pytest.raises(InputError):  # negative weight
        ConvexBlocking((2,), ((Fraction(3, 2), Fraction(-1, 2)),))
    with pytest.raises(InputError):  # wrong row length
        ConvexBlocking((2,), ((Fraction(1),),))


def test_uniform_and_vertex_blockings():
    uniform = ConvexBlocking.uniform([2, 4])
    assert uniform.weights == ((Fraction(1, 2),) * 2, (Fraction(1, 2),) * 2)
    vertex = ConvexBlocking.vertex([2, 4])
    assert vertex.weights == ((Fraction(0), Fraction(1)),) * 2
    assert uniform.block_levels(2) == range(3, 5)
    assert uniform.weight(3) == Fraction(1, 2)
    assert vertex.weight(3) == Fraction(0)


def test_regular_blocking():
    blocking = ConvexBlocking.regular(3, step=2, rule="vertex")
    assert blocking.cut_points == (2, 4, 6)
    with pytest.raises(InputError):
        ConvexBlocking.regular(3, rule="unknown")
    with pytest.raises(InputError):
        ConvexBlocking.regular(0)


# ---------------------------------------------------------------------------
# the tensor sequence U_l

def test_U_one_is_a_single_rank_one_term():
    sc = build_scaffold(2)
    sched = MatrixSchedule.from_blocks(
        [SquareMatrix([[1]]), SquareMatrix.zero(2)])
    u1 = build_U(sc, sched, 1)
    assert u1 == TensorElement.rank_one(sc.phi[0], sc.phi[0])


def test_U_support_sits_at_one_level():
    sc = build_scaffold(3)
    sched = MatrixSchedule.random(3, seed=1)
    for l in range(1, 4):
        u = build_U(sc, sched, l)
        for left, right in u.entries:
            assert len(left) == sc.n_seq[l - 1]
            assert len(right) == sc.n_seq[l - 1]
    # blocks 1..l contribute: U_2 sees phi(i,2) for i <= s_2
    u2 = build_U(sc, sched, 2)
    expected_nodes = {sc.node_on_branch_at(i, 2) for i in range(1, 4)}
    assert u2.left_support <= expected_nodes


def test_U_index_bounds():
    sc = build_scaffold(2)
    sched = MatrixSchedule.random(2)
    with pytest.raises(InputError):
        build_U(sc, sched, 0)
    with pytest.raises(InputError):
        build_U(sc, sched, 3)


def test_U_upper_bound_never_exceeds_summed_sigma():
    """hi(U_l) <= sum_k sigma(R_k): the summability that keeps the whole
    sequence bounded, checked for l <= 5."""
    sc = build_scaffold(5)
    sched = MatrixSchedule.random(5, seed=2)
    for l in range(1, 6):
        bounds = eps_norm_bounds(build_U(sc, sched, l))
        assert bounds.lo <= bounds.hi
        assert bounds.hi <= sched.summed_sigma


def test_U_single_block_lower_bound_is_sharp():
    """With only block l nonzero, U_l is a one-block element and the
    bounds pin its norm to sigma(R_l) exactly."""
    rng = Random(7)
    sc = build_scaffold(5)
    for l in range(1, 6):
        blocks = [SquareMatrix.zero(k) for k in range(1, 6)]
        blocks[l - 1] = SquareMatrix(
            [[Fraction(rng.randint(-9, 9), rng.randint(1, 4))
              for _ in range(l)] for _ in range(l)])
        sched = MatrixSchedule.from_blocks(blocks)
        bounds = eps_norm_bounds(build_U(sc, sched, l))
        assert bounds.lo == sigma_exact(blocks[l - 1]) == bounds.hi


def test_V_is_the_weighted_combination():
    sc = build_scaffold(4)
    sched = MatrixSchedule.random(4, seed=3)
    blocking = ConvexBlocking.uniform([2, 4])
    v2 = build_V(sc, sched, blocking, 2)
    u3 = build_U(sc, sched, 3)
    u4 = build_U(sc, sched, 4)
    assert v2 == Fraction(1, 2) * u3 + Fraction(1, 2) * u4


# ---------------------------------------------------------------------------
# diverging branches

def test_xi_diverges_right_after_the_designated_node():
    sc = build_scaffold(3)
    blocking = ConvexBlocking.uniform([1, 2, 3])
    xi = build_xi(sc, blocking, 1)
    assert len(xi) == 1
    shared = sc.n_seq[blocking.cut_points[1] - 1]  # n_{l_2}
    assert xi[0].bits[:shared] == sc.gamma[0].bits[:shared]
    assert xi[0].bits[shared] == "1"
    assert sc.gamma[0].bits[shared] == "0"


def test_xi_shares_exactly_the_stated_nodes():
    sc = build_scaffold(5)
    blocking = ConvexBlocking.uniform([1, 2, 3, 4, 5])
    r = 2
    xi = build_xi(sc, blocking, r)
    for t, i in enumerate(sc.block_indices(r), start=1):
        cut = blocking.cut_points[r + t - 1]
        shared_length = sc.n_seq[cut - 1]
        gamma = sc.gamma[i - 1]
        agreement = 0
        while (agreement < min(xi[t - 1].depth, gamma.depth)
               and xi[t - 1].bits[agreement] == gamma.bits[agreement]):
            agreement += 1
        assert agreement == shared_length


def test_xi_node_membership_display():
    """<e_{phi(i,l)}, xi_j> = 1 iff i = j and l <= l_{r+j-s_{r-1}}; for
    i != j it vanishes for every l >= r."""
    sc = build_scaffold(5)
    blocking = ConvexBlocking.uniform([1, 2, 3, 4, 5])
    for r in (1, 2):
        xi = build_xi(sc, blocking, r)
        indices = list(sc.block_indices(r))
        for t, i in enumerate(indices, start=1):
            for u, j in enumerate(indices, start=1):
                for l in range(r, 2 * r + 2):
                    node = sc.node_on_branch_at(i, l)
                    expected = (i == j) and l <= blocking.cut_points[r + u - 1]
                    assert xi[u - 1].passes_through(node) == expected


def test_xi_requires_enough_blocking_depth():
    sc = build_scaffold(3)
    with pytest.raises(InputError):
        build_xi(sc, ConvexBlocking.uniform([1, 2]), 1)  # needs 3 blocks
    with pytest.raises(InputError):
        # the needed cut point l_2 = 3 outruns a 2-level scaffold
        build_xi(build_scaffold(2), ConvexBlocking.uniform([1, 3, 4]), 1)


# ---------------------------------------------------------------------------
# the alternating-sum pairing identity

def test_pairing_one_by_one_case():
    sc = build_scaffold(3)
    sched = MatrixSchedule.from_blocks(
        [SquareMatrix([[Fraction(-7, 3)]]),
         SquareMatrix.zero(2), SquareMatrix.zero(3)])
    blocking = ConvexBlocking.uniform([1, 2, 3])
    check = alternating_sum_pairing(sc, sched, blocking, 1)
    assert check.pairing == SquareMatrix([[Fraction(-7, 3)]])
    assert check.predicted == check.pairing  # (-1)^(min(1,1)+1) = +1
    assert check.match
    assert check.lower_bound == Fraction(7, 3)


def test_intermediate_V_pairing_case_formula():
    """<V_{r+k} xi_i, xi_j> = R_r(i, j) when k <= min of the block-local
    indices, and 0 otherwise."""
    sc = build_scaffold(5)
    sched = MatrixSchedule.random(5, seed=11)
    blocking = ConvexBlocking.uniform([1, 2, 3, 4, 5])
    r = 2
    block = sched.block(r)
    xi = [BranchFunctional(branch) for branch in build_xi(sc, blocking, r)]
    for k in range(1, r + 2):
        v = build_V(sc, sched, blocking, r + k)
        for t in range(1, r + 1):
            for u in range(1, r + 1):
                expected = block.entry(t, u) if k <= min(t, u) else Fraction(0)
                assert pair(v, xi[t - 1], xi[u - 1]) == expected


def test_pairing_identity_exact_for_small_blocks_both_weight_rules():
    """The core identity: the alternating sum of convex blocks pairs with
    the diverging branches to exactly (-1)^(min+1) R_r -- for every r,
    under uniform and under vertex weights, in rational arithmetic."""
    sc = build_scaffold(9)
    sched = MatrixSchedule.random(9, seed=13)
    for rule in ("uniform", "vertex"):
        blocking = ConvexBlocking.regular(9, step=1, rule=rule)
        for r in range(1, 5):
            check = alternating_sum_pairing(sc, sched, blocking, r)
            assert check.match
            assert check.predicted == alternating_sign_transform(sched.block(r))


def test_pairing_identity_with_gapped_cuts():
    """Cut points l_r = 2r leave interior levels inside every block, so
    uniform and vertex weights genuinely differ; the identity holds for
    both all the same."""
    sc = build_scaffold(14)
    sched = MatrixSchedule.random(14, seed=17)
    for rule in ("uniform", "vertex"):
        blocking = ConvexBlocking.regular(7, step=2, rule=rule)
        for r in (1, 2, 3):
            assert alternating_sum_pairing(sc, sched, blocking, r).match


def test_pairing_lower_bound_stays_below_upper_bound():
    """L_r = sigma(pairing) is a certified lower bound for ||W_r||, so it
    cannot exceed the constructive upper bound for W_r."""
    sc = build_scaffold(5)
    sched = MatrixSchedule.random(5, seed=19)
    blocking = ConvexBlocking.uniform([1, 2, 3, 4, 5])
    r = 2
    check = alternating_sum_pairing(sc, sched, blocking, r)
    terms = []
    for t in range(1, r + 1):
        sign = 1 if t % 2 == 1 else -1
        terms.append((Fraction(sign), build_V(sc, sched, blocking, r + t)))
        terms.append((Fraction(-sign), build_V(sc, sched, blocking, r + t + 1)))
    from jhlab import combine
    w = combine(terms)
    assert check.lower_bound <= eps_norm_bounds(w).hi


def test_pairing_requires_enough_blocks():
    sc = build_scaffold(3)
    sched = MatrixSchedule.random(3)
    with pytest.raises(InputError):
        alternating_sum_pairing(sc, sched, ConvexBlocking.uniform([1, 2]), 1)


def test_corrupted_branches_trip_the_self_check():
    """Negative control: feeding the undiverged support branches instead
    of the xi rule breaks the identity, and the strict mode notices."""
    sc = build_scaffold(3)
    sched = MatrixSchedule.random(3, seed=5)  # R_1 nonzero for this seed
    blocking = ConvexBlocking.uniform([1, 2, 3])
    corrupted = [Branch(sc.gamma[i - 1].bits) for i in sc.block_indices(1)]
    with pytest.raises(SelfCheckError):
        alternating_sum_pairing(sc, sched, blocking, 1, xi=corrupted)
    check = alternating_sum_pairing(sc, sched, blocking, 1, xi=corrupted,
                                    strict=False)
    assert not check.match


# ---------------------------------------------------------------------------
# divergence reports

def test_report_flags_everything_against_zero_hypothesis():
    sc = build_scaffold(5)
    sched = MatrixSchedule.random(5, seed=29)
    blocking = ConvexBlocking.uniform([1, 2, 3, 4, 5])
    report = divergence_report(sc, sched, blocking, [1, 2],
                               K_hypothesis=Fraction(0))
    assert all(row.flagged for row in report.rows)
    assert report.any_flagged
    assert report.all_match


def test_report_rows_match_independent_recomputation():
    """Two-path check: each L_r equals sigma(E(R_r)) recomputed directly
    from the schedule, bypassing the tensor pipeline."""
    sc = build_scaffold(5)
    sched = MatrixSchedule.random(5, seed=31)
    blocking = ConvexBlocking.uniform([1, 2, 3, 4, 5])
    report = divergence_report(sc, sched, blocking, [1, 2])
    for row in report.rows:
        direct = sigma_exact(alternating_sign_transform(sched.block(row.r)))
        assert row.lower_bound == direct
        if row.r <= 2:
            assert row.lower_bound == naive_sigma(
                alternating_sign_transform(sched.block(row.r)))


def test_report_running_max_and_annotation():
    sc = build_scaffold(5)
    sched = MatrixSchedule.random(5, seed=37)
    blocking = ConvexBlocking.uniform([1, 2, 3, 4, 5])
    report = divergence_report(sc, sched, blocking, [1, 2])
    assert report.rows[0].running_max == report.rows[0].lower_bound
    assert report.rows[1].running_max == max(r.lower_bound for r in report.rows)
    assert report.max_lower_bound == report.rows[1].running_max
    assert "Desk-scale caveat" in report.annotation


def test_report_with_growth_schedule_reproduces_halved_sigmas():
    """With R_{r_m} = M_{r_m}/2^m the reported bound at r_m is exactly
    sigma(E(M_{r_m})) / 2^m: frozen 1/2 at r=2 and 5/18 at r=4."""
    sc = build_scaffold(9)
    sched = MatrixSchedule.growth([2, 4], k_max=9)
    blocking = ConvexBlocking.regular(9, step=1)
    report = divergence_report(sc, sched, blocking, [2, 4],
                               K_hypothesis=Fraction(1, 4))
    assert report.all_match
    bounds = {row.r: row.lower_bound for row in report.rows}
    assert bounds[2] == Fraction(1, 2)
    assert bounds[4] == Fraction(5, 18)
    # both exceed K = 1/4, so both rows are flagged
    assert all(row.flagged for row in report.rows)


def test_report_input_validation():
    sc = build_scaffold(3)
    sched = MatrixSchedule.random(3)
    blocking = ConvexBlocking.uniform([1, 2, 3])
    with pytest.raises(InputError):
        divergence_report(sc, sched, blocking, [])
    with pytest.raises(InputError):
        divergence_report(sc, sched, blocking, [2, 1])


def test_report_corrupted_builder_is_reported_not_raised():
    sc = build_scaffold(3)
    sched = MatrixSchedule.random(3, seed=41)
    blocking = ConvexBlocking.uniform([1, 2, 3])

    def corrupted(sc, blocking, r):
        return [Branch(sc.gamma[i - 1].bits) for i in sc.block_indices(r)]

    report = divergence_report(sc, sched, blocking, [1], xi_builder=corrupted)
    assert not report.all_match
    assert not report.rows[0].match


# ---------------------------------------------------------------------------
# weak-Cauchy case analysis

def test_weak_cauchy_evidence_all_cases_pass():
    sc = build_scaffold(4)
    sched = MatrixSchedule.random(4, seed=43)
    evidence = weak_cauchy_evidence(sc, sched, probe_depth=4)
    assert evidence.all_ok
    names = [case.name for case in evidence.cases]
    assert names == ["node-functional", "branch-missing-every-spine",
                     "branch-diverging-after-support", "branch-through-support"]


def test_weak_cauchy_thresholds_are_explicit():
    sc = build_scaffold(4)
    sched = MatrixSchedule.random(4, seed=43)
    evidence = weak_cauchy_evidence(sc, sched, probe_depth=4)
    by_name = {case.name: case for case in evidence.cases}
    stray = by_name["branch-diverging-after-support"]
    assert stray.threshold == 3  # follows gamma through block 2, dies at l=3
    assert stray.nonzero_before_threshold
    through = by_name["branch-through-support"]
    assert through.nonzero_before_threshold  # the row formula is nonzero


def test_weak_cauchy_row_formula_directly():
    """U_l applied to a support branch is exactly the block-row
    combination sum_j R_k(t, j) e_{phi(j, l)} for l >= k."""
    sc = build_scaffold(3)
    sched = MatrixSchedule.random(3, seed=47)
    i, k, t = 2, 2, 1  # second support branch, first row of block 2
    functional = BranchFunctional(sc.gamma[i - 1])
    for l in (2, 3):
        result = apply_left(build_U(sc, sched, l), functional)
        expected = TreeVector({
            sc.node_on_branch_at(j, l): sched.block(k).entry(t, j - sc.s[k - 1])
            for j in sc.block_indices(k)})
        assert result == expected
    assert apply_left(build_U(sc, sched, 1), functional).is_zero()


def test_weak_cauchy_requires_matching_depths():
    sc = build_scaffold(3)
    sched = MatrixSchedule.random(3)
    with pytest.raises(InputError):
        weak_cauchy_evidence(sc, sched, probe_depth=sc.universe_depth + 1)


# ---------------------------------------------------------------------------
# wuC constants

def test_wuc_single_element_is_its_norm():
    x = TreeVector({"01": Fraction(-3, 2)})
    estimate = wuc_constant([x])
    assert estimate.lo == Fraction(3, 2) == estimate.hi
    assert estimate.terms == 1


def test_wuc_two_incomparable_basis_vectors():
    estimate = wuc_constant([TreeVector.basis("0"), TreeVector.basis("1")])
    assert estimate.lo == 2 == estimate.hi


def test_wuc_empty_series_is_zero():
    estimate = wuc_constant([])
    assert estimate.lo == 0 == estimate.hi


def test_wuc_sampled_never_exceeds_exact():
    rng = Random(53)
    from helpers import random_tree_vector
    series = [random_tree_vector(rng, depth=2, max_nonzeros=3)
              for _ in range(6)]
    exact = wuc_constant(series, mode="exact-signs")
    sampled = wuc_constant(series, mode="sampled", samples=50, seed=1)
    assert sampled.lo <= exact.lo
    assert sampled.hi <= exact.hi


def test_wuc_tensor_series_reports_bound_pair():
    series = [TensorElement.rank_one("00", "00"),
              TensorElement.rank_one("01", "01")]
    estimate = wuc_constant(series)
    assert estimate.lo == 2 == estimate.hi


def test_wuc_input_validation():
    with pytest.raises(InputError):
        wuc_constant([TreeVector.basis("0"), TensorElement.rank_one("0", "0")])
    with pytest.raises(InputError):
        wuc_constant([TreeVector.basis("0")] * 21, mode="exact-signs")
    with pytest.raises(InputError):
        wuc_constant([TreeVector.basis("0")], mode="bogus")


def test_wuc_detects_cancellation_structure():
    """A chain pair e_eps, e_0 has worst sign pattern aligned (+,+): the
    norm of the sum is 2 and no sign choice does better."""
    estimate = wuc_constant([TreeVector.basis(""), TreeVector.basis("0")])
    assert estimate.lo == 2 == estimate.hi
