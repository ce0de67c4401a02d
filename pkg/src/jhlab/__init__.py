"""jhlab: a desk-scale laboratory for the tree space, the l-infinity ->
l-1 matrix norm with its sign transforms, and the property-(u)
refutation pipeline on the tensor square.

The layers, bottom up:

* :mod:`jhlab.tree`            nodes, segments, branches, admissibility;
* :mod:`jhlab.space`           tree vectors, functionals, the exact norm;
* :mod:`jhlab.matrices`        sigma, sign transforms, the permutation identity;
* :mod:`jhlab.extremal`        normalized candidate families and growth sweeps;
* :mod:`jhlab.tensor`          node-pair tensors and two-sided norm bounds;
* :mod:`jhlab.counterexample`  scaffold, U_l / V_r / xi, pairing identities,
                               divergence report, weak-Cauchy evidence;
* :mod:`jhlab.serialize`       JSON/CSV formats with atomic writes;
* :mod:`jhlab.figures`         PNG figures beside the delimited outputs;
* :mod:`jhlab.cli`             the ``jhlab`` command.
"""

from .counterexample import (ConvexBlocking, DivergenceReport, MatrixSchedule,
                             PairingCheck, Scaffold, WeakCauchyEvidence,
                             WucEstimate, alternating_sum_pairing, build_scaffold,
                             build_U, build_V, build_xi, divergence_report,
                             weak_cauchy_evidence, wuc_constant)
from .errors import (ExactBoundExceededError, InputError, JhlabError,
                     OracleTooLargeError, SelfCheckError, TruncationError)
from .extremal import (GrowthRecord, build_normalized_matrix, candidate,
                       fit_growth_slope, growth_sweep, hankel_candidate,
                       hilbert_candidate, normalize_sigma, register_candidate)
from .matrices import (EXACT_SIGMA_BOUND, SignPermutation, SquareMatrix,
                       alternating_sign_transform, conjugate_by_permutation,
                       main_triangle_projection, odd_even_identity_holds,
                       odd_even_permutation, sigma_exact, sigma_heuristic,
                       sigma_rows, triangle_sign_pattern)
from .space import (BranchFunctional, Functional, NodeFunctional,
                    SignedFamilyFunctional, TreeVector,
                    dual_certificate_lower_bound, evaluate, jh_norm,
                    jh_norm_bruteforce, project_tail)
from .tensor import (EpsBounds, TensorElement, apply_left, combine,
                     eps_norm_bounds, pair, pairing_matrix)
from .tree import (Branch, Node, Segment, descendants_at_level, incomparable,
                   is_admissible, node_leq, validate_node)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "1.0.0"
