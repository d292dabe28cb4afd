"""Exact rank statistics for stacked persymmetric matrices over GF(2).

The package counts 2n x k stacks of two-row persymmetric blocks by rank:
exhaustively (a JIT-compiled sweep of all 2^(n(k+1)) coefficient tuples),
by seeded Monte Carlo where exhaustion is infeasible, and through exact
closed-form tables that the sweeps cross-verify.  A small linear-algebra
module re-derives the high-rank table coefficients from moment identities
over exact rationals.
"""

from ._version import __version__
from .gf2matrix import BitMatrix, from_rows, rank
from .persym import SequenceTuple, build_block, build_stacked, index_from_tuple, tuple_from_index
from .enumeration import (
    RankDistribution,
    SampleMeta,
    enumerate_exact,
    enumerate_exact_range,
    enumerate_sampled,
    merge,
)
from .closedform import (
    ExpPoly,
    full_rank_count,
    gamma_general,
    gamma_table,
    moment_lhs,
    moment_rhs,
    q1_solution_count,
)
from .polysys import (
    Poly2,
    char_value,
    count_solutions_brute,
    exponential_sum_direct,
    r_from_distribution,
)

__all__ = [
    "__version__",
    "BitMatrix",
    "ExpPoly",
    "Poly2",
    "RankDistribution",
    "SampleMeta",
    "SequenceTuple",
    "build_block",
    "build_stacked",
    "char_value",
    "count_solutions_brute",
    "enumerate_exact",
    "enumerate_exact_range",
    "enumerate_sampled",
    "exponential_sum_direct",
    "from_rows",
    "full_rank_count",
    "gamma_general",
    "gamma_table",
    "index_from_tuple",
    "merge",
    "moment_lhs",
    "moment_rhs",
    "q1_solution_count",
    "r_from_distribution",
    "rank",
    "tuple_from_index",
]
