"""Toolkit for compiling 3-CNF formulas into co-tripartite gadget graphs
whose treewidth tracks the maximum number of simultaneously satisfiable
clauses, with validated tree decompositions, vertex-cover certificates,
and exact oracles for desk-scale cross-checking."""

from .cnf import (
    Assignment,
    DimacsError,
    Formula,
    Literal,
    OccurrenceProfile,
    Validation32B,
    duplicate,
    evaluate,
    max_sat_bruteforce,
    occurrence_profile,
    parse_assignment,
    parse_dimacs,
    validate_32b,
    write_assignment,
    write_dimacs,
)
from .decomposition import (
    NotAClawError,
    TdFormatError,
    TdReport,
    TreeDecomposition,
    build_from_assignment,
    center_cover,
    decode_assignment,
    find_clique_node,
    greedy_decomposition,
    normalize_to_claw,
    parse_td,
    validate,
    write_td,
)
from .errors import BudgetExceededError
from .exacttw import (
    Quotient,
    WeightedGraph,
    brute_force_ordering_tw,
    parse_weighted_gr,
    quotient,
    treewidth_exact,
    treewidth_via_quotient,
    weighted_treewidth_exact,
    write_weighted_gr,
)
from .graph import Graph, GrFormatError, parse_gr, write_gr
from .lowerbound import (
    CoverCertificate,
    NotACoverError,
    NotNormalizedError,
    certify_lower_bound,
    cover_from_assignment,
    extract_assignment,
    is_vertex_cover,
    min_vertex_cover_exact,
    normalize_cover,
    parse_cover,
    write_cover,
)
from .reduction import (
    GammaConstraintError,
    GammaPolicy,
    GammaProfile,
    ReductionInstance,
    build_graph,
    compute_gammas,
    format_metadata,
    incidence_graph,
    predicted_bounds,
)

__version__ = "0.1.0"
