"""defreg: point counting, (dimension, measure) estimation, and regularity
partitions for first-order definable sets over finite fields."""

__version__ = "0.1.0"

from .counting import CountResult, DefinableSet, count_pair_intersection, count_solutions, count_sweep, definable_set, evaluate
from .dim_measure import DimMeasure, ParameterClass, classify_parameters, estimate_dim_measure, snap_rational
from .field import FieldSpec, make_field, parse_field_descriptor, primes_in_range
from .formula import ComplexityBudget, Formula, complexity, free_variables, parse_formula, print_formula, substitute
from .regularity import (
    BipartiteDefinableGraph,
    PairClassSummary,
    PartitionBlock,
    RegularityReport,
    build_partition,
    check_exceptional_dimension,
    graph_from_spec,
    match_block_labels,
    pair_invariant_table,
    verify_regularity,
)

__all__ = [
    "__version__",
    "BipartiteDefinableGraph",
    "ComplexityBudget",
    "CountResult",
    "DefinableSet",
    "DimMeasure",
    "FieldSpec",
    "Formula",
    "PairClassSummary",
    "ParameterClass",
    "PartitionBlock",
    "RegularityReport",
    "build_partition",
    "check_exceptional_dimension",
    "classify_parameters",
    "complexity",
    "count_pair_intersection",
    "count_solutions",
    "count_sweep",
    "definable_set",
    "estimate_dim_measure",
    "evaluate",
    "free_variables",
    "graph_from_spec",
    "make_field",
    "match_block_labels",
    "pair_invariant_table",
    "parse_field_descriptor",
    "parse_formula",
    "primes_in_range",
    "print_formula",
    "snap_rational",
    "substitute",
    "verify_regularity",
]
