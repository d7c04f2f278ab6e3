"""Tree containment and structural analysis for binary nearly stable
phylogenetic networks, with eNewick I/O, class bounds, transforms, and a
seeded generator."""

__version__ = "0.1.0"

from .core import (
    Branch,
    ClassFlags,
    Network,
    NetworkEditor,
    PhyloTree,
    StabilityReport,
    ValidationOutcome,
    Violation,
    classify,
    stability,
    validate,
    vertex_kind,
)
from .errors import (
    ClassPreconditionError,
    GenerationExhaustedError,
    InternalConsistencyError,
    InvalidNetworkError,
    LeafSetMismatchError,
    NetworkError,
    NewickParseError,
    OracleCapExceededError,
    PatternMismatchError,
)
from .newick_io import (
    ParseDiagnostic,
    canonical_equal,
    parse_network,
    parse_networks,
    parse_tree,
    parse_trees,
    serialize,
    to_dot,
)
from .reductions import (
    ReductionStep,
    ReductionTrace,
    cherry_reduce,
    net_cherry,
    replay_trace,
    suppress_degenerate,
    uncle_nephew_reduce,
)
from .tcp import (
    DEFAULT_ORACLE_CAP,
    CaseMatch,
    ContainmentVerdict,
    Resolution,
    apply_resolution,
    displays,
    find_longest_root_leaf_path,
    match_case,
    oracle_displays,
    simplify_at_case,
    trees_equal,
)
from .bounds import (
    BoundCheck,
    BoundReport,
    ClassStats,
    class_stats,
    ns_to_rv_transform,
    select_dummy_free_removal,
    verify_bounds,
)
from .generator import RNG_NAME, GenSpec, generate, random_tree

__all__ = [
    "Branch",
    "BoundCheck",
    "BoundReport",
    "CaseMatch",
    "ClassFlags",
    "ClassPreconditionError",
    "ClassStats",
    "ContainmentVerdict",
    "DEFAULT_ORACLE_CAP",
    "GenSpec",
    "GenerationExhaustedError",
    "InternalConsistencyError",
    "InvalidNetworkError",
    "LeafSetMismatchError",
    "Network",
    "NetworkEditor",
    "NetworkError",
    "NewickParseError",
    "OracleCapExceededError",
    "ParseDiagnostic",
    "PatternMismatchError",
    "PhyloTree",
    "ReductionStep",
    "ReductionTrace",
    "Resolution",
    "RNG_NAME",
    "StabilityReport",
    "ValidationOutcome",
    "Violation",
    "apply_resolution",
    "canonical_equal",
    "cherry_reduce",
    "class_stats",
    "classify",
    "displays",
    "find_longest_root_leaf_path",
    "generate",
    "match_case",
    "net_cherry",
    "ns_to_rv_transform",
    "oracle_displays",
    "parse_network",
    "parse_networks",
    "parse_tree",
    "parse_trees",
    "random_tree",
    "replay_trace",
    "select_dummy_free_removal",
    "serialize",
    "simplify_at_case",
    "stability",
    "suppress_degenerate",
    "to_dot",
    "trees_equal",
    "uncle_nephew_reduce",
    "validate",
    "vertex_kind",
    "__version__",
]
