"""Linear-time reachability primitives for graphical causal inference.

The package parses rule-table text files describing state-space
reductions, executes them with a single traversal over graphs given as
typed edge lists, and builds the standard causal-inference algorithms
(d-separation, adjustment verification, parent adjustment distance,
conditional instrumental sets) plus the moralization / latent-projection
reductions on top of that one primitive.
"""

from .engine import reach, reach_states, reach_with_counters
from .errors import CiflyError
from .graph import (
    ADMG_SIGNATURE,
    CPDAG_SIGNATURE,
    DAG_SIGNATURE,
    UNDIRECTED_SIGNATURE,
    EdgeInput,
    Graph,
    SetAssignment,
    build_graph,
    remove_directed_edges,
)
from .ruletable import (
    RuleTable,
    format_rule_table,
    parse_rule_table,
    validate_rule_table,
)

__all__ = [
    "reach",
    "reach_states",
    "reach_with_counters",
    "CiflyError",
    "EdgeInput",
    "Graph",
    "SetAssignment",
    "build_graph",
    "remove_directed_edges",
    "RuleTable",
    "parse_rule_table",
    "format_rule_table",
    "validate_rule_table",
    "DAG_SIGNATURE",
    "ADMG_SIGNATURE",
    "CPDAG_SIGNATURE",
    "UNDIRECTED_SIGNATURE",
]

__version__ = "0.1.0"
