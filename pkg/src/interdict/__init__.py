"""Budgeted shortest-path edge interdiction on attack graphs."""

from .errors import (CyclicGraphError, InfeasibleError, InterdictError,
                     NotATreeError, PreprocessError, TooLargeError)
from .graph import (INF, AttackGraph, Evaluation, SuccessFunction, evaluate,
                    feedback_edge_count, graph_stats, load_graph,
                    max_attack_path_length, max_out_degree, preprocess,
                    save_graph, security_levels, shortest_distances,
                    splitting_nodes, validate)

__version__ = "0.1.0"

__all__ = [
    "AttackGraph", "SuccessFunction", "Evaluation", "INF",
    "validate", "preprocess", "shortest_distances", "evaluate",
    "security_levels", "splitting_nodes", "feedback_edge_count",
    "max_out_degree", "max_attack_path_length", "graph_stats",
    "load_graph", "save_graph",
    "InterdictError", "CyclicGraphError", "TooLargeError",
    "InfeasibleError", "NotATreeError", "PreprocessError",
]
