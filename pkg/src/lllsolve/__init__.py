"""Resampling solvers for the constructive Lovász Local Lemma and tools to
analyse their executions through witness trees."""

from .applications import (CnfFormula, Hypergraph, break_into_elementary, cnf_to_instance,
                           hypergraph_to_instance)
from .criteria import (XAssignment, check_x_condition, rescale_for_derandomization,
                       resample_budget, symmetric_x)
from .derandomize import derandomized_solve, tree_consistency_probability
from .model import (DependencyGraph, EventSpec, ProblemInstance, VariableSpec,
                    build_dependency_graph, build_lopsidependency_graph, detect_lopsidependent,
                    violated_events)
from .parallel import greedy_mis, luby_step_mis, solve_parallel
from .sampling import SampleStream, SampleTable, draw, peek_at
from .sequential import ExecutionLog, SolveResult, solve_lopsided, solve_sequential
from .witness import (WitnessTree, build_witness_tree, enumerate_trees, gw_sample,
                      gw_tree_probability, is_proper, shrink_range_bound, tree_check)

__version__ = "0.1.0"

__all__ = [
    "CnfFormula",
    "DependencyGraph",
    "EventSpec",
    "ExecutionLog",
    "Hypergraph",
    "ProblemInstance",
    "SampleStream",
    "SampleTable",
    "SolveResult",
    "VariableSpec",
    "WitnessTree",
    "XAssignment",
    "break_into_elementary",
    "build_dependency_graph",
    "build_lopsidependency_graph",
    "build_witness_tree",
    "check_x_condition",
    "cnf_to_instance",
    "derandomized_solve",
    "detect_lopsidependent",
    "draw",
    "enumerate_trees",
    "greedy_mis",
    "gw_sample",
    "gw_tree_probability",
    "hypergraph_to_instance",
    "is_proper",
    "luby_step_mis",
    "peek_at",
    "resample_budget",
    "rescale_for_derandomization",
    "shrink_range_bound",
    "solve_lopsided",
    "solve_parallel",
    "solve_sequential",
    "symmetric_x",
    "tree_check",
    "tree_consistency_probability",
    "violated_events",
]

