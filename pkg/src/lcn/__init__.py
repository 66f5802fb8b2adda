"""Logical credal networks: constraint models over propositional formulas,
the graphs they induce, Markov conditions, chain-graph factorization plans,
and exact desk-scale probability checks."""

from .build import dependency_graph, lcn_descendants, lcn_parents, mixed_structure, structure
from .errors import GraphError, LcnError, ModelError, ParseError
from .factorize import (
    FactorizationPlan,
    PruneReport,
    component_dag,
    condense_cycles,
    factorization_plan,
    prune_hard_constraints,
)
from .formula import (
    Formula,
    canonical_key,
    eval_formula,
    format_formula,
    parse_formula,
    semantically_equal,
    support,
)
from .graph import MixedGraph, Node, prop_node, to_dot, to_json_dict
from .markov import (
    GMC_C,
    LMC_C,
    LMC_CSTR,
    LMC_D,
    LMC_LCN,
    ComparisonReport,
    IndependenceStatement,
    compare_conditions,
    enumerate_gmc,
    gmc_implies,
    local_statements,
    statement_decomposes,
    weak_descendants,
)
from .model import Constraint, Lcn, format_lcn, make_lcn, parse_lcn, validate
from .oracle import (
    JointTable,
    check_constraint,
    check_independence,
    check_model,
    cond_prob,
    prob,
    sample_chain_factorized,
    sample_positive_table,
    separation_bruteforce,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
