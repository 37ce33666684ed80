"""Compile acyclicity and reachability constraints on directed graphs into CNF."""

from .bench import GridSpec, free_instance, gen_grid_hc, gen_random
from .encoders import (
    encode_acyclicity_tc,
    encode_acyclicity_tr,
    encode_acyclicity_ve,
    encode_ereach_explicit,
    encode_ereach_ve,
    encode_ereach_via_acyclicity,
    encode_instance,
    encode_noreach,
    encode_reach_explicit,
    encode_reach_ve,
    encode_reach_via_acyclicity,
)
from .formula import (
    Acyclic,
    Cnf,
    EncodedFormula,
    EReach,
    GraphInstance,
    Model,
    NoReach,
    Reach,
    parse_dimacs,
    parse_gcnf,
    parse_model,
    write_dimacs,
    write_gcnf,
)
from .graph import (
    DirectedGraph,
    EliminationOrdering,
    EliminationResult,
    eliminate,
    order_min_degree,
    order_min_fill,
    transitive_closure,
)
from .oracle import brute_force_check, check_acyclic, check_ereach, check_reach, decode_model, verify
from .solver import SolveResult, solve

__version__ = "0.1.0"


def __getattr__(name):
    # keeps scikit-learn out of the import path unless the estimator is used
    if name == "GraphConstraintEncoder":
        from .estimator import GraphConstraintEncoder
        return GraphConstraintEncoder
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
