"""scikit-learn style front end.

``fit`` looks only at graph structure and chooses an elimination ordering for
every constraint; ``transform`` emits clauses for any instance that shares
that structure (the base formula may differ).
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .encoders import encode_constraint, resolve_ordering
from .formula import Acyclic, EncodedFormula, EReach, Reach, VarPool, effective_arcs
from .graph import DirectedGraph, eliminate
from .validation import check_instance, check_methods, check_order_spec


class GraphConstraintEncoder(TransformerMixin, BaseEstimator):
    """Compile the graph constraints of an instance into CNF clauses.

    Parameters
    ----------
    method : str or list of str, default="ve"
        Encoding per constraint: ``ve``, ``tc``, ``tr``, ``explicit`` or
        ``via-acyclic:{ve,tc,tr}``. A single string applies to all.
    order : str or sequence of int, default="mindegree"
        ``mindegree``, ``minfill`` or an explicit elimination sequence.

    Attributes
    ----------
    orderings_ : list of EliminationOrdering or None
        Ordering chosen for each constraint (None where no elimination is used).
    widths_ : list of int or None
        Elimination width of each ordering.
    width_ : int
        Largest entry of ``widths_`` (0 if none).
    """

    def __init__(self, method="ve", order="mindegree"):
        self.method = method
        self.order = order

    def fit(self, X, y=None):
        inst = check_instance(X)
        methods = check_methods(self.method, inst)
        order = check_order_spec(self.order)
        orderings, widths = [], []
        for c, m in zip(inst.constraints, methods):
            if not m.endswith("ve"):
                orderings.append(None)
                widths.append(None)
                continue
            graph = inst.graph
            pins: tuple[int, ...] = ()
            if isinstance(c, Acyclic):
                graph = DirectedGraph(graph.node_count, effective_arcs(graph, c))
            elif m == "ve" and isinstance(c, Reach):
                pins = (c.source, c.target)
            elif m == "ve" and isinstance(c, EReach):
                pins = (c.target,)
            ordering = resolve_ordering(graph, order, pins)
            orderings.append(ordering)
            widths.append(eliminate(graph, ordering).width)
        self.methods_ = methods
        self.orderings_ = orderings
        self.widths_ = widths
        self.width_ = max((w for w in widths if w is not None), default=0)
        self.n_nodes_ = inst.graph.node_count
        self.constraints_ = inst.constraints
        return self

    def transform(self, X) -> EncodedFormula:
        check_is_fitted(self, "orderings_")
        inst = check_instance(X)
        if inst.graph.node_count != self.n_nodes_ or inst.constraints != self.constraints_:
            raise ValueError("instance does not match the graph and constraints seen in fit")
        pool = VarPool(inst.base.var_count)
        clauses = []
        for idx, (c, m, o) in enumerate(zip(inst.constraints, self.methods_, self.orderings_)):
            pool.prefix = f"c{idx}:"
            enc = encode_constraint(inst, c, m, o, pool=pool)
            clauses.extend(enc.added_clauses)
        return EncodedFormula(clauses, pool.top, pool.aux,
                              {"aux_vars": pool.top - inst.base.var_count, "clauses": len(clauses)})
