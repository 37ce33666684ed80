import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from elimcnf.graph import (
    DirectedGraph,
    EliminationOrdering,
    cycle_graph,
    eliminate,
    order_min_degree,
    order_min_fill,
    transitive_closure,
)
from elimcnf.oracle import find_cycle

from conftest import RING_ORDER, naive_greedy_order


@st.composite
def digraphs(draw, max_nodes=8, loops=False):
    n = draw(st.integers(1, max_nodes))
    pairs = [(u, v) for u in range(1, n + 1) for v in range(1, n + 1) if loops or u != v]
    arcs = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return DirectedGraph(n, arcs)


@st.composite
def graph_and_order(draw, max_nodes=8, loops=False):
    g = draw(digraphs(max_nodes, loops))
    order = draw(st.permutations(list(g.nodes)))
    return g, EliminationOrdering(order)


def closure_by_definition(g, order):
    """E* straight from the set-builder definition, one E_i at a time."""
    edges = set(g.arcs)
    union = set(edges)
    for v in order:
        d = {(j, k) for (j, x) in edges if x == v for (y, k) in edges
             if y == v and j != k and v not in (j, k)}
        edges = {(a, b) for (a, b) in edges if a != v and b != v} | d
        union |= edges
    return union


class TestDirectedGraph:
    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            DirectedGraph(3, [(1, 4)])

    def test_rejects_parallel(self):
        with pytest.raises(ValueError):
            DirectedGraph(3, [(1, 2), (1, 2)])

    def test_self_loop_allowed(self):
        assert (2, 2) in DirectedGraph(2, [(2, 2)])

    def test_adjacency(self):
        g = DirectedGraph(3, [(1, 2), (1, 3), (3, 1)])
        assert g.successors[1] == (2, 3)
        assert g.predecessors[1] == (3,)


class TestEliminate:
    def test_ring8(self, cycle8):
        res = eliminate(cycle8, RING_ORDER)
        assert len(res.estar) == 14
        assert len(res.estar - cycle8.arcs) == 6
        assert res.width == 1

    def test_ring8_triangles(self, cycle8):
        res = eliminate(cycle8, RING_ORDER)
        assert res.delta == ((1, 2, 3), (3, 4, 5), (5, 6, 7), (7, 8, 1), (7, 1, 3), (3, 5, 7))

    def test_empty(self):
        res = eliminate(DirectedGraph(4), [3, 1, 4, 2])
        assert res.estar == frozenset() and res.delta == () and res.width == 0

    def test_triangle(self):
        g = DirectedGraph(3, [(1, 2), (2, 3), (3, 1)])
        res = eliminate(g, [1, 2, 3])
        assert res.estar == {(1, 2), (2, 3), (3, 1), (3, 2)}
        assert res.delta == ((3, 1, 2),)
        assert res.width == 1

    def test_triangle_recorded_for_existing_arc(self):
        g = DirectedGraph(3, [(1, 2), (2, 3), (1, 3)])
        res = eliminate(g, [2, 1, 3])
        assert res.delta == ((1, 2, 3),)
        assert res.fill_per_step == (0, 0, 0)

    def test_self_loop_no_triangle(self):
        g = DirectedGraph(2, [(1, 1), (1, 2), (2, 1)])
        res = eliminate(g, [1, 2])
        assert res.delta == ()
        assert (1, 1) in res.estar

    def test_bad_ordering(self):
        with pytest.raises(ValueError):
            eliminate(cycle_graph(3), [1, 2])
        with pytest.raises(ValueError):
            EliminationOrdering([1, 1, 2])

    @settings(max_examples=200, deadline=None)
    @given(graph_and_order(loops=True))
    def test_matches_set_definition(self, go):
        g, o = go
        assert eliminate(g, o).estar == closure_by_definition(g, o.order)

    @settings(max_examples=200, deadline=None)
    @given(graph_and_order())
    def test_estar_inside_closure(self, go):
        g, o = go
        res = eliminate(g, o)
        closure = transitive_closure(g).arcs
        assert g.arcs <= res.estar <= closure | g.arcs

    @settings(max_examples=200, deadline=None)
    @given(graph_and_order(loops=True))
    def test_triangle_invariants(self, go):
        g, o = go
        res = eliminate(g, o)
        pos = o.pos
        for a, m, b in res.delta:
            assert (a, m) in res.estar and (m, b) in res.estar and (a, b) in res.estar
            assert a != b and pos[m] < pos[a] and pos[m] < pos[b]
        for u, v in res.estar:
            assert u != v or (u, u) in g.arcs
        assert len(res.estar) <= len(g.arcs) + sum(res.fill_per_step)

    @settings(max_examples=100, deadline=None)
    @given(graph_and_order())
    def test_triangles_per_step_bounded(self, go):
        g, o = go
        res = eliminate(g, o)
        # replay degrees just before each removal
        succ = {v: set(s) for v, s in g.successors.items()}
        pred = {v: set(p) for v, p in g.predecessors.items()}
        for m in o.order:
            count = sum(1 for t in res.delta if t[1] == m)
            assert count <= len(pred[m] - {m}) * len(succ[m] - {m})
            for a in pred[m] - {m}:
                for b in succ[m] - {m}:
                    if a != b:
                        succ[a].add(b)
                        pred[b].add(a)
            for a in pred[m]:
                succ[a].discard(m)
            for b in succ[m]:
                pred[b].discard(m)
            del succ[m], pred[m]

    @settings(max_examples=200, deadline=None)
    @given(graph_and_order())
    def test_cycle_gives_two_cycle(self, go):
        g, o = go
        if find_cycle(g) is None:
            return
        res = eliminate(g, o)
        assert any((v, u) in res.estar for u, v in res.estar if u != v)

    def test_cycle_width_one_any_order(self, cycle8):
        for order in itertools.islice(itertools.permutations(range(1, 9)), 0, 40320, 97):
            res = eliminate(cycle8, order)
            assert res.width == 1
            assert len(res.estar) == 14


class TestOrderings:
    def test_cycle_min_degree(self, cycle8):
        assert eliminate(cycle8, order_min_degree(cycle8)).width == 1

    def test_cycle_min_fill(self, cycle8):
        assert eliminate(cycle8, order_min_fill(cycle8)).width == 1

    def test_complete_three(self):
        g = DirectedGraph(3, [(u, v) for u in range(1, 4) for v in range(1, 4) if u != v])
        assert order_min_degree(g).order == (1, 2, 3)

    def test_star_zero_fill(self):
        g = DirectedGraph(6, [(1, k) for k in range(2, 7)])
        res = eliminate(g, order_min_fill(g))
        assert set(res.fill_per_step) == {0}

    def test_triangle_min_fill(self):
        g = DirectedGraph(3, [(1, 2), (2, 3), (3, 1)])
        for v in g.nodes:
            assert eliminate(g, [v] + [u for u in g.nodes if u != v]).fill_per_step[0] == 1
        assert order_min_fill(g).order[0] == 1

    def test_pinned_tail(self, cycle8):
        o = order_min_degree(cycle8, [3, 7])
        assert o.order[-2:] == (3, 7)
        with pytest.raises(ValueError):
            order_min_degree(cycle8, [9])
        with pytest.raises(ValueError):
            order_min_fill(cycle8, [3, 3])

    def test_grid_5x20_width(self):
        from elimcnf.bench import gen_grid_hc
        from elimcnf.formula import effective_arcs

        inst = gen_grid_hc((5, 20))
        g = DirectedGraph(inst.graph.node_count, effective_arcs(inst.graph, inst.constraints[0]))
        assert eliminate(g, order_min_degree(g)).width <= 6

    @pytest.mark.parametrize("heuristic", ["mindegree", "minfill"])
    @settings(max_examples=150, deadline=None)
    @given(g=digraphs(max_nodes=9, loops=True), data=st.data())
    def test_incremental_equals_naive(self, heuristic, g, data):
        pins = data.draw(st.lists(st.sampled_from(list(g.nodes)), unique=True, max_size=2))
        fn = order_min_degree if heuristic == "mindegree" else order_min_fill
        assert fn(g, pins).order == naive_greedy_order(g, pins, heuristic)

    def test_deterministic(self):
        rng = random.Random(5)
        g = DirectedGraph(12, {(rng.randint(1, 12), rng.randint(1, 12)) for _ in range(30)})
        assert order_min_fill(g) == order_min_fill(g)
        assert eliminate(g, order_min_degree(g)) == eliminate(g, order_min_degree(g))


class TestClosure:
    def test_cycle(self, cycle8):
        assert transitive_closure(cycle8).arcs == {(u, v) for u in range(1, 9) for v in range(1, 9)}

    def test_empty(self):
        assert transitive_closure(DirectedGraph(3)).arcs == frozenset()

    def test_chain(self):
        g = DirectedGraph(3, [(1, 2), (2, 3)])
        assert transitive_closure(g).arcs == {(1, 2), (2, 3), (1, 3)}
