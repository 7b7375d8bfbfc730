import numpy as np
import pytest

from lbdd import (
    InvariantViolation,
    NegativeCycleError,
    SolverState,
    evaluate_objective,
    lowest_cost_path,
    negative_cycle_refine,
    negative_path_refine,
)
from lbdd.refine import bellman_ford, has_negative_cycle, relax_round
from lbdd.subspace import INF, NO_EDGE, AuxGraph, build_negcycle_graph, build_negpath_graph

from _oracles import (
    CYCLE13_ASSIGN,
    PATH33_ASSIGN,
    best_simple_path,
    cycle13_instance,
    path33_instance,
    random_instance,
)


def graph_from(cost, anchor=0):
    cost = np.asarray(cost, dtype=np.int64)
    payload = np.where(cost < INF, 0, NO_EDGE)
    return AuxGraph(anchor, cost, payload)


def no_edges(m):
    return np.full((m, m), INF, dtype=np.int64)


def random_dag_like(rng, m, density=0.5):
    """Random graph without negative cycles but with negative edges.

    Costs are non-negative weights shifted by node potentials,
    w(u, v) + p(u) - p(v), so every cycle keeps its non-negative weight.
    """
    cost = no_edges(m)
    pot = rng.integers(0, 15, size=m)
    for u in range(m):
        for v in range(m):
            if u != v and rng.random() < density:
                cost[u, v] = int(rng.integers(0, 12)) + pot[u] - pot[v]
    return cost


class TestLowestCostPath:
    def test_single_edge(self):
        c = no_edges(2)
        c[0, 1] = -13
        path = lowest_cost_path(graph_from(c))
        assert path.cost == -13
        assert [(u, v) for u, v, _, _ in path.edges] == [(0, 1)]

    def test_unreachable(self):
        assert lowest_cost_path(graph_from(no_edges(3))) is None

    def test_negative_cycle_is_loud(self):
        c = no_edges(3)
        c[0, 1] = 1
        c[1, 0] = -2
        c[1, 2] = 0
        with pytest.raises(NegativeCycleError):
            lowest_cost_path(graph_from(c, anchor=0))

    def test_tie_prefers_smallest_parent(self):
        c = no_edges(4)
        c[0, 1] = c[0, 2] = 1
        c[1, 3] = c[2, 3] = 1
        path = lowest_cost_path(graph_from(c))
        assert [u for u, _, _, _ in path.edges] == [0, 1]

    @pytest.mark.parametrize("seed", range(60))
    def test_matches_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(2, 8))  # k <= 6 centers plus the in-copy
        cost = random_dag_like(rng, m)
        g = graph_from(cost)
        sink = m - 1
        want = best_simple_path(cost, 0, sink, INF)
        got = lowest_cost_path(g)
        if want is None:
            assert got is None
        else:
            assert got.cost == want
            nodes = [got.edges[0][0]] + [v for _, v, _, _ in got.edges]
            assert len(set(nodes)) == len(nodes) and nodes[0] == 0 and nodes[-1] == sink

    def test_synchronous_rounds_do_not_mutate_input(self):
        rng = np.random.default_rng(5)
        cost = random_dag_like(rng, 6)
        dist = np.full(6, INF, dtype=np.int64)
        dist[0] = 0
        parent = np.full(6, -1, dtype=np.int64)
        snap = dist.copy()
        relax_round(cost, dist, parent)
        assert np.array_equal(dist, snap)


class TestNegativeCycleDetector:
    def test_finds_cycle(self):
        c = no_edges(3)
        c[0, 1], c[1, 2], c[2, 0] = 2, -1, -2
        assert has_negative_cycle(c)

    def test_zero_cycle_is_fine(self):
        c = no_edges(3)
        c[0, 1], c[1, 2], c[2, 0] = 2, -1, -1
        assert not has_negative_cycle(c)

    @pytest.mark.parametrize("seed", range(30))
    def test_agrees_with_bellman_ford(self, seed):
        rng = np.random.default_rng(seed)
        m = 5
        c = no_edges(m)
        mask = rng.random((m, m)) < 0.5
        c[mask] = rng.integers(-6, 15, size=mask.sum())
        np.fill_diagonal(c, INF)
        # virtual source reaching every node with cost 0
        ext = no_edges(m + 1)
        ext[:m, :m] = c
        ext[m, :m] = 0
        try:
            bellman_ford(ext, m)
            bf = False
        except NegativeCycleError:
            bf = True
        assert has_negative_cycle(c) == bf


def state_for(instance, assignment):
    return SolverState.from_assignment(instance, assignment)


class TestCycleRefine:
    def test_worked_cycle_minus_thirteen(self):
        inst = cycle13_instance()
        state = state_for(inst, CYCLE13_ASSIGN)
        g = build_negcycle_graph(state.index, 0)
        assert best_simple_path(g.cost, g.source, g.sink, INF) == -13
        before = evaluate_objective(inst, state.allotment)
        load = list(state.allotment.load)
        gain = negative_cycle_refine(state, 0)
        assert gain == -13
        assert evaluate_objective(inst, state.allotment) == before - 13
        assert state.delta == before - 13
        assert state.allotment.load == load
        assert state.allotment.assignment == [0, 1, 2, 3, 0]

    def test_noop_on_row_minimum(self):
        inst = random_instance(np.random.default_rng(1), 1, 3)
        best = int(np.argmin(inst.cost_matrix[0]))
        state = state_for(inst, [best])
        assert negative_cycle_refine(state, best) == 0

    @pytest.mark.parametrize("seed", range(50))
    def test_no_negative_cycle_after_incremental_refinement(self, seed):
        rng = np.random.default_rng(seed)
        n, k = int(rng.integers(5, 41)), int(rng.integers(2, 6))
        inst = random_instance(rng, n, k, cap_total=10 * n)
        state = state_for(inst, [-1] * n)
        for d in rng.permutation(n):
            s = int(rng.integers(k))
            state.assign(int(d), s)
            state.delta += int(inst.cost_matrix[d, s])
            negative_cycle_refine(state, s)
            assert not has_negative_cycle(state.collapsed())
            assert state.delta == evaluate_objective(inst, state.allotment, allow_partial=True)


class TestPathRefine:
    def test_worked_path_minus_thirty_three(self):
        inst = path33_instance()
        state = state_for(inst, PATH33_ASSIGN)
        assert not has_negative_cycle(state.collapsed())
        g = build_negpath_graph(state.index, state.allotment, inst, 1)
        assert best_simple_path(g.cost, g.source, g.sink, INF) == -33
        before = evaluate_objective(inst, state.allotment)
        gain = negative_path_refine(state, 1)
        assert gain == -33
        assert evaluate_objective(inst, state.allotment) == before - 33
        assert state.delta == before - 33
        assert state.allotment.assignment == [0, 1, 2, 3, 0]
        assert state.allotment.load == [2, 1, 1, 1]

    def test_free_capacity_recovers_refund(self):
        # anchor 0 overloaded (penalty 10); center 1 free and equally cheap
        from lbdd import ProblemInstance

        inst = ProblemInstance.build([[3, 3], [1, 9]], [1, 1], [10, 10])
        state = state_for(inst, [0, 0])
        before = evaluate_objective(inst, state.allotment)
        assert negative_path_refine(state, 0) == -10
        assert evaluate_objective(inst, state.allotment) == before - 10

    def test_requires_overload(self):
        inst = cycle13_instance()
        state = state_for(inst, CYCLE13_ASSIGN)
        with pytest.raises(ValueError):
            negative_path_refine(state, 0)

    @pytest.mark.parametrize("seed", range(50))
    def test_delta_accounting_and_load_shift(self, seed):
        rng = np.random.default_rng(1000 + seed)
        n, k = int(rng.integers(4, 41)), int(rng.integers(2, 6))
        inst = random_instance(rng, n, k, cap_total=max(1, n // 2))
        # build a cycle-free allotment incrementally, then overload an anchor
        state = state_for(inst, [-1] * n)
        order = rng.permutation(n)
        for d in order[:-1]:
            s = int(np.argmin(inst.cost_matrix[d]))
            state.assign(int(d), s)
            state.delta = evaluate_objective(inst, state.allotment, allow_partial=True)
            negative_cycle_refine(state, s)
        last = int(order[-1])
        load = state.allotment.load
        over = [s for s in range(k) if load[s] >= inst.centers[s].capacity]
        if not over:
            pytest.skip("every center still has room")
        s = over[0]
        state.assign(last, s)
        state.delta = evaluate_objective(inst, state.allotment)
        negative_cycle_refine(state, s)
        if state.allotment.load[s] <= inst.centers[s].capacity:
            pytest.skip("cycle refinement already cleared the overload")
        loads_before = list(state.allotment.load)
        gain = negative_path_refine(state, s)
        assert gain <= 0
        assert state.delta == evaluate_objective(inst, state.allotment)
        diff = np.subtract(state.allotment.load, loads_before)
        if gain < 0:
            assert diff[s] == -1 and diff.sum() == 0 and np.count_nonzero(diff) == 2
        else:
            assert not diff.any()
        assert not has_negative_cycle(state.collapsed())


def test_invariant_violation_hierarchy():
    assert issubclass(NegativeCycleError, InvariantViolation)
