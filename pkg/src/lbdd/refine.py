"""Lowest-cost paths on auxiliary graphs and the two refinement moves.

Bellman-Ford runs in synchronous rounds: round ``r + 1`` only reads the
distances produced by round ``r``.  The result therefore does not depend on
the order in which edges are visited, which lets a worker pool split a round
without changing the answer.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .core import Allotment, ProblemInstance, evaluate_objective
from .subspace import (
    DUMMY,
    INF,
    PENALTY,
    AuxGraph,
    SubspaceIndex,
    TransferEdge,
    apply_transfer,
    build_index,
    build_negcycle_graph,
    build_negpath_graph,
)


class InvariantViolation(RuntimeError):
    """An algorithm invariant failed (negative cycle where none may exist)."""


class NegativeCycleError(InvariantViolation):
    pass


@dataclass
class PathResult:
    cost: int
    edges: list  # (u, v, cost, payload) in path order
    distances: np.ndarray
    parents: np.ndarray


def relax_round(cost: np.ndarray, dist: np.ndarray, parent: np.ndarray):
    """One synchronous relaxation of every edge.

    Returns ``(dist_out, parent_out, changed)``.  A node's parent changes only
    on strict improvement; among equally good predecessors the smallest node
    id wins.
    """
    reach = dist < INF
    cand = np.where(reach[:, None] & (cost < INF), dist[:, None] + cost, INF)
    best_u = np.argmin(cand, axis=0)
    best = cand[best_u, np.arange(cand.shape[1])]
    improve = (best < dist) & (best < INF)
    if not improve.any():
        return dist, parent, False
    dist_out = np.where(improve, best, dist)
    parent_out = np.where(improve, best_u, parent)
    return dist_out, parent_out, True


def bellman_ford(cost: np.ndarray, source: int, relax=relax_round):
    """Distances/parents from ``source`` over a dense cost matrix (``INF`` = no edge).

    Raises NegativeCycleError when distances still improve on round |V|.
    """
    v = cost.shape[0]
    dist = np.full(v, INF, dtype=np.int64)
    dist[source] = 0
    parent = np.full(v, -1, dtype=np.int64)
    for _ in range(v - 1):
        dist, parent, changed = relax(cost, dist, parent)
        if not changed:
            return dist, parent
    _, _, changed = relax(cost, dist, parent)
    if changed:
        raise NegativeCycleError("distances still improving after |V|-1 rounds")
    return dist, parent


def lowest_cost_path(graph: AuxGraph, relax=relax_round):
    """Cheapest anchor-out -> anchor-in path, or None if the in-copy is unreachable."""
    src, dst = graph.source, graph.sink
    dist, parent = bellman_ford(graph.cost, src, relax)
    if dist[dst] >= INF:
        return None
    nodes = [dst]
    seen = {dst}
    while nodes[-1] != src:
        p = int(parent[nodes[-1]])
        if p < 0 or p in seen:
            raise InvariantViolation(f"parent chain is not a simple path at node {p}")
        seen.add(p)
        nodes.append(p)
    nodes.reverse()
    edges = [
        (u, v, int(graph.cost[u, v]), int(graph.payload[u, v])) for u, v in zip(nodes, nodes[1:])
    ]
    total = sum(e[2] for e in edges)
    if total != dist[dst]:
        raise InvariantViolation("path cost disagrees with its distance label")
    return PathResult(int(total), edges, dist, parent)


def collapsed_costs(index: SubspaceIndex, dummies=None) -> np.ndarray:
    """k x k matrix of per-pair minimum transfer costs (``INF`` where none)."""
    cost = index.top_cost.copy()
    if dummies is not None:
        has_dummy = np.asarray(dummies) > 0
        mask = has_dummy[:, None] & (cost > 0)
        np.fill_diagonal(mask, False)
        cost[mask] = 0
    return cost


def has_negative_cycle(cost: np.ndarray) -> bool:
    """Floyd-Warshall check for a negative cycle in a dense cost matrix."""
    d = cost.astype(np.int64, copy=True)
    np.fill_diagonal(d, np.minimum(np.diagonal(d), 0))
    for m in range(d.shape[0]):
        col, row = d[:, m : m + 1], d[m : m + 1, :]
        via = np.where((col < INF) & (row < INF), col + row, INF)
        np.minimum(d, via, out=d)
        if np.diagonal(d).min() < 0:
            return True
    return False


@dataclass
class SolverState:
    """Everything a refinement step reads or mutates.

    ``delta`` is the incrementally tracked objective of the allotment so far.
    ``dummies`` is set only in strict mode, where it counts the placeholder
    units that keep each center exactly full.
    """

    instance: ProblemInstance
    allotment: Allotment
    index: SubspaceIndex
    delta: int = 0
    dummies: list | None = None
    relax: object = relax_round
    run_tasks: object = None
    check_invariants: bool = False
    stats: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def __post_init__(self):
        for key in (
            "cycle_refinements",
            "path_refinements",
            "negative_cycles_removed",
            "negative_paths_removed",
            "transfers",
            "refinement_gain",
            "invariant_checks",
        ):
            self.stats.setdefault(key, 0)
        for key in ("index_update", "bellman_ford"):
            self.timings.setdefault(key, 0.0)

    @classmethod
    def from_assignment(cls, instance, assignment, **kwargs) -> "SolverState":
        """State for an arbitrary (possibly partial) allotment; delta recomputed."""
        allotment = Allotment.from_assignment(assignment, instance.k)
        index = build_index(instance, allotment)
        delta = evaluate_objective(instance, allotment, allow_partial=True)
        return cls(instance, allotment, index, delta, **kwargs)

    @property
    def remaining_capacity(self) -> list:
        return [max(0, c.capacity - l) for c, l in zip(self.instance.centers, self.allotment.load)]

    def assign(self, demand: int, center: int) -> None:
        t = time.perf_counter()
        self.index.insert_demand(demand, center)
        self.timings["index_update"] += time.perf_counter() - t
        self.allotment.assign(demand, center)

    def shortest(self, graph: AuxGraph):
        t = time.perf_counter()
        try:
            return lowest_cost_path(graph, self.relax)
        finally:
            self.timings["bellman_ford"] += time.perf_counter() - t

    def apply_path_edge(self, u: int, v: int, cost: int, payload: int, graph: AuxGraph) -> None:
        src, dst = graph.center_of(u), graph.center_of(v)
        if payload == DUMMY:
            if self.dummies[src] <= 0:
                raise InvariantViolation(f"no placeholder unit left at center {src}")
            self.dummies[src] -= 1
            self.dummies[dst] += 1
            return
        if payload < 0:
            raise InvariantViolation(f"cannot apply edge payload {payload}")
        t = time.perf_counter()
        apply_transfer(self.index, self.allotment, TransferEdge(src, dst, payload, cost), self.run_tasks)
        self.timings["index_update"] += time.perf_counter() - t
        self.stats["transfers"] += 1

    def collapsed(self) -> np.ndarray:
        return collapsed_costs(self.index, self.dummies)

    def verify_no_negative_cycle(self, where: str) -> None:
        self.stats["invariant_checks"] += 1
        if has_negative_cycle(self.collapsed()):
            raise InvariantViolation(f"negative cycle in the transfer graph after {where}")


def negative_cycle_refine(state: SolverState, anchor: int) -> int:
    """Cancel the most negative transfer cycle through ``anchor``.

    Returns the (non-positive) change applied to ``state.delta``.
    """
    state.stats["cycle_refinements"] += 1
    graph = build_negcycle_graph(state.index, anchor, state.dummies)
    path = state.shortest(graph)
    if path is None or path.cost >= 0:
        return 0
    for u, v, c, payload in path.edges:
        state.apply_path_edge(u, v, c, payload, graph)
    state.delta += path.cost
    state.stats["negative_cycles_removed"] += 1
    state.stats["refinement_gain"] -= path.cost
    return path.cost


def negative_path_refine(state: SolverState, anchor: int) -> int:
    """Shift one unit of overload off ``anchor`` along the most negative path.

    The path's transfer edges are applied in order; its last edge carries the
    penalty difference between the receiving center and the anchor.  Returns
    the (non-positive) change applied to ``state.delta``.
    """
    state.stats["path_refinements"] += 1
    graph = build_negpath_graph(state.index, state.allotment, state.instance, anchor)
    path = state.shortest(graph)
    if path is None or path.cost >= 0:
        return 0
    *transfers, closing = path.edges
    if closing[3] != PENALTY:
        raise InvariantViolation("negative path does not end with a penalty edge")
    for u, v, c, payload in transfers:
        state.apply_path_edge(u, v, c, payload, graph)
    state.delta += path.cost
    state.stats["negative_paths_removed"] += 1
    state.stats["refinement_gain"] -= path.cost
    return path.cost
