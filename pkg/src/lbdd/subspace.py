"""Transfer-cost index over the current allotment and the auxiliary graphs.

For every ordered pair of centers ``(i, j)`` the index keeps a min-heap of
the demands currently assigned to ``i`` keyed by their transfer cost
``CM[d, j] - CM[d, i]``.  Heap tops are mirrored into two dense ``k x k``
arrays so that an auxiliary graph can be assembled with array slicing.

Auxiliary graphs have ``k + 1`` nodes: node ``s`` is center ``s`` for every
non-anchor center, node ``anchor`` plays the anchor's out-copy and node ``k``
its in-copy.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import UNASSIGNED, Allotment, ProblemInstance, marginal_penalty, refund_penalty
from .heap import IndexedMinHeap

INF = 2**60  # "no edge" / unreachable; INF + any edge cost still fits in int64

NO_EDGE = -1
PENALTY = -2
DUMMY = -3


class TransferEdge(NamedTuple):
    src: int
    dst: int
    demand: int
    cost: int


class SubspaceIndexError(LookupError):
    """Misuse of the subspace index (double insert, unknown demand, stale edge)."""


class SubspaceIndex:
    """k(k-1) addressable heaps of transfer costs, one per ordered center pair.

    Heap keys pack ``(cost, demand)`` into one integer ``cost * n + demand`` so
    that ties resolve to the smallest demand index without tuple allocation.
    """

    def __init__(self, instance: ProblemInstance):
        k, n = instance.k, instance.n
        self.k = k
        self.n = n
        self.cost_matrix = instance.cost_matrix
        self._rows = instance.cost_matrix.tolist()
        self._stride = max(n, 1)
        self.heaps = [[None if i == j else IndexedMinHeap() for j in range(k)] for i in range(k)]
        self.home = [UNASSIGNED] * n
        self.top_cost = np.full((k, k), INF, dtype=np.int64)
        self.top_demand = np.full((k, k), NO_EDGE, dtype=np.int64)
        self.heap_ops = 0

    # single-heap primitives; each touches heap (i, j) and top cell (i, j) only
    def _push(self, d, i, j):
        row = self._rows[d]
        heap = self.heaps[i][j]
        heap.push(d, (row[j] - row[i]) * self._stride + d)
        self._refresh(i, j)

    def _pull(self, d, i, j):
        self.heaps[i][j].remove(d)
        self._refresh(i, j)

    def _refresh(self, i, j):
        top = self.heaps[i][j].peek()
        if top is None:
            self.top_cost[i, j] = INF
            self.top_demand[i, j] = NO_EDGE
        else:
            d, key = top
            self.top_cost[i, j] = key // self._stride
            self.top_demand[i, j] = d

    def insert_tasks(self, demand, center):
        return [(self._push, demand, center, j) for j in range(self.k) if j != center]

    def remove_tasks(self, demand, center):
        return [(self._pull, demand, center, j) for j in range(self.k) if j != center]

    def _check_insert(self, demand, center):
        if self.home[demand] != UNASSIGNED:
            raise SubspaceIndexError(
                f"demand {demand} already indexed under center {self.home[demand]}"
            )
        if not 0 <= center < self.k:
            raise SubspaceIndexError(f"unknown center {center}")

    def _check_remove(self, demand, center):
        if self.home[demand] != center:
            raise SubspaceIndexError(f"demand {demand} is not indexed under center {center}")

    def insert_demand(self, demand: int, center: int) -> None:
        self._check_insert(demand, center)
        for fn, d, i, j in self.insert_tasks(demand, center):
            fn(d, i, j)
        self.heap_ops += self.k - 1
        self.home[demand] = center

    def remove_demand(self, demand: int, center: int) -> None:
        self._check_remove(demand, center)
        for fn, d, i, j in self.remove_tasks(demand, center):
            fn(d, i, j)
        self.heap_ops += self.k - 1
        self.home[demand] = UNASSIGNED

    def move_demand(self, demand: int, src: int, dst: int, run_tasks=None) -> None:
        """Re-index ``demand`` from ``src`` to ``dst`` (2(k-1) heap mutations).

        ``run_tasks`` may execute the independent heap mutations concurrently;
        it must return only after every task has completed.
        """
        self._check_remove(demand, src)
        if src == dst:
            raise SubspaceIndexError("transfer to the same center")
        tasks = self.remove_tasks(demand, src) + self.insert_tasks(demand, dst)
        if run_tasks is None:
            for fn, d, i, j in tasks:
                fn(d, i, j)
        else:
            run_tasks(tasks)
        self.heap_ops += len(tasks)
        self.home[demand] = dst

    def min_transfer(self, src: int, dst: int):
        """Cheapest transfer from ``src`` to ``dst``, or None if ``src`` is empty."""
        if src == dst:
            raise ValueError("min_transfer needs two distinct centers")
        d = int(self.top_demand[src, dst])
        if d == NO_EDGE:
            return None
        return TransferEdge(src, dst, d, int(self.top_cost[src, dst]))

    def heap_contents(self, i: int, j: int) -> dict:
        """{demand: transfer cost} for heap (i, j)."""
        return {d: key // self._stride for d, key in self.heaps[i][j].items()}

    def snapshot(self):
        """Hashable view of all heap memberships and keys (for equality tests)."""
        return tuple(
            tuple(sorted(self.heaps[i][j].items())) if i != j else ()
            for i in range(self.k)
            for j in range(self.k)
        )

    def check(self, allotment: Allotment | None = None) -> None:
        """Compare every heap against a from-scratch rebuild."""
        cm = self.cost_matrix
        for i in range(self.k):
            members = [d for d, h in enumerate(self.home) if h == i]
            if allotment is not None:
                assert members == [d for d, s in enumerate(allotment.assignment) if s == i]
            for j in range(self.k):
                if i == j:
                    continue
                heap = self.heaps[i][j]
                heap.check()
                want = {d: int(cm[d, j] - cm[d, i]) for d in members}
                assert self.heap_contents(i, j) == want, f"heap ({i},{j}) diverged"
                if want:
                    best = min(want.items(), key=lambda kv: (kv[1], kv[0]))
                    assert (self.top_demand[i, j], self.top_cost[i, j]) == best
                else:
                    assert self.top_demand[i, j] == NO_EDGE


def build_index(instance: ProblemInstance, allotment: Allotment) -> SubspaceIndex:
    index = SubspaceIndex(instance)
    cm = instance.cost_matrix
    stride = index._stride
    members = [[] for _ in range(instance.k)]
    for d, s in enumerate(allotment.assignment):
        if s != UNASSIGNED:
            members[s].append(d)
            index.home[d] = s
    for i, ds in enumerate(members):
        if not ds:
            continue
        rows = np.asarray(ds, dtype=np.int64)
        for j in range(instance.k):
            if i == j:
                continue
            keys = (cm[rows, j] - cm[rows, i]) * stride + rows
            index.heaps[i][j] = IndexedMinHeap(zip(ds, keys.tolist()))
            index._refresh(i, j)
    return index


def apply_transfer(index: SubspaceIndex, allotment: Allotment, edge: TransferEdge, run_tasks=None):
    """Move ``edge.demand`` from ``edge.src`` to ``edge.dst`` in both structures."""
    d = edge.demand
    if allotment.assignment[d] != edge.src or index.home[d] != edge.src:
        raise SubspaceIndexError(
            f"stale transfer: demand {d} is not assigned to center {edge.src}"
        )
    index.move_demand(d, edge.src, edge.dst, run_tasks)
    allotment.move(d, edge.src, edge.dst)
    return index, allotment


@dataclass
class AuxGraph:
    """Dense auxiliary graph over ``k + 1`` nodes.

    ``cost[u, v]`` is the edge cost (``INF`` when absent) and ``payload[u, v]``
    the demand moved along it, ``PENALTY`` for a closing penalty edge, ``DUMMY``
    for a placeholder-unit transfer or ``NO_EDGE``.
    """

    anchor: int
    cost: np.ndarray
    payload: np.ndarray

    @property
    def k(self) -> int:
        return self.cost.shape[0] - 1

    @property
    def source(self) -> int:
        return self.anchor

    @property
    def sink(self) -> int:
        return self.k

    @property
    def num_nodes(self) -> int:
        return self.cost.shape[0]

    def center_of(self, node: int) -> int:
        return self.anchor if node == self.k else node

    def has_edge(self, u: int, v: int) -> bool:
        return self.payload[u, v] != NO_EDGE

    def edges(self):
        """(u, v, cost, payload) for every edge, in row-major order."""
        us, vs = np.nonzero(self.payload != NO_EDGE)
        return [
            (int(u), int(v), int(self.cost[u, v]), int(self.payload[u, v]))
            for u, v in zip(us, vs)
        ]

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self.payload != NO_EDGE))


def _transfer_block(index: SubspaceIndex, dummies=None):
    cost = index.top_cost.copy()
    payload = index.top_demand.copy()
    if dummies is not None:
        has_dummy = np.asarray(dummies) > 0
        # a placeholder transfer costs 0; it only wins over strictly positive real edges
        better = has_dummy[:, None] & (cost > 0)
        np.fill_diagonal(better, False)
        cost[better] = 0
        payload[better] = DUMMY
    return cost, payload


def _aux_skeleton(index: SubspaceIndex, anchor: int, dummies=None):
    k = index.k
    if not 0 <= anchor < k:
        raise ValueError(f"anchor {anchor} out of range")
    block_cost, block_payload = _transfer_block(index, dummies)
    cost = np.full((k + 1, k + 1), INF, dtype=np.int64)
    payload = np.full((k + 1, k + 1), NO_EDGE, dtype=np.int64)
    cost[:k, :k] = block_cost
    payload[:k, :k] = block_payload
    # the out-copy keeps the anchor's row but receives nothing
    cost[:, anchor] = INF
    payload[:, anchor] = NO_EDGE
    return cost, payload, block_cost, block_payload


def build_negcycle_graph(index: SubspaceIndex, anchor: int, dummies=None) -> AuxGraph:
    """Graph whose out->in lowest path is the cheapest cycle through ``anchor``."""
    k = index.k
    cost, payload, block_cost, block_payload = _aux_skeleton(index, anchor, dummies)
    cost[:k, k] = block_cost[:, anchor]
    payload[:k, k] = block_payload[:, anchor]
    cost[anchor, k] = INF
    payload[anchor, k] = NO_EDGE
    return AuxGraph(anchor, cost, payload)


class ContractError(ValueError):
    pass


def build_negpath_graph(
    index: SubspaceIndex, allotment: Allotment, instance: ProblemInstance, anchor: int
) -> AuxGraph:
    """Transfer edges plus penalty-swap edges ``u -> in`` for an overloaded anchor.

    The closing edge from ``u`` costs the penalty of one more unit at ``u``
    minus the penalty refunded by taking one unit off the anchor.
    """
    load = allotment.load
    centers = instance.centers
    if load[anchor] <= centers[anchor].capacity:
        raise ContractError(f"anchor {anchor} is not overloaded")
    k = index.k
    cost, payload, _, _ = _aux_skeleton(index, anchor)
    refund = refund_penalty(centers[anchor], load[anchor])
    for u in range(k):
        if u == anchor:
            continue
        cost[u, k] = marginal_penalty(centers[u], load[u]) - refund
        payload[u, k] = PENALTY
    return AuxGraph(anchor, cost, payload)
