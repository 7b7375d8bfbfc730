"""Exact reference solver based on min-cost flow.

The network is source -> demand (cap 1) -> center (cap 1, cost CM) -> sink,
where center ``s`` reaches the sink through ``c_s`` free unit arcs followed by
unit arcs priced ``q_s(1), q_s(2), ...``.  Penalties are non-decreasing, so
the per-center arc costs are convex and successive shortest paths that always
use the cheapest open slot is exact.

Demand nodes are eliminated from the residual graph: walking
``center u -> (reverse arc) demand d -> center v`` is a single transfer of
``d`` from ``u`` to ``v`` with cost ``CM[d, v] - CM[d, u]``.  Each augmentation
is then a label-correcting shortest path over ``k`` center nodes whose edge
costs are recomputed from the current flow.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    UNASSIGNED,
    InstanceError,
    ProblemInstance,
    augment_for_excess,
    evaluate_objective,
    marginal_penalty,
)

DEFAULT_LIMIT = 2000
_INF = np.iinfo(np.int64).max // 4


@dataclass
class OracleResult:
    objective: int
    assignment: list
    surcharge: int = 0

    @property
    def total_objective(self) -> int:
        return self.objective + self.surcharge


def _slot_costs(instance, flow, strict):
    out = np.empty(instance.k, dtype=np.int64)
    for s, center in enumerate(instance.centers):
        if strict:
            out[s] = 0 if flow[s] < center.capacity else _INF
        else:
            out[s] = marginal_penalty(center, flow[s])
    return out


def _transfer_matrix(cm, assign, k):
    """Per-pair cheapest transfer cost and the demand realising it."""
    w = np.full((k, k), _INF, dtype=np.int64)
    arg = np.full((k, k), -1, dtype=np.int64)
    for u in range(k):
        rows = np.flatnonzero(assign == u)
        if rows.size == 0:
            continue
        delta = cm[rows] - cm[rows, u][:, None]
        pick = np.argmin(delta, axis=0)
        w[u] = delta[pick, np.arange(k)]
        arg[u] = rows[pick]
    np.fill_diagonal(w, _INF)
    np.fill_diagonal(arg, -1)
    return w, arg


def _augment(cm, assign, flow, slot, k):
    free = np.flatnonzero(assign == UNASSIGNED)
    entry_pick = np.argmin(cm[free], axis=0)
    dist = cm[free[entry_pick], np.arange(k)].astype(np.int64)
    entry = free[entry_pick]
    w, arg = _transfer_matrix(cm, assign, k)
    parent = np.full(k, -1, dtype=np.int64)
    for _ in range(k):
        cand = np.where((dist[:, None] < _INF) & (w < _INF), dist[:, None] + w, _INF)
        pu = np.argmin(cand, axis=0)
        best = cand[pu, np.arange(k)]
        better = best < dist
        if not better.any():
            break
        dist = np.where(better, best, dist)
        parent = np.where(better, pu, parent)
    else:
        raise RuntimeError("negative cycle in the residual network")
    total = np.where((dist < _INF) & (slot < _INF), dist + slot, _INF)
    end = int(np.argmin(total))
    if total[end] >= _INF:
        raise InstanceError(["no feasible augmenting path (capacity exhausted)"])
    chain = [end]
    while parent[chain[-1]] >= 0:
        chain.append(int(parent[chain[-1]]))
        if len(chain) > k:
            raise RuntimeError("cyclic parent chain")
    chain.reverse()
    # shift transfers along the chain first, tail to head, then place the fresh demand
    for u, v in reversed(list(zip(chain, chain[1:]))):
        d = int(arg[u, v])
        assign[d] = v
        flow[u] -= 1
        flow[v] += 1
    d0 = int(entry[chain[0]])
    assign[d0] = chain[0]
    flow[chain[0]] += 1


def oracle_solve(instance: ProblemInstance, strict: bool = False, limit: int = DEFAULT_LIMIT) -> OracleResult:
    """Exact optimum of the penalised objective, or of the capacity-strict one.

    In strict mode penalties are ignored and no center may exceed capacity;
    excess demand is routed to an overflow center priced ``max(CM) + 1``.
    Those demands come back UNASSIGNED and their cost is the ``surcharge``.
    """
    if instance.n > limit:
        raise InstanceError([f"oracle limited to n <= {limit}, got n={instance.n}"])
    work, surcharge = augment_for_excess(instance) if strict else (instance, 0)
    cm = work.cost_matrix
    k = work.k
    assign = np.full(work.n, UNASSIGNED, dtype=np.int64)
    flow = [0] * k
    for _ in range(work.n):
        _augment(cm, assign, flow, _slot_costs(work, flow, strict), k)
    assignment = [int(a) for a in assign]
    if surcharge:
        assignment = [UNASSIGNED if a == instance.k else a for a in assignment]
    objective = evaluate_objective(instance, assignment, allow_partial=bool(surcharge))
    return OracleResult(objective, assignment, surcharge)
