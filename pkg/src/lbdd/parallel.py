"""Worker-pool execution of the two hot loops: edge relaxation and heap updates.

Both phases are fork-join: work is split into disjoint partitions, handed to
a thread pool and joined before the caller continues.  Relaxation writes into
a fresh output buffer per round and heap updates touch one heap per task, so
the result never depends on scheduling and ``workers=1`` is the sequential
engine.
"""
from __future__ import annotations

import atexit
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .subspace import INF, SubspaceIndex, TransferEdge, apply_transfer

PHASES = ("relaxation", "index_update")


@dataclass(frozen=True)
class ParallelConfig:
    workers: int = 4
    chunking: int | None = None  # destination nodes per relaxation task; None = even split
    enabled_phases: frozenset = frozenset(PHASES)

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.chunking is not None and self.chunking < 1:
            raise ValueError("chunking must be >= 1")
        phases = frozenset(self.enabled_phases)
        unknown = phases - set(PHASES)
        if unknown:
            raise ValueError(f"unknown parallel phases: {sorted(unknown)}")
        object.__setattr__(self, "enabled_phases", phases)


_pools: dict = {}
_pools_lock = threading.Lock()


def _pool(workers: int) -> ThreadPoolExecutor:
    with _pools_lock:
        pool = _pools.get(workers)
        if pool is None:
            pool = _pools[workers] = ThreadPoolExecutor(workers, thread_name_prefix="lbdd")
        return pool


@atexit.register
def _shutdown():
    for pool in _pools.values():
        pool.shutdown(wait=False)


def _relax_columns(cost, dist, parent, lo, hi, out_dist, out_parent):
    block = cost[:, lo:hi]
    cand = np.where((dist < INF)[:, None] & (block < INF), dist[:, None] + block, INF)
    best_u = np.argmin(cand, axis=0)
    best = cand[best_u, np.arange(hi - lo)]
    improve = (best < dist[lo:hi]) & (best < INF)
    out_dist[lo:hi] = np.where(improve, best, dist[lo:hi])
    out_parent[lo:hi] = np.where(improve, best_u, parent[lo:hi])
    return bool(improve.any())


def parallel_relax_round(cost, dist, parent, config: ParallelConfig):
    """Synchronous relaxation of all edges, destinations split across workers.

    Same contract as :func:`lbdd.refine.relax_round`: returns
    ``(dist_out, parent_out, changed)`` and never writes ``dist``/``parent``.
    """
    v = cost.shape[0]
    out_dist = np.empty_like(dist)
    out_parent = np.empty_like(parent)
    chunk = config.chunking or max(1, -(-v // config.workers))
    bounds = [(lo, min(lo + chunk, v)) for lo in range(0, v, chunk)]
    if config.workers == 1 or len(bounds) == 1:
        flags = [_relax_columns(cost, dist, parent, lo, hi, out_dist, out_parent) for lo, hi in bounds]
    else:
        pool = _pool(config.workers)
        futures = [
            pool.submit(_relax_columns, cost, dist, parent, lo, hi, out_dist, out_parent)
            for lo, hi in bounds
        ]
        flags = [f.result() for f in futures]  # barrier
    if not any(flags):
        return dist, parent, False
    return out_dist, out_parent, True


def _run_group(group):
    for fn, d, i, j in group:
        fn(d, i, j)


def run_heap_tasks(tasks, config: ParallelConfig):
    """Execute independent single-heap mutations across workers, then join."""
    if config.workers == 1 or len(tasks) <= 1:
        _run_group(tasks)
        return
    groups = [tasks[w :: config.workers] for w in range(config.workers)]
    pool = _pool(config.workers)
    for f in [pool.submit(_run_group, g) for g in groups if g]:
        f.result()


def parallel_index_update(index: SubspaceIndex, transfer: TransferEdge, config: ParallelConfig, allotment=None):
    """Apply ``transfer`` to the index (and allotment, if given) with parallel heap updates."""
    runner = lambda tasks: run_heap_tasks(tasks, config)  # noqa: E731
    if allotment is not None:
        apply_transfer(index, allotment, transfer, runner)
    else:
        if index.home[transfer.demand] != transfer.src:
            from .subspace import SubspaceIndexError

            raise SubspaceIndexError(
                f"stale transfer: demand {transfer.demand} is not indexed under {transfer.src}"
            )
        index.move_demand(transfer.demand, transfer.src, transfer.dst, runner)
    return index


def engine_hooks(config: ParallelConfig | None):
    """(relax, run_tasks) callables for a SolverState; sequential when config is None."""
    from .refine import relax_round

    if config is None:
        return relax_round, None
    relax = relax_round
    run_tasks = None
    if "relaxation" in config.enabled_phases:
        relax = lambda c, d, p: parallel_relax_round(c, d, p, config)  # noqa: E731
    if "index_update" in config.enabled_phases:
        run_tasks = lambda tasks: run_heap_tasks(tasks, config)  # noqa: E731
    return relax, run_tasks
