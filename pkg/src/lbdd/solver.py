"""Solvers: ASRAL with overload refinement, optimal strict-capacity, greedy."""
from __future__ import annotations

import time

import numpy as np

from .core import (
    UNASSIGNED,
    Allotment,
    ProblemInstance,
    SolveReport,
    evaluate_objective,
    marginal_penalty,
    augment_for_excess,
    require_valid,
)
from .parallel import ParallelConfig, engine_hooks
from .refine import SolverState, negative_cycle_refine, negative_path_refine
from .subspace import SubspaceIndex


def processing_order(instance: ProblemInstance):
    """Demands by ascending best cost (ties: demand index) with their best center.

    Equivalent to draining the min-distance heap; best-center ties go to the
    lowest center index.
    """
    cm = instance.cost_matrix
    best_center = np.argmin(cm, axis=1)
    best_cost = cm[np.arange(instance.n), best_center]
    order = np.lexsort((np.arange(instance.n), best_cost))
    return [(int(d), int(best_center[d]), int(best_cost[d])) for d in order]


def _finish(state: SolverState, solver: str, started: float, **extra) -> SolveReport:
    total = time.perf_counter() - started
    timings = dict(state.timings)
    timings["total"] = total
    timings["other"] = max(0.0, total - timings["index_update"] - timings["bellman_ford"])
    stats = dict(state.stats)
    stats["heap_ops"] = state.index.heap_ops
    return SolveReport(
        objective=state.delta,
        assignment=list(state.allotment.assignment),
        solver=solver,
        stats=stats,
        timings=timings,
        **extra,
    )


def asral_solve(
    instance: ProblemInstance,
    mode: str = "sequential",
    parallel: ParallelConfig | None = None,
    check_invariants: bool = False,
    refine_to_fixpoint: bool = False,
) -> SolveReport:
    """Incremental assignment with negative-cycle and negative-path refinement.

    Each demand (cheapest first) goes to its cheapest center.  The most
    negative transfer cycle through that center is then cancelled; if the
    center was already full, the most negative way of moving one unit of
    overload elsewhere is applied as well.

    ``mode="parallel"`` runs relaxation and heap updates on a worker pool
    (``parallel`` config, default 4 workers) and returns the same allotment.
    With ``refine_to_fixpoint`` the overload step repeats while it still
    improves and the center stays overloaded.
    """
    require_valid(instance)
    if mode not in ("sequential", "parallel"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "parallel" and parallel is None:
        parallel = ParallelConfig()
    relax, run_tasks = engine_hooks(parallel if mode == "parallel" else None)
    started = time.perf_counter()
    state = SolverState(
        instance,
        Allotment.empty(instance.n, instance.k),
        SubspaceIndex(instance),
        relax=relax,
        run_tasks=run_tasks,
        check_invariants=check_invariants,
    )
    centers = instance.centers
    load = state.allotment.load
    for d, s, c in processing_order(instance):
        had_vacancy = load[s] < centers[s].capacity
        extra = 0 if had_vacancy else marginal_penalty(centers[s], load[s])
        state.assign(d, s)
        state.delta += c + extra
        negative_cycle_refine(state, s)
        if check_invariants:
            state.verify_no_negative_cycle("cycle refinement")
        if had_vacancy:
            continue
        state.stats["overloads"] = state.stats.get("overloads", 0) + 1
        while True:
            gain = negative_path_refine(state, s)
            if check_invariants:
                state.verify_no_negative_cycle("path refinement")
            if not (refine_to_fixpoint and gain < 0 and load[s] > centers[s].capacity):
                break
    name = "para-asral" if mode == "parallel" else "asral"
    return _finish(state, name, started)


def greedy_solve(instance: ProblemInstance) -> SolveReport:
    """Every demand to its cheapest center, penalties paid as incurred."""
    require_valid(instance)
    started = time.perf_counter()
    centers = instance.centers
    allotment = Allotment.empty(instance.n, instance.k)
    delta = 0
    for d, s, c in processing_order(instance):
        delta += c + marginal_penalty(centers[s], allotment.load[s])
        allotment.assign(d, s)
    total = time.perf_counter() - started
    return SolveReport(
        objective=delta,
        assignment=allotment.assignment,
        solver="greedy",
        timings={"index_update": 0.0, "bellman_ford": 0.0, "other": total, "total": total},
    )


def strict_solve(
    instance: ProblemInstance,
    order=None,
    parallel: ParallelConfig | None = None,
    check_invariants: bool = False,
) -> SolveReport:
    """Optimal allotment when no center may exceed its capacity.

    Every center starts full of zero-cost placeholder units.  Each real demand
    evicts a placeholder from its cheapest center that still holds one, then
    the most negative cycle through that center is cancelled.  With excess
    demand an overflow center is added first; demands left there come back
    UNASSIGNED and their fixed cost is reported as ``surcharge``.
    """
    require_valid(instance)
    work, surcharge = augment_for_excess(instance)
    relax, run_tasks = engine_hooks(parallel)
    started = time.perf_counter()
    state = SolverState(
        work,
        Allotment.empty(work.n, work.k),
        SubspaceIndex(work),
        dummies=list(work.capacities),
        relax=relax,
        run_tasks=run_tasks,
        check_invariants=check_invariants,
    )
    cm = work.cost_matrix
    dummies = state.dummies
    if order is None:
        order = range(work.n)
    for d in order:
        d = int(d)
        open_centers = np.flatnonzero(np.asarray(dummies) > 0)
        s = int(open_centers[np.argmin(cm[d, open_centers])])
        dummies[s] -= 1
        state.assign(d, s)
        state.delta += int(cm[d, s])
        negative_cycle_refine(state, s)
        if check_invariants:
            state.verify_no_negative_cycle("cycle refinement")
    report = _finish(state, "strict", started)
    if surcharge:
        overflow = instance.k
        report.assignment = [UNASSIGNED if s == overflow else s for s in report.assignment]
        report.objective -= surcharge
        report.surcharge = surcharge
        report.stats["unassigned"] = report.assignment.count(UNASSIGNED)
    return report


def check_report(instance: ProblemInstance, report: SolveReport) -> None:
    """Raise AssertionError unless the report's objective matches a recount."""
    partial = report.surcharge > 0
    recomputed = evaluate_objective(instance, report.assignment, allow_partial=partial)
    assert recomputed == report.objective, (
        f"{report.solver}: reported {report.objective}, recomputed {recomputed}"
    )
