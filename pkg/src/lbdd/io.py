"""JSON instance and report documents, CSV bench rows.

Instance document::

    {"k": 2, "n": 3,
     "centers": [{"capacity": 1, "penalty": {"family": "constant", "params": {"p": 3}}}, ...],
     "cost_matrix": [[1, 9], [2, 9], [9, 1]]}

Report document: ``SolveReport.to_dict()`` plus an optional ``instance`` path.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import InstanceError, PenaltySpec, ProblemInstance, ServiceCenter, SolveReport, evaluate_objective

BENCH_COLUMNS = [
    "solver",
    "theta",
    "penalty_lo",
    "penalty_hi",
    "ratio",
    "seed",
    "n",
    "k",
    "objective",
    "wall_time",
    "index_update",
    "bellman_ford",
    "other",
]


def instance_to_dict(instance: ProblemInstance) -> dict:
    return {
        "k": instance.k,
        "n": instance.n,
        "centers": [
            {"capacity": c.capacity, "penalty": c.penalty.to_dict()} for c in instance.centers
        ],
        "cost_matrix": instance.cost_matrix.tolist(),
    }


def instance_from_dict(data: dict) -> ProblemInstance:
    try:
        centers = tuple(
            ServiceCenter(i, int(c["capacity"]), PenaltySpec.from_dict(c["penalty"]))
            for i, c in enumerate(data["centers"])
        )
        cm = np.asarray(data["cost_matrix"], dtype=np.int64)
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError([f"malformed instance document: {exc}"]) from exc
    if cm.ndim != 2:
        raise InstanceError(["cost_matrix must be a 2-D array"])
    errs = []
    if "k" in data and int(data["k"]) != len(centers):
        errs.append(f"dimension mismatch: k={data['k']} but {len(centers)} centers")
    if "n" in data and int(data["n"]) != cm.shape[0]:
        errs.append(f"dimension mismatch: n={data['n']} but {cm.shape[0]} cost rows")
    if errs:
        raise InstanceError(errs)
    return ProblemInstance(centers, cm)


def save_instance(instance: ProblemInstance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance)))


def load_instance(path) -> ProblemInstance:
    return instance_from_dict(json.loads(Path(path).read_text()))


def save_report(report: SolveReport, path, instance_path=None) -> None:
    doc = report.to_dict()
    if instance_path is not None:
        doc["instance"] = str(instance_path)
    Path(path).write_text(json.dumps(doc, indent=1))


def load_report(path, instance: ProblemInstance | None = None) -> SolveReport:
    """Read a report; when ``instance`` is given the objective is re-checked."""
    report = SolveReport.from_dict(json.loads(Path(path).read_text()))
    if instance is not None:
        recomputed = evaluate_objective(
            instance, report.assignment, allow_partial=report.surcharge > 0
        )
        if recomputed != report.objective:
            raise ValueError(
                f"report objective {report.objective} does not match recomputed {recomputed}"
            )
    return report
