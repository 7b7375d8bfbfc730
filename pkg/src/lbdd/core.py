"""Domain model for load balanced demand distribution.

A problem instance is a set of ``k`` capacitated service centers, ``n`` unit
demands and an ``n x k`` integer cost matrix.  Assigning more than
``capacity`` demands to a center costs an extra overload penalty ``q(j)`` for
the ``j``-th unit beyond capacity.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

UNASSIGNED = -1

# objective accumulator bound; python ints never wrap, so enforce it explicitly
INT64_MAX = 2**63 - 1

PENALTY_FAMILIES = ("constant", "linear", "table")


class InstanceError(ValueError):
    """Raised when an instance fails validation."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class ObjectiveOverflow(OverflowError):
    pass


@dataclass(frozen=True)
class PenaltySpec:
    """Overload penalty ``q(j)`` for the j-th unit beyond capacity (j >= 1).

    ``params`` holds ``(p,)`` for constant, ``(base, step)`` for linear and the
    value table for table penalties.
    """

    family: str
    params: tuple

    @classmethod
    def constant(cls, p: int) -> "PenaltySpec":
        return cls("constant", (int(p),))

    @classmethod
    def linear(cls, base: int, step: int) -> "PenaltySpec":
        return cls("linear", (int(base), int(step)))

    @classmethod
    def table(cls, values: Sequence[int]) -> "PenaltySpec":
        return cls("table", tuple(int(v) for v in values))

    def __call__(self, j: int) -> int:
        if j < 1:
            raise ValueError(f"overload index must be >= 1, got {j}")
        if self.family == "constant":
            return self.params[0]
        if self.family == "linear":
            base, step = self.params
            return base + step * (j - 1)
        if self.family == "table":
            values = self.params
            return values[min(j, len(values)) - 1]
        raise ValueError(f"unknown penalty family {self.family!r}")

    def total(self, overload: int) -> int:
        """Sum of q(1..overload)."""
        if overload <= 0:
            return 0
        if self.family == "constant":
            return self.params[0] * overload
        if self.family == "linear":
            base, step = self.params
            return base * overload + step * overload * (overload - 1) // 2
        values = self.params
        head = min(overload, len(values))
        return sum(values[:head]) + values[-1] * (overload - head)

    def problems(self) -> list[str]:
        errs = []
        if self.family not in PENALTY_FAMILIES:
            return [f"unknown penalty family {self.family!r}"]
        if self.family == "constant":
            if len(self.params) != 1 or self.params[0] <= 0:
                errs.append("constant penalty must be a single positive value")
        elif self.family == "linear":
            if len(self.params) != 2:
                errs.append("linear penalty needs (base, step)")
            else:
                base, step = self.params
                if base <= 0:
                    errs.append("linear penalty base must be positive")
                if step < 0:
                    errs.append("penalty not monotone (negative linear step)")
        else:
            values = self.params
            if not values:
                errs.append("penalty table is empty")
            elif any(v <= 0 for v in values):
                errs.append("penalty table has non-positive value")
            if any(b < a for a, b in zip(values, values[1:])):
                errs.append("penalty not monotone")
        return errs

    def to_dict(self) -> dict:
        if self.family == "constant":
            params = {"p": self.params[0]}
        elif self.family == "linear":
            params = {"base": self.params[0], "step": self.params[1]}
        else:
            params = {"values": list(self.params)}
        return {"family": self.family, "params": params}

    @classmethod
    def from_dict(cls, data: dict) -> "PenaltySpec":
        family = data["family"]
        params = data.get("params", {})
        if family == "constant":
            return cls.constant(params["p"])
        if family == "linear":
            return cls.linear(params["base"], params.get("step", 0))
        if family == "table":
            return cls.table(params["values"])
        raise InstanceError([f"unknown penalty family {family!r}"])


@dataclass(frozen=True)
class ServiceCenter:
    id: int
    capacity: int
    penalty: PenaltySpec = PenaltySpec.constant(1)


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """Centers, demand count and the n x k cost matrix (int64)."""

    centers: tuple
    cost_matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(self.centers))
        cm = np.asarray(self.cost_matrix)
        if cm.ndim != 2:
            raise InstanceError(["cost matrix must be two-dimensional"])
        cm = cm.astype(np.int64, copy=True)
        cm.setflags(write=False)
        object.__setattr__(self, "cost_matrix", cm)

    @property
    def n(self) -> int:
        return self.cost_matrix.shape[0]

    @property
    def k(self) -> int:
        return len(self.centers)

    @property
    def capacities(self) -> list[int]:
        return [c.capacity for c in self.centers]

    @property
    def total_capacity(self) -> int:
        return sum(self.capacities)

    @classmethod
    def build(cls, cost_matrix, capacities, penalties=None) -> "ProblemInstance":
        """Convenience constructor.

        ``penalties`` may be a single PenaltySpec, an int (constant penalty
        for every center) or a per-center sequence of either.
        """
        k = len(capacities)
        if penalties is None:
            penalties = PenaltySpec.constant(1)
        if isinstance(penalties, (int, np.integer, PenaltySpec)):
            penalties = [penalties] * k
        penalties = [
            PenaltySpec.constant(p) if isinstance(p, (int, np.integer)) else p
            for p in penalties
        ]
        centers = tuple(
            ServiceCenter(i, int(c), q) for i, (c, q) in enumerate(zip(capacities, penalties))
        )
        return cls(centers, np.asarray(cost_matrix))

    def with_capacities(self, capacities) -> "ProblemInstance":
        centers = tuple(
            ServiceCenter(c.id, int(cap), c.penalty) for c, cap in zip(self.centers, capacities)
        )
        return ProblemInstance(centers, self.cost_matrix)

    def with_penalties(self, penalties) -> "ProblemInstance":
        return ProblemInstance.build(self.cost_matrix, self.capacities, penalties)

    def __eq__(self, other):
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        return self.centers == other.centers and np.array_equal(
            self.cost_matrix, other.cost_matrix
        )

    __hash__ = None


@dataclass
class Allotment:
    """Mutable demand -> center mapping with per-center load counts."""

    assignment: list
    load: list

    @classmethod
    def empty(cls, n: int, k: int) -> "Allotment":
        return cls([UNASSIGNED] * n, [0] * k)

    @classmethod
    def from_assignment(cls, assignment, k: int) -> "Allotment":
        assignment = [int(a) for a in assignment]
        load = [0] * k
        for s in assignment:
            if s != UNASSIGNED:
                load[s] += 1
        return cls(assignment, load)

    def copy(self) -> "Allotment":
        return Allotment(list(self.assignment), list(self.load))

    @property
    def is_complete(self) -> bool:
        return UNASSIGNED not in self.assignment

    def assign(self, demand: int, center: int) -> None:
        if self.assignment[demand] != UNASSIGNED:
            raise ValueError(f"demand {demand} already assigned to {self.assignment[demand]}")
        self.assignment[demand] = center
        self.load[center] += 1

    def move(self, demand: int, src: int, dst: int) -> None:
        if self.assignment[demand] != src:
            raise ValueError(f"demand {demand} is not assigned to center {src}")
        self.assignment[demand] = dst
        self.load[src] -= 1
        self.load[dst] += 1

    def check(self) -> None:
        """Recount loads; raises AssertionError on mismatch."""
        recount = [0] * len(self.load)
        for s in self.assignment:
            if s != UNASSIGNED:
                recount[s] += 1
        assert recount == list(self.load), f"load {self.load} != recount {recount}"


@dataclass
class SolveReport:
    objective: int
    assignment: list
    solver: str = ""
    stats: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    surcharge: int = 0

    @property
    def total_objective(self) -> int:
        """Objective including the excess-demand surcharge (strict mode)."""
        return self.objective + self.surcharge

    def to_dict(self) -> dict:
        return {
            "solver": self.solver,
            "objective": int(self.objective),
            "surcharge": int(self.surcharge),
            "assignment": [int(a) for a in self.assignment],
            "stats": dict(self.stats),
            "timings": {k: float(v) for k, v in self.timings.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SolveReport":
        return cls(
            objective=int(data["objective"]),
            assignment=[int(a) for a in data["assignment"]],
            solver=data.get("solver", ""),
            stats=dict(data.get("stats", {})),
            timings=dict(data.get("timings", {})),
            surcharge=int(data.get("surcharge", 0)),
        )


def marginal_penalty(center: ServiceCenter, current_load: int) -> int:
    """Cost of placing one more unit on ``center`` at ``current_load``."""
    if current_load < 0:
        raise ValueError("load must be non-negative")
    if current_load < center.capacity:
        return 0
    return center.penalty(current_load - center.capacity + 1)


def refund_penalty(center: ServiceCenter, current_load: int) -> int:
    """Penalty saved by removing one unit from ``center`` at ``current_load``."""
    if current_load < 0:
        raise ValueError("load must be non-negative")
    if current_load <= center.capacity:
        return 0
    return center.penalty(current_load - center.capacity)


def total_penalty(instance: ProblemInstance, load: Sequence[int]) -> int:
    return sum(c.penalty.total(l - c.capacity) for c, l in zip(instance.centers, load))


def evaluate_objective(instance: ProblemInstance, allotment, allow_partial: bool = False) -> int:
    """Total assignment cost plus overload penalties, recomputed from scratch.

    ``allotment`` may be an Allotment or a bare assignment sequence.  Partial
    allotments are rejected unless ``allow_partial`` is set, in which case
    unassigned demands contribute nothing.
    """
    assignment = allotment.assignment if isinstance(allotment, Allotment) else allotment
    a = np.asarray(assignment, dtype=np.int64)
    if a.shape != (instance.n,):
        raise ValueError(f"assignment length {a.shape} does not match n={instance.n}")
    placed = a != UNASSIGNED
    if not allow_partial and not placed.all():
        raise ValueError("allotment is incomplete")
    if placed.any() and (a[placed].min() < 0 or a[placed].max() >= instance.k):
        raise ValueError("assignment refers to an unknown center")
    rows = np.nonzero(placed)[0]
    cost = sum(int(x) for x in instance.cost_matrix[rows, a[placed]])
    load = np.bincount(a[placed], minlength=instance.k)
    total = cost + total_penalty(instance, [int(x) for x in load])
    if total > INT64_MAX:
        raise ObjectiveOverflow(f"objective {total} exceeds the 64-bit range")
    return total


def validate_instance(instance: ProblemInstance) -> list[str]:
    """Return the list of violated instance invariants (empty if valid)."""
    errs = []
    cm = instance.cost_matrix
    if instance.k < 1:
        errs.append("need at least one service center")
    if instance.n < 1:
        errs.append("need at least one demand unit")
    if cm.shape[1] != instance.k:
        errs.append(f"dimension mismatch: cost matrix has {cm.shape[1]} columns, k={instance.k}")
    if cm.size and cm.min() <= 0:
        errs.append("non-positive cost")
    for i, c in enumerate(instance.centers):
        if c.id != i:
            errs.append(f"center ids must be 0..k-1, found {c.id} at position {i}")
        if c.capacity < 0:
            errs.append(f"center {i}: negative capacity")
        errs.extend(f"center {i}: {e}" for e in c.penalty.problems())
    return errs


def require_valid(instance: ProblemInstance) -> None:
    errs = validate_instance(instance)
    if errs:
        raise InstanceError(errs)


def augment_for_excess(instance: ProblemInstance):
    """Add an overflow center when demand exceeds total capacity.

    The overflow center absorbs ``n - sum(c)`` units at ``max(CM) + 1`` each.
    Returns ``(augmented_instance, surcharge)``; the instance is returned
    unchanged with surcharge 0 when capacity suffices.
    """
    excess = instance.n - instance.total_capacity
    if excess <= 0:
        return instance, 0
    price = int(instance.cost_matrix.max()) + 1
    cm = np.hstack([instance.cost_matrix, np.full((instance.n, 1), price, dtype=np.int64)])
    centers = instance.centers + (ServiceCenter(instance.k, excess, instance.centers[0].penalty),)
    return ProblemInstance(centers, cm), excess * price
