"""
Comparing the solvers on a generated instance
=============================================

Greedy nearest-center assignment, ASRAL and the exact min-cost-flow oracle
are run on the same seeded instance.  Strict mode then forbids overload
altogether.
"""

from lbdd import asral_solve, greedy_solve, oracle_solve, strict_solve
from lbdd.instgen import GenConfig, generate

inst = generate(GenConfig(seed=1, n=600, ratio=60, theta=0.3, penalty_range=(1, 200)))
print(f"n={inst.n} k={inst.k} total capacity={inst.total_capacity}")

###############################################################################
# Penalised objective
# -------------------
greedy = greedy_solve(inst)
asral = asral_solve(inst)
exact = oracle_solve(inst)
print("greedy :", greedy.objective)
print("asral  :", asral.objective)
print("oracle :", exact.objective)
print("refinement stats:", {k: asral.stats[k] for k in ("negative_cycles_removed", "negative_paths_removed", "refinement_gain")})

###############################################################################
# No overload allowed
# -------------------
# Total capacity is below n, so the excess goes to an overflow center priced
# one above the largest cost.  Those demands come back unassigned and their
# cost is reported as a surcharge.
strict = strict_solve(inst)
print("\nstrict objective:", strict.objective, "surcharge:", strict.surcharge)
print("unassigned demands:", strict.assignment.count(-1))
print("oracle (strict) total:", oracle_solve(inst, strict=True).total_objective, "=", strict.total_objective)
