"""
Negative cycles and negative paths
==================================

Two small allotments show the refinement moves at work.  In the first, four
transfers around a cycle lower the objective by 13.  In the second, one unit
of overload moves from a crowded center to a cheaper one, and the objective
drops by 33.
"""

from lbdd import ProblemInstance, SolverState, evaluate_objective
from lbdd import negative_cycle_refine, negative_path_refine

###############################################################################
# A cycle through center S1
# -------------------------
# Demands A..E sit on S1, S1, S2, S3, S4.  Moving B to S2, C to S3, D to S4
# and E back to S1 costs -6 - 3 - 2 - 2.
cm = [
    [1, 3, 9, 9],
    [8, 2, 9, 9],
    [9, 6, 3, 9],
    [9, 9, 5, 3],
    [1, 9, 9, 3],
]
inst = ProblemInstance.build(cm, capacities=[10, 10, 10, 10], penalties=5)
state = SolverState.from_assignment(inst, [0, 0, 1, 2, 3])
print("objective before:", state.delta)
print("cycle gain:", negative_cycle_refine(state, anchor=0))
print("objective after:", evaluate_objective(inst, state.allotment))
print("assignment:", state.allotment.assignment)

###############################################################################
# Moving overload off S2
# ----------------------
# S2 holds two demands with capacity one and a penalty of 40.  The cheapest
# escape is a chain: C to S3, D to S4, H to S1, then pay S1's penalty (20)
# instead of S2's.
cm = [
    [1, 50, 50, 50],
    [50, 1, 50, 50],
    [50, 10, 5, 50],
    [50, 50, 10, 6],
    [6, 50, 50, 10],
]
inst = ProblemInstance.build(cm, capacities=[1, 1, 1, 1], penalties=[20, 40, 20, 20])
state = SolverState.from_assignment(inst, [0, 1, 1, 2, 3])
print("\nobjective before:", state.delta, "loads", state.allotment.load)
print("path gain:", negative_path_refine(state, anchor=1))
print("objective after:", evaluate_objective(inst, state.allotment), "loads", state.allotment.load)
