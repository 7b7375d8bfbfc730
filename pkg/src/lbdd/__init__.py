"""Load balanced demand distribution: assign unit demands to capacitated
service centers under overload penalties."""
from .core import (
    UNASSIGNED,
    Allotment,
    InstanceError,
    PenaltySpec,
    ProblemInstance,
    ServiceCenter,
    SolveReport,
    augment_for_excess,
    evaluate_objective,
    marginal_penalty,
    refund_penalty,
    require_valid,
    validate_instance,
)
from .oracle import OracleResult, oracle_solve
from .parallel import ParallelConfig, parallel_index_update, parallel_relax_round
from .refine import (
    InvariantViolation,
    NegativeCycleError,
    SolverState,
    lowest_cost_path,
    negative_cycle_refine,
    negative_path_refine,
)
from .solver import asral_solve, check_report, greedy_solve, strict_solve
from .subspace import (
    AuxGraph,
    SubspaceIndex,
    TransferEdge,
    apply_transfer,
    build_index,
    build_negcycle_graph,
    build_negpath_graph,
)

__version__ = "0.1.0"
