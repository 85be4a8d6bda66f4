"""Set optimization of finite vector-function families.

Trust-region solvers with monotone and non-monotone step acceptance,
first-order baselines, a test-problem registry, and a benchmark harness
with performance profiles.
"""

from .cone import Cone, ConeError, Region, k2prime, orthant, preset
from .partition import (
    MinimalStructure,
    PartitionCapError,
    minimal_elements,
    minimal_structure,
    partition_iter,
    structure_from_values,
)
from .problems import (
    DerivativeBundle,
    DerivativeTable,
    DomainError,
    SetValuedProblem,
    UnknownProblemError,
    derivatives,
    from_functions,
    problem_ids,
    registry,
)
from .solvers import (
    IterationRecord,
    NonMonotoneMemory,
    RunResult,
    SolverConfig,
    SolverInternalError,
    accept_and_update,
    avg_reference_update,
    reduction_ratios,
    run,
    run_cg,
    run_sd,
)
from .subproblem import (
    InnerSolveFailure,
    ModelSet,
    SubproblemSolution,
    criticality_value,
    inner_minimax,
    predicted_reduction,
    theta_and_step,
)

__all__ = [
    "Cone", "ConeError", "Region", "orthant", "k2prime", "preset",
    "MinimalStructure", "PartitionCapError", "minimal_elements",
    "minimal_structure", "structure_from_values", "partition_iter",
    "SetValuedProblem", "DerivativeBundle", "DerivativeTable", "DomainError",
    "UnknownProblemError", "derivatives", "from_functions", "problem_ids",
    "registry",
    "ModelSet", "SubproblemSolution", "InnerSolveFailure", "inner_minimax",
    "predicted_reduction", "theta_and_step", "criticality_value",
    "SolverConfig", "RunResult", "IterationRecord", "NonMonotoneMemory",
    "SolverInternalError", "accept_and_update", "avg_reference_update",
    "reduction_ratios", "run", "run_sd", "run_cg",
]

__version__ = "0.1.0"
