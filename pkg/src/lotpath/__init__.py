"""Review/order-up-to policies for non-stationary stochastic lot sizing.

Pipeline: price every replenishment cycle (connection matrix), take the
shortest path through the cycle graph (relaxed optimum), then repair any
pairings that would need negative orders by splitting nodes and re-solving.
"""

from .augment import (
    AugmentationStep,
    AugmentationTrace,
    FeasibilityViolation,
    check_feasibility,
    effective_cycles,
    repetitive_augment,
)
from .cycles import (
    ConnectionMatrix,
    CostParams,
    CycleOptimum,
    build_connection_matrix,
    cycle_cost_at,
    optimize_order_up_to,
)
from .demand import PeriodDemand, complementary_loss, cumulative, loss
from .errors import InputError, LotpathError, NonTerminationError, NumericalError
from .graph import (
    Arc,
    CycleInfo,
    NodeId,
    PathSolution,
    ReplenishmentGraph,
    build_graph,
    filter_arcs,
    graph_dump,
    shortest_path,
)
from .instances import InstanceSpec, generate_instances, load_instance, save_instance
from .oracle import OracleResult, schedule_enumeration_oracle
from .simulate import Policy, SimulationReport, expected_trace, simulate_policy
from .solver import Solution, policy_from_path, solve_instance

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Arc",
    "AugmentationStep",
    "AugmentationTrace",
    "ConnectionMatrix",
    "CostParams",
    "CycleInfo",
    "CycleOptimum",
    "FeasibilityViolation",
    "InputError",
    "InstanceSpec",
    "LotpathError",
    "NodeId",
    "NonTerminationError",
    "NumericalError",
    "OracleResult",
    "PathSolution",
    "PeriodDemand",
    "Policy",
    "ReplenishmentGraph",
    "SimulationReport",
    "Solution",
    "build_connection_matrix",
    "build_graph",
    "check_feasibility",
    "complementary_loss",
    "cumulative",
    "cycle_cost_at",
    "effective_cycles",
    "expected_trace",
    "filter_arcs",
    "generate_instances",
    "graph_dump",
    "load_instance",
    "loss",
    "optimize_order_up_to",
    "policy_from_path",
    "repetitive_augment",
    "save_instance",
    "schedule_enumeration_oracle",
    "shortest_path",
    "simulate_policy",
    "solve_instance",
]
