"""End-to-end solve: connection matrix, shortest path, feasibility repair."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .augment import AugmentationTrace, check_feasibility, effective_cycles, repetitive_augment
from .cycles import ConnectionMatrix, build_connection_matrix
from .graph import PathSolution, ReplenishmentGraph, build_graph, filter_arcs, shortest_path
from .instances import InstanceSpec
from .simulate import Policy

__all__ = ["Solution", "solve_instance", "policy_from_path"]


def policy_from_path(path: PathSolution, horizon: int) -> Policy:
    """Translate a feasible path into the review schedule it encodes.

    Each realised cycle contributes a review at its start period with the
    cycle's order-up-to level; periods absorbed into a merged cycle keep
    their review slot (it still costs K) but never order.
    """
    entries: List[Tuple[int, Optional[float]]] = []
    for ec in effective_cycles(path):
        entries.append((ec.cycle.start, ec.cycle.order_up_to))
        for a in ec.cycle.absorbed:
            entries.append((a, None))
    entries.sort()
    return Policy(
        horizon=horizon,
        reviews=tuple(p for p, _ in entries),
        levels=tuple(s for _, s in entries),
    )


@dataclass
class Solution:
    """Everything the solve produced, including the intermediate relaxation."""

    instance: InstanceSpec
    policy: Policy
    expected_cost: float
    relaxed_cost: float
    path: PathSolution
    relaxed_path: PathSolution
    trace: AugmentationTrace
    graph: ReplenishmentGraph
    matrix: ConnectionMatrix
    filtered: bool
    relaxed_violations: int
    timings: Dict[str, float]

    @property
    def introduced_nodes(self) -> int:
        return self.trace.introduced_nodes

    def to_dict(self) -> dict:
        return {
            "instance": self.instance.to_dict(),
            "policy": self.policy.to_dict(),
            "expected_cost": self.expected_cost,
            "relaxed_cost": self.relaxed_cost,
            "relaxed_violations": self.relaxed_violations,
            "introduced_nodes": self.introduced_nodes,
            "path": list(self.path.node_labels),
            "relaxed_path": list(self.relaxed_path.node_labels),
            "filtered": self.filtered,
            "timings": dict(self.timings),
        }


def solve_instance(
    instance: InstanceSpec,
    filtered: bool = True,
    method: str = "bisection",
    y_tol: float = 1e-6,
    grid_step: float = 1.0,
    max_iterations: Optional[int] = None,
) -> Solution:
    """Compute the best feasible review schedule for ``instance``.

    ``filtered`` drops provably redundant arcs before the relaxed search
    (pure speed-up). ``method`` selects how each cycle level is optimised:
    ``"bisection"`` on the stationarity condition or ``"grid"`` sweep with
    ``grid_step``. Path costs below include the unit-cost credit for initial
    inventory, so they are true expected policy costs.
    """
    t0 = time.perf_counter()
    matrix = build_connection_matrix(instance, method=method, y_tol=y_tol, grid_step=grid_step)
    graph = build_graph(matrix)
    if filtered:
        filter_arcs(graph)
    t1 = time.perf_counter()
    relaxed = shortest_path(graph)
    t2 = time.perf_counter()
    relaxed_violations = len(check_feasibility(relaxed))
    if relaxed_violations and filtered:
        # Filtering is only safe for the relaxed optimum: a repair may need
        # long spans the pruning discarded and would otherwise re-create them
        # as merged cycles that pay K for nothing. Repair the full arc set so
        # the final policy never depends on the filter flag.
        graph = build_graph(matrix)
    path, trace = repetitive_augment(graph, max_iterations=max_iterations)
    t3 = time.perf_counter()

    offset = instance.params.z * instance.initial_inventory
    return Solution(
        instance=instance,
        policy=policy_from_path(path, instance.horizon),
        expected_cost=path.total_cost - offset,
        relaxed_cost=relaxed.total_cost - offset,
        path=path,
        relaxed_path=relaxed,
        trace=trace,
        graph=graph,
        matrix=matrix,
        filtered=filtered,
        relaxed_violations=relaxed_violations,
        timings={
            "t_prep": t1 - t0,
            "t_shortest_path": t2 - t1,
            "t_augment": t3 - t2,
        },
    )
