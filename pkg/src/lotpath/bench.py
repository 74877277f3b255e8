"""Factorial benchmark over generated demand patterns.

Crosses demand pattern and horizon with the cost/variability factors
(fixed cost K, penalty b, coefficient of variation rho) and records, per
instance, how infeasible the relaxed solution was and what the repair cost.
Replicates share demand draws across cost cells on purpose: cell (K, b, rho)
differences are then purely cost-driven.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, fields
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .instances import generate_instances
from .solver import solve_instance

__all__ = [
    "BenchRecord",
    "DESK_GRID",
    "FULL_GRID",
    "run_benchmark",
    "bench_to_csv",
    "summarize",
]

# default factor levels
PATTERNS = ("erratic", "lumpy")
RHOS = (0.1, 0.2, 0.3)
FIXED_COSTS = (225.0, 900.0, 2500.0)
PENALTIES = (2.0, 5.0, 10.0)

DESK_GRID = dict(horizons=(10, 20), replicates=3, seed=7)
FULL_GRID = dict(horizons=(20, 30, 40), replicates=10, seed=7)


@dataclass(frozen=True)
class BenchRecord:
    instance_id: str
    pattern: str
    T: int
    rho: float
    b: float
    K: float
    negative_order_count: int
    introduced_nodes: int
    relaxed_cost: float
    augmented_cost: float
    pct_increase: float
    t_prep: float
    t_shortest_path: float
    t_augment: float


def run_benchmark(
    patterns: Sequence[str] = PATTERNS,
    horizons: Sequence[int] = (10, 20),
    rhos: Sequence[float] = RHOS,
    fixed_costs: Sequence[float] = FIXED_COSTS,
    penalties: Sequence[float] = PENALTIES,
    replicates: int = 3,
    seed: int = 7,
    holding: float = 1.0,
    unit_cost: float = 0.0,
    method: str = "bisection",
    filtered: bool = True,
    progress: Optional[Callable[[BenchRecord], None]] = None,
) -> List[BenchRecord]:
    """Solve the full factorial design and return one record per instance."""
    records: List[BenchRecord] = []
    for pattern in patterns:
        for T in horizons:
            for rho in rhos:
                for K in fixed_costs:
                    for b in penalties:
                        instances = generate_instances(
                            pattern=pattern,
                            horizon=T,
                            rho=rho,
                            K=K,
                            b=b,
                            count=replicates,
                            h=holding,
                            z=unit_cost,
                            seed=seed,
                        )
                        for inst in instances:
                            sol = solve_instance(inst, filtered=filtered, method=method)
                            rel = sol.relaxed_cost
                            aug = sol.expected_cost
                            rec = BenchRecord(
                                instance_id=inst.name,
                                pattern=pattern,
                                T=T,
                                rho=rho,
                                b=b,
                                K=K,
                                negative_order_count=sol.relaxed_violations,
                                introduced_nodes=sol.introduced_nodes,
                                relaxed_cost=rel,
                                augmented_cost=aug,
                                pct_increase=100.0 * (aug - rel) / rel if rel else 0.0,
                                t_prep=sol.timings["t_prep"],
                                t_shortest_path=sol.timings["t_shortest_path"],
                                t_augment=sol.timings["t_augment"],
                            )
                            records.append(rec)
                            if progress is not None:
                                progress(rec)
    return records


def bench_to_csv(records: Iterable[BenchRecord]) -> str:
    cols = [f.name for f in fields(BenchRecord)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in records:
        writer.writerow(
            [
                getattr(r, c) if not isinstance(getattr(r, c), float)
                else f"{getattr(r, c):.6f}"
                for c in cols
            ]
        )
    return buf.getvalue()


def summarize(
    records: Sequence[BenchRecord],
    by: Tuple[str, ...] = ("pattern", "rho", "b", "K"),
) -> List[Dict[str, object]]:
    """Group means of the repair statistics, one dict row per factor cell."""
    groups: Dict[Tuple, List[BenchRecord]] = {}
    for r in records:
        key = tuple(getattr(r, f) for f in by)
        groups.setdefault(key, []).append(r)
    rows: List[Dict[str, object]] = []
    for key in sorted(groups):
        cell = groups[key]
        n = len(cell)
        augmented = [r for r in cell if r.introduced_nodes > 0]
        row: Dict[str, object] = dict(zip(by, key))
        row.update(
            n=n,
            n_augmented=len(augmented),
            mean_negative_orders=sum(r.negative_order_count for r in cell) / n,
            mean_introduced_nodes=sum(r.introduced_nodes for r in cell) / n,
            mean_pct_increase=(
                sum(r.pct_increase for r in augmented) / len(augmented)
                if augmented
                else 0.0
            ),
            mean_relaxed_cost=sum(r.relaxed_cost for r in cell) / n,
            mean_augmented_cost=sum(r.augmented_cost for r in cell) / n,
        )
        rows.append(row)
    return rows
