"""Brute-force reference solver over all review schedules.

Enumerates every schedule with a review in period 1 (2^(T-1) of them) and
optimises the order-up-to levels per schedule, independently of the graph
machinery, so it can vouch for the shortest-path result on small horizons.

Two modes:

* unconstrained: each cycle level minimised on its own; the best schedule
  cost must equal the relaxed shortest-path objective.
* constrained: levels must additionally absorb the stock carried between
  cycles (expected closing of a cycle never exceeds the next level), i.e. no
  expected negative orders. Solved by a suffix-minimum grid DP over a shared
  level grid, then sharpened by a few coordinate-descent sweeps.

Costs are priced the same way as cycle costs elsewhere: fixed K per review,
unit cost on the cycle mean (on the level itself for the terminal cycle),
holding and penalty from the two Normal loss integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import ndtr

from .errors import InputError
from .instances import InstanceSpec

__all__ = ["OracleResult", "schedule_enumeration_oracle"]

MAX_ORACLE_HORIZON = 8


@dataclass(frozen=True)
class OracleResult:
    best_cost: float
    best_schedule: Tuple[int, ...]
    best_levels: Tuple[float, ...]
    constrained: bool
    n_schedules: int
    schedule_costs: Dict[Tuple[int, ...], float]


def _normal_losses(y, mu, sigma):
    """(E[(d - y)^+], E[(y - d)^+]) for d ~ Normal(mu, sigma); y may be an array."""
    y = np.asarray(y, dtype=float)
    if sigma == 0.0:
        short = np.maximum(mu - y, 0.0)
        exces = np.maximum(y - mu, 0.0)
    else:
        u = (y - mu) / sigma
        pdf = np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)
        short = sigma * (pdf - (1.0 - ndtr(u)) * u)
        exces = short + (y - mu)
    return np.maximum(short, 0.0), np.maximum(exces, 0.0)


class _CycleTable:
    """Per-(first, last) cycle cost callables with memoised grid columns."""

    def __init__(self, instance: InstanceSpec, grid: np.ndarray):
        self.params = instance.params
        self.T = instance.horizon
        self.means = [d.mean for d in instance.demands]
        self.vars_ = [d.std_dev ** 2 for d in instance.demands]
        self.grid = grid
        self._grid_cache: Dict[Tuple[int, int], np.ndarray] = {}
        self._free_cache: Dict[Tuple[int, int], Tuple[float, float]] = {}

    def cost(self, first: int, last: int, y):
        p = self.params
        mu_acc = 0.0
        var_acc = 0.0
        total = np.zeros_like(np.asarray(y, dtype=float))
        for k in range(first, last + 1):
            mu_acc += self.means[k - 1]
            var_acc += self.vars_[k - 1]
            short, exces = _normal_losses(y, mu_acc, math.sqrt(var_acc))
            total = total + p.h * exces + p.b * short
        unit = p.z * (np.asarray(y, dtype=float) if last == self.T else mu_acc)
        return p.K + unit + total

    def grid_cost(self, first: int, last: int) -> np.ndarray:
        key = (first, last)
        if key not in self._grid_cache:
            self._grid_cache[key] = self.cost(first, last, self.grid)
        return self._grid_cache[key]

    def free_minimum(self, first: int, last: int) -> Tuple[float, float]:
        """(level, cost) of the cycle optimised with no coupling."""
        key = (first, last)
        if key not in self._free_cache:
            hi = float(self.grid[-1])
            res = minimize_scalar(
                lambda y: float(self.cost(first, last, y)),
                bounds=(0.0, hi),
                method="bounded",
                options={"xatol": 1e-8},
            )
            self._free_cache[key] = (float(res.x), float(res.fun))
        return self._free_cache[key]


def _all_schedules(T: int):
    for n_extra in range(0, T):
        for extra in combinations(range(2, T + 1), n_extra):
            yield (1,) + extra


def _cycles_of(schedule: Tuple[int, ...], T: int) -> List[Tuple[int, int]]:
    ends = list(schedule[1:]) + [T + 1]
    return [(schedule[i], ends[i] - 1) for i in range(len(schedule))]


def _constrained_schedule(
    table: _CycleTable, cycles: List[Tuple[int, int]], sweeps: int = 3
) -> Tuple[float, List[float]]:
    """Best levels for one schedule with carried stock absorbed at each review."""
    grid = table.grid
    n = len(cycles)
    mus = [sum(table.means[a - 1: b]) for a, b in cycles]

    # backward pass: value-to-go as a function of the lowest admissible level
    value_next: Optional[np.ndarray] = None
    totals: List[np.ndarray] = [None] * n  # cost-at-level + value-to-go, per cycle
    for i in range(n - 1, -1, -1):
        a, b = cycles[i]
        col = table.grid_cost(a, b).copy()
        if value_next is not None:
            col += np.interp(grid - mus[i], grid, value_next)
        totals[i] = col
        value_next = np.minimum.accumulate(col[::-1])[::-1]

    # forward recovery on the grid
    levels: List[float] = []
    lowest = -math.inf
    for i in range(n):
        j0 = int(np.searchsorted(grid, lowest, side="left")) if lowest > grid[0] else 0
        j = j0 + int(np.argmin(totals[i][j0:]))
        levels.append(float(grid[j]))
        lowest = levels[-1] - mus[i]

    # coordinate sweeps off the grid; bounds keep both neighbours feasible
    ymax = float(grid[-1])
    for _ in range(sweeps):
        for i in range(n):
            lo = max(0.0, levels[i - 1] - mus[i - 1]) if i > 0 else 0.0
            hi = min(ymax, levels[i + 1] + mus[i]) if i < n - 1 else ymax
            if hi <= lo:
                levels[i] = lo
                continue
            a, b = cycles[i]
            res = minimize_scalar(
                lambda y: float(table.cost(a, b, y)),
                bounds=(lo, hi),
                method="bounded",
                options={"xatol": 1e-9},
            )
            levels[i] = float(res.x)
    cost = sum(float(table.cost(a, b, levels[i])) for i, (a, b) in enumerate(cycles))
    return cost, levels


def schedule_enumeration_oracle(
    instance: InstanceSpec,
    constrained: bool = True,
    grid_step: Optional[float] = None,
    max_horizon: int = MAX_ORACLE_HORIZON,
) -> OracleResult:
    """Exact-by-enumeration benchmark for small instances.

    Raises :class:`InputError` beyond ``max_horizon`` periods; the schedule
    count doubles per period. ``grid_step`` defaults to 1/200 of the average
    period mean (constrained mode only).
    """
    T = instance.horizon
    if T > max_horizon:
        raise InputError(
            f"oracle enumerates 2^(T-1) schedules; horizon {T} exceeds cap {max_horizon}"
        )
    total_mean = sum(d.mean for d in instance.demands)
    total_sd = math.sqrt(sum(d.std_dev ** 2 for d in instance.demands))
    ymax = max(1.0, total_mean + 12.0 * total_sd)
    if grid_step is None:
        grid_step = max(total_mean / T, 1e-3) / 200.0
    grid = np.arange(0.0, ymax + grid_step, grid_step)
    table = _CycleTable(instance, grid)
    offset = instance.params.z * instance.initial_inventory

    best_cost = math.inf
    best_schedule: Tuple[int, ...] = (1,)
    best_levels: Tuple[float, ...] = ()
    costs: Dict[Tuple[int, ...], float] = {}
    n = 0
    for schedule in _all_schedules(T):
        n += 1
        cycles = _cycles_of(schedule, T)
        if constrained:
            cost, levels = _constrained_schedule(table, cycles)
        else:
            levels, cost = [], 0.0
            for a, b in cycles:
                lv, c = table.free_minimum(a, b)
                levels.append(lv)
                cost += c
        cost -= offset
        costs[schedule] = cost
        if cost < best_cost:
            best_cost = cost
            best_schedule = schedule
            best_levels = tuple(levels)
    return OracleResult(
        best_cost=best_cost,
        best_schedule=best_schedule,
        best_levels=best_levels,
        constrained=constrained,
        n_schedules=n,
        schedule_costs=costs,
    )
