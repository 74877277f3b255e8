"""Expected cost of a replenishment cycle and its optimal order-up-to level.

A cycle covering periods ``i..j`` places one order at the start of period i
that raises the inventory position to a level y and receives nothing more
until period j+1. Expected cost of the cycle:

    c(i, j; y) = K + unit_term + sum over k = i..j of
                 h * complementary_loss(y, D[i..k]) + b * loss(y, D[i..k])

where D[i..k] is the cumulative demand of periods i..k. Each period inside
the cycle is charged against the demand accumulated since the order, so the
summand k prices the end-of-period-k inventory.

The cost is convex in y and its minimiser solves the multi-period
newsvendor condition

    sum over k = i..k of Phi[i..k](y) = (j - i + 1) * b / (b + h)

(with a -z correction on the numerator for the horizon-final cycle). For a
single period this is the classical critical fractile mu + sigma *
Phi^-1(b / (b + h)). The fixed cost K shifts the whole curve and never moves
the minimiser.

Unit purchasing cost z is handled by telescoping: summed over any complete
review schedule, z * order quantities equals z * (total mean demand +
closing inventory - initial inventory). Interior cycles therefore carry the
constant share z * (cycle mean demand) and the final cycle carries z * y,
which is the only part that depends on a decision variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.special import ndtr

from .demand import PeriodDemand, complementary_loss, cumulative, loss
from .errors import NumericalError

__all__ = [
    "CostParams",
    "CycleOptimum",
    "ConnectionMatrix",
    "cycle_cost_at",
    "optimize_order_up_to",
    "build_connection_matrix",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class CostParams:
    """Cost structure: fixed order cost K, unit cost z, holding h, penalty b."""

    K: float
    z: float
    h: float
    b: float

    def __post_init__(self):
        if self.K < 0:
            raise ValueError(f"fixed order cost K must be >= 0, got {self.K}")
        if self.h <= 0:
            raise ValueError(f"holding cost h must be > 0, got {self.h}")
        if self.b <= self.h:
            # keeps the newsvendor fractile above one half
            raise ValueError(f"penalty cost b must exceed holding cost h, got b={self.b} h={self.h}")
        if not 0 <= self.z < self.b:
            raise ValueError(f"unit cost z must satisfy 0 <= z < b, got z={self.z} b={self.b}")


@dataclass(frozen=True)
class CycleOptimum:
    """Optimal order-up-to level and expected cost of one cycle.

    ``expected_holding``/``expected_backorder`` hold the per-period expected
    on-hand and shortage quantities at the optimum, one entry per covered
    period. ``expected_closing`` is the expected inventory at the end of the
    cycle and equals ``order_up_to - cumulative mean`` exactly.
    """

    first_period: int
    last_period: int
    order_up_to: float
    expected_cost: float
    expected_closing: float
    expected_holding: Tuple[float, ...]
    expected_backorder: Tuple[float, ...]
    terminal: bool = False


# ---------------------------------------------------------------------------
# vectorised kernels over the cumulative-demand arrays of one cycle
# ---------------------------------------------------------------------------


def _cdf_sum(y: float, mus: np.ndarray, sds: np.ndarray) -> float:
    """Sum of cumulative-demand CDFs at y; zero-variance entries step at mu."""
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (y - mus) / sds
    vals = np.where(sds > 0.0, ndtr(u), (y >= mus).astype(float))
    return float(vals.sum())


def _loss_pair(y, mus, sds):
    """Vectorised (loss, complementary_loss) against each cumulative demand.

    ``y`` may be a scalar or a column vector for grid evaluation.
    """
    y = np.asarray(y, dtype=float)
    yy = y[..., None] if y.ndim else y
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (yy - mus) / sds
    phi = np.exp(-0.5 * u * u) / _SQRT_2PI
    lo = sds * (phi - (1.0 - ndtr(u)) * u)
    lo = np.where(sds > 0.0, lo, np.maximum(mus - yy, 0.0))
    # exact identity: complementary - loss = y - mu
    hi = lo + (yy - mus)
    hi = np.where(sds > 0.0, hi, np.maximum(yy - mus, 0.0))
    return lo, hi


def _cost_at(y, mus, sds, params: CostParams, terminal: bool):
    lo, hi = _loss_pair(y, mus, sds)
    base = params.K + (params.z * y if terminal else params.z * mus[-1])
    return base + (params.h * hi + params.b * lo).sum(axis=-1)


def _bisect_root(g, lo: float, hi: float, y_tol: float, max_expand: int = 64) -> float:
    """Root of a non-decreasing function by plain bisection.

    Expands the bracket geometrically until the signs differ; gives up with a
    :class:`NumericalError` describing the interval and the function signs.
    """
    g_lo, g_hi = g(lo), g(hi)
    width = hi - lo
    expansions = 0
    while g_lo > 0.0 or g_hi < 0.0:
        if expansions >= max_expand:
            raise NumericalError(
                f"could not bracket the optimum: g({lo:.6g})={g_lo:.6g}, "
                f"g({hi:.6g})={g_hi:.6g} after {expansions} expansions"
            )
        width *= 2.0
        if g_lo > 0.0:
            lo -= width
            g_lo = g(lo)
        if g_hi < 0.0:
            hi += width
            g_hi = g(hi)
        expansions += 1
    while hi - lo > y_tol:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _optimize_arrays(
    mus: np.ndarray,
    sds: np.ndarray,
    params: CostParams,
    terminal: bool,
    method: str,
    y_tol: float,
    grid_step: float,
    grid_range: Tuple[float, float],
) -> Tuple[float, float, np.ndarray, np.ndarray]:
    n = len(mus)
    if method == "bisection":
        target = (n * params.b - (params.z if terminal else 0.0)) / (params.b + params.h)
        smax = float(sds.max())
        lo = float(mus.min()) - 12.0 * smax - 1.0
        hi = float(mus.max()) + 12.0 * smax + 1.0
        y = _bisect_root(lambda v: _cdf_sum(v, mus, sds) - target, lo, hi, y_tol)
    elif method == "grid":
        lo, hi = grid_range
        ys = np.arange(lo, hi + grid_step, grid_step)
        costs = _cost_at(ys, mus, sds, params, terminal)
        y = float(ys[int(np.argmin(costs))])
    else:
        raise ValueError(f"unknown optimisation method {method!r}")
    cost = float(_cost_at(y, mus, sds, params, terminal))
    lo_arr, hi_arr = _loss_pair(y, mus, sds)
    return y, cost, lo_arr, hi_arr


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def cycle_cost_at(
    y: float,
    first: int,
    last: int,
    demands: Sequence[PeriodDemand],
    params: CostParams,
    terminal: bool = False,
) -> float:
    """Expected cycle cost at an arbitrary order-up-to level ``y``.

    Scalar reference implementation assembled period by period from the loss
    functions; the optimiser uses a vectorised equivalent.
    """
    total = params.K
    for k in range(first, last + 1):
        d = cumulative(demands, first, k)
        total += params.h * complementary_loss(y, d) + params.b * loss(y, d)
    if params.z:
        total += params.z * (y if terminal else cumulative(demands, first, last).mean)
    return total


def optimize_order_up_to(
    first: int,
    last: int,
    demands: Sequence[PeriodDemand],
    params: CostParams,
    method: str = "bisection",
    terminal: bool = False,
    y_tol: float = 1e-6,
    grid_step: float = 1.0,
    grid_range: Optional[Tuple[float, float]] = None,
) -> CycleOptimum:
    """Minimise the expected cost of cycle ``first..last`` over y.

    ``method="bisection"`` solves the newsvendor fractile condition on the
    (monotone) cost derivative to ``y_tol``. ``method="grid"`` scans a fixed
    line ``grid_range`` with spacing ``grid_step``; the default range is
    [0, 4 * total horizon mean], mirroring a plain line-search setup.
    """
    means = np.array([d.mean for d in demands], dtype=float)
    var = np.array([d.std_dev**2 for d in demands], dtype=float)
    mus = np.cumsum(means[first - 1 : last])
    sds = np.sqrt(np.cumsum(var[first - 1 : last]))
    if grid_range is None:
        grid_range = (0.0, 4.0 * float(means.sum()))
    y, cost, lo_arr, hi_arr = _optimize_arrays(
        mus, sds, params, terminal, method, y_tol, grid_step, grid_range
    )
    return CycleOptimum(
        first_period=first,
        last_period=last,
        order_up_to=y,
        expected_cost=cost,
        expected_closing=y - float(mus[-1]),
        expected_holding=tuple(float(v) for v in hi_arr),
        expected_backorder=tuple(float(v) for v in lo_arr),
        terminal=terminal,
    )


class ConnectionMatrix:
    """Upper-triangular table of optimised cycles for one instance.

    ``entry(i, j)`` returns the :class:`CycleOptimum` of the cycle covering
    periods i..j (1 <= i <= j <= horizon). Cycles ending at the horizon are
    terminal and include the unit-cost term that depends on the level.
    """

    def __init__(self, horizon: int, params: CostParams, entries: Dict[Tuple[int, int], CycleOptimum], total_mean: float, method: str):
        self.horizon = horizon
        self.params = params
        self._entries = entries
        self.total_mean = total_mean
        self.method = method

    def entry(self, first: int, last: int) -> CycleOptimum:
        return self._entries[(first, last)]

    def __len__(self):
        return len(self._entries)

    def items(self):
        return self._entries.items()


def build_connection_matrix(
    instance,
    method: str = "bisection",
    y_tol: float = 1e-6,
    grid_step: float = 1.0,
) -> ConnectionMatrix:
    """Optimise every feasible cycle of ``instance``.

    ``instance`` needs ``horizon``, ``demands`` and ``params`` attributes.
    Produces horizon * (horizon + 1) / 2 entries.
    """
    demands = instance.demands
    params = instance.params
    T = instance.horizon
    means = np.array([d.mean for d in demands], dtype=float)
    var = np.array([d.std_dev**2 for d in demands], dtype=float)
    total_mean = float(means.sum())
    grid_range = (0.0, 4.0 * total_mean)

    entries: Dict[Tuple[int, int], CycleOptimum] = {}
    for i in range(1, T + 1):
        mus_all = np.cumsum(means[i - 1 :])
        sds_all = np.sqrt(np.cumsum(var[i - 1 :]))
        for j in range(i, T + 1):
            span = j - i + 1
            terminal = j == T
            y, cost, lo_arr, hi_arr = _optimize_arrays(
                mus_all[:span], sds_all[:span], params, terminal,
                method, y_tol, grid_step, grid_range,
            )
            entries[(i, j)] = CycleOptimum(
                first_period=i,
                last_period=j,
                order_up_to=y,
                expected_cost=cost,
                expected_closing=y - float(mus_all[span - 1]),
                expected_holding=tuple(float(v) for v in hi_arr),
                expected_backorder=tuple(float(v) for v in lo_arr),
                terminal=terminal,
            )
    return ConnectionMatrix(T, params, entries, total_mean, method)
