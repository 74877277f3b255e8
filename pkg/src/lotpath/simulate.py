"""Monte Carlo evaluation of a review/order-up-to policy.

A policy fixes in advance which periods hold a review and the level each
review raises the inventory position to. Every review is charged the fixed
cost K even when the resulting order quantity is zero.

Two order semantics are supported:

* clipped (default): Q = max(0, S - I). The realisable policy; carried
  stock above S is kept.
* set point (``allow_negative_orders=True``): Q = S - I even when negative.
  This matches the analytic cycle costs, which price each cycle from its
  level S regardless of the stock carried into the review.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .demand import PeriodDemand, complementary_loss, cumulative, loss
from .errors import InputError

__all__ = [
    "Policy",
    "SimulationReport",
    "TraceRow",
    "ExpectedTrace",
    "simulate_policy",
    "expected_trace",
]

DEFAULT_CHUNK = 65536


@dataclass(frozen=True)
class Policy:
    """Static review schedule with one order-up-to level per review.

    A level of ``None`` marks a review that pays the fixed cost but never
    orders; inventory simply carries through. Such reviews arise when two
    cycles are merged during feasibility repair.
    """

    horizon: int
    reviews: Tuple[int, ...]
    levels: Tuple[Optional[float], ...]

    def __post_init__(self):
        if self.horizon < 1:
            raise InputError(f"horizon must be >= 1, got {self.horizon}")
        if not self.reviews:
            raise InputError("policy needs at least one review")
        if len(self.reviews) != len(self.levels):
            raise InputError(
                f"{len(self.reviews)} reviews but {len(self.levels)} levels"
            )
        if self.reviews[0] != 1:
            raise InputError("first review must fall in period 1")
        prev = 0
        for r in self.reviews:
            if r <= prev:
                raise InputError(f"review periods must be strictly increasing: {self.reviews}")
            prev = r
        if prev > self.horizon:
            raise InputError(f"review period {prev} beyond horizon {self.horizon}")
        if self.levels[0] is None:
            raise InputError("the first review must carry an order-up-to level")
        for s in self.levels:
            if s is not None and not math.isfinite(s):
                raise InputError(f"order-up-to levels must be finite, got {s}")

    def level_by_period(self) -> Dict[int, Optional[float]]:
        return dict(zip(self.reviews, self.levels))

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "reviews": list(self.reviews),
            "levels": [None if s is None else float(s) for s in self.levels],
        }


@dataclass(frozen=True)
class SimulationReport:
    n_reps: int
    mean_cost: float
    std_error: float
    components: Dict[str, float]
    closing_means: Tuple[float, ...]
    allow_negative_orders: bool
    seed: int
    elapsed: float

    @property
    def ci95(self) -> Tuple[float, float]:
        half = 1.96 * self.std_error
        return (self.mean_cost - half, self.mean_cost + half)

    def to_dict(self) -> dict:
        return {
            "n_reps": self.n_reps,
            "mean_cost": self.mean_cost,
            "std_error": self.std_error,
            "ci95": list(self.ci95),
            "components": dict(self.components),
            "closing_means": list(self.closing_means),
            "allow_negative_orders": self.allow_negative_orders,
            "seed": self.seed,
            "elapsed_seconds": self.elapsed,
        }


def simulate_policy(
    instance,
    policy: Policy,
    n_reps: int = 100_000,
    seed: int = 0,
    allow_negative_orders: bool = False,
    chunk: int = DEFAULT_CHUNK,
) -> SimulationReport:
    """Estimate the expected total cost of ``policy`` on ``instance``.

    Demand is drawn per period from the instance's Normal marginals
    (independent across periods and replications). Work is done in chunks of
    replications; each chunk uses its own spawned RNG substream, so results
    are reproducible for a given (seed, chunk) and independent of chunk count
    only through the stream layout.
    """
    if n_reps < 1:
        raise InputError(f"n_reps must be >= 1, got {n_reps}")
    if policy.horizon != instance.horizon:
        raise InputError(
            f"policy horizon {policy.horizon} != instance horizon {instance.horizon}"
        )
    T = instance.horizon
    params = instance.params
    means = np.array([d.mean for d in instance.demands], dtype=float)
    stds = np.array([d.std_dev for d in instance.demands], dtype=float)
    level_at = policy.level_by_period()
    review_set = set(policy.reviews)

    t0 = time.perf_counter()
    total = 0.0
    total_sq = 0.0
    comp = {"setup": 0.0, "order": 0.0, "holding": 0.0, "penalty": 0.0}
    closing_sum = np.zeros(T)

    done = 0
    index = 0
    while done < n_reps:
        c = min(chunk, n_reps - done)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
        demand = rng.normal(means, stds, size=(c, T))
        inv = np.full(c, float(instance.initial_inventory))
        cost = np.zeros(c)
        setup = 0.0
        order = np.zeros(c)
        holding = np.zeros(c)
        penalty = np.zeros(c)
        for t in range(1, T + 1):
            if t in review_set:
                setup += params.K
                s = level_at[t]
                if s is not None:
                    if allow_negative_orders:
                        q = s - inv
                        inv = np.full(c, s)
                    else:
                        q = np.maximum(0.0, s - inv)
                        inv = inv + q
                    order += params.z * q
            inv = inv - demand[:, t - 1]
            holding += params.h * np.maximum(inv, 0.0)
            penalty += params.b * np.maximum(-inv, 0.0)
            closing_sum[t - 1] += float(inv.sum())
        cost = setup + order + holding + penalty
        total += float(cost.sum())
        total_sq += float((cost * cost).sum())
        comp["setup"] += setup * c
        comp["order"] += float(order.sum())
        comp["holding"] += float(holding.sum())
        comp["penalty"] += float(penalty.sum())
        done += c
        index += 1

    mean = total / n_reps
    if n_reps > 1:
        var = max(0.0, (total_sq - n_reps * mean * mean) / (n_reps - 1))
        se = math.sqrt(var / n_reps)
    else:
        se = 0.0
    return SimulationReport(
        n_reps=n_reps,
        mean_cost=mean,
        std_error=se,
        components={k: v / n_reps for k, v in comp.items()},
        closing_means=tuple(closing_sum / n_reps),
        allow_negative_orders=allow_negative_orders,
        seed=seed,
        elapsed=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceRow:
    period: int
    review: bool
    order_up_to: float  # nan when no review
    expected_opening: float
    expected_closing: float
    expected_holding: float
    expected_penalty: float


@dataclass(frozen=True)
class ExpectedTrace:
    rows: Tuple[TraceRow, ...]
    total_cost: float

    def to_csv(self) -> str:
        lines = ["period,review,order_up_to,expected_opening,expected_closing,"
                 "expected_holding,expected_penalty"]
        for r in self.rows:
            s = "" if math.isnan(r.order_up_to) else f"{r.order_up_to:.6f}"
            lines.append(
                f"{r.period},{int(r.review)},{s},{r.expected_opening:.6f},"
                f"{r.expected_closing:.6f},{r.expected_holding:.6f},{r.expected_penalty:.6f}"
            )
        return "\n".join(lines) + "\n"


def expected_trace(instance, policy: Policy) -> ExpectedTrace:
    """Analytic expected inventory trajectory and cost under set-point orders.

    Within a replenishment segment starting at review a with level S, the
    closing inventory of period k is S minus cumulative demand over a..k, so
    period costs come straight from the two loss functions.
    """
    if policy.horizon != instance.horizon:
        raise InputError(
            f"policy horizon {policy.horizon} != instance horizon {instance.horizon}"
        )
    T = instance.horizon
    params = instance.params
    demands: Sequence[PeriodDemand] = instance.demands
    level_at = policy.level_by_period()

    review_set = set(policy.reviews)
    rows: List[TraceRow] = []
    total = 0.0
    prev_closing = float(instance.initial_inventory)
    seg_start = 1
    seg_level = 0.0
    for t in range(1, T + 1):
        is_review = t in review_set
        s = level_at.get(t) if is_review else None
        if is_review:
            total += params.K
        if s is not None:
            total += params.z * (s - prev_closing)
            seg_start, seg_level = t, s
            opening = s
        else:
            opening = prev_closing
        acc = cumulative(demands, seg_start, t)
        hold = params.h * complementary_loss(seg_level, acc)
        pen = params.b * loss(seg_level, acc)
        total += hold + pen
        closing = seg_level - acc.mean
        rows.append(
            TraceRow(
                period=t,
                review=is_review,
                order_up_to=s if s is not None else math.nan,
                expected_opening=opening,
                expected_closing=closing,
                expected_holding=hold,
                expected_penalty=pen,
            )
        )
        prev_closing = closing
    return ExpectedTrace(rows=tuple(rows), total_cost=total)
