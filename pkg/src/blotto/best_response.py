"""Closed-form follower best response via water filling.

Given a strictly positive leader allocation, the follower's unique optimal
reply is supported on the battlefields with the largest ratios
values_b[j] / x_a[j]: sort by that ratio descending, take the longest
prefix whose last member still beats the prefix water level

    lambda_k = (sum_{l<=k} sqrt(x_al * v_bl))^2 / (x_b + sum_{l<=k} x_al)^2,

and fill x_bj = sqrt(x_aj * v_bj) / sqrt(lambda_{k*}) - x_aj on that
prefix, zero elsewhere.  The water level equals the follower's marginal
utility on every supported battlefield.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game_core import (
    Allocation,
    GameInstance,
    InputError,
    PreconditionError,
    SolverInvariantError,
    _check_alloc,
    _check_index,
)

# Follower entries below this fraction of budget_b count as zero / off-support.
SUPPORT_FLOOR_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class BestResponseResult:
    """Follower's optimal reply.

    support lists the battlefields with positive follower allocation, as
    original indices ordered by descending values_b[j] / x_a[j]; the water
    level is the common marginal utility on the support.
    """

    allocation: Allocation
    support: tuple[int, ...]
    water_level: float


def follower_marginal_utility(
    instance: GameInstance, j: int, x_aj: float, x_bj: float
) -> float:
    """d u_bj / d x_bj = x_aj * v_bj / (x_aj + x_bj)^2."""
    j = _check_index(instance, j)
    x_aj, x_bj = float(x_aj), float(x_bj)
    if x_aj + x_bj <= 0:
        raise InputError(
            "marginal utility undefined when both allocations are zero"
        )
    return x_aj * float(instance.values_b[j]) / (x_aj + x_bj) ** 2


def _require_positive_leader(leader_alloc: Allocation) -> None:
    if np.any(leader_alloc.amounts <= 0):
        j = int(np.argmin(leader_alloc.amounts))
        raise PreconditionError(
            f"best response needs a strictly positive leader allocation; "
            f"entry {j} is {leader_alloc.amounts[j]!r}. Callers that must "
            f"handle zeros should clamp entries to a floor of "
            f"1e-12 * budget_a first."
        )


def best_response(instance: GameInstance, leader_alloc: Allocation) -> BestResponseResult:
    """Unique follower best response to a strictly positive leader allocation."""
    _check_alloc(instance, leader_alloc, "a")
    _require_positive_leader(leader_alloc)

    xa = leader_alloc.amounts
    vb = instance.values_b
    budget_b = instance.budget_b

    ratios = vb / xa
    order = np.argsort(-ratios, kind="stable")
    xa_s = xa[order]
    vb_s = vb[order]
    ratio_s = ratios[order]

    roots = np.sqrt(xa_s * vb_s)
    sum_roots = np.cumsum(roots)
    sum_xa = np.cumsum(xa_s)
    levels = (sum_roots / (budget_b + sum_xa)) ** 2

    satisfied = np.nonzero(ratio_s > levels)[0]
    if satisfied.size == 0:  # impossible while budget_b > 0
        raise SolverInvariantError(
            f"empty best-response support; ratios={ratio_s!r} levels={levels!r}"
        )
    k = int(satisfied[-1])  # last prefix position in the support
    scale = (budget_b + sum_xa[k]) / sum_roots[k]
    water_level = float((sum_roots[k] / (budget_b + sum_xa[k])) ** 2)

    filled = np.zeros(instance.n)
    filled[: k + 1] = roots[: k + 1] * scale - xa_s[: k + 1]

    # Boundary noise guard: zero out sub-floor entries, keep the sum exact.
    floor = SUPPORT_FLOOR_RTOL * budget_b
    tiny = (filled > 0) & (filled <= floor)
    filled[filled < 0] = 0.0
    if np.any(tiny):
        lost = filled[tiny].sum()
        filled[tiny] = 0.0
        filled[int(np.argmax(filled))] += lost

    amounts = np.empty(instance.n)
    amounts[order] = filled
    support = tuple(int(order[i]) for i in range(k + 1) if filled[i] > 0)

    return BestResponseResult(
        allocation=Allocation(amounts, budget_b),
        support=support,
        water_level=water_level,
    )


def support_prefix(instance: GameInstance, leader_alloc: Allocation) -> tuple[int, ...]:
    """Indices of the follower's support, descending by values_b[j] / x_a[j]."""
    return best_response(instance, leader_alloc).support


def batch_leader_utilities(instance: GameInstance, leader_points: np.ndarray) -> np.ndarray:
    """Leader utility of each row of leader_points after the follower replies.

    Vectorized version of best_response for grid searches: every row must
    be a strictly positive allocation of budget_a.  Returns one utility per
    row.
    """
    pts = np.asarray(leader_points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != instance.n:
        raise InputError("leader_points must be an (m, n) array")
    if np.any(pts <= 0):
        raise PreconditionError("all grid leader allocations must be positive")

    vb = instance.values_b
    va = instance.values_a
    budget_b = instance.budget_b

    order = np.argsort(-(vb / pts), axis=1, kind="stable")
    xa_s = np.take_along_axis(pts, order, axis=1)
    vb_s = vb[order]
    va_s = va[order]
    ratio_s = vb_s / xa_s

    roots = np.sqrt(xa_s * vb_s)
    sum_roots = np.cumsum(roots, axis=1)
    sum_xa = np.cumsum(xa_s, axis=1)
    levels = (sum_roots / (budget_b + sum_xa)) ** 2

    satisfied = ratio_s > levels
    n = instance.n
    k = n - 1 - np.argmax(satisfied[:, ::-1], axis=1)  # last satisfied prefix position
    rows = np.arange(pts.shape[0])
    scale = (budget_b + sum_xa[rows, k]) / sum_roots[rows, k]

    in_prefix = np.arange(n)[None, :] <= k[:, None]
    xb_s = np.where(in_prefix, roots * scale[:, None] - xa_s, 0.0)
    np.clip(xb_s, 0.0, None, out=xb_s)

    return (xa_s * va_s / (xa_s + xb_s)).sum(axis=1)
