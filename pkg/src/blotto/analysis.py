"""Stackelberg-vs-Nash comparison machinery.

Covers three questions about a game instance:

* when do the two solution concepts coincide?  They always do when all
  battlefields share one values_a/values_b ratio; with exactly two ratio
  classes they coincide at a single budget ratio x_a/x_b given in closed
  form (coincidence_threshold); with three or more classes, never.
* how large can the leader's commitment advantage be?  The Nash utility is
  floored at the leader's budget share of its total value, which caps
  SE/NE at (x_a+x_b)/x_a; for two battlefields a sharper two-sided bound
  is available in a normalized frame.
* how do the utilities move as the budget ratio varies?  budget_sweep
  resolves both equilibria along a grid of ratios and serializes to CSV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .commitment import CommitmentSolution, optimal_commitment, ratio_classes
from .game_core import (
    GameInstance,
    InputError,
    SolverInvariantError,
)
from .nash import NashSolution, solve_nash

# Two ratio classes coincide with a budget ratio when it matches the
# threshold to this relative tolerance.
COINCIDENCE_RTOL = 1e-9

SWEEP_CSV_HEADER = "r,se_u_a,se_u_b,ne_u_a,ne_u_b,coincides"


@dataclass(frozen=True)
class CoincidenceReport:
    """Ratio-class partition and whether SE and NE coincide here.

    threshold is the budget ratio x_a/x_b at which the two-class game's
    equilibria collapse into each other; None unless exactly two classes.
    """

    ratio_classes: tuple[tuple[int, ...], ...]
    coincides: bool
    threshold: float | None


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    """Side-by-side equilibria with the leader-advantage ratios."""

    se: CommitmentSolution
    ne: NashSolution
    leader_ratio: float
    follower_ratio: float
    cor1_upper: float


@dataclass(frozen=True)
class AdvantageBounds:
    """Bounds on equilibrium utilities and their ratio.

    ne_leader_floor bounds the leader's Nash utility from below;
    se_over_ne_cap bounds SE/NE from above for any instance.  The
    two-battlefield bounds apply to the normalized frame recorded in
    normalized_frame = (va1, vb1, xa) with the second battlefield and the
    follower budget scaled to 1; utility ratios are unchanged by that
    rescaling.  All three are None when n != 2.
    """

    ne_leader_floor: float
    se_over_ne_cap: float
    two_field_lower: float | None
    two_field_upper: float | None
    normalized_frame: tuple[float, float, float] | None


@dataclass(frozen=True)
class SweepRow:
    """One budget ratio's utilities; nan + diagnostic when a solver failed."""

    r: float
    se_u_a: float
    se_u_b: float
    ne_u_a: float
    ne_u_b: float
    coincides: bool
    diagnostic: str | None = None


def _psi1(x1: float, x2: float, x3: float, x4: float) -> float:
    inner = math.sqrt((x1**2 / x3 + x2**2 / x4) / (x3 + x4))
    return (x1 / math.sqrt(x3) + inner * math.sqrt(x3)) ** 2


def _psi2(x1, x2, x3, x4, x5, x6) -> float:
    left = math.sqrt(x5 * x3)
    right = math.sqrt(x6 * x4)
    return (x6 * x4 * x1 * left - x5 * x3 * x2 * right) / (left + right)


def _psi3(x1, x2, x3, x4, x5, x6) -> float:
    return x5 * x6 * (x1 * x4 - x2 * x3) / (x5 + x6)


def coincidence_threshold(
    v_aM: float, v_bM: float, v_aMbar: float, v_bMbar: float
) -> float:
    """Budget ratio x_a/x_b at which a two-ratio-class game's Stackelberg
    and Nash equilibria coincide.

    Arguments are the class value sums for the leader and follower; the two
    classes must have distinct values_a/values_b ratios.  The function is
    symmetric in swapping the two classes.
    """
    sums = (v_aM, v_bM, v_aMbar, v_bMbar)
    if any(not (s > 0) or not math.isfinite(s) for s in sums):
        raise InputError(f"class value sums must be positive reals, got {sums}")
    if abs(v_aM / v_bM - v_aMbar / v_bMbar) <= COINCIDENCE_RTOL * max(
        v_aM / v_bM, v_aMbar / v_bMbar
    ):
        raise InputError(
            "the two classes must have distinct value ratios; equal ratios "
            "coincide at every budget ratio"
        )
    t1 = _psi1(v_aM, v_aMbar, v_bM, v_bMbar)
    t2 = _psi1(v_aMbar, v_aM, v_bMbar, v_bM)
    t3 = _psi2(v_aMbar, v_aM, v_bMbar, v_bM, t2, t1) + _psi3(
        v_aM, v_aMbar, v_bM, v_bMbar, t1, t2
    )
    t4 = _psi2(v_aM, v_aMbar, v_bM, v_bMbar, t1, t2)
    if t3 == 0:
        raise SolverInvariantError(
            f"threshold undefined: t3 = 0 with distinct ratios (t1={t1}, "
            f"t2={t2}, t4={t4})"
        )
    return t4 / t3


def check_coincidence(instance: GameInstance) -> CoincidenceReport:
    """Do this instance's Stackelberg and Nash equilibria coincide?

    One ratio class: always.  Two classes: exactly when x_a/x_b equals the
    threshold (each class is collapsed to a super-battlefield by summing
    values).  Three or more classes: never.
    """
    classes = tuple(tuple(c) for c in ratio_classes(instance))
    if len(classes) == 1:
        return CoincidenceReport(classes, True, None)
    if len(classes) > 2:
        return CoincidenceReport(classes, False, None)
    m, mbar = (np.asarray(c) for c in classes)
    threshold = coincidence_threshold(
        float(instance.values_a[m].sum()),
        float(instance.values_b[m].sum()),
        float(instance.values_a[mbar].sum()),
        float(instance.values_b[mbar].sum()),
    )
    r = instance.budget_a / instance.budget_b
    coincides = abs(r - threshold) <= COINCIDENCE_RTOL * max(abs(r), abs(threshold))
    return CoincidenceReport(classes, coincides, threshold)


def leader_advantage_bounds(instance: GameInstance) -> AdvantageBounds:
    """Utility bounds: the Nash floor, the SE/NE cap, and (for n = 2) the
    two-sided ratio bound formulas in the normalized frame.

    The frame keeps the caller's battlefield order: the second battlefield's
    values and the follower's budget are scaled to 1.  The two-sided
    formulas provably bracket SE/NE only when va1 <= vb1 in that frame;
    they are still reported otherwise (the small-leader-budget divergence
    argument evaluates them exactly there), so callers comparing them to a
    realized ratio must check the frame orientation themselves.
    """
    x_a, x_b = instance.budget_a, instance.budget_b
    floor = x_a / (x_a + x_b) * float(instance.values_a.sum())
    cap = (x_a + x_b) / x_a
    if instance.n != 2:
        return AdvantageBounds(floor, cap, None, None, None)

    va1 = float(instance.values_a[0] / instance.values_a[1])
    vb1 = float(instance.values_b[0] / instance.values_b[1])
    xa = x_a / x_b
    lower = (va1 + 1) / (va1 + vb1 * (xa + 1) / (vb1 * xa + va1))
    upper = (va1 + 1) / (xa * va1**2 / (xa * va1 + vb1) + xa / (xa + 1))
    return AdvantageBounds(floor, cap, lower, upper, (va1, vb1, xa))


def compare_equilibria(instance: GameInstance) -> ComparisonReport:
    """Solve both equilibria and report the utility ratios."""
    se = optimal_commitment(instance)
    ne = solve_nash(instance)
    return ComparisonReport(
        se=se,
        ne=ne,
        leader_ratio=se.leader_utility / ne.leader_utility,
        follower_ratio=se.follower_utility / ne.follower_utility,
        cor1_upper=(instance.budget_a + instance.budget_b) / instance.budget_a,
    )


def budget_sweep(instance: GameInstance, r_values: Iterable[float]) -> list[SweepRow]:
    """Re-solve both equilibria at x_a = r * x_b for each ratio r.

    The follower budget and all values are taken from the instance; only
    the leader budget moves.  Solver failures become nan rows carrying the
    error text instead of aborting the sweep.  Rows come back sorted
    ascending by r.
    """
    ratios = sorted(float(r) for r in r_values)
    if not ratios:
        raise InputError("budget_sweep needs at least one ratio")
    if ratios[0] <= 0:
        raise InputError(f"budget ratios must be positive, got {ratios[0]}")
    rows = []
    for r in ratios:
        scaled = GameInstance(
            budget_a=r * instance.budget_b,
            budget_b=instance.budget_b,
            values_a=instance.values_a,
            values_b=instance.values_b,
        )
        try:
            se = optimal_commitment(scaled)
            ne = solve_nash(scaled)
            coincides = check_coincidence(scaled).coincides
            rows.append(
                SweepRow(
                    r=r,
                    se_u_a=se.leader_utility,
                    se_u_b=se.follower_utility,
                    ne_u_a=ne.leader_utility,
                    ne_u_b=ne.follower_utility,
                    coincides=coincides,
                )
            )
        except (InputError, SolverInvariantError) as exc:
            rows.append(
                SweepRow(r, math.nan, math.nan, math.nan, math.nan, False, str(exc))
            )
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], stream: TextIO) -> None:
    """Serialize sweep rows: fixed header, %.9g reals, ascending r."""
    stream.write(SWEEP_CSV_HEADER + "\n")
    for row in sorted(rows, key=lambda row: row.r):
        reals = (row.r, row.se_u_a, row.se_u_b, row.ne_u_a, row.ne_u_b)
        cells = [f"{x:.9g}" for x in reals]
        cells.append("true" if row.coincides else "false")
        stream.write(",".join(cells) + "\n")
