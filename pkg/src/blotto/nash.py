"""Pure Nash equilibrium of the simultaneous-move game.

The equilibrium is characterized by a positive root mu* of a degree-2n
polynomial built from the value ratios rho_h = v_bh / v_ah and the budget
ratio r = x_a / x_b; both players' allocations then follow in closed form.
The root always lies in [min_h rho_h * r, max_h rho_h * r] and the
polynomial changes sign across that interval, so a scan plus bracketed
root refinement finds it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .best_response import best_response
from .game_core import (
    Allocation,
    GameInstance,
    InputError,
    SolverInvariantError,
    total_utility,
)

# Number of scan cells used to bracket sign changes of f on the interval.
SCAN_CELLS = 4096
# Relative tolerance on the located root.
ROOT_RTOL = 1e-12
# Mutual-best-response acceptance tolerance (relative to each budget).
MUTUAL_BR_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class NashSolution:
    """Equilibrium profile; candidate_roots records every root of f found
    on the interval (more than one only in degenerate instances)."""

    mu_star: float
    alloc_a: Allocation
    alloc_b: Allocation
    leader_utility: float
    follower_utility: float
    candidate_roots: tuple[float, ...] = ()


def nash_poly(instance: GameInstance, mu: float) -> float:
    """Evaluate f(mu) = sum_h v_bh * mu * (mu - rho_h * r) * prod_{j != h}
    (mu + rho_j)^2 in product form (no coefficient expansion)."""
    mu = float(mu)
    if mu <= 0:
        raise InputError(f"nash_poly requires mu > 0, got {mu}")
    return float(_poly_values(instance, np.array([mu]))[0])


def _poly_values(instance: GameInstance, mus: np.ndarray) -> np.ndarray:
    """nash_poly over a vector of mu values."""
    rho = instance.values_b / instance.values_a
    r = instance.budget_a / instance.budget_b
    shifted = mus[:, None] + rho[None, :]  # strictly positive
    squares = shifted**2
    full = squares.prod(axis=1, keepdims=True)
    terms = instance.values_b[None, :] * (mus[:, None] - (rho * r)[None, :])
    return mus * (terms * full / squares).sum(axis=1)


def _reconstruct(instance: GameInstance, mu: float) -> tuple[Allocation, Allocation]:
    rho = instance.values_b / instance.values_a
    w = instance.values_b * rho * mu / (mu + rho) ** 2
    denom = w.sum()
    x_b = w / denom * instance.budget_b
    x_a = mu * (w / rho) / denom * instance.budget_b
    return (
        Allocation(x_a, instance.budget_a),
        Allocation(x_b, instance.budget_b),
    )


def _mutual_br(instance: GameInstance, alloc_a: Allocation, alloc_b: Allocation) -> bool:
    reply_b = best_response(instance, alloc_a).allocation
    if np.max(np.abs(reply_b.amounts - alloc_b.amounts)) > MUTUAL_BR_RTOL * instance.budget_b:
        return False
    swapped = GameInstance(
        budget_a=instance.budget_b,
        budget_b=instance.budget_a,
        values_a=instance.values_b,
        values_b=instance.values_a,
    )
    reply_a = best_response(swapped, alloc_b)
    return bool(
        np.max(np.abs(reply_a.allocation.amounts - alloc_a.amounts))
        <= MUTUAL_BR_RTOL * instance.budget_a
    )


def solve_nash(instance: GameInstance) -> NashSolution:
    """Find mu* and rebuild both equilibrium allocations.

    Scans the root interval in SCAN_CELLS cells, refines every sign change
    with Brent's method, keeps the roots whose reconstructed profiles are
    mutual best responses, and among those returns the one with the
    highest leader utility.
    """
    rho = instance.values_b / instance.values_a
    r = instance.budget_a / instance.budget_b
    lo = float(rho.min()) * r
    hi = float(rho.max()) * r

    if hi - lo <= 1e-14 * hi:  # uniform ratios: the root is the interval itself
        roots = [(lo + hi) / 2]
    else:
        grid = np.linspace(lo, hi, SCAN_CELLS + 1)
        vals = _poly_values(instance, grid)
        roots = [float(g) for g in grid[vals == 0]]
        signs = np.sign(vals)
        for i in np.nonzero(signs[:-1] * signs[1:] < 0)[0]:
            roots.append(
                float(
                    brentq(
                        lambda m: nash_poly(instance, m),
                        grid[i],
                        grid[i + 1],
                        rtol=ROOT_RTOL,
                    )
                )
            )
        if not roots:
            sampled = ", ".join(f"f({g:.6g})={v:.3g}" for g, v in zip(grid[::512], vals[::512]))
            raise SolverInvariantError(
                f"no sign change of f on [{lo:.6g}, {hi:.6g}]; samples: {sampled}"
            )
        roots = sorted(set(roots))

    candidates = []
    for mu in roots:
        alloc_a, alloc_b = _reconstruct(instance, mu)
        if _mutual_br(instance, alloc_a, alloc_b):
            candidates.append((mu, alloc_a, alloc_b))
    if not candidates:
        raise SolverInvariantError(
            f"no root of f reconstructs a mutual best response; roots={roots}"
        )

    scored = [
        (total_utility(instance, "a", aa, ab), mu, aa, ab)
        for mu, aa, ab in candidates
    ]
    scored.sort(key=lambda item: item[0])
    u_a, mu_star, alloc_a, alloc_b = scored[-1]
    return NashSolution(
        mu_star=float(mu_star),
        alloc_a=alloc_a,
        alloc_b=alloc_b,
        leader_utility=u_a,
        follower_utility=total_utility(instance, "b", alloc_a, alloc_b),
        candidate_roots=tuple(roots),
    )
