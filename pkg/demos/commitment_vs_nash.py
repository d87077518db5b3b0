#!/usr/bin/env python3
"""Compare committing first (Stackelberg) with simultaneous play (Nash).

Runs the same two-battlefield game at a weak-leader and a strong-leader
budget, prints both equilibria side by side, and then finds the budget
ratio at which the two solution concepts collapse into each other.
"""

import numpy as np

from blotto import (
    GameInstance,
    best_response,
    check_coincidence,
    compare_equilibria,
    leader_advantage_bounds,
)

VALUES_A = np.array([1.0, 5.0])
VALUES_B = np.array([1.0, 0.5])


def show(r):
    game = GameInstance(r, 1.0, VALUES_A, VALUES_B)
    report = compare_equilibria(game)
    se, ne = report.se, report.ne
    se_reply = best_response(game, se.allocation)

    print(f"budget ratio x_a/x_b = {r}")
    print(f"  commitment ({se.case_tag}):")
    print(f"    leader   {np.round(se.allocation.amounts, 3)}  utility {se.leader_utility:.3f}")
    print(f"    follower {np.round(se_reply.allocation.amounts, 3)}  utility {se.follower_utility:.3f}")
    print("  simultaneous play:")
    print(f"    leader   {np.round(ne.alloc_a.amounts, 3)}  utility {ne.leader_utility:.3f}")
    print(f"    follower {np.round(ne.alloc_b.amounts, 3)}  utility {ne.follower_utility:.3f}")
    bounds = leader_advantage_bounds(game)
    print(f"  leader gains x{report.leader_ratio:.4f} by committing "
          f"(cap {bounds.se_over_ne_cap:.4f})")
    print(f"  follower ratio {report.follower_ratio:.4f} "
          f"({'better off' if report.follower_ratio > 1 else 'worse off'} when the leader commits)")
    print()


show(0.5)
show(2.0)

# With two battlefield value-ratio classes there is exactly one budget ratio
# where committing first stops mattering; check_coincidence reports it.
probe = GameInstance(1.0, 1.0, VALUES_A, VALUES_B)
threshold = check_coincidence(probe).threshold
print(f"the equilibria coincide at x_a/x_b = {threshold:.9f}:")
game = GameInstance(threshold, 1.0, VALUES_A, VALUES_B)
report = compare_equilibria(game)
print(f"  commitment   leader {np.round(report.se.allocation.amounts, 6)}  "
      f"utility {report.se.leader_utility:.9f}")
print(f"  simultaneous leader {np.round(report.ne.alloc_a.amounts, 6)}  "
      f"utility {report.ne.leader_utility:.9f}")
print(f"  leader ratio {report.leader_ratio:.12f}")
