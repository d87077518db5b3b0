#!/usr/bin/env python3
"""Sweep the budget ratio and write utilities for both equilibria to CSV.

Reproduces the crossing picture for the two-battlefield game: below the
coincidence ratio the follower prefers facing a leader who commits; above
it the commitment extracts more.  Output goes to sweep.csv (or the path
given as the first argument).
"""

import sys

import numpy as np

from blotto import GameInstance, budget_sweep, check_coincidence, write_sweep_csv

game = GameInstance(1.0, 1.0, np.array([1.0, 5.0]), np.array([1.0, 0.5]))
ratios = np.linspace(0.25, 3.0, 56)
rows = budget_sweep(game, ratios)

path = sys.argv[1] if len(sys.argv) > 1 else "sweep.csv"
with open(path, "w") as fh:
    write_sweep_csv(rows, fh)
print(f"wrote {len(rows)} rows to {path}")

threshold = check_coincidence(game).threshold
print(f"two-class coincidence ratio: {threshold:.6f}")

# Locate the sign flip of the follower's commitment-vs-simultaneous gap.
for prev, cur in zip(rows, rows[1:]):
    gap_prev = prev.se_u_b - prev.ne_u_b
    gap_cur = cur.se_u_b - cur.ne_u_b
    if gap_prev < 0 <= gap_cur or gap_prev > 0 >= gap_cur:
        print(f"follower gap se_u_b - ne_u_b flips sign between "
              f"r = {prev.r:.4f} and r = {cur.r:.4f}")
        break
