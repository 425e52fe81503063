#!/usr/bin/env python3
# The exploration game behind the greedy subset-selection learner.
#
# A learner repeatedly chooses between exploring (pay c_info, learn this
# round's optimal arm) and exploiting its current cover (pay c_hit on a hit,
# c_miss on a miss). The adversary decides when to move the optimal arm to
# one the learner has not discovered. Backward induction over (round, number
# of discovered arms) gives the exact minimax value and both players'
# saddle-point probabilities.

import numpy as np

from bss import CostTriple, check_G_bound, saddle_point, solve_cost_to_go

N, M = 40, 5
costs = CostTriple(c_info=31.62, c_hit=10.0, c_miss=100.0)
table = solve_cost_to_go(N, M, costs)

print(f"game: N={N} rounds, M={M} hidden arms, costs "
      f"(info={costs.c_info}, hit={costs.hit(0)}, miss={costs.c_miss})")
print(f"minimax value from scratch   V[0][0] = {table.V[0, 0]:8.2f}")
print(f"value with everything known  V[0][M] = {table.V[0, M]:8.2f}  (= N*c_hit)")

# The learner's exploration probability p_n *rises* toward the horizon: a
# late-moving adversary must reveal soon or lose the chance to hurt anyone,
# so the learner meets it with more exploration.
print("\n          " + "".join(f"  s={s}" for s in range(M)))
for n in (0, N // 2, N - 1):
    row = "".join(f" {saddle_point(table, n, s)[0]:4.2f}" for s in range(M))
    print(f"p at n={n:2d}:{row}")
print("q (adversary reveal rate) at n=0: "
      + " ".join(f"{saddle_point(table, 0, s)[1]:4.2f}" for s in range(M)))

# The marginal value of knowing one more arm obeys a sqrt(N - n) envelope;
# check_G_bound verifies it cell by cell, plus the telescoping identity
# sum_s G[0][s] = V[0][0] - V[0][M].
report = check_G_bound(table)
print(f"\nG bound holds: {report.holds}  "
      f"(tightest cell at n={report.worst_n}, s={report.worst_s}, "
      f"ratio {report.max_ratio:.2f} of the envelope)")

# Bandit-flavored costs: exploring a tau-step task with K arms costs about
# sqrt(K tau), exploiting a size-s cover about sqrt(s tau), and a miss wastes
# the whole task. This is the table the G-BASS learner and the adversarial
# generators share.
tau, K = 1000, 15
bandit = solve_cost_to_go(200, M, CostTriple.for_bandit(tau, K))
print(f"\nbandit costs (tau={tau}, K={K}): p at n=0 by state:",
      np.round(bandit.P[0, :M], 3))
