"""
Single-point moves and their exact cost
=======================================

Moving one point changes two cluster means at once.  The cost of the move
therefore is not just "distance to the other centroid minus distance to
my own": both terms carry a size-dependent factor.  This script checks the
closed form against a brute-force recomputation and shows the tie case
where Lloyd stays put while Hartigan moves.
"""

import numpy as np

from smartigan import ClusteringState, Dataset, delta_decrease, insertion_cost, move_point, removal_gain, total_loss
from smartigan.algorithms import is_hartigan_stable, is_lloyd_stable, run_hartigan, run_lloyd

###############################################################################
# Four points on a line.  Cluster 0 is {-2, 2} with mean 0, cluster 1 is
# {3, 5} with mean 4.  The point x = 2 is equally far from both means.

data = Dataset(np.array([[2.0, 0], [-2, 0], [3, 0], [5, 0]]))
state = ClusteringState.from_assignment(data, [0, 0, 1, 1], k=2)
print("initial loss", total_loss(data, state))

###############################################################################
# Taking x out of a 2-point cluster saves 2/1 * 4 = 8; adding it to a
# 2-point cluster costs 2/3 * 4.  Equal distances, unequal factors.

print("removal gain  ", removal_gain(data, state, 0))
print("insertion cost", insertion_cost(data, state, 0, 1))
print("net decrease  ", delta_decrease(data, state, 0, 1))

###############################################################################
# The formula is exact: apply the move and compare.

trial = state.copy()
move_point(data, trial, 0, 1)
print("loss after move", total_loss(data, trial), "=", total_loss(data, state) - delta_decrease(data, state, 0, 1))

###############################################################################
# Lloyd sees a tie and keeps x; the configuration is Lloyd-stable.  It is
# not Hartigan-stable, and a Hartigan pass takes the move.

lloyd_state, lloyd_rep = run_lloyd(data, state)
print("Lloyd moves:", lloyd_rep.moves_trace, "lloyd-stable:", is_lloyd_stable(data, lloyd_state))
print("hartigan-stable before:", is_hartigan_stable(data, state))
h_state, h_rep = run_hartigan(data, state, seed=0)
print("Hartigan final loss", h_rep.final_loss, "assignment", h_state.assignment.tolist())
