"""
Cutting a graph into small pieces
=================================

Delete as few edges as possible so that no connected piece has more than
``h`` vertices. Think of a contact network where each piece should stay
small enough to contain an outbreak.
"""

import numpy as np

from twcut.component_dp import ProblemSpec, solve
from twcut.decomposition import decompose_min_fill, make_nice
from twcut.graph import component_indices, delete_edges
from twcut.oracle import random_partial_ktree

# a random graph of treewidth at most 3 on 60 vertices
g, _ = random_partial_ktree(60, 3, seed=4)
print(f"{g.n} vertices, {g.m} edges")

# min-fill gives the tree decomposition; make_nice turns it into
# leaf / introduce / forget / join nodes
nd = make_nice(decompose_min_fill(g), g)
print("width", nd.width, "nodes", len(nd), nd.kind_counts())

res = solve(g, nd, ProblemSpec(h=4), witness=True)
print("fewest deletions:", res.optimum, f"({res.seconds:.2f} s)")

# what is left after the cut
rest = delete_edges(g, res.witness)
sizes = np.array([len(b) for b in component_indices(rest)])
print("piece sizes:", np.bincount(sizes)[1:], "(count of pieces with 1, 2, 3, 4 vertices)")
assert sizes.max() <= 4

# the states per node stay far below the worst case
valid = np.array([s.valid_states for s in res.nodes])
bound = np.array([s.bound for s in res.nodes])
print("largest table:", valid.max(), "states; worst-case bound there:", bound[valid.argmax()])
