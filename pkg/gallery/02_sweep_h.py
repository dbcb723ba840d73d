"""
How the answer moves with h
===========================

Same graph, growing bound. Larger pieces are allowed, so fewer edges go.
"""

import time

import numpy as np

from twcut.component_dp import ProblemSpec, solve
from twcut.decomposition import make_nice
from twcut.oracle import random_partial_ktree

g, built = random_partial_ktree(80, 3, seed=11)
nd = make_nice(built, g)  # reuse the decomposition the generator built

hs = np.arange(1, 9)
opt, secs = [], []
for h in hs:
    t = time.perf_counter()
    opt.append(solve(g, nd, ProblemSpec(int(h))).optimum)
    secs.append(time.perf_counter() - t)

opt = np.array(opt)
print(" h  deletions  kept%   seconds")
for h, o, s in zip(hs, opt, secs):
    print(f"{h:2d}  {o:9d}  {100 * (1 - o / g.m):5.1f}  {s:8.3f}")

# never increases with h
assert np.all(np.diff(opt) <= 0)
# h = 1 means deleting everything
assert opt[0] == g.m
