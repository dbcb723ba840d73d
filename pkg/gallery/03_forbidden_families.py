"""
Forbidding other shapes
=======================

The general solver removes every copy of a small forbidden graph. Trees on
h + 1 vertices give back the component problem; stars bound the degree;
triangles give a triangle-free graph. Induced mode only counts copies with
no extra edges among their vertices.
"""

from twcut.component_dp import ProblemSpec, solve
from twcut.decomposition import decompose_min_fill, make_nice
from twcut.family import contains_member, load_family
from twcut.general_dp import gen_solve
from twcut.graph import delete_edges
from twcut.oracle import random_partial_ktree

g, _ = random_partial_ktree(14, 2, seed=3)
nd = make_nice(decompose_min_fill(g), g)
print(f"{g.n} vertices, {g.m} edges, width {nd.width}")

for text, mode in [("@trees 4", "subgraph"), ("@star 3", "subgraph"), ("@clique 3", "subgraph"),
                   ("@path 3", "subgraph"), ("@path 3", "induced")]:
    fam = load_family(text, mode)
    res = gen_solve(g, nd, fam, witness=True)
    left = delete_edges(g, res.witness)
    assert not contains_member(left, fam)[0]
    print(f"{text:10s} {mode:9s} -> {res.optimum} deletions, largest table {res.max_states} states")

# the specialisation: trees on h + 1 vertices <=> pieces of at most h vertices
a = gen_solve(g, nd, load_family("@trees 4")).optimum
b = solve(g, nd, ProblemSpec(3)).optimum
print("trees on 4 vertices:", a, " components of size <= 3:", b)
assert a == b
