"""
Weights, limits and costs
=========================

Vertices can carry weights (a piece is measured by total weight), their
own limits (a piece holding v may weigh at most the limit of v), and edges
can cost different amounts to delete.
"""

import random

from twcut.component_dp import ProblemSpec, solve
from twcut.decomposition import decompose_min_fill, make_nice
from twcut.graph import VertexAnnotations
from twcut.oracle import brute_force_component, random_graph

rng = random.Random(0)
g = random_graph(9, 0.45, seed=2)
nd = make_nice(decompose_min_fill(g), g)

weights = {v: rng.randint(1, 3) for v in g.names}
limits = {v: rng.randint(3, 6) for v in g.names}
costs = {g.edge_names(e): rng.randint(1, 5) for e in g.edges}

for label, ann in [
    ("plain", None),
    ("weights", VertexAnnotations(weights=weights)),
    ("limits", VertexAnnotations(limits=limits)),
    ("costs", VertexAnnotations(edge_costs=costs)),
    ("all three", VertexAnnotations(weights, limits, costs)),
]:
    spec = ProblemSpec(6, annotations=ann)
    res = solve(g, nd, spec, witness=True)
    # small enough to check against exhaustive search
    assert res.optimum == brute_force_component(g, spec).optimum
    print(f"{label:10s} optimum {res.optimum}  witness {res.witness}")
