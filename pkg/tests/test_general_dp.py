import itertools
import random

import pytest

from twcut.component_dp import ProblemSpec, solve
from twcut.decomposition import Kind
from twcut.family import load_family
from twcut.general_dp import (
    check_state,
    enumerate_patterns,
    enumerate_valid_states,
    gen_forget_signature,
    gen_introduce_signature,
    gen_join_signature,
    gen_leaf_signature,
    gen_solve,
    make_gen_context,
    project,
)
from twcut.graph import Graph
from twcut.oracle import brute_force_family, random_graph

from conftest import BOWTIE, K4, P3, TRIANGLE, chain, graph_of, nice


def run_nodes(graph, nd, family, k=None):
    """Every node signature, bottom-up."""
    ctx = make_gen_context(graph, family, k)
    sigs = {}
    for t in nd.postorder():
        nk = nd.kinds[t]
        bag = tuple(sorted(nd.bags[t]))
        kids = [sigs[c] for c in nd.children[t]]
        if nk.kind is Kind.LEAF:
            sigs[t] = gen_leaf_signature(ctx, bag)
        elif nk.kind is Kind.INTRODUCE:
            sigs[t] = gen_introduce_signature(ctx, bag, nk.vertex, kids[0])
        elif nk.kind is Kind.FORGET:
            sigs[t] = gen_forget_signature(ctx, bag, nk.vertex, kids[0])
        else:
            sigs[t] = gen_join_signature(ctx, bag, *kids)
    return ctx, sigs


def kept_pairs(graph, h):
    return {graph.edges[e] for e in h}


# -- patterns and valid states ----------------------------------------------------

def test_patterns():
    assert len(enumerate_patterns(load_family("@path 3"))) == 7
    assert len(enumerate_patterns(load_family("@clique 3"))) == 7
    assert len(enumerate_patterns(load_family("@trees 4"))) == 2 * 15


def test_single_vertex_bag_states():
    # the singleton maps are forced; the six maps of one vertex into a two-vertex
    # subpattern are unconstrained with a single bag vertex, giving 2**6 tables
    fam = load_family("@clique 3")
    states = enumerate_valid_states((0,), set(), fam)
    assert len(states) == 64
    forced = {(0, 1 << u, ((u, 0),)) for u in range(3)}
    assert all(forced <= s for s in states)


def test_edge_bag_states():
    fam = load_family("@path 3")
    states = enumerate_valid_states((0, 1), {(0, 1)}, fam)
    full = (1 << 3) - 1
    p = fam.members[0]
    for s in states:
        for u, w in itertools.permutations(range(3), 2):
            if p.has_edge(u, w):
                assert (0, 1 << u | 1 << w, tuple(sorted(((u, 0), (w, 1))))) in s
        assert not any(subset == full for _, subset, _ in s)
    # edgeless bag subgraph: no total map of a subpattern with an edge
    for s in enumerate_valid_states((0, 1), set(), fam):
        for _, subset, theta in s:
            if len(theta) == bin(subset).count("1"):
                verts = [u for u, _ in theta]
                assert not any(p.has_edge(u, w) for u, w in itertools.combinations(verts, 2))


# -- node transitions ---------------------------------------------------------------

def test_leaf_values():
    ctx = make_gen_context(Graph(["a", "b"]), load_family("@clique 3"))
    assert [v for _, v in gen_leaf_signature(ctx, (0, 1)).items()] == [0]
    tri = graph_of(TRIANGLE)
    ctx = make_gen_context(tri, load_family("@clique 3"))
    assert all(v >= 1 for _, v in gen_leaf_signature(ctx, (0, 1, 2)).items())
    ctx = make_gen_context(graph_of("a b"), load_family("@clique 3"))
    vals = {len(h): v for (h, _), v in gen_leaf_signature(ctx, (0, 1)).items()}
    assert vals == {0: 1, 1: 0}


def test_introduce_values():
    g = graph_of("a b;x y")
    fam = load_family("@path 3")
    ctx = make_gen_context(g, fam)
    child = gen_leaf_signature(ctx, (0,))
    # x has no edges into {a}: values pass through
    sig = gen_introduce_signature(ctx, (0, 2), 2, child)
    assert sorted(v for _, v in sig.items()) == sorted(v for _, v in child.items())

    g = graph_of("a v;b v")
    ctx = make_gen_context(g, load_family("@clique 3"))
    child = gen_leaf_signature(ctx, (0, 2))
    sig = gen_introduce_signature(ctx, (0, 1, 2), 1, child)
    assert {v for (h, _), v in sig.items() if len(h) == 1} == {1}


def test_small_solves():
    tri = graph_of(TRIANGLE)
    nd = chain([set(), {2}, {1, 2}, {0, 1, 2}, {0, 1}, {0}])
    assert gen_solve(tri, nd, load_family("@clique 3"), 1).optimum == 1
    p3 = graph_of(P3)
    assert gen_solve(p3, nice(p3), load_family("@path 3"), 1).optimum == 1
    bow = graph_of(BOWTIE)
    assert gen_solve(bow, nice(bow), load_family("@clique 3"), 2).optimum == 2


def test_join_values():
    g = graph_of("a b")
    ctx = make_gen_context(g, load_family("@clique 3"))
    left, right = gen_leaf_signature(ctx, (0, 1)), gen_leaf_signature(ctx, (0, 1))
    sig = gen_join_signature(ctx, (0, 1), left, right)
    vals = {len(h): v for (h, _), v in sig.items()}
    assert vals == {0: 1, 1: 0}


def test_solve_examples():
    for text in (TRIANGLE, K4, "a b;c d;d e"):
        g = graph_of(text)
        assert gen_solve(g, nice(g), load_family("@path 2")).optimum == g.m
    g = graph_of("a b;b c;c d;d a")
    res = gen_solve(g, nice(g), load_family("@clique 3"), 0)
    assert res.feasible and res.optimum == 0
    k4 = graph_of(K4)
    assert gen_solve(k4, nice(k4), load_family("@trees 4"), 6).optimum == 3
    assert solve(k4, nice(k4), ProblemSpec(3, 6)).optimum == 3


def test_induced_mode():
    tri = graph_of(TRIANGLE)
    assert gen_solve(tri, nice(tri), load_family("@path 3", "induced")).optimum == 0
    assert gen_solve(tri, nice(tri), load_family("@path 3")).optimum == 2


def test_disconnected_member():
    # 2K2 as a member: needs pieces forgotten in different branches to combine
    fam = load_family("a b\nc d\n")
    for seed in range(12):
        g = random_graph(6, 0.4, seed)
        for singleton in (False, True):
            got = gen_solve(g, nice(g, singleton), fam).optimum
            assert got == brute_force_family(g, fam).optimum


# -- invariants ----------------------------------------------------------------------

@pytest.mark.parametrize("preset", ["@clique 3", "@path 3", "@star 3"])
@pytest.mark.parametrize("mode", ["subgraph", "induced"])
def test_states_pass_validator(preset, mode):
    fam = load_family(preset, mode)
    for seed in range(4):
        g = random_graph(6, 0.5, seed)
        if g.m == 0:
            continue
        nd = nice(g)
        _, sigs = run_nodes(g, nd, fam)
        for t, sig in sigs.items():
            for (h, r), _ in sig.items():
                assert check_state(sig.bag, kept_pairs(g, h), project(r), fam) == []


def test_cache_transparent_and_parallel():
    fam = load_family("@trees 3")
    for seed in range(6):
        g = random_graph(7, 0.45, seed)
        nd = nice(g)
        a = gen_solve(g, nd, fam, witness=True)
        b = gen_solve(g, nd, fam, witness=True, cache=False)
        c = gen_solve(g, nd, fam, witness=True, parallel=True)
        assert (a.optimum, a.witness) == (b.optimum, b.witness) == (c.optimum, c.witness)
        assert [s.states for s in a.nodes] == [s.states for s in b.nodes] == [s.states for s in c.nodes]


@pytest.mark.parametrize("seed", range(20))
def test_matches_oracle(seed):
    rng = random.Random(seed)
    g = random_graph(rng.randint(2, 6), rng.uniform(0.2, 0.8), seed)
    fam = load_family(rng.choice(["@clique 3", "@path 3", "@star 3", "@path 4"]), rng.choice(["subgraph", "induced"]))
    want = brute_force_family(g, fam).optimum
    res = gen_solve(g, nice(g), fam, witness=True)
    assert res.optimum == want
    assert len(res.witness) == want
