import random

import networkx as nx
import pytest

from twcut.decomposition import (
    DecompositionError,
    Kind,
    TreeDecomposition,
    classify,
    decompose_min_fill,
    exact_treewidth,
    make_nice,
    nice_from_tree,
    parse_td,
    validate,
    write_td,
)
from twcut.graph import Graph, GraphFormatError
from twcut.oracle import random_graph, random_partial_ktree

from conftest import C5, K4, graph_of


def td(bags, edges, root=0):
    children = {i: [] for i in range(len(bags))}
    for a, b in edges:
        children[a].append(b)
    return TreeDecomposition({i: frozenset(b) for i, b in enumerate(bags)}, children, root)


def test_validate_examples():
    g = graph_of("a b")
    assert validate(g, td([{0, 1}], []))
    rep = validate(g, td([{0}, {1}], [(0, 1)]))
    assert [v.condition for v in rep.violations] == [2]
    assert rep.violations[0].witness == ("a", "b")
    rep = validate(g, td([{0, 1}, {1}, {0, 1}], [(0, 1), (1, 2)]))
    assert any(v.condition == 3 and v.witness == "a" for v in rep.violations)
    # without the edge the same decomposition still breaks connectivity for a
    assert not validate(Graph(["a", "b"]), td([{0, 1}, {1}, {0, 1}], [(0, 1), (1, 2)]))


def test_min_fill_widths():
    tree = graph_of("a b;b c;b d;d e;e f")
    assert decompose_min_fill(tree).width == 1
    assert decompose_min_fill(graph_of(K4)).width == 3
    c5 = graph_of(C5)
    assert decompose_min_fill(c5).width == 2 == exact_treewidth(c5)


def test_exact_treewidth_matches_networkx_bound():
    # the networkx heuristics only bound the width from above
    for seed in range(30):
        g = random_graph(7, 0.45, seed)
        tw = exact_treewidth(g)
        nxg = nx.Graph(list(g.edges))
        nxg.add_nodes_from(range(g.n))
        upper = nx.algorithms.approximation.treewidth_min_fill_in(nxg)[0]
        assert tw <= upper
        assert tw <= decompose_min_fill(g).width


def test_make_nice_single_bag():
    g = graph_of("a b;b c")
    one = td([{0, 1, 2}], [])
    nd = make_nice(one, g, singleton_leaves=True)
    kinds = sorted(nk.kind.value for nk in nd.kinds.values())
    assert kinds.count("leaf") == 1 and kinds.count("introduce") >= 2
    leaf = [t for t, nk in nd.kinds.items() if nk.kind is Kind.LEAF][0]
    assert len(nd.bags[leaf]) == 1
    assert nd.width == 2 and validate(g, nd)
    full = make_nice(one, g)
    assert validate(g, full) and full.width == 2


def test_make_nice_idempotent_kinds():
    g = graph_of(C5)
    nd = make_nice(decompose_min_fill(g), g)
    again = make_nice(nd, g)
    assert sorted(map(str, (k.kind.value for k in nd.kinds.values()))) == sorted(
        k.kind.value for k in again.kinds.values()
    )


def test_star_nice():
    g = graph_of("o a;o b;o c")
    for singleton in (False, True):
        nd = make_nice(decompose_min_fill(g), g, singleton_leaves=singleton)
        assert nd.width == 1 and len(nd) <= 16 and validate(g, nd)


def test_classify():
    nd = nice_from_tree(td([{0}, {0}, {0}], [(0, 1), (0, 2)]))
    assert classify(nd, 0).kind is Kind.JOIN
    assert classify(nd, 1).kind is Kind.LEAF
    chain = nice_from_tree(td([{0}, {0, 1}, {0}], [(0, 1), (1, 2)]))
    assert classify(chain, 0).kind is Kind.FORGET and classify(chain, 0).vertex == 1
    assert classify(chain, 1).kind is Kind.INTRODUCE


def test_parse_td():
    g = Graph.from_indices(2, [(0, 1)])
    t = parse_td("s td 1 2 2\nb 1 1 2\n", g)
    assert len(t) == 1 and t.width == 1
    with pytest.raises(GraphFormatError):
        parse_td("s td 1 2 2\nb 1 1 9\n", g)
    with pytest.raises(DecompositionError) as err:
        parse_td("s td 2 1 2\nb 1 1\nb 2 2\n1 2\n", g)
    assert [v.witness for v in err.value.violations] == [("0", "1")]


def test_td_round_trip():
    g = graph_of(C5)
    d = decompose_min_fill(g)
    back = parse_td(write_td(d, g), g)
    assert back.width == d.width and validate(g, back)


@pytest.mark.parametrize("seed", range(40))
def test_nice_contracts_random(seed, leaf_form):
    rng = random.Random(seed)
    n, k = rng.randint(1, 40), rng.randint(1, 5)
    g, built = random_partial_ktree(n, k, seed)
    assert validate(g, built)
    d = decompose_min_fill(g)
    assert validate(g, d)
    nd = make_nice(d, g, singleton_leaves=leaf_form)
    assert validate(g, nd) and nd.width == d.width
    if not leaf_form:
        assert len(nd) <= 4 * max(g.n, 1)
    for t, nk in nd.kinds.items():
        if nk.kind is Kind.LEAF and leaf_form:
            assert len(nd.bags[t]) == 1


def test_disconnected_and_empty():
    g = graph_of("a b;c d;v e")
    nd = make_nice(decompose_min_fill(g), g)
    assert validate(g, nd)
    with pytest.raises(DecompositionError):
        decompose_min_fill(Graph())
