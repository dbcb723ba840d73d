import networkx as nx
import pytest

from twcut.family import (
    FamilyError,
    ForbiddenFamily,
    clique,
    contains_member,
    isomorphic,
    load_family,
    parse_family,
    path,
    star,
    trees,
)
from twcut.graph import Graph

from conftest import K4, TRIANGLE, graph_of


def test_tree_counts():
    # unlabelled trees on n = 1..6 vertices
    assert [len(trees(n)) for n in range(1, 7)] == [1, 1, 1, 2, 3, 6]
    for n in range(1, 7):
        theirs = [Graph.from_indices(n, list(t.edges())) for t in nx.nonisomorphic_trees(n)] if n > 1 else [Graph(["0"])]
        assert len(theirs) == len(trees(n))
        assert all(any(isomorphic(a, b) for b in theirs) for a in trees(n))


def test_presets():
    fam = load_family("@trees 4")
    assert len(fam) == 2 and fam.r == 4
    assert any(isomorphic(g, star(3)) for g in fam.members)
    assert any(isomorphic(g, path(4)) for g in fam.members)
    assert load_family("@star 4").members[0].m == 4
    assert load_family("@clique 3").members[0].m == 3


def test_parse_blocks_and_mode():
    fam = parse_family("mode: induced\n# P3\na b\nb c\n\n@clique 3\n")
    assert fam.induced and len(fam) == 2
    assert parse_family("a b\nb c\n", mode="subgraph").mode == "subgraph"
    # isomorphic members collapse
    assert len(parse_family("a b\nb c\n\nx y\nx z\n")) == 1


def test_family_errors():
    with pytest.raises(FamilyError):
        ForbiddenFamily([Graph(["a", "b"])])
    with pytest.raises(FamilyError):
        ForbiddenFamily([clique(7)])
    with pytest.raises(FamilyError):
        ForbiddenFamily(trees(6) + trees(5) + trees(4) + [clique(n) for n in range(2, 7)] + [path(3)])
    with pytest.raises(FamilyError):
        ForbiddenFamily([path(3)], mode="minor")


def test_contains_member():
    assert contains_member(graph_of(K4), load_family("@clique 3"))[0]
    assert not contains_member(graph_of("a b;c d;e f"), load_family("@path 3"))[0]
    tri = graph_of(TRIANGLE)
    assert not contains_member(tri, load_family("@path 3", "induced"))[0]
    found, (mi, img) = contains_member(tri, load_family("@path 3"))
    assert found and mi == 0 and len(img) == 3
