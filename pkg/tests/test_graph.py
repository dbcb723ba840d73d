import pytest

from twcut.graph import (
    Graph,
    GraphFormatError,
    VertexAnnotations,
    connected_components,
    delete_edges,
    induced_subgraph,
    max_component_metric,
    parse_edge_list,
    parse_gr,
    parse_named_edges,
    parse_vertex_values,
    serialize_edge_list,
    serialize_gr,
)

from conftest import P3, TRIANGLE, graph_of


def test_parse_basic():
    g = parse_edge_list("a b\nb c")
    assert (g.n, g.m) == (3, 2)


def test_parse_dedup():
    g = parse_edge_list("a b\na b")
    assert (g.n, g.m) == (2, 1)
    assert parse_edge_list("a b\nb a").m == 1


def test_parse_self_loop():
    with pytest.raises(GraphFormatError):
        parse_edge_list("a a")


def test_comments_and_isolated():
    g = parse_edge_list("# header\na b\nv z\n")
    assert g.n == 3 and g.m == 1
    assert g.degree(g.index("z")) == 0


def test_gr_format():
    g = parse_gr("p tw 4 2\n1 2\n3 4\n")
    assert (g.n, g.m) == (4, 2)
    assert parse_gr(serialize_gr(g)) == g
    # auto-detection through the generic parser
    assert parse_edge_list("p tw 3 1\nc comment\n1 3\n").m == 1


def test_gr_bad_header():
    with pytest.raises(GraphFormatError):
        parse_gr("p tw 2 1\n1 5\n")


def test_induced_subgraph():
    tri = graph_of(TRIANGLE)
    sub = induced_subgraph(tri, ["a", "b"])
    assert sub.n == 2 and sub.named_edges() == [("a", "b")]
    assert induced_subgraph(tri, []).n == 0
    p = graph_of(P3)
    sub = induced_subgraph(p, ["a", "c"])
    assert sub.n == 2 and sub.m == 0
    assert induced_subgraph(tri, tri.names) == tri


def test_delete_edges():
    tri = graph_of(TRIANGLE)
    path = delete_edges(tri, [("a", "c")])
    assert path.m == 2 and max_component_metric(path) == 3
    assert delete_edges(tri, []) == tri
    bare = delete_edges(graph_of(P3), [("a", "b"), ("c", "b")])
    assert bare.m == 0 and len(connected_components(bare)) == 3
    with pytest.raises(KeyError):
        delete_edges(graph_of(P3), [("a", "c")])


def test_components():
    assert [len(b) for b in connected_components(graph_of(TRIANGLE))] == [3]
    assert [len(b) for b in connected_components(graph_of("a b;c d"))] == [2, 2]
    assert connected_components(Graph()) == []


def test_max_component_metric():
    assert max_component_metric(graph_of(TRIANGLE)) == 3
    assert max_component_metric(graph_of("a b"), {"a": 2, "b": 5}) == 7
    assert max_component_metric(Graph()) == 0


def test_round_trip():
    g = graph_of("x y;y z;v w;v q")
    assert parse_edge_list(serialize_edge_list(g)) == g


def test_annotations():
    g = graph_of(P3)
    w = parse_vertex_values("a 2\nb 1\nc 3\n", g)
    ann = VertexAnnotations(weights=w)
    ann.check(g)
    assert ann.weight_vector(g) == [2, 1, 3]
    with pytest.raises(ValueError):
        VertexAnnotations(weights={"a": 0}).check(g)
    with pytest.raises(GraphFormatError):
        parse_named_edges("a c\n", g)
