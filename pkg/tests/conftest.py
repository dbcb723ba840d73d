import pytest

from twcut.decomposition import TreeDecomposition, decompose_min_fill, make_nice, nice_from_tree
from twcut.graph import Graph, parse_edge_list


def graph_of(text: str) -> Graph:
    return parse_edge_list(text.replace(";", "\n"))


def nice(graph: Graph, singleton_leaves: bool = False):
    return make_nice(decompose_min_fill(graph), graph, singleton_leaves=singleton_leaves)


def chain(bags):
    """Nice decomposition from a root-first list of bags forming a path."""
    n = len(bags)
    td = TreeDecomposition({i: frozenset(b) for i, b in enumerate(bags)},
                           {i: ([i + 1] if i + 1 < n else []) for i in range(n)}, 0)
    return nice_from_tree(td)


TRIANGLE = "a b;b c;a c"
P3 = "a b;b c"
K4 = "a b;a c;a d;b c;b d;c d"
C5 = "a b;b c;c d;d e;e a"
BOWTIE = "c a;a b;c b;c d;d e;c e"
BRIDGED = "a b;b c;a c;c d;d e;e f;d f"


@pytest.fixture(params=[False, True], ids=["full-leaves", "singleton-leaves"])
def leaf_form(request):
    return request.param
