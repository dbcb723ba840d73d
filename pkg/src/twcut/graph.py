"""Simple undirected graphs, their text formats, and elementary operations.

Vertices carry arbitrary string names externally and dense integer indices
internally (in insertion order). Edges are stored as index pairs ``(i, j)``
with ``i < j``; the sorted order of these pairs is the canonical edge order
used for deterministic tie-breaking everywhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class GraphFormatError(ValueError):
    """Raised when graph (or annotation) text cannot be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Graph:
    """Immutable simple undirected loopless graph."""

    __slots__ = ("_names", "_index", "_edges", "_adj", "_edge_index")

    def __init__(self, vertices: Iterable = (), edges: Iterable[tuple] = ()):
        names: list[str] = []
        index: dict[str, int] = {}

        def add(v) -> int:
            v = str(v)
            if v not in index:
                index[v] = len(names)
                names.append(v)
            return index[v]

        for v in vertices:
            add(v)
        pairs = set()
        for u, v in edges:
            i, j = add(u), add(v)
            if i == j:
                raise ValueError(f"self-loop at vertex {names[i]!r}")
            pairs.add((i, j) if i < j else (j, i))
        adj: list[set[int]] = [set() for _ in names]
        for i, j in pairs:
            adj[i].add(j)
            adj[j].add(i)
        self._names = tuple(names)
        self._index = index
        self._edges = tuple(sorted(pairs))
        self._edge_index = {e: n for n, e in enumerate(self._edges)}
        self._adj = tuple(frozenset(a) for a in adj)

    @classmethod
    def from_indices(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        """Graph on vertices named ``"0" .. str(n-1)`` from index pairs."""
        return cls(range(n), edges)

    # -- basic accessors -------------------------------------------------
    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Index pairs ``(i, j)``, ``i < j``, in canonical order."""
        return self._edges

    @property
    def n(self) -> int:
        return len(self._names)

    @property
    def m(self) -> int:
        return len(self._edges)

    def __len__(self) -> int:
        return len(self._names)

    def index(self, name) -> int:
        try:
            return self._index[str(name)]
        except KeyError:
            raise KeyError(f"vertex {name!r} not in graph") from None

    def name(self, i: int) -> str:
        return self._names[i]

    def neighbors(self, i: int) -> frozenset[int]:
        return self._adj[i]

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def has_edge(self, i: int, j: int) -> bool:
        return j in self._adj[i]

    def edge_id(self, i: int, j: int) -> int:
        """Position of edge ``{i, j}`` in the canonical edge order."""
        key = (i, j) if i < j else (j, i)
        try:
            return self._edge_index[key]
        except KeyError:
            raise KeyError(f"edge {self.edge_names(key)} not in graph") from None

    def edge_names(self, e: tuple[int, int]) -> tuple[str, str]:
        return self._names[e[0]], self._names[e[1]]

    def named_edges(self) -> list[tuple[str, str]]:
        return [self.edge_names(e) for e in self._edges]

    def edge_key(self, u, v) -> tuple[int, int]:
        """Canonical index pair for an edge given by vertex names."""
        i, j = self.index(u), self.index(v)
        key = (i, j) if i < j else (j, i)
        if key not in self._edge_index:
            raise KeyError(f"edge ({u}, {v}) not in graph")
        return key

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return set(self._names) == set(other._names) and set(
            frozenset(e) for e in self.named_edges()
        ) == set(frozenset(e) for e in other.named_edges())

    def __hash__(self):
        return hash((frozenset(self._names), frozenset(frozenset(e) for e in self.named_edges())))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass
class VertexAnnotations:
    """Optional vertex weights, per-vertex limits and per-edge costs.

    Keys are vertex names (edges: pairs of names, either orientation).
    """

    weights: Mapping[str, int] | None = None
    limits: Mapping[str, int] | None = None
    edge_costs: Mapping[tuple[str, str], int] | None = None

    def check(self, graph: Graph) -> None:
        for label, table in (("weight", self.weights), ("limit", self.limits)):
            if table is None:
                continue
            for v, x in table.items():
                graph.index(v)
                if int(x) < 1:
                    raise ValueError(f"{label} of vertex {v!r} must be >= 1, got {x}")
        if self.edge_costs is not None:
            for (u, v), x in self.edge_costs.items():
                graph.edge_key(u, v)
                if int(x) < 1:
                    raise ValueError(f"cost of edge ({u}, {v}) must be >= 1, got {x}")

    def weight_vector(self, graph: Graph) -> list[int] | None:
        if self.weights is None:
            return None
        missing = [v for v in graph.names if v not in self.weights]
        if missing:
            raise ValueError(f"missing weight for vertex {missing[0]!r}")
        return [int(self.weights[v]) for v in graph.names]

    def limit_vector(self, graph: Graph, default: int) -> list[int] | None:
        if self.limits is None:
            return None
        return [int(self.limits.get(v, default)) for v in graph.names]

    def cost_vector(self, graph: Graph) -> list[int] | None:
        if self.edge_costs is None:
            return None
        costs = [1] * graph.m
        for (u, v), x in self.edge_costs.items():
            costs[graph.edge_id(*graph.edge_key(u, v))] = int(x)
        return costs


# -- parsing ---------------------------------------------------------------

def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def parse_edge_list(text: str) -> Graph:
    """Parse the whitespace edge-list format.

    One edge ``u v`` per line; ``#`` starts a comment line; ``v u`` declares
    the isolated vertex ``u``. A PACE ``.gr`` document (first content line
    ``p tw n m``) is detected and handed to :func:`parse_gr`.
    """
    for _, line in _content_lines(text):
        if line.startswith("p ") or line == "p":
            return parse_gr(text)
        break
    vertices: list[str] = []
    edges: list[tuple[str, str]] = []
    for lineno, line in _content_lines(text):
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphFormatError(f"expected two tokens, got {len(tokens)}", lineno)
        a, b = tokens
        if a == "v":
            vertices.append(b)
            continue
        if a == b:
            raise GraphFormatError(f"self-loop at vertex {a!r}", lineno)
        vertices.extend((a, b))
        edges.append((a, b))
    return Graph(vertices, edges)


def parse_gr(text: str) -> Graph:
    """Parse a PACE ``.gr`` document (1-based integer vertices)."""
    n = m = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "p":
            if n is not None:
                raise GraphFormatError("duplicate header", lineno)
            if len(tokens) != 4 or tokens[1] != "tw":
                raise GraphFormatError("header must be 'p tw n m'", lineno)
            try:
                n, m = int(tokens[2]), int(tokens[3])
            except ValueError:
                raise GraphFormatError("non-integer header field", lineno) from None
            continue
        if n is None:
            raise GraphFormatError("edge line before header", lineno)
        if len(tokens) != 2:
            raise GraphFormatError(f"expected two tokens, got {len(tokens)}", lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphFormatError("non-integer vertex", lineno) from None
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphFormatError(f"vertex out of range 1..{n}", lineno)
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", lineno)
        edges.append((u, v))
    if n is None:
        raise GraphFormatError("missing 'p tw n m' header")
    if len(edges) != m:
        raise GraphFormatError(f"header declares {m} edges, found {len(edges)}")
    return Graph(range(1, n + 1), edges)


def serialize_edge_list(graph: Graph) -> str:
    """Inverse of :func:`parse_edge_list` (isolated vertices as ``v u``)."""
    lines = []
    for i in range(graph.n):
        if not graph.neighbors(i):
            lines.append(f"v {graph.name(i)}")
    lines.extend(f"{u} {v}" for u, v in graph.named_edges())
    return "\n".join(lines) + ("\n" if lines else "")


def serialize_gr(graph: Graph) -> str:
    lines = [f"p tw {graph.n} {graph.m}"]
    lines.extend(f"{i + 1} {j + 1}" for i, j in graph.edges)
    return "\n".join(lines) + "\n"


def parse_vertex_values(text: str, graph: Graph) -> dict[str, int]:
    """Lines ``vertex value``; used for weight and limit files."""
    values = {}
    for lineno, line in _content_lines(text):
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphFormatError("expected 'vertex value'", lineno)
        try:
            graph.index(tokens[0])
            values[tokens[0]] = int(tokens[1])
        except (KeyError, ValueError) as exc:
            raise GraphFormatError(str(exc), lineno) from None
    return values


def parse_edge_values(text: str, graph: Graph) -> dict[tuple[str, str], int]:
    """Lines ``u v value``; used for edge-cost files."""
    values = {}
    for lineno, line in _content_lines(text):
        tokens = line.split()
        if len(tokens) != 3:
            raise GraphFormatError("expected 'u v value'", lineno)
        try:
            graph.edge_key(tokens[0], tokens[1])
            values[(tokens[0], tokens[1])] = int(tokens[2])
        except (KeyError, ValueError) as exc:
            raise GraphFormatError(str(exc), lineno) from None
    return values


def parse_named_edges(text: str, graph: Graph) -> list[tuple[int, int]]:
    """Edge-list text restricted to edges of ``graph``; returns index pairs."""
    out = []
    for lineno, line in _content_lines(text):
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphFormatError("expected two tokens", lineno)
        try:
            out.append(graph.edge_key(*tokens))
        except KeyError as exc:
            raise GraphFormatError(str(exc.args[0]), lineno) from None
    return out


# -- elementary operations -------------------------------------------------

def induced_subgraph(graph: Graph, vertices: Iterable) -> Graph:
    """``G[U]`` for a collection of vertex names; keeps the graph's vertex order."""
    wanted = {graph.index(v) for v in vertices}
    keep = [i for i in range(graph.n) if i in wanted]
    return Graph(
        (graph.name(i) for i in keep),
        (graph.edge_names(e) for e in graph.edges if e[0] in wanted and e[1] in wanted),
    )


def delete_edges(graph: Graph, deletion: Iterable[tuple]) -> Graph:
    """``G \\ D`` for edges given as name pairs or canonical index pairs."""
    drop = set()
    for e in deletion:
        u, v = e
        if isinstance(u, int) and isinstance(v, int) and not isinstance(u, bool):
            key = (u, v) if u < v else (v, u)
            if not graph.has_edge(*key):
                raise KeyError(f"edge {key} not in graph")
        else:
            key = graph.edge_key(u, v)
        drop.add(key)
    return Graph(graph.names, (graph.edge_names(e) for e in graph.edges if e not in drop))


def connected_components(graph: Graph) -> list[list[str]]:
    """Blocks of vertex names, each in vertex order, blocks ordered by first vertex."""
    return [[graph.name(i) for i in block] for block in component_indices(graph)]


def component_indices(graph: Graph) -> list[list[int]]:
    seen = [False] * graph.n
    blocks = []
    for s in range(graph.n):
        if seen[s]:
            continue
        seen[s] = True
        stack, block = [s], []
        while stack:
            x = stack.pop()
            block.append(x)
            for y in graph.neighbors(x):
                if not seen[y]:
                    seen[y] = True
                    stack.append(y)
        blocks.append(sorted(block))
    return blocks


def max_component_metric(graph: Graph, weights: Mapping[str, int] | None = None) -> int:
    """Largest component size, or largest component weight when ``weights`` given."""
    if weights is not None:
        missing = [v for v in graph.names if v not in weights]
        if missing:
            raise ValueError(f"missing weight for vertex {missing[0]!r}")
    best = 0
    for block in component_indices(graph):
        if weights is None:
            size = len(block)
        else:
            size = sum(int(weights[graph.name(i)]) for i in block)
        best = max(best, size)
    return best


def components_within_bound(
    graph: Graph,
    h: int,
    weights: Sequence[int] | None = None,
    limits: Sequence[int] | None = None,
) -> bool:
    """True iff every component C has metric(C) <= min(h, min limit over C).

    ``weights`` and ``limits`` are index-aligned vectors.
    """
    for block in component_indices(graph):
        size = len(block) if weights is None else sum(weights[i] for i in block)
        bound = h if limits is None else min(h, min(limits[i] for i in block))
        if size > bound:
            return False
    return True
