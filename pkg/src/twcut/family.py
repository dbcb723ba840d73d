"""Forbidden families of small pattern graphs.

Members are stored as :class:`Graph` objects together with per-vertex
neighbour bitmasks. Presets: ``@trees N`` (all trees on N vertices),
``@star N`` (K_{1,N}), ``@clique N`` and ``@path N`` (N vertices).
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Iterator

from .graph import Graph, GraphFormatError, parse_edge_list

MAX_R = 6
MAX_MEMBERS = 16
MODES = ("subgraph", "induced")


class FamilyError(ValueError):
    """Bad family: edgeless member, over the size caps, or unparsable."""


def canonical_form(graph: Graph) -> tuple[int, tuple[tuple[int, int], ...]]:
    """Isomorphism-invariant key by trying every vertex order (fine up to ~8 vertices)."""
    n = graph.n
    best = None
    for perm in itertools.permutations(range(n)):
        edges = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in graph.edges))
        if best is None or edges < best:
            best = edges
    return n, best or ()


def isomorphic(a: Graph, b: Graph) -> bool:
    return a.n == b.n and a.m == b.m and canonical_form(a) == canonical_form(b)


def _prufer_tree(seq: tuple[int, ...], n: int) -> list[tuple[int, int]]:
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [i for i in range(n) if degree[i] == 1]
    edges.append((u, v))
    return edges


def trees(n: int) -> list[Graph]:
    """All trees on ``n`` vertices up to isomorphism, from Prüfer sequences."""
    return list(_trees(n))


@lru_cache(maxsize=None)
def _trees(n: int) -> tuple[Graph, ...]:
    if n < 1:
        raise ValueError("trees need at least one vertex")
    if n == 1:
        return (Graph(["0"]),)
    if n == 2:
        return (Graph.from_indices(2, [(0, 1)]),)
    seen = {}
    for seq in itertools.product(range(n), repeat=n - 2):
        g = Graph.from_indices(n, _prufer_tree(seq, n))
        seen.setdefault(canonical_form(g), g)
    return tuple(seen[key] for key in sorted(seen))


def star(leaves: int) -> Graph:
    return Graph.from_indices(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def clique(n: int) -> Graph:
    return Graph.from_indices(n, list(itertools.combinations(range(n), 2)))


def path(n: int) -> Graph:
    return Graph.from_indices(n, [(i, i + 1) for i in range(n - 1)])


PRESETS = {"trees": trees, "star": lambda n: [star(n)], "clique": lambda n: [clique(n)], "path": lambda n: [path(n)]}


@dataclass
class ForbiddenFamily:
    members: list[Graph]
    mode: str = "subgraph"
    max_r: int = MAX_R
    max_members: int = MAX_MEMBERS
    nbr: list[list[int]] = field(init=False, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise FamilyError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.members:
            raise FamilyError("family has no members")
        for g in self.members:
            if g.m == 0:
                raise FamilyError(
                    f"member on {g.n} vertices has no edges; every graph with >= {g.n} vertices "
                    "contains it, so answer by counting vertices instead"
                )
        if max(g.n for g in self.members) > self.max_r:
            raise FamilyError(f"members limited to {self.max_r} vertices")
        unique: dict = {}
        for g in self.members:
            unique.setdefault(canonical_form(g), g)
        self.members = [Graph.from_indices(g.n, g.edges) for g in unique.values()]
        if len(self.members) > self.max_members:
            raise FamilyError(f"family limited to {self.max_members} members, got {len(self.members)}")
        self.nbr = [[sum(1 << u for u in g.neighbors(v)) for v in range(g.n)] for g in self.members]

    @property
    def r(self) -> int:
        return max(g.n for g in self.members)

    @property
    def induced(self) -> bool:
        return self.mode == "induced"

    def __len__(self) -> int:
        return len(self.members)


def preset(name: str, n: int, mode: str = "subgraph") -> ForbiddenFamily:
    if name not in PRESETS:
        raise FamilyError(f"unknown preset @{name}; choose from {sorted(PRESETS)}")
    return ForbiddenFamily(PRESETS[name](n), mode)


def _preset_members(line: str, lineno: int | None = None) -> list[Graph]:
    tokens = line[1:].split()
    if len(tokens) != 2 or tokens[0] not in PRESETS:
        raise GraphFormatError(f"preset must be '@name N' with name in {sorted(PRESETS)}", lineno)
    try:
        n = int(tokens[1])
    except ValueError:
        raise GraphFormatError("preset size must be an integer", lineno) from None
    if n < 1:
        raise GraphFormatError("preset size must be positive", lineno)
    return PRESETS[tokens[0]](n)


def parse_family(text: str, mode: str | None = None) -> ForbiddenFamily:
    """Blank-line separated member blocks in edge-list form, presets allowed.

    An optional ``mode: subgraph|induced`` line sets the mode; an explicit
    ``mode`` argument overrides it.
    """
    found_mode = None
    members: list[Graph] = []
    block: list[str] = []
    start = 1

    def flush():
        if block:
            try:
                members.append(parse_edge_list("\n".join(block)))
            except GraphFormatError as exc:
                line = None if exc.line is None else exc.line + start - 1
                raise GraphFormatError(str(exc.args[0]), line) from None
            block.clear()

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            flush()
            continue
        if line.lower().startswith("mode:"):
            found_mode = line.split(":", 1)[1].strip()
            continue
        if line.startswith("@"):
            flush()
            members.extend(_preset_members(line, lineno))
            continue
        if not block:
            start = lineno
        block.append(line)
    flush()
    return ForbiddenFamily(members, mode or found_mode or "subgraph")


def load_family(spec: str, mode: str | None = None) -> ForbiddenFamily:
    """A preset string (``"@trees 4"``) or the text of a family file."""
    spec = spec.strip()
    if spec.startswith("@") and "\n" not in spec:
        return ForbiddenFamily(_preset_members(spec), mode or "subgraph")
    return parse_family(spec, mode)


# -- embeddings ---------------------------------------------------------------

def embeddings(pattern: Graph, graph: Graph, induced: bool = False) -> Iterator[tuple[int, ...]]:
    """All injective maps V(pattern) -> V(graph) keeping edges (and non-edges if induced)."""
    n = pattern.n
    order = []
    # place each vertex next to already placed ones where possible
    remaining = set(range(n))
    while remaining:
        seed = max(remaining, key=lambda v: (sum(1 for u in pattern.neighbors(v) if u in order), pattern.degree(v), -v))
        order.append(seed)
        remaining.discard(seed)
    img = [-1] * n
    used = set()

    def rec(i: int):
        if i == n:
            yield tuple(img)
            return
        u = order[i]
        for x in range(graph.n):
            if x in used:
                continue
            ok = True
            for w in order[:i]:
                adj_p = pattern.has_edge(u, w)
                adj_g = graph.has_edge(x, img[w])
                if adj_p and not adj_g or induced and adj_g and not adj_p:
                    ok = False
                    break
            if ok:
                img[u] = x
                used.add(x)
                yield from rec(i + 1)
                used.discard(x)
                img[u] = -1

    yield from rec(0)


def contains_member(graph: Graph, family: ForbiddenFamily):
    """(True, (member index, {pattern vertex: graph vertex name})) for the first copy found, else (False, None)."""
    for mi, pattern in enumerate(family.members):
        for img in embeddings(pattern, graph, family.induced):
            return True, (mi, {u: graph.name(x) for u, x in enumerate(img)})
    return False, None


def copy_constraints(graph: Graph, family: ForbiddenFamily) -> list[tuple[int, int]]:
    """Per copy: (edges that must survive, edges that must be deleted) as bitmasks over edge ids.

    A deletion set destroys a copy when it hits the first mask or misses part
    of the second. The second mask is empty in subgraph mode.
    """
    out = set()
    for pattern in family.members:
        for img in embeddings(pattern, graph, False):
            need = 0
            gone = 0
            for a, b in itertools.combinations(range(pattern.n), 2):
                x, y = img[a], img[b]
                if pattern.has_edge(a, b):
                    need |= 1 << graph.edge_id(x, y)
                elif family.induced and graph.has_edge(x, y):
                    gone |= 1 << graph.edge_id(x, y)
            out.add((need, gone))
    return sorted(out)
