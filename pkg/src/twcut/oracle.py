"""Exhaustive reference solvers and random instance generators.

Nothing here uses a tree decomposition, so the results are independent of
the dynamic programs they are compared against.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

from .decomposition import TreeDecomposition
from .graph import Graph

INF = math.inf
MAX_SUBSET_EDGES = 24
MAX_PARTITION_VERTICES = 12


class OracleLimitError(ValueError):
    """Instance too large for exhaustive search."""


@dataclass
class OracleResult:
    optimum: int | float
    witnesses: list[frozenset[tuple[str, str]]] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.optimum != INF


def _vectors(graph: Graph, spec):
    h = int(spec.h)
    ann = spec.annotations
    w = (ann.weight_vector(graph) if ann else None) or [1] * graph.n
    lim = ann.limit_vector(graph, h) if ann else None
    bound = [min(h, x) for x in lim] if lim else [h] * graph.n
    cost = (ann.cost_vector(graph) if ann else None) or [1] * graph.m
    k = sum(cost) if spec.k is None else int(spec.k)
    return w, bound, cost, k


def _components_ok(n: int, kept: list[tuple[int, int]], w, bound) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in kept:
        parent[find(u)] = find(v)
    size: dict[int, int] = {}
    cap: dict[int, int] = {}
    for v in range(n):
        r = find(v)
        size[r] = size.get(r, 0) + w[v]
        cap[r] = min(cap.get(r, bound[v]), bound[v])
    return all(size[r] <= cap[r] for r in size)


def _by_subsets(graph: Graph, spec, all_witnesses: bool) -> OracleResult:
    if graph.m > MAX_SUBSET_EDGES:
        raise OracleLimitError(f"subset enumeration limited to {MAX_SUBSET_EDGES} edges, graph has {graph.m}")
    w, bound, cost, k = _vectors(graph, spec)
    edges = graph.edges
    best = INF
    found: list[frozenset[int]] = []
    cmin = min(cost, default=1)
    for size in range(graph.m + 1):
        if size * cmin > min(best, k):
            break
        for chosen in itertools.combinations(range(graph.m), size):
            c = sum(cost[i] for i in chosen)
            if c > k or c > best:
                continue
            drop = set(chosen)
            if _components_ok(graph.n, [e for i, e in enumerate(edges) if i not in drop], w, bound):
                if c < best:
                    best, found = c, []
                found.append(frozenset(chosen))
    return OracleResult(best, _named(graph, found) if all_witnesses else [])


def _by_partitions(graph: Graph, spec, all_witnesses: bool) -> OracleResult:
    """Branch and bound over vertex partitions; deletions are the crossing edges."""
    if graph.n > MAX_PARTITION_VERTICES:
        raise OracleLimitError(f"partition search limited to {MAX_PARTITION_VERTICES} vertices")
    w, bound, cost, k = _vectors(graph, spec)
    n = graph.n
    earlier = [[(u, cost[graph.edge_id(u, v)]) for u in graph.neighbors(v) if u < v] for v in range(n)]
    label = [-1] * n
    load: list[int] = []
    cap: list[int] = []
    best = [k]
    found: list[tuple[int, ...]] = []
    if any(w[v] > bound[v] for v in range(n)):
        return OracleResult(INF, [])

    def rec(v: int, spent: int):
        if v == n:
            if spent < best[0] or not found:
                best[0] = spent
                found.clear()
            found.append(tuple(label))
            return
        for b in range(len(load) + 1):
            if b < len(load):
                if load[b] + w[v] > min(cap[b], bound[v]):
                    continue
            add = sum(c for u, c in earlier[v] if label[u] != b)
            total = spent + add
            if total > best[0] or (total == best[0] and found and not all_witnesses):
                continue
            label[v] = b
            if b == len(load):
                load.append(w[v])
                cap.append(bound[v])
                rec(v + 1, total)
                load.pop()
                cap.pop()
            else:
                old = cap[b]
                load[b] += w[v]
                cap[b] = min(old, bound[v])
                rec(v + 1, total)
                load[b] -= w[v]
                cap[b] = old
            label[v] = -1

    rec(0, 0)
    if not found:
        return OracleResult(INF, [])
    sets = set()
    for lab in found:
        sets.add(frozenset(i for i, (a, b) in enumerate(graph.edges) if lab[a] != lab[b]))
    return OracleResult(best[0], _named(graph, sorted(sets, key=sorted)) if all_witnesses else [])


def _named(graph: Graph, sets) -> list[frozenset[tuple[str, str]]]:
    return [frozenset(graph.edge_names(graph.edges[i]) for i in s) for s in sets]


def brute_force_component(graph: Graph, spec, method: str = "auto", all_witnesses: bool = False) -> OracleResult:
    """Exact minimum deletion cost so that every component meets the bound.

    ``method`` is ``"subsets"`` (edge subsets by cardinality, up to 24 edges),
    ``"partitions"`` (vertex partitions with crossing edges deleted, up to 12
    vertices) or ``"auto"``.
    """
    if method == "auto":
        method = "partitions" if graph.n <= MAX_PARTITION_VERTICES else "subsets"
    if method == "subsets":
        return _by_subsets(graph, spec, all_witnesses)
    if method == "partitions":
        return _by_partitions(graph, spec, all_witnesses)
    raise ValueError(f"unknown method {method!r}")


def brute_force_family(graph: Graph, family, k: int | None = None, all_witnesses: bool = False) -> OracleResult:
    """Exact minimum number of deletions leaving no (induced) copy of any member."""
    from .family import copy_constraints

    if graph.m > MAX_SUBSET_EDGES:
        raise OracleLimitError(f"subset enumeration limited to {MAX_SUBSET_EDGES} edges, graph has {graph.m}")
    k = graph.m if k is None else int(k)
    cons = copy_constraints(graph, family)
    best = INF
    found = []
    for size in range(min(k, graph.m) + 1):
        for chosen in itertools.combinations(range(graph.m), size):
            mask = 0
            for i in chosen:
                mask |= 1 << i
            # a copy survives when all its edges are kept and, induced, all its non-edges are deleted
            if all((need & mask) or (gone & ~mask) for need, gone in cons):
                best = size
                found.append(frozenset(chosen))
                if not all_witnesses:
                    break
        if best != INF:
            break
    return OracleResult(best, _named(graph, found) if all_witnesses else [])


# -- perfect triangle covers ----------------------------------------------------

def perfect_triangle_cover_exists(graph: Graph) -> bool:
    """Exhaustively look for a partition of V into vertex sets of triangles."""
    n = graph.n
    if n % 3:
        return False
    covered = [False] * n

    def rec() -> bool:
        try:
            v = covered.index(False)
        except ValueError:
            return True
        nb = sorted(u for u in graph.neighbors(v) if not covered[u])
        for a, b in itertools.combinations(nb, 2):
            if graph.has_edge(a, b):
                for x in (v, a, b):
                    covered[x] = True
                if rec():
                    return True
                for x in (v, a, b):
                    covered[x] = False
        return False

    return rec()


def triangle_cover_crosscheck(graph: Graph) -> bool:
    """Deleting e(G) - n edges to reach components of size 3 <=> perfect triangle cover.

    Returns the common answer; raises AssertionError if the two disagree.
    """
    from .component_dp import ProblemSpec

    if graph.n % 3:
        raise ValueError(f"vertex count must be divisible by 3, got {graph.n}")
    k = graph.m - graph.n
    if k < 0:
        deletable = False
    else:
        deletable = brute_force_component(graph, ProblemSpec(3, k)).feasible
    cover = perfect_triangle_cover_exists(graph)
    if deletable != cover:
        raise AssertionError(f"deletion feasibility {deletable} but triangle cover {cover}")
    return cover


# -- generators -------------------------------------------------------------------

def random_partial_ktree(n: int, k: int, seed: int, keep: float = 0.7) -> tuple[Graph, TreeDecomposition]:
    """Random k-tree on ``n`` vertices with edges kept at rate ``keep``.

    Returns the graph and the decomposition of width ``<= k`` built alongside it.
    """
    if k < 1:
        raise ValueError("width must be >= 1")
    if n < 1:
        raise ValueError("need at least one vertex")
    rng = random.Random(seed)
    base = list(range(min(n, k + 1)))
    edges = [(a, b) for a, b in itertools.combinations(base, 2)]
    bags = {0: frozenset(base)}
    children: dict[int, list[int]] = {0: []}
    cliques: list[tuple[tuple[int, ...], int]] = [(tuple(base), 0)] if n > k else []
    for v in range(k + 1, n):
        clique, node = rng.choice(cliques)
        sep = rng.sample(list(clique), k)
        edges.extend((u, v) for u in sep)
        t = len(bags)
        bags[t] = frozenset(sep + [v])
        children[t] = []
        children[node].append(t)
        for u in sep:
            cliques.append((tuple(x for x in sep if x != u) + (v,), t))
    edges = [e for e in edges if rng.random() < keep]
    return Graph.from_indices(n, edges), TreeDecomposition(bags, children, 0)


def gen_random_low_tw(n: int, target_width: int, seed: int, keep: float = 0.7) -> Graph:
    """Graph of treewidth at most ``target_width``, deterministic per seed."""
    return random_partial_ktree(n, target_width, seed, keep)[0]


def random_graph(n: int, p: float, seed: int) -> Graph:
    rng = random.Random(seed)
    return Graph.from_indices(n, [(a, b) for a, b in itertools.combinations(range(n), 2) if rng.random() < p])
