"""Tree decompositions: validation, min-fill construction, nice form, PACE I/O.

Bags hold vertex *indices* of the graph they decompose. PACE ``.td`` files
number vertices ``index + 1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable

from .graph import Graph, GraphFormatError


class DecompositionError(ValueError):
    """Raised for malformed or invalid tree decompositions."""

    def __init__(self, message: str, violations: list | None = None):
        super().__init__(message)
        self.violations = violations or []


@dataclass
class TreeDecomposition:
    """Rooted tree of bags. Node ids are arbitrary hashable labels (ints here)."""

    bags: dict[int, frozenset[int]]
    children: dict[int, list[int]]
    root: int

    def __post_init__(self):
        self.bags = {t: frozenset(b) for t, b in self.bags.items()}
        for t in self.bags:
            self.children.setdefault(t, [])

    @property
    def nodes(self) -> list[int]:
        return list(self.bags)

    def __len__(self) -> int:
        return len(self.bags)

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    def parent_map(self) -> dict[int, int | None]:
        parent: dict[int, int | None] = {self.root: None}
        for t in self.postorder()[::-1]:
            for c in self.children[t]:
                parent[c] = t
        return parent

    def postorder(self) -> list[int]:
        """Children before parents; iterative so deep trees are fine."""
        order, stack = [], [(self.root, False)]
        while stack:
            t, done = stack.pop()
            if done:
                order.append(t)
                continue
            stack.append((t, True))
            for c in reversed(self.children[t]):
                stack.append((c, False))
        return order

    def tree_edges(self) -> list[tuple[int, int]]:
        return [(t, c) for t in self.bags for c in self.children[t]]


class Kind(enum.Enum):
    LEAF = "leaf"
    INTRODUCE = "introduce"
    FORGET = "forget"
    JOIN = "join"


@dataclass(frozen=True)
class NodeKind:
    kind: Kind
    vertex: int | None = None

    def __str__(self):
        return self.kind.value if self.vertex is None else f"{self.kind.value}({self.vertex})"


@dataclass
class NiceDecomposition(TreeDecomposition):
    kinds: dict[int, NodeKind] = field(default_factory=dict)

    def kind_counts(self) -> dict[str, int]:
        counts = {k.value: 0 for k in Kind}
        for nk in self.kinds.values():
            counts[nk.kind.value] += 1
        return counts


@dataclass(frozen=True)
class Violation:
    """One failed tree-decomposition condition.

    ``condition`` is 1 (vertex coverage), 2 (edge coverage), 3 (connected
    occurrence subtree) or 0 (the underlying structure is not a rooted tree).
    """

    condition: int
    witness: object
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate(graph: Graph, td: TreeDecomposition) -> ValidationReport:
    """Check the three tree-decomposition conditions, collecting witnesses."""
    violations: list[Violation] = []
    # the tree itself
    seen: set[int] = set()
    stack = [td.root] if td.root in td.bags else []
    reached_twice = False
    while stack:
        t = stack.pop()
        if t in seen:
            reached_twice = True
            continue
        seen.add(t)
        stack.extend(td.children.get(t, ()))
    if reached_twice or seen != set(td.bags):
        violations.append(Violation(0, None, "node/children structure is not a tree rooted at root"))
        return ValidationReport(violations)
    for t, bag in td.bags.items():
        bad = [v for v in bag if not 0 <= v < graph.n]
        if bad:
            violations.append(Violation(1, bad[0], f"bag {t} references unknown vertex {bad[0]}"))
    if violations:
        return ValidationReport(violations)

    covered = set().union(*td.bags.values()) if td.bags else set()
    for v in range(graph.n):
        if v not in covered:
            violations.append(Violation(1, graph.name(v), f"vertex {graph.name(v)} in no bag"))
    holders: dict[int, list[int]] = {}
    for t, bag in td.bags.items():
        for v in bag:
            holders.setdefault(v, []).append(t)
    for e in graph.edges:
        u, v = e
        if not any(v in td.bags[t] for t in holders.get(u, ())):
            violations.append(Violation(2, graph.edge_names(e), f"edge {graph.edge_names(e)} uncovered"))
    parent = td.parent_map()
    for v, nodes in holders.items():
        # occurrence subtree is connected iff exactly one holder lacks a holding parent
        tops = [t for t in nodes if parent[t] is None or v not in td.bags[parent[t]]]
        if len(tops) > 1:
            violations.append(
                Violation(3, graph.name(v), f"bags containing {graph.name(v)} are disconnected")
            )
    return ValidationReport(violations)


# -- construction ------------------------------------------------------------

def min_fill_ordering(graph: Graph) -> list[int]:
    """Elimination order: min fill-in, ties by min degree, then vertex index."""
    adj = [set(graph.neighbors(v)) for v in range(graph.n)]
    alive = set(range(graph.n))
    order = []

    def fill(v: int) -> int:
        nb = sorted(adj[v])
        return sum(1 for a in range(len(nb)) for b in range(a + 1, len(nb)) if nb[b] not in adj[nb[a]])

    while alive:
        v = min(alive, key=lambda x: (fill(x), len(adj[x]), x))
        nb = list(adj[v])
        for a in nb:
            adj[a].update(nb)
            adj[a].discard(a)
            adj[a].discard(v)
        alive.discard(v)
        adj[v] = set()
        order.append(v)
    return order


def decomposition_from_ordering(graph: Graph, order: list[int]) -> TreeDecomposition:
    """Standard elimination-tree decomposition; components are chained to one root."""
    pos = {v: i for i, v in enumerate(order)}
    adj = [set(graph.neighbors(v)) for v in range(graph.n)]
    bags: dict[int, frozenset[int]] = {}
    parent: dict[int, int | None] = {}
    for v in order:
        higher = {u for u in adj[v] if pos[u] > pos[v]}
        bags[pos[v]] = frozenset(higher | {v})
        for a in higher:
            adj[a].update(higher - {a})
        parent[pos[v]] = pos[min(higher, key=pos.__getitem__)] if higher else None
    roots = [t for t, p in parent.items() if p is None]
    root = roots[-1]
    children: dict[int, list[int]] = {t: [] for t in bags}
    for t, p in parent.items():
        if p is not None:
            children[p].append(t)
    for r in roots[:-1]:
        children[root].append(r)
    return TreeDecomposition(bags, children, root)


def decompose_min_fill(graph: Graph) -> TreeDecomposition:
    """Heuristic tree decomposition via min-fill elimination (redundant bags contracted)."""
    if graph.n == 0:
        raise DecompositionError("cannot decompose the empty graph")
    return contract_redundant(decomposition_from_ordering(graph, min_fill_ordering(graph)))


def contract_redundant(td: TreeDecomposition) -> TreeDecomposition:
    """Merge every node whose bag is contained in an adjacent node's bag."""
    bags = dict(td.bags)
    children = {t: list(c) for t, c in td.children.items()}
    root = td.root
    parent = td.parent_map()
    changed = True
    while changed:
        changed = False
        for t in TreeDecomposition(bags, children, root).postorder():
            p = parent[t]
            if p is None:
                continue
            if bags[t] <= bags[p]:
                # fold t into its parent
                children[p].remove(t)
                for c in children[t]:
                    children[p].append(c)
                    parent[c] = p
                del bags[t], children[t], parent[t]
                changed = True
                break
            if bags[p] <= bags[t]:
                # t absorbs its parent and takes its place
                pp = parent[p]
                siblings = [c for c in children[p] if c != t]
                children[t].extend(siblings)
                for c in siblings:
                    parent[c] = t
                if pp is None:
                    root = t
                else:
                    idx = children[pp].index(p)
                    children[pp][idx] = t
                parent[t] = pp
                del bags[p], children[p], parent[p]
                changed = True
                break
    return TreeDecomposition(bags, children, root)


def _min_key(bag: Iterable[int]) -> int:
    return min(bag, default=-1)


def make_nice(td: TreeDecomposition, graph: Graph, singleton_leaves: bool = False) -> NiceDecomposition:
    """Transform a valid decomposition into nice form of the same width.

    Children are ordered by smallest contained vertex index. Sibling branches
    whose bags meet the parent in the same vertex set are joined at that set
    before the parent's remaining vertices are introduced, which keeps the
    node count within ``4 n`` on the decompositions produced here.
    """
    report = validate(graph, td)
    if not report.ok:
        raise DecompositionError(
            "invalid input decomposition: " + "; ".join(v.message for v in report.violations),
            report.violations,
        )
    red = contract_redundant(td)
    bags: dict[int, frozenset[int]] = {}
    children: dict[int, list[int]] = {}
    kinds: dict[int, NodeKind] = {}

    def new(bag, kind, vertex=None, kids=()):
        t = len(bags)
        bags[t] = frozenset(bag)
        children[t] = list(kids)
        kinds[t] = NodeKind(kind, vertex)
        return t

    def walk(top: int, target: frozenset[int]) -> int:
        """Extend the chain at ``top`` by forgets then introduces until it reaches ``target``."""
        cur = bags[top]
        for v in sorted(cur - target):
            cur = cur - {v}
            top = new(cur, Kind.FORGET, v, [top])
        for v in sorted(target - cur):
            cur = cur | {v}
            top = new(cur, Kind.INTRODUCE, v, [top])
        return top

    def join_all(tops: list[int]) -> int:
        while len(tops) > 1:
            merged = []
            for i in range(0, len(tops) - 1, 2):
                a, b = tops[i], tops[i + 1]
                merged.append(new(bags[a], Kind.JOIN, None, [a, b]))
            if len(tops) % 2:
                merged.append(tops[-1])
            tops = merged
        return tops[0]

    def leaf(bag: frozenset[int]) -> int:
        if not singleton_leaves or len(bag) <= 1:
            return new(bag, Kind.LEAF)
        first = min(bag)
        return walk(new({first}, Kind.LEAF), bag)

    built: dict[int, int] = {}
    for t in red.postorder():
        bag = red.bags[t]
        kids = sorted(red.children[t], key=lambda c: _min_key(red.bags[c]))
        if not kids:
            built[t] = leaf(bag)
            continue
        groups: dict[frozenset[int], list[int]] = {}
        for c in kids:
            inter = red.bags[c] & bag
            groups.setdefault(inter, []).append(walk(built[c], inter))
        # join groups pairwise at the smallest available union, then reach the bag
        pending = [(inter, join_all(groups[inter])) for inter in sorted(groups, key=lambda s: (len(s), sorted(s)))]
        while len(pending) > 1:
            best = None
            for i in range(len(pending)):
                for j in range(i + 1, len(pending)):
                    union = pending[i][0] | pending[j][0]
                    key = (len(union), i, j)
                    if best is None or key < best[0]:
                        best = (key, i, j, union)
            _, i, j, union = best
            a = walk(pending[i][1], union)
            b = walk(pending[j][1], union)
            merged = (union, new(union, Kind.JOIN, None, [a, b]))
            pending = [p for x, p in enumerate(pending) if x not in (i, j)] + [merged]
        built[t] = walk(pending[0][1], bag)
        del groups
    nice = NiceDecomposition(bags, children, built[red.root], kinds)
    _check_nice(nice)
    return nice


def _check_nice(nd: NiceDecomposition) -> None:
    for t, nk in nd.kinds.items():
        if classify_structure(nd, t) != nk:
            raise AssertionError(f"node {t} labelled {nk} but structure says {classify_structure(nd, t)}")


def classify_structure(nd: TreeDecomposition, t: int) -> NodeKind:
    """Node kind derived from bags and children alone."""
    kids = nd.children[t]
    bag = nd.bags[t]
    if not kids:
        return NodeKind(Kind.LEAF)
    if len(kids) == 2:
        a, b = kids
        if nd.bags[a] == bag == nd.bags[b]:
            return NodeKind(Kind.JOIN)
        raise DecompositionError(f"node {t}: join children bags differ")
    if len(kids) == 1:
        child = nd.bags[kids[0]]
        if child < bag and len(bag) == len(child) + 1:
            return NodeKind(Kind.INTRODUCE, next(iter(bag - child)))
        if bag < child and len(child) == len(bag) + 1:
            return NodeKind(Kind.FORGET, next(iter(child - bag)))
    raise DecompositionError(f"node {t} is not a leaf/introduce/forget/join node")


def classify(nd: NiceDecomposition, t: int) -> NodeKind:
    """Stored kind of node ``t``."""
    try:
        return nd.kinds[t]
    except KeyError:
        raise KeyError(f"unknown node {t}") from None


def nice_from_tree(td: TreeDecomposition) -> NiceDecomposition:
    """Label an already-nice decomposition (e.g. hand-built in tests)."""
    kinds = {t: classify_structure(td, t) for t in td.bags}
    return NiceDecomposition(dict(td.bags), {t: list(c) for t, c in td.children.items()}, td.root, kinds)


# -- PACE .td I/O ------------------------------------------------------------

def parse_td(text: str, graph: Graph) -> TreeDecomposition:
    """Parse a PACE ``.td`` document and validate it against ``graph``.

    The node holding bag 1 becomes the root.
    """
    header = None
    bags: dict[int, frozenset[int]] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("#"):
            continue
        tokens = line.split()
        try:
            if tokens[0] == "s":
                if len(tokens) != 5 or tokens[1] != "td":
                    raise GraphFormatError("header must be 's td N W n'", lineno)
                header = tuple(int(x) for x in tokens[2:])
            elif tokens[0] == "b":
                if header is None:
                    raise GraphFormatError("bag line before header", lineno)
                i = int(tokens[1])
                verts = [int(x) for x in tokens[2:]]
                for v in verts:
                    if not 1 <= v <= graph.n:
                        raise GraphFormatError(f"bag {i} references vertex {v} outside 1..{graph.n}", lineno)
                if i in bags:
                    raise GraphFormatError(f"duplicate bag {i}", lineno)
                bags[i] = frozenset(v - 1 for v in verts)
            else:
                if header is None:
                    raise GraphFormatError("tree edge before header", lineno)
                if len(tokens) != 2:
                    raise GraphFormatError("tree edge must be 'i j'", lineno)
                edges.append((int(tokens[0]), int(tokens[1])))
        except ValueError as exc:
            if isinstance(exc, GraphFormatError):
                raise
            raise GraphFormatError("non-integer field", lineno) from None
    if header is None:
        raise GraphFormatError("missing 's td' header")
    nbags, _, nverts = header
    if nverts != graph.n:
        raise GraphFormatError(f"decomposition is for {nverts} vertices, graph has {graph.n}")
    if set(bags) != set(range(1, nbags + 1)):
        raise GraphFormatError(f"expected bags 1..{nbags}")
    if len(edges) != nbags - 1:
        raise GraphFormatError(f"expected {nbags - 1} tree edges, found {len(edges)}")
    nbr: dict[int, list[int]] = {i: [] for i in bags}
    for a, b in edges:
        if a not in bags or b not in bags:
            raise GraphFormatError(f"tree edge ({a}, {b}) references unknown bag")
        nbr[a].append(b)
        nbr[b].append(a)
    children: dict[int, list[int]] = {i: [] for i in bags}
    seen = {1}
    stack = [1]
    while stack:
        t = stack.pop()
        for c in sorted(nbr[t]):
            if c not in seen:
                seen.add(c)
                children[t].append(c)
                stack.append(c)
    if seen != set(bags):
        raise DecompositionError("tree edges do not form a tree")
    td = TreeDecomposition(bags, children, 1)
    report = validate(graph, td)
    if not report.ok:
        raise DecompositionError(
            "decomposition invalid: " + "; ".join(v.message for v in report.violations), report.violations
        )
    return td


def write_td(td: TreeDecomposition, graph: Graph) -> str:
    order = td.postorder()[::-1]
    ids = {t: i + 1 for i, t in enumerate(order)}
    lines = [f"s td {len(order)} {td.width + 1} {graph.n}"]
    for t in order:
        lines.append(" ".join(["b", str(ids[t])] + [str(v + 1) for v in sorted(td.bags[t])]))
    for t in order:
        for c in td.children[t]:
            lines.append(f"{ids[t]} {ids[c]}")
    return "\n".join(lines) + "\n"


# -- exact treewidth for tiny graphs (test oracle) ----------------------------

def exact_treewidth(graph: Graph, max_vertices: int = 12) -> int:
    """Exact treewidth by dynamic programming over vertex subsets."""
    n = graph.n
    if n > max_vertices:
        raise ValueError(f"exact treewidth limited to {max_vertices} vertices")
    if n == 0:
        return -1
    nbr = [sum(1 << u for u in graph.neighbors(v)) for v in range(n)]

    def q_size(s: int, v: int) -> int:
        # vertices outside s | {v} reachable from v through s
        seen = 1 << v
        frontier = [v]
        out = 0
        while frontier:
            x = frontier.pop()
            for u in range(n):
                if nbr[x] >> u & 1 and not seen >> u & 1:
                    seen |= 1 << u
                    if s >> u & 1:
                        frontier.append(u)
                    else:
                        out += 1
        return out

    full = (1 << n) - 1
    tw = {0: -1}
    for s in sorted(range(1, full + 1), key=lambda x: bin(x).count("1")):
        best = n
        for v in range(n):
            if s >> v & 1:
                rest = s & ~(1 << v)
                best = min(best, max(tw[rest], q_size(rest, v)))
        tw[s] = best
    return tw[full]
