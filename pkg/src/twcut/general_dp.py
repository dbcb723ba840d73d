"""Dynamic program for deleting edges until no member of a forbidden family remains.

A state at a bag is ``(H, R)``: ``H`` is the set of bag edges kept and ``R``
records which partial copies of family members exist in the partial
solution. An entry of ``R`` is ``(member, img)`` where ``img[u]`` is

* ``NOT_USED`` (-2) when pattern vertex ``u`` is outside the copied part,
* ``OUTSIDE`` (-1) when it lands on a vertex already forgotten, or
* the graph index of the bag vertex it lands on.

``R`` holds exactly the partial copies realised by the deletion set; the
generic state tables that admit any superset of them are recovered by
:func:`project`. Copies lying wholly among forgotten vertices are kept too,
so members that are not connected are still detected when two such pieces
meet at a join. A state holding a complete member is dropped.

Values are deletion counts. With witnesses on, the value becomes the
integer ``count * 2**m - mask`` (see :mod:`twcut.component_dp`), so the
minimum also identifies the lexicographically first optimal edge set.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

from .decomposition import Kind, NiceDecomposition
from .component_dp import check_decomposition, state_cap_from_env, StateCapExceeded
from .family import ForbiddenFamily, contains_member
from .graph import Graph, delete_edges
from .schedule import evaluate_bottom_up

INF = math.inf
NOT_USED = -2
OUTSIDE = -1

Entry = tuple  # (member index, img tuple)


@dataclass(frozen=True)
class Pattern:
    """Induced subgraph of a member, given by its vertex subset (bitmask)."""

    member: int
    subset: int

    def vertices(self) -> list[int]:
        return [u for u in range(self.subset.bit_length()) if self.subset >> u & 1]


def enumerate_patterns(family: ForbiddenFamily) -> list[Pattern]:
    """Every non-empty induced subpattern of every member."""
    out = []
    for mi, g in enumerate(family.members):
        for subset in range(1, 1 << g.n):
            out.append(Pattern(mi, subset))
    return out


class _GenContext:
    def __init__(self, graph: Graph, family: ForbiddenFamily, k: int | None, witness: bool, cache: bool):
        self.graph = graph
        self.family = family
        self.induced = family.induced
        self.sizes = [g.n for g in family.members]
        self.nbr = family.nbr
        self.budget = graph.m if k is None else int(k)
        self.witness = witness
        m = graph.m
        self.scale = (1 << m) if witness else 1
        self.key = [self.scale - ((1 << (m - 1 - i)) if witness else 0) for i in range(m)]
        self.threshold = self.budget * self.scale
        self.cache = cache
        self._grow: dict = {}
        self._drop: dict = {}
        self._forgot: dict = {}
        self.empty = [(mi, (NOT_USED,) * n) for mi, n in enumerate(self.sizes)]
        self._leaf: dict = {}

    def value_of(self, x):
        if x > self.threshold:
            return INF
        return -((-x) // self.scale) if self.witness else int(x)

    def edges_of(self, x) -> list[int]:
        mask = (-x) % self.scale
        m = self.graph.m
        return [i for i in range(m) if mask >> (m - 1 - i) & 1]

    def full(self, entry: Entry) -> bool:
        return NOT_USED not in entry[1]


@dataclass
class GeneralSignature:
    """Finite-valued states of one node: (kept bag edges as id set, R) -> value key."""

    bag: tuple[int, ...]
    table: dict[tuple[frozenset[int], frozenset[Entry]], int]
    ctx: _GenContext = field(repr=False)

    def items(self):
        for (h, r), x in self.table.items():
            yield (h, r), self.ctx.value_of(x)

    def best(self):
        return min(self.table.values(), default=None)

    def __len__(self) -> int:
        return len(self.table)


# -- transitions ----------------------------------------------------------------

def _grow(ctx: _GenContext, entry: Entry, v: int, kept: frozenset[int]) -> tuple[Entry, ...]:
    """Copies obtained from ``entry`` by sending one unused pattern vertex to ``v``."""
    key = (entry, v, kept)
    hit = ctx._grow.get(key)
    if hit is not None:
        return hit
    mi, img = entry
    nbr = ctx.nbr[mi]
    out = []
    for u in range(len(img)):
        if img[u] != NOT_USED:
            continue
        ok = True
        for w, x in enumerate(img):
            if x == NOT_USED:
                continue
            if nbr[u] >> w & 1:
                # v has no forgotten neighbours, so the partner must be a kept bag neighbour
                if x == OUTSIDE or x not in kept:
                    ok = False
                    break
            elif ctx.induced and x != OUTSIDE and x in kept:
                ok = False
                break
        if ok:
            out.append((mi, img[:u] + (v,) + img[u + 1 :]))
    res = tuple(out)
    if ctx.cache:
        ctx._grow[key] = res
    return res


def _extend(ctx: _GenContext, base: frozenset[Entry], v: int, kept: frozenset[int]):
    """Entries of ``base`` plus every copy that additionally uses the new vertex ``v``.

    ``kept`` are the bag neighbours of ``v`` whose edge to ``v`` survives.
    Returns None when some new copy is a complete member.
    """
    out = set(base)
    for entry in itertools.chain(base, ctx.empty):
        for new in _grow(ctx, entry, v, kept):
            if NOT_USED not in new[1]:
                return None
            out.add(new)
    return frozenset(out)


def gen_introduce_signature(ctx: _GenContext, bag, v: int, child: GeneralSignature) -> GeneralSignature:
    bag = tuple(sorted(bag))
    g = ctx.graph
    around = [(u, g.edge_id(u, v)) for u in bag if u != v and g.has_edge(u, v)]
    table: dict = {}
    for (h, r), val in child.table.items():
        for size in range(len(around) + 1):
            for keep in itertools.combinations(around, size):
                kept = frozenset(u for u, _ in keep)
                kept_ids = {e for _, e in keep}
                x = val + sum(ctx.key[e] for _, e in around if e not in kept_ids)
                if x > ctx.threshold:
                    continue
                new_r = _extend(ctx, r, v, kept)
                if new_r is None:
                    continue
                state = (h | kept_ids, new_r)
                if state not in table or x < table[state]:
                    table[state] = x
    return GeneralSignature(bag, table, ctx)


def gen_leaf_signature(ctx: _GenContext, bag) -> GeneralSignature:
    """The bag alone: one state per kept edge set, with the copies it contains."""
    bag = tuple(sorted(bag))
    if ctx.cache and bag in ctx._leaf:
        return GeneralSignature(bag, dict(ctx._leaf[bag]), ctx)
    sig = GeneralSignature((), {(frozenset(), frozenset()): 0}, ctx)
    for i, v in enumerate(bag):
        sig = gen_introduce_signature(ctx, bag[: i + 1], v, sig)
    if ctx.cache:
        ctx._leaf[bag] = dict(sig.table)
    return GeneralSignature(bag, sig.table, ctx)


def _drop(ctx: _GenContext, entry: Entry, v: int) -> Entry:
    key = (entry, v)
    hit = ctx._drop.get(key)
    if hit is None:
        mi, img = entry
        hit = (mi, tuple(OUTSIDE if x == v else x for x in img)) if v in img else entry
        if ctx.cache:
            ctx._drop[key] = hit
    return hit


def gen_forget_signature(ctx: _GenContext, bag, v: int, child: GeneralSignature) -> GeneralSignature:
    bag = tuple(sorted(bag))
    g = ctx.graph
    at_v = {g.edge_id(u, v) for u in g.neighbors(v)}
    table: dict = {}
    for (h, r), val in child.table.items():
        new_r = ctx._forgot.get((r, v)) if ctx.cache else None
        if new_r is None:
            new_r = frozenset(_drop(ctx, e, v) for e in r)
            if ctx.cache:
                ctx._forgot[(r, v)] = new_r
        state = (h - at_v, new_r)
        if state not in table or val < table[state]:
            table[state] = val
    return GeneralSignature(bag, table, ctx)


def _split(img) -> tuple[tuple, int]:
    bag_part = tuple(x if x >= 0 else NOT_USED for x in img)
    out_mask = sum(1 << u for u, x in enumerate(img) if x == OUTSIDE)
    return bag_part, out_mask


def _join_tables(ctx: _GenContext, r1: frozenset[Entry], r2: frozenset[Entry]) -> frozenset[Entry]:
    out = set(r1) | set(r2)
    index: dict = {}
    for mi, img in r2:
        bag_part, om = _split(img)
        if om:
            index.setdefault((mi, bag_part), []).append(om)
    for mi, img in r1:
        bag_part, o1 = _split(img)
        if not o1:
            continue
        nbr = ctx.nbr[mi]
        for o2 in index.get((mi, bag_part), ()):
            if o1 & o2:
                continue
            # the two forgotten sides share no edges
            if any(o1 >> u & 1 and nbr[u] & o2 for u in range(len(img))):
                continue
            both = o1 | o2
            out.add((mi, tuple(OUTSIDE if both >> u & 1 else x for u, x in enumerate(bag_part))))
    return frozenset(out)


def gen_join_signature(ctx: _GenContext, bag, left: GeneralSignature, right: GeneralSignature) -> GeneralSignature:
    bag = tuple(sorted(bag))
    g = ctx.graph
    bag_edges = [g.edge_id(a, b) for a, b in itertools.combinations(bag, 2) if g.has_edge(a, b)]
    by_h: dict = {}
    for (h, r), val in right.table.items():
        by_h.setdefault(h, []).append((r, val))
    table: dict = {}
    for (h, r1), v1 in left.table.items():
        deleted = sum(ctx.key[e] for e in bag_edges if e not in h)
        for r2, v2 in by_h.get(h, ()):
            x = v1 + v2 - deleted
            if x > ctx.threshold:
                continue
            r = _join_tables(ctx, r1, r2)
            if any(ctx.full(e) for e in r):
                continue
            state = (h, r)
            if state not in table or x < table[state]:
                table[state] = x
    return GeneralSignature(bag, table, ctx)


# -- generic state tables -------------------------------------------------------------

def project(r: frozenset[Entry]) -> frozenset[tuple[int, int, tuple]]:
    """Generic table entries ``(member, subset mask, bag map)`` for the copies in ``r``.

    The bag map lists ``(pattern vertex, bag vertex)`` pairs; copies not
    touching the bag are left out.
    """
    out = set()
    for mi, img in r:
        subset = sum(1 << u for u, x in enumerate(img) if x != NOT_USED)
        theta = tuple((u, x) for u, x in enumerate(img) if x >= 0)
        if theta:
            out.add((mi, subset, theta))
    return frozenset(out)


def _table_domain(bag, kept: set[tuple[int, int]], family: ForbiddenFamily):
    """All (member, subset, bag map) with a non-empty map embedding its part into H."""
    out = []
    induced = family.induced
    for mi, f in enumerate(family.members):
        for subset in range(1, 1 << f.n):
            verts = [u for u in range(f.n) if subset >> u & 1]
            for size in range(1, min(len(verts), len(bag)) + 1):
                for dom in itertools.combinations(verts, size):
                    for imgs in itertools.permutations(bag, size):
                        ok = True
                        for (a, x), (b, y) in itertools.combinations(zip(dom, imgs), 2):
                            pe = f.has_edge(a, b)
                            he = (min(x, y), max(x, y)) in kept
                            if pe and not he or induced and he and not pe:
                                ok = False
                                break
                        if ok:
                            out.append((mi, subset, tuple(sorted(zip(dom, imgs)))))
    return out


def check_state(bag, kept, phi, family: ForbiddenFamily) -> list[str]:
    """Names of the consistency conditions a generic table breaks (empty when valid).

    ``kept`` holds bag vertex pairs; ``phi`` is the set of entries mapped to 1.
    In induced mode the forced-extension rule is checked only for maps that
    cover their whole subset, the one case where it is sound.
    """
    kept = {(min(a, b), max(a, b)) for a, b in kept}
    bag = tuple(sorted(bag))
    induced = family.induced
    broken = []
    domain = set(_table_domain(bag, kept, family))
    phi = set(phi)
    if not phi <= domain:
        broken.append("domain")
    for mi, subset, theta in domain:
        if len(theta) == bin(subset).count("1") and (mi, subset, theta) not in phi:
            broken.append("a")
            break
    for mi, subset, theta in phi:
        dom = dict(theta)
        for sub in range(1, subset):
            if sub & ~subset:
                continue
            t2 = tuple((u, x) for u, x in theta if sub >> u & 1)
            if t2 and (mi, sub, t2) not in phi:
                broken.append("b")
                break
        f = family.members[mi]
        if induced and len(dom) != bin(subset).count("1"):
            continue
        used = set(dom.values())
        for u in range(f.n):
            if subset >> u & 1:
                continue
            for v in bag:
                if v in used:
                    continue
                fine = True
                for w in range(f.n):
                    if not subset >> w & 1:
                        continue
                    adj = f.has_edge(u, w)
                    if adj and (w not in dom or (min(dom[w], v), max(dom[w], v)) not in kept):
                        fine = False
                    if induced and not adj and (min(dom[w], v), max(dom[w], v)) in kept:
                        fine = False
                if fine:
                    ext = tuple(sorted(theta + ((u, v),)))
                    if (mi, subset | 1 << u, ext) not in phi:
                        broken.append("c")
    for mi, subset, theta in phi:
        if subset == (1 << family.members[mi].n) - 1:
            broken.append("d")
            break
    return sorted(set(broken))


def enumerate_valid_states(bag, kept, family: ForbiddenFamily, max_free: int = 20) -> list[frozenset]:
    """All generic tables for bag subgraph ``kept`` that pass :func:`check_state`.

    Exhaustive over the entries not fixed by the first and last rules;
    refuses when more than ``max_free`` remain.
    """
    kept = {(min(a, b), max(a, b)) for a, b in kept}
    bag = tuple(sorted(bag))
    domain = _table_domain(bag, kept, family)
    forced, free = [], []
    for e in domain:
        mi, subset, theta = e
        if subset == (1 << family.members[mi].n) - 1:
            continue
        if len(theta) == bin(subset).count("1"):
            forced.append(e)
        else:
            free.append(e)
    if len(free) > max_free:
        raise ValueError(f"{len(free)} unconstrained entries; exhaustive search limited to {max_free}")
    out = []
    for bits in range(1 << len(free)):
        phi = set(forced) | {e for i, e in enumerate(free) if bits >> i & 1}
        if not check_state(bag, kept, phi, family):
            out.append(frozenset(phi))
    return out


def state_bound(bag_size: int, bag_edges: int, family: ForbiddenFamily) -> int:
    """2^(e(G[D]) + sum_F (|D| + 2)^v(F)): kept edge sets times possible tables."""
    return 2 ** (bag_edges + sum((bag_size + 2) ** g.n for g in family.members))


# -- driver ---------------------------------------------------------------------

@dataclass
class GenNodeStats:
    node: int
    kind: str
    bag_size: int
    states: int
    bound: int


@dataclass
class GenSolveResult:
    feasible: bool
    optimum: int | float
    witness: list[tuple[str, str]] | None = None
    nodes: list[GenNodeStats] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def max_states(self) -> int:
        return max((s.states for s in self.nodes), default=0)


def make_gen_context(graph: Graph, family: ForbiddenFamily, k: int | None = None, witness: bool = False, cache: bool = True):
    return _GenContext(graph, family, k, witness, cache)


def gen_solve(
    graph: Graph,
    nd: NiceDecomposition,
    family: ForbiddenFamily,
    k: int | None = None,
    witness: bool = False,
    parallel: bool = False,
    cache: bool = True,
    state_cap: int | None = None,
) -> GenSolveResult:
    """Fewest deletions (at most ``k``, default e(G)) leaving no member as a (induced) subgraph."""
    start = time.perf_counter()
    check_decomposition(graph, nd)
    if state_cap is None:
        state_cap = state_cap_from_env()
    ctx = _GenContext(graph, family, k, witness, cache)
    stats: list[GenNodeStats] = []

    def step(t: int, kids: list[GeneralSignature]) -> GeneralSignature:
        nk = nd.kinds[t]
        bag = tuple(sorted(nd.bags[t]))
        if nk.kind is Kind.LEAF:
            sig = gen_leaf_signature(ctx, bag)
        elif nk.kind is Kind.INTRODUCE:
            sig = gen_introduce_signature(ctx, bag, nk.vertex, kids[0])
        elif nk.kind is Kind.FORGET:
            sig = gen_forget_signature(ctx, bag, nk.vertex, kids[0])
        else:
            sig = gen_join_signature(ctx, bag, kids[0], kids[1])
        e_bag = sum(1 for a, b in itertools.combinations(bag, 2) if graph.has_edge(a, b))
        bound = state_bound(len(bag), e_bag, family)
        if len(sig) > bound:
            raise AssertionError(f"node {t}: {len(sig)} states exceeds {bound}")
        if state_cap is not None and len(sig) > state_cap:
            raise StateCapExceeded(f"node {t} has {len(sig)} states, cap is {state_cap}")
        stats.append(GenNodeStats(t, nk.kind.value, len(bag), len(sig), bound))
        return sig

    if graph.n == 0:
        best = 0
    else:
        best = evaluate_bottom_up(nd, step, parallel=parallel).best()
    stats.sort(key=lambda s: s.node)
    if best is None:
        return GenSolveResult(False, INF, None, stats, time.perf_counter() - start)
    optimum = ctx.value_of(best)
    wit = None
    if witness:
        idx = ctx.edges_of(best)
        if len(idx) != optimum:
            raise AssertionError("witness size disagrees with optimum")
        named = [graph.edge_names(graph.edges[i]) for i in idx]
        if contains_member(delete_edges(graph, named), family)[0]:
            raise AssertionError("witness leaves a forbidden copy")
        wit = named
    return GenSolveResult(True, optimum, wit, stats, time.perf_counter() - start)
