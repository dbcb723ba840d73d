"""Dynamic program bounding every connected component at ``h`` vertices.

A state at a bag is a partition ``P`` of the bag together with a capacity
``c(X)`` per block: the total size of the components of the partial solution
meeting ``X`` is at most ``c(X)``. For each state the node's table holds the
cheapest deletion set realising it, truncated at the budget ``k``.

With per-vertex limits a capacity alone is not enough: a block's component
may already hold forgotten vertices whose limits must still hold after it
grows at a later join. Each block therefore also carries a threshold ``T``,
chosen when the block is created and shared by blocks merged into it. The
threshold promises that every vertex of the component has limit at least
``T``, and it caps the block's capacity. Thresholds range over the distinct
limit values, so without limits the only threshold is ``h`` and nothing
changes.

Storage is one ndarray per (partition, thresholds) key, one axis per block. Axis index ``j``
stands for capacity ``lo(X) + j`` where ``lo(X)`` is the block's own size
(or weight). Components meeting ``X`` can only add vertices already
forgotten below the node, so capacities past ``lo(X) + forgotten`` change
nothing; the axis stops there (or at ``hi(X)``) and its last entry stands
for every larger valid capacity. Capacities are upper bounds, so tables are
non-increasing along each axis, and every transition preserves that.

Witnesses reuse the same tables. The entry becomes the integer
``cost * 2**m - mask`` where edge ``i`` (in sorted edge order) contributes
bit ``2**(m - 1 - i)``. The key is additive over disjoint edge sets, so the
minimum is the cheapest set and, among those, the lexicographically first.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from .decomposition import DecompositionError, Kind, NiceDecomposition, _check_nice, validate
from .graph import Graph, VertexAnnotations, components_within_bound
from .partitions import bell, blocks, canonical, num_blocks, partitions_of
from .schedule import evaluate_bottom_up

INF = math.inf


class StateCapExceeded(RuntimeError):
    """A node would hold more valid states than the configured cap."""


@dataclass(frozen=True)
class ProblemSpec:
    """Component bound ``h``, budget ``k`` (None: total edge cost) and optional annotations."""

    h: int
    k: int | None = None
    annotations: VertexAnnotations | None = None

    def __post_init__(self):
        if int(self.h) < 1:
            raise ValueError(f"h must be >= 1, got {self.h}")
        if self.k is not None and int(self.k) < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")


@dataclass(frozen=True)
class ComponentState:
    """Partition as a restricted-growth string over the sorted bag, plus capacities in block order."""

    partition: tuple[int, ...]
    capacities: tuple[int, ...]

    def blocks(self, bag) -> list[tuple]:
        bag = sorted(bag)
        return [tuple(bag[i] for i in blk) for blk in blocks(self.partition)]


class _Context:
    """Per-instance constants: weights, limits, edge keys and the budget threshold."""

    def __init__(self, graph: Graph, spec: ProblemSpec, witness: bool = False):
        self.graph = graph
        self.h = h = int(spec.h)
        ann = spec.annotations
        if ann is not None:
            ann.check(graph)
        w = ann.weight_vector(graph) if ann else None
        lim = ann.limit_vector(graph, h) if ann else None
        cost = ann.cost_vector(graph) if ann else None
        self.w = w or [1] * graph.n
        self.hi_v = [min(h, x) for x in lim] if lim else [h] * graph.n
        self.cost = cost or [1] * graph.m
        total = sum(self.cost)
        self.budget = total if spec.k is None else int(spec.k)
        self.witness = witness
        m = graph.m
        if witness:
            self.scale = 1 << m
            self.key = [c * self.scale - (1 << (m - 1 - i)) for i, c in enumerate(self.cost)]
            self.inf = (total + self.budget + 2) * self.scale * 4
            # sums of a few entries stay below 8 * inf; object arrays only past int64
            self.dtype = np.int64 if 8 * self.inf < 2**63 else object
        else:
            self.scale = 1
            self.key = list(self.cost)
            self.inf = INF
            self.dtype = np.float64
        self.threshold = self.budget * self.scale
        self.levels = tuple(sorted(set(self.hi_v)))
        self._parts: dict = {}
        self._edges: dict = {}

    def partitions(self, bag: tuple[int, ...]) -> dict:
        """Table keys of a bag as (RGS, thresholds) -> (lo, thresholds), built once per bag.

        Depth-first over restricted-growth strings, abandoning a prefix as
        soon as one of its blocks is over its bound. Each block then takes
        every threshold level between its weight and its smallest limit.
        """
        out = self._parts.get(bag)
        if out is not None:
            return out
        out = {}
        w = [self.w[v] for v in bag]
        cap = [self.hi_v[v] for v in bag]
        n = len(bag)
        labels: list[int] = []
        lo: list[int] = []
        hi: list[int] = []

        def rec(i: int):
            if i == n:
                lo_t = tuple(lo)
                choices = [[t for t in self.levels if a <= t <= b] for a, b in zip(lo, hi)]
                for ts in itertools.product(*choices):
                    out[(tuple(labels), ts)] = (lo_t, ts)
                return
            for b in range(len(lo)):
                nlo, nhi = lo[b] + w[i], min(hi[b], cap[i])
                if nlo <= nhi:
                    plo, phi = lo[b], hi[b]
                    lo[b], hi[b] = nlo, nhi
                    labels.append(b)
                    rec(i + 1)
                    labels.pop()
                    lo[b], hi[b] = plo, phi
            if w[i] <= cap[i]:
                lo.append(w[i])
                hi.append(cap[i])
                labels.append(len(lo) - 1)
                rec(i + 1)
                labels.pop()
                lo.pop()
                hi.pop()

        rec(0)
        self._parts[bag] = out
        return out

    def bounds(self, bag: tuple[int, ...], key):
        """(lo, hi) per block for a table key, or None when it is not valid."""
        return self.partitions(bag).get(key)

    @staticmethod
    def lengths(lo, hi, forgotten: int) -> tuple[int, ...]:
        return tuple(min(b, a + forgotten) - a + 1 for a, b in zip(lo, hi))

    def bag_edges(self, bag: tuple[int, ...]):
        """Edges inside the bag as (position, position, key), cached per bag."""
        out = self._edges.get(bag)
        if out is None:
            g = self.graph
            out = [
                (i, j, self.key[g.edge_id(bag[i], bag[j])])
                for i in range(len(bag))
                for j in range(i + 1, len(bag))
                if g.has_edge(bag[i], bag[j])
            ]
            self._edges[bag] = out
        return out

    def crossing(self, bag, labels, only: int | None = None):
        """Summed key of bag edges whose endpoints carry different labels.

        With ``only`` set, restrict to edges at that bag position.
        """
        total = 0
        for i, j, key in self.bag_edges(bag):
            if only is not None and only != i and only != j:
                continue
            if labels[i] != labels[j]:
                total += key
        return total

    def full(self, shape) -> np.ndarray:
        return np.full(shape, self.inf, dtype=self.dtype)

    def fit(self, arr: np.ndarray, lengths) -> np.ndarray:
        """Cut or extend (repeating the last entry) each axis, then truncate at the budget.

        Inputs are already non-increasing along every axis; each transition
        keeps that property, so no closure pass is needed.
        """
        for ax, n in enumerate(lengths):
            have = arr.shape[ax]
            if have != n:
                arr = np.take(arr, np.minimum(np.arange(n), have - 1), axis=ax)
        arr = np.array(arr, dtype=self.dtype)
        arr[np.greater(arr, self.threshold).astype(bool)] = self.inf
        return arr

    def value_of(self, x):
        """Cost stored in a table entry (``INF`` when absent)."""
        if x > self.threshold:
            return INF
        x = int(x)
        if self.witness:
            return -((-x) // self.scale)
        return int(x)

    def edges_of(self, x) -> list[int]:
        mask = (-int(x)) % self.scale
        m = self.graph.m
        return [i for i in range(m) if mask >> (m - 1 - i) & 1]


@dataclass
class ComponentSignature:
    """Tables of one node: (RGS, thresholds) -> capacity-indexed array.

    ``forgotten`` is the total weight of vertices below the node that are
    no longer in its bag.
    """

    bag: tuple[int, ...]
    tables: dict[tuple[int, ...], np.ndarray]
    forgotten: int
    ctx: _Context = field(repr=False)

    def _entry(self, state: ComponentState):
        best = None
        for key, arr in self.tables.items():
            if key[0] != state.partition or len(state.capacities) != arr.ndim:
                continue
            lo, hi = self.ctx.bounds(self.bag, key)
            if not all(a <= c <= b for c, a, b in zip(state.capacities, lo, hi)):
                continue
            x = arr[tuple(min(c - a, n - 1) for c, a, n in zip(state.capacities, lo, arr.shape))]
            if x <= self.ctx.threshold and (best is None or x < best):
                best = x
        return best

    def value(self, state: ComponentState):
        x = self._entry(state)
        return INF if x is None else self.ctx.value_of(x)

    def witness(self, state: ComponentState) -> list[tuple[int, int]] | None:
        """Edge set realising ``state`` (index pairs); needs witness mode."""
        if not self.ctx.witness:
            raise RuntimeError("signature was computed without witness recording")
        x = self._entry(state)
        if x is None:
            return None
        return [self.ctx.graph.edges[i] for i in self.ctx.edges_of(x)]

    def items(self) -> Iterator[tuple[ComponentState, int]]:
        """Every valid state with a finite value, in partition then capacity order."""
        seen = set()
        for key in sorted(self.tables):
            lo, hi = self.ctx.bounds(self.bag, key)
            for caps in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
                state = ComponentState(key[0], caps)
                if state in seen:
                    continue
                seen.add(state)
                val = self.value(state)
                if val != INF:
                    yield state, val

    def stored_states(self) -> int:
        """Finite entries actually held (repeated tail capacities count once)."""
        return sum(int(np.count_nonzero(np.less_equal(a, self.ctx.threshold).astype(bool))) for a in self.tables.values())

    def best(self):
        """Smallest entry over all states, or None when every entry is infinite."""
        best = None
        for key in sorted(self.tables):
            arr = self.tables[key]
            x = arr.min()
            if x <= self.ctx.threshold and (best is None or x < best):
                best = x
        return best


def _count_states(ctx: _Context, bag: tuple[int, ...]) -> int:
    """Number of valid states, summing over set partitions by subset recursion."""
    n = len(bag)
    ways = [0] * (1 << n)
    for mask in range(1, 1 << n):
        members = [bag[i] for i in range(n) if mask >> i & 1]
        lo = sum(ctx.w[v] for v in members)
        hi = min(ctx.hi_v[v] for v in members)
        ways[mask] = max(0, hi - lo + 1)
    count = [0] * (1 << n)
    count[0] = 1
    for mask in range(1, 1 << n):
        low = mask & -mask
        rest = mask ^ low
        sub = rest
        total = 0
        # blocks containing the lowest member of mask
        while True:
            blk = sub | low
            if ways[blk]:
                total += ways[blk] * count[mask ^ blk]
            if sub == 0:
                break
            sub = (sub - 1) & rest
        count[mask] = total
    return count[(1 << n) - 1]


def enumerate_component_states(bag, spec: ProblemSpec, graph: Graph | None = None) -> set[ComponentState]:
    """All valid states of a bag (vertex indices; ``graph`` needed for annotations)."""
    bag = tuple(sorted(bag))
    if graph is None:
        if spec.annotations is not None:
            raise ValueError("annotations need the graph")
        graph = Graph.from_indices(max(bag, default=-1) + 1, [])
    ctx = _Context(graph, spec)
    out = set()
    for rgs in partitions_of(len(bag)):
        ranges = []
        for blk in blocks(rgs):
            lo = sum(ctx.w[bag[i]] for i in blk)
            hi = min(ctx.hi_v[bag[i]] for i in blk)
            ranges.append(range(lo, hi + 1))
        for caps in itertools.product(*ranges):
            out.add(ComponentState(rgs, caps))
    return out


# -- node transitions ---------------------------------------------------------

def leaf_signature(ctx: _Context, bag) -> ComponentSignature:
    bag = tuple(sorted(bag))
    tables = {}
    for key in ctx.partitions(bag):
        kappa = ctx.crossing(bag, key[0])
        if kappa > ctx.threshold:
            continue
        tables[key] = np.full((1,) * num_blocks(key[0]), kappa, dtype=ctx.dtype)
    return ComponentSignature(bag, tables, 0, ctx)


def _conv_last_two(a: np.ndarray, limit: int, inf, dtype) -> np.ndarray:
    """Min-plus convolution of the last two axes, keeping sums below ``limit``."""
    n1, n2 = a.shape[-2], a.shape[-1]
    size = min(n1 + n2 - 1, limit)
    out = np.full(a.shape[:-2] + (size,), inf, dtype=dtype)
    for x in range(min(n1, size)):
        span = min(n2, size - x)
        out[..., x : x + span] = np.minimum(out[..., x : x + span], a[..., x, :span])
    return out


@lru_cache(maxsize=None)
def _introduce_plan(rgs_c: tuple[int, ...], pos_v: int):
    """For each set of child blocks joining the new vertex: the parent RGS,
    the merged child axes, the axis permutation and the new block's label."""
    nb = num_blocks(rgs_c)
    plans = []
    for r in range(nb + 1):
        for merged in itertools.combinations(range(nb), r):
            mset = set(merged)
            labels = [("m",) if x in mset else x for x in rgs_c]
            labels.insert(pos_v, ("m",))
            prgs = canonical(labels)
            first = {}
            for i, x in enumerate(labels):
                first.setdefault(x, prgs[i])
            keep = [j for j in range(nb) if j not in mset]
            axis_labels = [first[j] for j in keep] + [first[("m",)]]
            plans.append((merged, prgs, tuple(np.argsort(axis_labels)), first[("m",)]))
    return plans


def introduce_signature(ctx: _Context, bag, v: int, child: ComponentSignature) -> ComponentSignature:
    bag = tuple(sorted(bag))
    if v not in bag or tuple(u for u in bag if u != v) != child.bag:
        raise DecompositionError(f"introduce of {v}: child bag {child.bag} does not match {bag}")
    pos_v = bag.index(v)
    f = child.forgotten
    at_v = [(j if i == pos_v else i, key) for i, j, key in ctx.bag_edges(bag) if pos_v in (i, j)]
    parts = ctx.partitions(bag)
    acc: dict[tuple, np.ndarray] = {}
    for (rgs_c, ts_c), arr in child.tables.items():
        nb = arr.ndim
        for merged, prgs, perm, mlabel in _introduce_plan(rgs_c, pos_v):
            r = len(merged)
            if r:
                # merged blocks must share one threshold, which the new block inherits
                t_new = {ts_c[j] for j in merged}
                if len(t_new) != 1:
                    continue
            else:
                t_new = [t for t in ctx.levels if ctx.w[v] <= t <= ctx.hi_v[v]]
            kept = [ts_c[j] for j in range(nb) if j not in merged]
            for t in t_new:
                key = (prgs, tuple((kept + [t])[i] for i in perm))
                b = parts.get(key)
                if b is not None:
                    _introduce_into(ctx, acc, key, b, arr, merged, perm, mlabel, at_v, f)
    return ComponentSignature(bag, acc, f, ctx)


def _introduce_into(ctx: _Context, acc, key, b, arr, merged, perm, mlabel, at_v, f) -> None:
    nb = arr.ndim
    prgs = key[0]
    lens = ctx.lengths(*b, f)
    r = len(merged)
    if r:
        # capacity of the new block is w(v) plus the merged capacities
        new = np.moveaxis(arr, merged, range(nb - r, nb))
        for _ in range(r - 1):
            new = _conv_last_two(new, lens[mlabel], ctx.inf, ctx.dtype)
    else:
        new = arr[..., None]
    kappa = sum(x for j, x in at_v if prgs[j] != mlabel)
    new = ctx.fit(np.transpose(new, perm) + kappa, lens)
    acc[key] = np.minimum(acc[key], new) if key in acc else new


def forget_signature(ctx: _Context, bag, v: int, child: ComponentSignature) -> ComponentSignature:
    bag = tuple(sorted(bag))
    cbag = child.bag
    if v not in cbag or tuple(u for u in cbag if u != v) != bag:
        raise DecompositionError(f"forget of {v}: child bag {cbag} does not match {bag}")
    pos_v = cbag.index(v)
    f = child.forgotten + ctx.w[v]
    acc: dict[tuple, np.ndarray] = {}
    for (rgs_c, ts_c), arr in child.tables.items():
        lv = rgs_c[pos_v]
        rest = rgs_c[:pos_v] + rgs_c[pos_v + 1 :]
        prgs = canonical(rest)
        if rgs_c.count(lv) == 1:
            new = np.minimum.reduce(arr, axis=lv)
            axis_labels = [j for j in range(num_blocks(rgs_c)) if j != lv]
        else:
            # v leaves its block: the same capacity now sits w(v) further from lo
            pad = [(0, 0)] * arr.ndim
            pad[lv] = (ctx.w[v], 0)
            new = np.pad(arr, pad, constant_values=ctx.inf)
            axis_labels = list(range(num_blocks(rgs_c)))
        relabel = {}
        for x, y in zip(rest, prgs):
            relabel.setdefault(x, y)
        order = np.argsort([relabel[j] for j in axis_labels])
        key = (prgs, tuple(ts_c[axis_labels[i]] for i in order))
        b = ctx.bounds(bag, key)
        if b is None:
            continue
        new = np.transpose(new, order)
        new = ctx.fit(new, ctx.lengths(*b, f))
        # several thresholds can collapse onto one key; keep 0-d results as arrays
        acc[key] = np.asarray(np.minimum(acc[key], new), dtype=ctx.dtype) if key in acc else new
    return ComponentSignature(bag, acc, f, ctx)


def join_signature(ctx: _Context, bag, left: ComponentSignature, right: ComponentSignature) -> ComponentSignature:
    bag = tuple(sorted(bag))
    if left.bag != bag or right.bag != bag:
        raise DecompositionError("join children must share the parent bag")
    f = left.forgotten + right.forgotten
    tables = {}
    for key in sorted(set(left.tables) & set(right.tables)):
        b = ctx.bounds(bag, key)
        lens = ctx.lengths(*b, f)
        L, R = left.tables[key], right.tables[key]
        kappa = ctx.crossing(bag, key[0])
        if L.ndim == 0:
            # empty bag: the two sides are disjoint
            out = L + R - kappa
        else:
            # c = c1 + c2 - lo, i.e. index j = j1 + j2
            out = ctx.full(lens)
            finite = np.less_equal(L, ctx.threshold).astype(bool)
            for a in zip(*np.nonzero(finite)):
                spans = [min(R.shape[i], lens[i] - a[i]) for i in range(len(a))]
                dst = tuple(slice(a[i], a[i] + spans[i]) for i in range(len(a)))
                src = tuple(slice(0, s) for s in spans)
                out[dst] = np.minimum(out[dst], L[a] + R[src])
            out = out - kappa
        tables[key] = ctx.fit(np.asarray(out, dtype=ctx.dtype), lens)
    return ComponentSignature(bag, tables, f, ctx)


# -- driver --------------------------------------------------------------------

@dataclass
class NodeStats:
    node: int
    kind: str
    bag_size: int
    valid_states: int
    stored_states: int
    bound: int


@dataclass
class SolveResult:
    feasible: bool
    optimum: int | float
    witness: list[tuple[str, str]] | None = None
    nodes: list[NodeStats] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def max_states(self) -> int:
        return max((s.valid_states for s in self.nodes), default=0)


def state_cap_from_env() -> int | None:
    raw = os.environ.get("TWCUT_STATE_CAP")
    if not raw:
        return None
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"TWCUT_STATE_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValueError("TWCUT_STATE_CAP must be positive")
    return cap


def check_decomposition(graph: Graph, nd: NiceDecomposition) -> None:
    report = validate(graph, nd)
    if not report.ok:
        raise DecompositionError(
            "decomposition does not match graph: " + "; ".join(x.message for x in report.violations),
            report.violations,
        )
    _check_nice(nd)


def solve(
    graph: Graph,
    nd: NiceDecomposition,
    spec: ProblemSpec,
    witness: bool = False,
    parallel: bool = False,
    state_cap: int | None = None,
) -> SolveResult:
    """Minimum deletion cost leaving every component within the bound.

    ``optimum`` is the true minimum when it is at most ``k`` and ``INF``
    otherwise. ``state_cap`` (default: ``TWCUT_STATE_CAP``) aborts with
    :class:`StateCapExceeded` if a bag admits more valid states.
    """
    start = time.perf_counter()
    check_decomposition(graph, nd)
    if state_cap is None:
        state_cap = state_cap_from_env()
    ctx = _Context(graph, spec, witness)
    if any(ctx.w[v] > ctx.hi_v[v] for v in range(graph.n)):
        return SolveResult(False, INF, None, [], time.perf_counter() - start)

    stats: list[NodeStats] = []

    def step(t: int, kids: list[ComponentSignature]) -> ComponentSignature:
        nk = nd.kinds[t]
        bag = tuple(sorted(nd.bags[t]))
        valid = _count_states(ctx, bag)
        bound = bell(len(bag)) * ctx.h ** len(bag)
        if valid > bound:
            raise AssertionError(f"node {t}: {valid} states exceeds B_b * h^b = {bound}")
        if state_cap is not None and valid > state_cap:
            raise StateCapExceeded(f"node {t} has {valid} valid states, cap is {state_cap}")
        if nk.kind is Kind.LEAF:
            sig = leaf_signature(ctx, bag)
        elif nk.kind is Kind.INTRODUCE:
            sig = introduce_signature(ctx, bag, nk.vertex, kids[0])
        elif nk.kind is Kind.FORGET:
            sig = forget_signature(ctx, bag, nk.vertex, kids[0])
        else:
            sig = join_signature(ctx, bag, kids[0], kids[1])
        stats.append(NodeStats(t, nk.kind.value, len(bag), valid, sig.stored_states(), bound))
        return sig

    if graph.n == 0:
        root_best = 0
    else:
        root = evaluate_bottom_up(nd, step, parallel=parallel)
        root_best = root.best()
    stats.sort(key=lambda s: s.node)
    if root_best is None:
        return SolveResult(False, INF, None, stats, time.perf_counter() - start)
    optimum = ctx.value_of(root_best)
    wit = _decode_witness(ctx, root_best, optimum) if witness else None
    return SolveResult(True, optimum, wit, stats, time.perf_counter() - start)


def _decode_witness(ctx: _Context, key, optimum) -> list[tuple[str, str]]:
    g = ctx.graph
    idx = ctx.edges_of(key)
    if sum(ctx.cost[i] for i in idx) != optimum:
        raise AssertionError("witness cost disagrees with optimum")
    removed = set(idx)
    rest = Graph.from_indices(g.n, [e for i, e in enumerate(g.edges) if i not in removed])
    if not components_within_bound(rest, ctx.h, ctx.w, ctx.hi_v):
        raise AssertionError("witness leaves an oversized component")
    return [g.edge_names(g.edges[i]) for i in idx]


def extract_witness(signature: ComponentSignature) -> list[tuple[str, str]]:
    """Lexicographically first optimal edge set from a root signature."""
    ctx = signature.ctx
    if not ctx.witness:
        raise RuntimeError("solve ran without witness recording")
    key = signature.best()
    if key is None:
        raise ValueError("no feasible state at the root")
    return _decode_witness(ctx, key, ctx.value_of(key))


def make_context(graph: Graph, spec: ProblemSpec, witness: bool = False) -> _Context:
    """Instance constants for driving the node transitions by hand."""
    return _Context(graph, spec, witness)
