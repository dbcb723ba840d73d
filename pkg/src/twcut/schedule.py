"""Bottom-up evaluation of a rooted decomposition tree."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

from .decomposition import TreeDecomposition

R = TypeVar("R")


def evaluate_bottom_up(
    td: TreeDecomposition,
    step: Callable[[int, list], R],
    parallel: bool = False,
    workers: int | None = None,
) -> R:
    """Compute ``step(t, child_results)`` for every node, children first.

    Child results are released once their parent is done. With ``parallel``
    all nodes of equal height run concurrently; ``step`` must be pure so the
    outcome does not depend on the schedule.
    """
    order = td.postorder()
    results: dict[int, R] = {}
    if not parallel:
        for t in order:
            kids = [results.pop(c) for c in td.children[t]]
            results[t] = step(t, kids)
        return results[td.root]

    height: dict[int, int] = {}
    for t in order:
        height[t] = 1 + max((height[c] for c in td.children[t]), default=-1)
    levels: dict[int, list[int]] = {}
    for t in order:
        levels.setdefault(height[t], []).append(t)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for lvl in sorted(levels):
            nodes = levels[lvl]
            args = [(t, [results[c] for c in td.children[t]]) for t in nodes]
            outs = list(pool.map(lambda a: step(*a), args))
            for t, out in zip(nodes, outs):
                results[t] = out
                for c in td.children[t]:
                    del results[c]
    return results[td.root]
