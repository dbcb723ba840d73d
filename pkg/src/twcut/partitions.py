"""Set partitions as restricted-growth strings (RGS).

An RGS ``a`` over positions ``0..n-1`` has ``a[0] == 0`` and
``a[i] <= max(a[:i]) + 1``; block ``j`` is ``{i : a[i] == j}``. Blocks are
therefore numbered by their smallest position.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator, Sequence


def restricted_growth_strings(n: int) -> Iterator[tuple[int, ...]]:
    """All set partitions of ``n`` positions, in lexicographic RGS order."""
    if n == 0:
        yield ()
        return
    a = [0] * n
    m = [0] * n  # m[i] = max(a[:i+1])

    def rec(i: int):
        if i == n:
            yield tuple(a)
            return
        for x in range(m[i - 1] + 2):
            a[i] = x
            m[i] = max(m[i - 1], x)
            yield from rec(i + 1)

    yield from rec(1)


@lru_cache(maxsize=None)
def partitions_of(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(restricted_growth_strings(n))


@lru_cache(maxsize=None)
def bell(n: int) -> int:
    """Bell number B_n via the Bell triangle."""
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def canonical(labels: Sequence) -> tuple[int, ...]:
    """Relabel arbitrary block labels into RGS form (first appearance order)."""
    seen: dict = {}
    return tuple(seen.setdefault(x, len(seen)) for x in labels)


def blocks(rgs: Sequence[int]) -> list[list[int]]:
    """Positions of each block, block ``j`` at index ``j``."""
    out: list[list[int]] = [[] for _ in range(max(rgs, default=-1) + 1)]
    for i, x in enumerate(rgs):
        out[x].append(i)
    return out


def num_blocks(rgs: Sequence[int]) -> int:
    return max(rgs, default=-1) + 1
