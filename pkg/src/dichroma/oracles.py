"""Brute-force reference values for tiny digraphs.

These deliberately share no code with :mod:`dichroma.solver`: acyclicity is
decided by a plain recursive DFS over the arc set, and every quantity is
found by exhaustive enumeration.  Only use them for n <= 8 or so.
"""
from __future__ import annotations

from itertools import combinations
from typing import Iterator, Sequence

from .digraph import Digraph


def has_dicycle(arcs: frozenset, vertices: Sequence[int]) -> bool:
    members = set(vertices)
    succ = {v: [w for (u, w) in arcs if u == v and w in members] for v in members}
    state = dict.fromkeys(members, 0)

    def visit(v):
        state[v] = 1
        for w in succ[v]:
            if state[w] == 1 or (state[w] == 0 and visit(w)):
                return True
        state[v] = 2
        return False

    return any(state[v] == 0 and visit(v) for v in sorted(members))


def set_partitions(n: int) -> Iterator[list[int]]:
    """Restricted growth strings of length n (one per set partition)."""
    if n == 0:
        yield []
        return
    word = [0] * n

    def rec(i, top):
        if i == n:
            yield list(word)
            return
        for c in range(top + 2):
            word[i] = c
            yield from rec(i + 1, max(top, c))

    yield from rec(1, 0)


def chromatic_number_brute(D: Digraph) -> int:
    if D.n == 0:
        return 0
    best = D.n
    for word in set_partitions(D.n):
        k = max(word) + 1
        if k >= best:
            continue
        blocks = [[v for v in range(D.n) if word[v] == c] for c in range(k)]
        if not any(has_dicycle(D.arcs, b) for b in blocks):
            best = k
    return best


def max_acyclic_set_brute(D: Digraph) -> int:
    for size in range(D.n, -1, -1):
        for subset in combinations(range(D.n), size):
            if not has_dicycle(D.arcs, subset):
                return size
    return 0


def min_fvs_brute(D: Digraph) -> int:
    for size in range(D.n + 1):
        for removed in combinations(range(D.n), size):
            rest = [v for v in range(D.n) if v not in removed]
            if not has_dicycle(D.arcs, rest):
                return size
    return D.n
