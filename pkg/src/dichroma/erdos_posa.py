"""Cycle packings versus feedback vertex sets.

For a requested t, :func:`decompose` returns either t vertex-disjoint
directed cycles or a feedback vertex set.  :func:`short_cycle_witness` turns
that dichotomy into a short directed cycle for digraphs that are not
2-colourable: a packing of t cycles has a member of length <= n/t, and a
feedback set S must itself contain a directed cycle (otherwise S and V - S
would be a 2-colouring), which has length <= |S|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .digraph import CycleWitness, Digraph, is_acyclic_induced, shortest_dicycle
from .solver import (
    BudgetExhausted,
    SolverBudget,
    _Meter,
    k_colorable,
    min_fvs_exact,
)

EXACT_PACKING_LIMIT = 20

__all__ = [
    "Decomposition",
    "decompose",
    "greedy_cycle_packing",
    "max_cycle_packing",
    "short_cycle_witness",
    "shortest_dicycle",
    "verify_decomposition",
]


@dataclass
class Decomposition:
    kind: str  # "cycles" or "fvs"
    t_requested: int
    cycles: list[CycleWitness] = field(default_factory=list)
    fvs: frozenset[int] = frozenset()
    exact_packing_used: bool = False

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "t_requested": self.t_requested,
            "cycles": [list(c.vertices) for c in self.cycles],
            "fvs": sorted(self.fvs),
            "exact_packing_used": self.exact_packing_used,
        }


def greedy_cycle_packing(D: Digraph, t: int) -> list[CycleWitness]:
    """Up to t disjoint directed cycles: take a shortest one, delete it, repeat."""
    if t < 1:
        raise ValueError("t must be at least 1")
    found: list[CycleWitness] = []
    current = D.induced(range(D.n))
    while len(found) < t:
        cyc = shortest_dicycle(current)
        if cyc is None:
            break
        ids = current.parent_ids
        found.append(CycleWitness(tuple(ids[v] for v in cyc.vertices), True))
        drop = set(cyc.vertices)
        current = current.induced(v for v in range(current.n) if v not in drop)
    return found


class _PackingLimit(Exception):
    pass


def max_cycle_packing(
    D: Digraph, t: int, budget: SolverBudget = SolverBudget()
) -> list[CycleWitness]:
    """Exact search for t disjoint directed cycles; returns the largest
    packing found (size t if one exists, otherwise a maximum packing).

    Branches on a vertex v: either v is unused, or v lies on a packed cycle,
    which may be taken chordless without loss.
    """
    meter = _Meter(budget)
    out, inn = D.out_adj, D.in_adj

    def chordless_cycles_through(v: int, alive: set[int]):
        # no arcs among the cycle's vertices other than the cycle's own
        path = [v]
        on = {v}

        def extend():
            last = path[-1]
            for w in out[last]:
                if w not in alive or w in on:
                    continue
                if any(u in on and u != last for u in inn[w]):
                    continue
                back = [x for x in out[w] if x in on]
                if back and back != [v]:
                    continue
                path.append(w)
                on.add(w)
                if back:
                    yield tuple(path)
                else:
                    yield from extend()
                path.pop()
                on.discard(w)

        yield from extend()

    best: list[tuple[int, ...]] = []

    def trim(alive: set[int]) -> set[int]:
        alive = set(alive)
        changed = True
        while changed:
            changed = False
            for x in list(alive):
                if not any(w in alive for w in out[x]) or not any(u in alive for u in inn[x]):
                    alive.discard(x)
                    changed = True
        return alive

    def search(alive: set[int], chosen: list[tuple[int, ...]]):
        nonlocal best
        if not meter.tick():
            raise _PackingLimit
        if len(chosen) > len(best):
            best = list(chosen)
        if len(best) >= t:
            return
        alive = trim(alive)
        if not alive:
            return
        sub = D.induced(sorted(alive))
        cyc = shortest_dicycle(sub)
        if cyc is None:
            return
        if len(chosen) + len(alive) // len(cyc) <= len(best):
            return
        v = sub.parent_ids[cyc.vertices[0]]
        for c in chordless_cycles_through(v, alive):
            chosen.append(c)
            search(alive - set(c), chosen)
            chosen.pop()
            if len(best) >= t:
                return
        search(alive - {v}, chosen)

    try:
        search(set(range(D.n)), [])
    except _PackingLimit:
        raise BudgetExhausted("max_cycle_packing", lower=len(best)) from None
    return [CycleWitness(c, True) for c in best[:t]]


def decompose(
    D: Digraph,
    t: int,
    budget: SolverBudget = SolverBudget(),
    exact_limit: int = EXACT_PACKING_LIMIT,
) -> Decomposition:
    """t disjoint directed cycles if found, otherwise a minimum feedback set.

    Without the exact packing step (n > exact_limit) a ``fvs`` answer only
    means the greedy packing fell short, not that no t-packing exists.
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    cycles = greedy_cycle_packing(D, t)
    if len(cycles) >= t:
        return Decomposition("cycles", t, cycles=cycles)
    exact_used = False
    packing_failed = False
    if D.n <= exact_limit:
        try:
            exact = max_cycle_packing(D, t, budget)
            exact_used = True
            if len(exact) >= t:
                return Decomposition("cycles", t, cycles=exact, exact_packing_used=True)
        except BudgetExhausted:
            packing_failed = True
    try:
        _, fvs = min_fvs_exact(D, budget)
    except BudgetExhausted:
        if packing_failed:
            raise BudgetExhausted("decompose") from None
        raise
    return Decomposition("fvs", t, fvs=fvs, exact_packing_used=exact_used)


def verify_decomposition(D: Digraph, dec: Decomposition) -> list[str]:
    """Independent recheck; returns the problems found (empty = valid)."""
    problems = []
    if dec.kind == "cycles":
        if len(dec.cycles) < dec.t_requested:
            problems.append(f"only {len(dec.cycles)} cycles for t={dec.t_requested}")
        used: set[int] = set()
        for c in dec.cycles:
            if not c.directed or not c.is_valid_in(D):
                problems.append(f"{c.vertices} is not a directed cycle")
            if used & set(c.vertices):
                problems.append(f"{c.vertices} overlaps an earlier cycle")
            used |= set(c.vertices)
    elif dec.kind == "fvs":
        rest = [v for v in range(D.n) if v not in dec.fvs]
        if not is_acyclic_induced(D, rest):
            problems.append("digraph minus fvs still has a directed cycle")
    else:
        problems.append(f"unknown kind {dec.kind!r}")
    return problems


def default_t(n: int) -> int:
    return max(1, math.isqrt(n))


def short_cycle_witness(
    D: Digraph,
    budget: SolverBudget = SolverBudget(),
    t: Optional[int] = None,
) -> tuple[CycleWitness, dict]:
    """A directed cycle in a digraph with dichromatic number at least 3,
    plus a trace of which branch produced it and the length bound it obeys.
    """
    if k_colorable(D, 2, budget) is not None:
        raise ValueError("digraph is 2-colourable; a short-cycle witness needs chi >= 3")
    if t is None:
        t = default_t(D.n)
    dec = decompose(D, t, budget)
    if dec.kind == "cycles":
        cyc = min(dec.cycles, key=lambda c: (len(c), c.vertices))
        trace = {"branch": "packing", "t": t, "bound": D.n / t, "length": len(cyc)}
        return cyc, trace
    S = sorted(dec.fvs)
    sub = D.induced(S)
    inner = shortest_dicycle(sub)
    if inner is None:
        raise RuntimeError("feedback set is acyclic although chi(D) >= 3")
    cyc = CycleWitness(tuple(sub.parent_ids[v] for v in inner.vertices), True)
    trace = {
        "branch": "fvs",
        "t": t,
        "bound": len(S),
        "fvs_size": len(S),
        "length": len(cyc),
    }
    return cyc, trace
