"""Exact and heuristic solvers for acyclic colourings and feedback vertex sets.

Internally every search works on bitmask adjacency (Python ints), which is
fast enough for the few-dozen-vertex instances the exact routines target.
Budget exhaustion raises :class:`BudgetExhausted` carrying the best bounds
known at that point; it never yields a wrong answer.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .digraph import Digraph, in_out_core, strongly_connected_components


@dataclass(frozen=True)
class SolverBudget:
    node_limit: int = 10_000_000
    time_limit: float = 120.0

    def __post_init__(self):
        if self.node_limit <= 0 or self.time_limit <= 0:
            raise ValueError("budget limits must be positive")


class BudgetExhausted(RuntimeError):
    """The search ran out of budget; ``lower``/``upper`` bracket the answer."""

    def __init__(self, what: str, lower: Optional[int] = None, upper: Optional[int] = None):
        super().__init__(f"{what}: budget exhausted (bounds [{lower}, {upper}])")
        self.what = what
        self.lower = lower
        self.upper = upper


@dataclass(frozen=True)
class ColoringAssignment:
    colors: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(set(self.colors))

    def classes(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for v, c in enumerate(self.colors):
            out.setdefault(c, []).append(v)
        return [out[c] for c in sorted(out)]

    def is_valid(self, D: Digraph) -> bool:
        from .digraph import is_acyclic_induced

        if len(self.colors) != D.n:
            return False
        used = sorted(set(self.colors))
        if used != list(range(len(used))):
            return False
        return all(is_acyclic_induced(D, cls) for cls in self.classes())


class _Meter:
    __slots__ = ("budget", "nodes", "deadline")

    def __init__(self, budget: SolverBudget):
        self.budget = budget
        self.nodes = 0
        self.deadline = time.monotonic() + budget.time_limit

    def tick(self) -> bool:
        self.nodes += 1
        if self.nodes > self.budget.node_limit:
            return False
        if self.nodes & 1023 == 0 and time.monotonic() > self.deadline:
            return False
        return True


class _OutOfBudget(Exception):
    pass


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _BitGraph:
    """Bitmask view of a digraph restricted to a vertex subset."""

    def __init__(self, D: Digraph):
        self.n = D.n
        self.out = [sum(1 << w for w in D.out_adj[v]) for v in range(D.n)]
        self.inn = [sum(1 << u for u in D.in_adj[v]) for v in range(D.n)]

    def closes_cycle(self, cls: int, v: int) -> bool:
        """Would adding ``v`` to acyclic set ``cls`` create a directed cycle?"""
        target = self.inn[v] & cls
        if not target:
            return False
        out = self.out
        reach = out[v] & cls
        frontier = reach
        while frontier:
            if reach & target:
                return True
            nxt = 0
            for w in _bits(frontier):
                nxt |= out[w]
            frontier = nxt & cls & ~reach
            reach |= frontier
        return bool(reach & target)

    def is_acyclic(self, mask: int) -> bool:
        rem = mask
        inn = self.inn
        while rem:
            sources = 0
            for v in _bits(rem):
                if not inn[v] & rem:
                    sources |= 1 << v
            if not sources:
                return False
            rem &= ~sources
        return True

    def trim(self, mask: int) -> int:
        """Drop vertices with no in- or out-neighbour in the set, repeatedly."""
        out, inn = self.out, self.inn
        while True:
            drop = 0
            for v in _bits(mask):
                if not out[v] & mask or not inn[v] & mask:
                    drop |= 1 << v
            if not drop:
                return mask
            mask &= ~drop

    def shortest_cycle(self, mask: int) -> Optional[list[int]]:
        """Shortest directed cycle inside ``mask`` (vertex list) or ``None``."""
        out, inn = self.out, self.inn
        best: Optional[list[int]] = None
        for s in _bits(mask):
            closers = inn[s] & mask
            if not closers:
                continue
            layers = [1 << s]
            seen = 1 << s
            frontier = 1 << s
            cap = len(best) - 1 if best is not None else mask.bit_count()
            hit = False
            while len(layers) + 1 <= cap:
                nxt = 0
                for w in _bits(frontier):
                    nxt |= out[w]
                frontier = nxt & mask & ~seen
                if not frontier:
                    break
                seen |= frontier
                layers.append(frontier)
                if frontier & closers:
                    hit = True
                    break
            if not hit:
                continue
            # walk back from a closer in the last layer
            u = (frontier & closers & -(frontier & closers)).bit_length() - 1
            path = [u]
            for layer in reversed(layers[1:-1]):
                cand = inn[path[-1]] & layer
                path.append((cand & -cand).bit_length() - 1)
            path.append(s)
            path.reverse()
            if best is None or len(path) < len(best):
                best = path
                if len(best) == 2:
                    return best
        return best

    def cycle_packing(self, mask: int) -> int:
        """Size of a greedy vertex-disjoint packing of directed cycles."""
        count = 0
        mask = self.trim(mask)
        while mask:
            cyc = self.shortest_cycle(mask)
            if cyc is None:
                break
            count += 1
            for v in cyc:
                mask &= ~(1 << v)
            mask = self.trim(mask)
        return count

    def sccs(self, mask: int) -> list[int]:
        """Strongly connected components of the subdigraph on ``mask``."""
        comps = []
        rem = mask
        out, inn = self.out, self.inn
        while rem:
            v = (rem & -rem).bit_length() - 1
            fwd = self._reach(v, rem, out)
            bwd = self._reach(v, rem, inn)
            comp = fwd & bwd
            comps.append(comp)
            rem &= ~comp
        return comps

    @staticmethod
    def _reach(v: int, mask: int, adj: list[int]) -> int:
        reach = 1 << v
        frontier = reach
        while frontier:
            nxt = 0
            for w in _bits(frontier):
                nxt |= adj[w]
            frontier = nxt & mask & ~reach
            reach |= frontier
        return reach


# -- greedy colouring ----------------------------------------------------------

def greedy_coloring(D: Digraph, order: Optional[Sequence[int]] = None) -> ColoringAssignment:
    """Give each vertex, in ``order``, the smallest colour keeping its class acyclic."""
    if order is None:
        order = range(D.n)
    order = list(order)
    if sorted(order) != list(range(D.n)):
        raise ValueError("order must be a permutation of the vertices")
    bg = _BitGraph(D)
    classes: list[int] = []
    colors = [0] * D.n
    for v in order:
        for c, cls in enumerate(classes):
            if not bg.closes_cycle(cls, v):
                classes[c] = cls | 1 << v
                colors[v] = c
                break
        else:
            colors[v] = len(classes)
            classes.append(1 << v)
    return ColoringAssignment(tuple(colors))


def _degree_order(D: Digraph, vertices: Iterable[int]) -> list[int]:
    return sorted(vertices, key=lambda v: (-D.total_degree(v), v))


# -- k-colourability -----------------------------------------------------------

def _color_component(
    bg: _BitGraph, order: list[int], k: int, meter: _Meter
) -> Optional[dict[int, int]]:
    """Backtracking search for an acyclic k-colouring of the listed vertices."""
    classes = [0] * k
    assign: dict[int, int] = {}
    m = len(order)

    def go(i: int, used: int) -> bool:
        if not meter.tick():
            raise _OutOfBudget
        if i == m:
            return True
        v = order[i]
        bit = 1 << v
        for c in range(min(used + 1, k)):
            if bg.closes_cycle(classes[c], v):
                continue
            classes[c] |= bit
            assign[v] = c
            if go(i + 1, max(used, c + 1)):
                return True
            classes[c] &= ~bit
        return False

    return dict(assign) if go(0, 0) else None


def _nontrivial_sccs(D: Digraph) -> list[list[int]]:
    return [c for c in strongly_connected_components(D) if len(c) > 1]


def _merge(D: Digraph, parts: list[dict[int, int]]) -> ColoringAssignment:
    colors = [0] * D.n
    for part in parts:
        for v, c in part.items():
            colors[v] = c
    return ColoringAssignment(tuple(colors))


def k_colorable(
    D: Digraph, k: int, budget: SolverBudget = SolverBudget()
) -> Optional[ColoringAssignment]:
    """A valid colouring with at most ``k`` colours, or ``None`` if none exists.

    Raises :class:`BudgetExhausted` when the search cannot finish.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    meter = _Meter(budget)
    bg = _BitGraph(D)
    parts = []
    try:
        for comp in _nontrivial_sccs(D):
            res = _color_component(bg, _degree_order(D, comp), k, meter)
            if res is None:
                return None
            parts.append(res)
    except _OutOfBudget:
        raise BudgetExhausted("k_colorable") from None
    return _merge(D, parts)


def chromatic_number_exact(
    D: Digraph, budget: SolverBudget = SolverBudget()
) -> tuple[int, ColoringAssignment]:
    """Dichromatic number and an optimal colouring.

    Each strongly connected component is solved separately by iterative
    deepening on k, starting from 2 and stopping below the greedy bound.
    """
    if D.n == 0:
        return 0, ColoringAssignment(())
    meter = _Meter(budget)
    bg = _BitGraph(D)
    parts: list[dict[int, int]] = []
    best = 1
    pending_upper = 1
    comps = _nontrivial_sccs(D)
    for comp in comps:
        sub = D.induced(comp)
        greedy = greedy_coloring(sub, _degree_order(sub, range(sub.n)))
        pending_upper = max(pending_upper, greedy.k)
    try:
        for comp in comps:
            order = _degree_order(D, comp)
            sub = D.induced(comp)
            greedy = greedy_coloring(sub, _degree_order(sub, range(sub.n)))
            found = None
            for k in range(max(2, best), greedy.k):
                found = _color_component(bg, order, k, meter)
                if found is not None:
                    break
            if found is None:
                found = {comp[i]: c for i, c in enumerate(greedy.colors)}
            best = max(best, max(found.values()) + 1)
            parts.append(found)
    except _OutOfBudget:
        raise BudgetExhausted("chromatic_number", lower=best, upper=pending_upper) from None
    return best, _merge(D, parts)


# -- feedback vertex sets ------------------------------------------------------

def _greedy_fvs(bg: _BitGraph, mask: int) -> int:
    chosen = 0
    mask = bg.trim(mask)
    while mask:
        v = max(
            _bits(mask),
            key=lambda x: ((bg.out[x] & mask).bit_count() * (bg.inn[x] & mask).bit_count(), -x),
        )
        chosen |= 1 << v
        mask = bg.trim(mask & ~(1 << v))
    return chosen


def _fvs_search(bg: _BitGraph, mask: int, keep: int, bound: int, meter: _Meter) -> Optional[int]:
    """Minimum FVS of ``mask`` avoiding ``keep`` with size < ``bound``, else ``None``."""
    if not meter.tick():
        raise _OutOfBudget
    mask = bg.trim(mask)
    if not mask:
        return 0
    if bound <= 0:
        return None
    comps = [c for c in bg.sccs(mask) if c & (c - 1)]
    if len(comps) > 1:
        lbs = [bg.cycle_packing(c) for c in comps]
        total = 0
        for i, c in enumerate(comps):
            rest = sum(lbs[i + 1:])
            res = _fvs_search(bg, c, keep & c, bound - total.bit_count() - rest, meter)
            if res is None:
                return None
            total |= res
        return total
    if comps:
        mask = comps[0]
    if bg.cycle_packing(mask) >= bound:
        return None
    cycle = bg.shortest_cycle(mask)
    choices = [v for v in cycle if not keep >> v & 1]
    # try high-degree vertices first
    choices.sort(key=lambda x: (-(bg.out[x] & mask).bit_count() * (bg.inn[x] & mask).bit_count(), x))
    best: Optional[int] = None
    kept = keep
    for v in choices:
        res = _fvs_search(bg, mask & ~(1 << v), kept, bound - 1, meter)
        if res is not None:
            best = res | 1 << v
            bound = best.bit_count()
        kept |= 1 << v
        if not bg.is_acyclic(kept & mask):
            break
    return best


def min_fvs_exact(
    D: Digraph, budget: SolverBudget = SolverBudget()
) -> tuple[int, frozenset[int]]:
    """Minimum feedback vertex set by branching on shortest directed cycles."""
    bg = _BitGraph(D)
    meter = _Meter(budget)
    full = (1 << D.n) - 1
    greedy = _greedy_fvs(bg, full)
    try:
        res = _fvs_search(bg, full, 0, greedy.bit_count(), meter)
    except _OutOfBudget:
        lower = bg.cycle_packing(full)
        raise BudgetExhausted("min_fvs", lower=lower, upper=greedy.bit_count()) from None
    chosen = greedy if res is None else res
    witness = frozenset(_bits(chosen))
    return len(witness), witness


def max_acyclic_set_exact(
    D: Digraph, budget: SolverBudget = SolverBudget()
) -> tuple[int, frozenset[int]]:
    """Maximum acyclic set, the complement of a minimum feedback vertex set."""
    try:
        size, fvs = min_fvs_exact(D, budget)
    except BudgetExhausted as exc:
        raise BudgetExhausted(
            "max_acyclic_set", lower=D.n - exc.upper, upper=D.n - exc.lower
        ) from None
    keep = frozenset(v for v in range(D.n) if v not in fvs)
    return D.n - size, keep


# -- cheap bounds --------------------------------------------------------------

def pigeonhole_lower_bound(D: Digraph, alpha_upper: float) -> int:
    """ceil(n / alpha_upper): every colour class is an acyclic set."""
    if alpha_upper < 1:
        raise ValueError("alpha_upper must be at least 1")
    if isinstance(alpha_upper, int):
        return -(-D.n // alpha_upper)
    return math.ceil(D.n / alpha_upper)


def two_colorable_fast(D: Digraph) -> bool:
    """True certifies chi(D) <= 2; False means "unknown".

    A 3-critical subdigraph has minimum in- and out-degree at least 2, so it
    lives inside the (2,2)-core.  An empty core rules one out.
    """
    return not in_out_core(D, 2, 2)
