"""Desk-scale versions of the two random constructions.

``theorem1_pipeline`` samples a sparse random digraph, deletes vertices until
the maximum total degree and the girth meet their targets, and records the
result as a :class:`ConstructionCertificate` that :func:`validate_certificate`
can recheck from the stored digraph alone.

``theorem2_audit`` looks for small vertex sets that are not 2-colourable.
Any such set contains a 3-critical one, which must sit inside the
(2,2)-core, so the exhaustive part of the audit only walks that core.
"""
from __future__ import annotations

import heapq
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional

from . import bounds
from .digraph import (
    CycleOverflowError,
    DEFAULT_CYCLE_CAP,
    Digraph,
    enumerate_short_cycles,
    format_edge_list,
    girth,
    in_out_core,
    parse_edge_list,
)
from .random_model import ModelParams, make_rng, p_theorem1, sample
from .solver import (
    BudgetExhausted,
    SolverBudget,
    k_colorable,
    max_acyclic_set_exact,
    pigeonhole_lower_bound,
    two_colorable_fast,
)

EXACT_ALPHA_THRESHOLD = 40
EXHAUSTIVE_SIZE_CAP = 8


# -- degree pruning ------------------------------------------------------------

def excess_degree(D: Digraph, delta: int) -> int:
    """Sum over vertices of max(0, total degree - delta)."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    return sum(max(0, D.total_degree(v) - delta) for v in range(D.n))


def _parent(D: Digraph, v: int) -> int:
    return v if D.parent_ids is None else D.parent_ids[v]


def reduce_max_degree(D: Digraph, delta: int) -> tuple[Digraph, frozenset[int]]:
    """Delete vertices, highest total degree first (ties: smallest id), until
    the maximum total degree is at most ``delta``.

    ``removed`` holds ids of ``D``; the returned digraph carries
    ``parent_ids`` back to them.
    """
    if delta < 1:
        raise ValueError("delta must be at least 1")
    deg = [D.total_degree(v) for v in range(D.n)]
    heap = [(-deg[v], v) for v in range(D.n) if deg[v] > delta]
    heapq.heapify(heap)
    removed: set[int] = set()
    while heap:
        neg, v = heapq.heappop(heap)
        if v in removed or -neg != deg[v]:
            continue
        if deg[v] <= delta:
            continue
        removed.add(v)
        for w in (*D.out_adj[v], *D.in_adj[v]):
            if w not in removed:
                deg[w] -= 1
                if deg[w] > delta:
                    heapq.heappush(heap, (-deg[w], w))
    return D.remove_vertices(removed), frozenset(removed)


def remove_short_cycles(
    D: Digraph, g: int, cap: int = DEFAULT_CYCLE_CAP
) -> tuple[Digraph, frozenset[int]]:
    """Greedy hitting set for all cycles shorter than ``g``.

    Repeatedly deletes the vertex lying on the most surviving short cycles
    (ties: smallest id).  Raises :class:`CycleOverflowError` when the
    enumeration passes ``cap``.
    """
    cycles = [c.vertices for c in enumerate_short_cycles(D, g, cap)]
    on_vertex: dict[int, list[int]] = {}
    for i, cyc in enumerate(cycles):
        for v in cyc:
            on_vertex.setdefault(v, []).append(i)
    count = {v: len(ids) for v, ids in on_vertex.items()}
    alive = [True] * len(cycles)
    left = len(cycles)
    removed: set[int] = set()
    while left:
        v = min(count, key=lambda x: (-count[x], x))
        removed.add(v)
        for i in on_vertex[v]:
            if alive[i]:
                alive[i] = False
                left -= 1
                for w in cycles[i]:
                    count[w] -= 1
        del count[v]
        for w in [w for w, c in count.items() if c == 0]:
            del count[w]
    return D.remove_vertices(removed), frozenset(removed)


# -- theorem 1 pipeline --------------------------------------------------------

@dataclass
class ConstructionCertificate:
    n: int
    delta: int
    g: int
    seed: int
    p: float
    removed_for_degree: list[int]
    removed_for_cycles: list[int]
    surviving_n: int
    surviving_vertices: list[int]
    surviving_digraph: str
    girth: Optional[int]
    max_degree: int
    verified_girth_ok: bool
    verified_maxdeg_ok: bool
    alpha_upper_used: Optional[float]
    alpha_provenance: Optional[str]
    chi_lower: Optional[int]
    chi_lower_heuristic: bool
    excess_degree: int
    short_cycles_found: Optional[int]
    removal_reference: dict = field(default_factory=dict)
    failure_stage: Optional[str] = None
    failure_detail: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.failure_stage is None and self.verified_girth_ok and self.verified_maxdeg_ok

    def digraph(self) -> Digraph:
        return parse_edge_list(self.surviving_digraph)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ConstructionCertificate":
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ConstructionCertificate":
        return cls.from_dict(json.loads(text))


def _girth_ok(value: Optional[int], g: int) -> bool:
    return value is None or value >= g


def theorem1_pipeline(
    delta: int,
    g: int,
    n: int,
    seed: int,
    exact_threshold: int = EXACT_ALPHA_THRESHOLD,
    budget: SolverBudget = SolverBudget(),
    cycle_cap: int = DEFAULT_CYCLE_CAP,
) -> ConstructionCertificate:
    """sample -> degree pruning -> short-cycle pruning -> verify -> chi bound."""
    if g < 3:
        raise ValueError("g must be at least 3")
    p = p_theorem1(delta, n)
    D = sample(ModelParams(n, p, seed))
    ex = excess_degree(D, delta)
    D1, removed_deg = reduce_max_degree(D, delta)
    reference = {
        "total_removed_budget_n_over_100": n / 100,
        "count_estimate_n_over_1000_plus_delta_g": n / 1000 + float(delta) ** g,
    }
    failure = None
    detail = None
    short_found: Optional[int] = None
    try:
        short_found = len(enumerate_short_cycles(D1, g, cycle_cap))
        D2, removed_local = remove_short_cycles(D1, g, cycle_cap)
        removed_cyc = frozenset(_parent(D1, v) for v in removed_local)
    except CycleOverflowError as exc:
        failure, detail = "remove_short_cycles", str(exc)
        D2, removed_cyc = D1, frozenset()

    survivors = [_parent(D2, v) for v in range(D2.n)]
    star = Digraph(D2.n, D2.arcs)
    gir = girth(star)
    maxdeg = star.max_total_degree()
    girth_ok = _girth_ok(gir, g)
    maxdeg_ok = maxdeg <= delta

    alpha = None
    provenance = None
    chi = None
    heuristic = True
    if failure is None:
        alpha, provenance = _alpha_upper(star, n, delta, exact_threshold, budget)
        heuristic = provenance != "exact"
        chi = 0 if star.n == 0 else pigeonhole_lower_bound(star, alpha)
        if not (girth_ok and maxdeg_ok):
            failure = "verify"
            detail = f"girth={gir} max_degree={maxdeg}"

    return ConstructionCertificate(
        n=n,
        delta=delta,
        g=g,
        seed=seed,
        p=p,
        removed_for_degree=sorted(removed_deg),
        removed_for_cycles=sorted(removed_cyc),
        surviving_n=star.n,
        surviving_vertices=survivors,
        surviving_digraph=format_edge_list(star),
        girth=gir,
        max_degree=maxdeg,
        verified_girth_ok=girth_ok,
        verified_maxdeg_ok=maxdeg_ok,
        alpha_upper_used=alpha,
        alpha_provenance=provenance,
        chi_lower=chi,
        chi_lower_heuristic=heuristic,
        excess_degree=ex,
        short_cycles_found=short_found,
        removal_reference=reference,
        failure_stage=failure,
        failure_detail=detail,
    )


def _alpha_upper(star: Digraph, n: int, delta: int, threshold: int, budget: SolverBudget):
    if star.n <= threshold:
        try:
            alpha, _ = max_acyclic_set_exact(star, budget)
            return max(alpha, 1), "exact"
        except BudgetExhausted:
            pass
    # alpha(D*) <= alpha(D) for the sampled D on n vertices
    return bounds.claim3_mas_bound(n, max(delta, 2)), "claim3_bound"


def validate_certificate(
    cert: ConstructionCertificate,
    resample: bool = True,
    budget: SolverBudget = SolverBudget(),
) -> list[str]:
    """Recompute every checkable field; return a list of mismatches (empty = valid)."""
    problems: list[str] = []
    try:
        star = cert.digraph()
    except ValueError as exc:
        return [f"surviving digraph unreadable: {exc}"]

    deg_set, cyc_set = set(cert.removed_for_degree), set(cert.removed_for_cycles)
    if deg_set & cyc_set:
        problems.append("removed sets overlap")
    if any(not 0 <= v < cert.n for v in deg_set | cyc_set):
        problems.append("removed vertex out of range")
    expected_survivors = [v for v in range(cert.n) if v not in deg_set | cyc_set]
    if cert.surviving_vertices != expected_survivors:
        problems.append("surviving_vertices is not the complement of the removed sets")
    if star.n != cert.surviving_n or len(cert.surviving_vertices) != star.n:
        problems.append(f"surviving_n {cert.surviving_n} != {star.n}")

    gir = girth(star)
    maxdeg = star.max_total_degree()
    if gir != cert.girth:
        problems.append(f"girth recorded {cert.girth}, recomputed {gir}")
    if _girth_ok(gir, cert.g) != cert.verified_girth_ok:
        problems.append("verified_girth_ok does not match recomputation")
    if maxdeg != cert.max_degree:
        problems.append(f"max_degree recorded {cert.max_degree}, recomputed {maxdeg}")
    if (maxdeg <= cert.delta) != cert.verified_maxdeg_ok:
        problems.append("verified_maxdeg_ok does not match recomputation")
    if cert.failure_stage is None:
        if not _girth_ok(gir, cert.g):
            problems.append(f"girth {gir} below {cert.g}")
        if maxdeg > cert.delta:
            problems.append(f"max degree {maxdeg} above {cert.delta}")
        problems.extend(_check_chi(cert, star, budget))

    if resample:
        D = sample(ModelParams(cert.n, p_theorem1(cert.delta, cert.n), cert.seed))
        if D.induced(expected_survivors) != star:
            problems.append("surviving digraph differs from the resampled D[survivors]")
        ex = excess_degree(D, cert.delta)
        if ex != cert.excess_degree:
            problems.append(f"excess degree recorded {cert.excess_degree}, recomputed {ex}")
        if len(deg_set) > ex:
            problems.append(f"{len(deg_set)} degree removals exceed ex(D) = {ex}")
    return problems


def _check_chi(cert, star: Digraph, budget: SolverBudget) -> list[str]:
    problems = []
    alpha = cert.alpha_upper_used
    if cert.alpha_provenance == "exact":
        true_alpha, _ = max_acyclic_set_exact(star, budget)
        if max(true_alpha, 1) != alpha:
            problems.append(f"alpha recorded {alpha}, exact {true_alpha}")
        if cert.chi_lower_heuristic:
            problems.append("exact alpha but chi_lower flagged heuristic")
    elif cert.alpha_provenance == "claim3_bound":
        expect = bounds.claim3_mas_bound(cert.n, max(cert.delta, 2))
        if alpha != expect:
            problems.append(f"alpha bound recorded {alpha}, recomputed {expect}")
        if not cert.chi_lower_heuristic:
            problems.append("bound-based chi_lower not flagged heuristic")
    else:
        problems.append(f"unknown alpha provenance {cert.alpha_provenance!r}")
        return problems
    if star.n == 0:
        expect_chi = 0
    elif isinstance(alpha, int):
        expect_chi = -(-star.n // alpha)
    else:
        expect_chi = math.ceil(star.n / alpha)
    if cert.chi_lower != expect_chi:
        problems.append(f"chi_lower recorded {cert.chi_lower}, recomputed {expect_chi}")
    return problems


# -- theorem 2 audit -----------------------------------------------------------

def two_two_core(D: Digraph, descending: bool = False) -> frozenset[int]:
    """Largest vertex set inducing min in-degree >= 2 and min out-degree >= 2."""
    return in_out_core(D, 2, 2, descending=descending)


def arcs_lower_bound_check(D: Digraph, T: Iterable[int]) -> bool:
    """True iff D[T] has at least 2|T| arcs."""
    members = set(T)
    if not members:
        raise ValueError("T must be nonempty")
    arcs = sum(1 for v in members for w in D.out_adj[v] if w in members)
    return arcs >= 2 * len(members)


def critical_subset(D: Digraph, S: Iterable[int], budget: SolverBudget = SolverBudget()) -> list[int]:
    """Shrink a non-2-colourable set to a 3-critical one by vertex deletion."""
    T = sorted(S)
    if k_colorable(D.induced(T), 2, budget) is not None:
        raise ValueError("set is 2-colourable")
    for v in list(T):
        rest = [u for u in T if u != v]
        if k_colorable(D.induced(rest), 2, budget) is None:
            T = rest
    return T


@dataclass
class AuditReport:
    n: int
    k: int
    eps: float
    seed: int
    eps_n: int
    exhaustive_size: int
    core_size: int
    core_vertices: list[int]
    subsets_checked: int = 0
    exhaustive_candidates: int = 0
    exhaustive_complete: bool = True
    random_checked: int = 0
    fast_certified: int = 0
    fast_disagreements: int = 0
    critical_sets: list[list[int]] = field(default_factory=list)
    arcs_check_failures: int = 0
    counterexample: Optional[list[int]] = None
    inconclusive: list[list[int]] = field(default_factory=list)
    small_eps_regime: bool = False
    status: str = "passed"

    def to_dict(self) -> dict:
        return asdict(self)


class _SearchLimit(Exception):
    pass


def _strongly_connected(D: Digraph, S: set[int]) -> bool:
    start = min(S)
    for adj in (D.out_adj, D.in_adj):
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in S and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(S):
            return False
    return True


def dense_subsets(
    D: Digraph,
    within: Iterable[int],
    max_size: int,
    node_limit: Optional[int] = None,
):
    """Yield every strongly connected T inside ``within`` with |T| <= max_size
    whose induced subdigraph has min in- and out-degree at least 2.

    Each set is produced once, as a sorted list.  The search fixes the
    smallest vertex v of T and grows T from v: while some member is short of
    out- (or in-) neighbours it branches on which candidate neighbour joins
    next; once no member is short it reports T and branches on out-arcs
    leaving T.  Raises ``_SearchLimit`` after ``node_limit`` search nodes.
    """
    pool = frozenset(within)
    out_adj, in_adj = D.out_adj, D.in_adj
    nodes = 0

    def grow(S: set[int], X: set[int], allowed: frozenset[int]):
        nonlocal nodes
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            raise _SearchLimit
        best = None
        need_max = 0
        for u in S:
            d_out = sum(1 for w in out_adj[u] if w in S)
            d_in = sum(1 for w in in_adj[u] if w in S)
            for deficit, adj in ((2 - d_out, out_adj), (2 - d_in, in_adj)):
                if deficit <= 0:
                    continue
                cands = [w for w in adj[u] if w in allowed and w not in S and w not in X]
                if len(cands) < deficit:
                    return
                need_max = max(need_max, deficit)
                if best is None or len(cands) < len(best):
                    best = cands
        if len(S) + need_max > max_size:
            return
        if best is None:
            if _strongly_connected(D, S):
                yield sorted(S)
            if len(S) == max_size:
                return
            best = sorted(
                {w for u in S for w in out_adj[u] if w in allowed and w not in S and w not in X}
            )
        excluded = set(X)
        for w in best:
            S.add(w)
            yield from grow(S, excluded, allowed)
            S.discard(w)
            excluded = excluded | {w}

    for v in sorted(pool):
        allowed = in_out_core(D, 2, 2, within=(u for u in pool if u >= v))
        if v not in allowed:
            continue
        yield from grow({v}, set(), allowed)


def theorem2_audit(
    D: Digraph,
    k: int,
    eps: float,
    subset_budget: int,
    seed: int,
    exhaustive_size: Optional[int] = None,
    budget: SolverBudget = SolverBudget(node_limit=200_000, time_limit=30.0),
    search_node_limit: Optional[int] = 20_000_000,
) -> AuditReport:
    """Look for a set of at most eps*n vertices that is not 2-colourable.

    Two passes: every strongly connected (2,2)-dense set inside the
    (2,2)-core up to ``exhaustive_size`` vertices (default
    min(eps*n, 8)) is solved exactly, then ``subset_budget`` random sets of
    3..eps*n vertices go through the fast certificate and are re-solved
    exactly.
    """
    eps_n = math.floor(eps * D.n)
    if eps <= 0 or eps_n < 3:
        raise ValueError("need eps > 0 and eps*n >= 3")
    if exhaustive_size is None:
        exhaustive_size = min(eps_n, EXHAUSTIVE_SIZE_CAP)
    core = two_two_core(D)
    report = AuditReport(
        n=D.n,
        k=k,
        eps=eps,
        seed=seed,
        eps_n=eps_n,
        exhaustive_size=exhaustive_size,
        core_size=len(core),
        core_vertices=sorted(core),
        small_eps_regime=eps < k ** -5,
    )

    def record_non_2col(S: list[int]) -> None:
        try:
            T = critical_subset(D, S, budget)
        except BudgetExhausted:
            report.inconclusive.append(sorted(S))
            return
        if T not in report.critical_sets:
            report.critical_sets.append(T)
            if not arcs_lower_bound_check(D, T):
                report.arcs_check_failures += 1
        if len(S) <= eps_n:
            if report.counterexample is None or len(S) < len(report.counterexample):
                report.counterexample = sorted(S)

    if core:
        try:
            for T in dense_subsets(D, core, exhaustive_size, search_node_limit):
                report.exhaustive_candidates += 1
                if not arcs_lower_bound_check(D, T):
                    report.arcs_check_failures += 1
                try:
                    if k_colorable(D.induced(T), 2, budget) is None:
                        record_non_2col(T)
                except BudgetExhausted:
                    report.inconclusive.append(T)
        except _SearchLimit:
            report.exhaustive_complete = False

    rng = make_rng(seed)
    for _ in range(subset_budget):
        size = int(rng.integers(3, eps_n + 1))
        S = sorted(int(x) for x in rng.choice(D.n, size=size, replace=False))
        report.random_checked += 1
        sub = D.induced(S)
        fast = two_colorable_fast(sub)
        try:
            exact = k_colorable(sub, 2, budget)
        except BudgetExhausted:
            report.inconclusive.append(S)
            continue
        if fast:
            report.fast_certified += 1
            if exact is None:
                report.fast_disagreements += 1
        if exact is None:
            record_non_2col(S)

    report.subsets_checked = report.exhaustive_candidates + report.random_checked
    if not core:
        report.status = "certified"
    elif report.counterexample is not None:
        report.status = "counterexample"
    elif report.inconclusive or not report.exhaustive_complete:
        report.status = "inconclusive"
    else:
        report.status = "passed"
    return report
