"""Digraph representation and structural queries.

Vertices are dense integer ids ``0..n-1``.  A :class:`Digraph` is immutable
once built; adjacency lists are sorted so every traversal below is
deterministic.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

DEFAULT_CYCLE_CAP = 10**6


class CycleOverflowError(RuntimeError):
    """Raised when short-cycle enumeration passes its cap."""

    def __init__(self, count: int, cap: int):
        super().__init__(f"cycle enumeration exceeded cap {cap} (reached {count})")
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class CycleWitness:
    vertices: tuple[int, ...]
    directed: bool

    def __len__(self) -> int:
        return len(self.vertices)

    def is_valid_in(self, D: "Digraph") -> bool:
        vs = self.vertices
        if len(set(vs)) != len(vs) or len(vs) < 2:
            return False
        if not all(0 <= v < D.n for v in vs):
            return False
        pairs = list(zip(vs, vs[1:] + vs[:1]))
        if self.directed:
            return all(D.has_arc(u, v) for u, v in pairs)
        if len(vs) == 2:
            u, v = vs
            return D.has_arc(u, v) and D.has_arc(v, u)
        return all(D.has_arc(u, v) or D.has_arc(v, u) for u, v in pairs)


class Digraph:
    """Loopless digraph without parallel arcs (digons allowed).

    ``parent_ids`` is set on induced subdigraphs and maps each local id back
    to the id it had in the digraph it was cut from.
    """

    __slots__ = ("n", "arcs", "out_adj", "in_adj", "parent_ids")

    def __init__(
        self,
        n: int,
        arcs: Iterable[tuple[int, int]] = (),
        parent_ids: Optional[Sequence[int]] = None,
    ):
        if n < 0:
            raise ValueError(f"vertex count must be non-negative, got {n}")
        arc_set = set()
        for u, v in arcs:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"arc ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if (u, v) in arc_set:
                raise ValueError(f"parallel arc ({u}, {v})")
            arc_set.add((u, v))
        out_adj: list[list[int]] = [[] for _ in range(n)]
        in_adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in arc_set:
            out_adj[u].append(v)
            in_adj[v].append(u)
        self.n = n
        self.arcs = frozenset(arc_set)
        self.out_adj = tuple(tuple(sorted(a)) for a in out_adj)
        self.in_adj = tuple(tuple(sorted(a)) for a in in_adj)
        if parent_ids is not None:
            parent_ids = tuple(parent_ids)
            if len(parent_ids) != n:
                raise ValueError("parent_ids must have one entry per vertex")
        self.parent_ids = parent_ids

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, m={len(self.arcs)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and self.arcs == other.arcs

    def __hash__(self) -> int:
        return hash((self.n, self.arcs))

    @property
    def m(self) -> int:
        return len(self.arcs)

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.arcs

    def sorted_arcs(self) -> list[tuple[int, int]]:
        return sorted(self.arcs)

    def _check_vertex(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise ValueError(f"vertex {v} out of range for n={self.n}")

    def degrees(self, v: int) -> tuple[int, int, int]:
        """Return ``(d_out, d_in, d_total)`` for vertex ``v``."""
        self._check_vertex(v)
        d_out, d_in = len(self.out_adj[v]), len(self.in_adj[v])
        return d_out, d_in, d_out + d_in

    def total_degree(self, v: int) -> int:
        return len(self.out_adj[v]) + len(self.in_adj[v])

    def max_total_degree(self) -> int:
        return max((self.total_degree(v) for v in range(self.n)), default=0)

    def neighbors(self, v: int) -> list[int]:
        """Sorted neighbours of ``v`` in the underlying simple graph."""
        return sorted(set(self.out_adj[v]) | set(self.in_adj[v]))

    def induced(self, vertices: Iterable[int]) -> "Digraph":
        keep = sorted(set(vertices))
        for v in keep:
            self._check_vertex(v)
        index = {v: i for i, v in enumerate(keep)}
        arcs = [
            (index[u], index[w])
            for u in keep
            for w in self.out_adj[u]
            if w in index
        ]
        base = self.parent_ids
        parents = keep if base is None else [base[v] for v in keep]
        return Digraph(len(keep), arcs, parent_ids=parents)

    def remove_vertices(self, vertices: Iterable[int]) -> "Digraph":
        drop = set(vertices)
        return self.induced(v for v in range(self.n) if v not in drop)

    def relabel(self, perm: Sequence[int]) -> "Digraph":
        """Digraph with vertex ``v`` renamed to ``perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError("perm must be a permutation of the vertex ids")
        return Digraph(self.n, ((perm[u], perm[v]) for u, v in self.arcs))

    def reverse(self) -> "Digraph":
        return Digraph(self.n, ((v, u) for u, v in self.arcs))


# -- constructors used throughout tests and examples --------------------------

def directed_cycle(n: int) -> Digraph:
    return Digraph(n, ((i, (i + 1) % n) for i in range(n)))


def directed_path(n: int) -> Digraph:
    return Digraph(n, ((i, i + 1) for i in range(n - 1)))


def bidirected_complete(n: int) -> Digraph:
    return Digraph(n, ((u, v) for u in range(n) for v in range(n) if u != v))


def transitive_tournament(n: int) -> Digraph:
    return Digraph(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


# -- degree queries ------------------------------------------------------------

def degrees(D: Digraph, v: int) -> tuple[int, int, int]:
    return D.degrees(v)


def max_total_degree(D: Digraph) -> int:
    return D.max_total_degree()


# -- strongly connected components ---------------------------------------------

def strongly_connected_components(D: Digraph) -> list[list[int]]:
    """SCCs in topological order of the condensation (sources first).

    Iterative Tarjan; each component is returned sorted.
    """
    n = D.n
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0
    out_adj = D.out_adj

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            nbrs = out_adj[v]
            if i < len(nbrs):
                work[-1] = (v, i + 1)
                w = nbrs[i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                components.append(sorted(comp))
    # Tarjan emits sinks first
    components.reverse()
    return components


def is_acyclic(D: Digraph) -> bool:
    indeg = [len(a) for a in D.in_adj]
    queue = deque(v for v in range(D.n) if indeg[v] == 0)
    seen = 0
    while queue:
        v = queue.popleft()
        seen += 1
        for w in D.out_adj[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return seen == D.n


def is_acyclic_induced(D: Digraph, S: Iterable[int]) -> bool:
    """True iff ``D[S]`` has no directed cycle."""
    members = set(S)
    for v in members:
        D._check_vertex(v)
    indeg = {v: sum(1 for u in D.in_adj[v] if u in members) for v in members}
    queue = deque(v for v, d in indeg.items() if d == 0)
    seen = 0
    while queue:
        v = queue.popleft()
        seen += 1
        for w in D.out_adj[v]:
            if w in members:
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
    return seen == len(members)


# -- girth and digirth ---------------------------------------------------------

def _has_digon(D: Digraph) -> bool:
    return any((v, u) in D.arcs for u, v in D.arcs)


def girth(D: Digraph) -> Optional[int]:
    """Shortest cycle length in the underlying multigraph, ``None`` for a forest.

    A digon is a cycle of length 2.
    """
    if _has_digon(D):
        return 2
    nbrs = [D.neighbors(v) for v in range(D.n)]
    best: Optional[int] = None
    dist = [-1] * D.n
    parent = [-1] * D.n
    for root in range(D.n):
        touched = [root]
        dist[root] = 0
        parent[root] = -1
        queue = deque([root])
        while queue:
            x = queue.popleft()
            dx = dist[x]
            if best is not None and 2 * dx + 1 >= best:
                break
            for y in nbrs[x]:
                if dist[y] == -1:
                    dist[y] = dx + 1
                    parent[y] = x
                    touched.append(y)
                    queue.append(y)
                elif y != parent[x]:
                    length = dx + dist[y] + 1
                    if best is None or length < best:
                        best = length
        for v in touched:
            dist[v] = -1
        if best == 3:
            break
    return best


def shortest_dicycle(D: Digraph) -> Optional[CycleWitness]:
    """A shortest directed cycle, or ``None`` if ``D`` is acyclic.

    Among shortest cycles the one with the smallest minimum vertex is chosen,
    and among those the lexicographically smallest when read from that vertex.
    """
    n = D.n
    out_adj, in_adj = D.out_adj, D.in_adj
    best_len: Optional[int] = None
    best_start = -1
    dist = [-1] * n
    for s in range(n):
        # only cycles whose minimum vertex is s
        if not any(w > s for w in out_adj[s]):
            continue
        closers = {u for u in in_adj[s] if u > s}
        if not closers:
            continue
        dist[s] = 0
        touched = [s]
        queue = deque([s])
        found: Optional[int] = None
        while queue and found is None:
            x = queue.popleft()
            dx = dist[x]
            if best_len is not None and dx + 1 >= best_len:
                break
            if x in closers:
                found = dx + 1
                break
            for y in out_adj[x]:
                if y > s and dist[y] == -1:
                    dist[y] = dx + 1
                    touched.append(y)
                    queue.append(y)
        for v in touched:
            dist[v] = -1
        if found is not None and (best_len is None or found < best_len):
            best_len, best_start = found, s
            if best_len == 2:
                break
    if best_len is None:
        return None
    return CycleWitness(_lex_smallest_cycle(D, best_start, best_len), True)


def _lex_smallest_cycle(D: Digraph, s: int, length: int) -> tuple[int, ...]:
    # distances to s inside vertices >= s, on reversed arcs
    to_s = {s: 0}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        for y in D.in_adj[x]:
            if y > s and y not in to_s:
                to_s[y] = to_s[x] + 1
                queue.append(y)
    path = [s]
    cur = s
    for remaining in range(length - 1, 0, -1):
        cur = next(
            w for w in D.out_adj[cur] if w > s and to_s.get(w) == remaining
        )
        path.append(cur)
    return tuple(path)


def digirth(D: Digraph) -> Optional[int]:
    cyc = shortest_dicycle(D)
    return None if cyc is None else len(cyc)


# -- short cycle enumeration ---------------------------------------------------

def enumerate_short_cycles(
    D: Digraph, g: int, cap: int = DEFAULT_CYCLE_CAP
) -> list[CycleWitness]:
    """All cycles of the underlying multigraph with length < ``g``.

    Each cycle is reported once, starting at its smallest vertex with the
    smaller of the two neighbours second.  Output is sorted by
    ``(length, vertices)``.  Raises :class:`CycleOverflowError` past ``cap``.
    """
    if g < 3:
        raise ValueError(f"g must be at least 3, got {g}")
    found: list[tuple[int, ...]] = []
    for u, v in D.arcs:
        if u < v and (v, u) in D.arcs:
            found.append((u, v))
    if len(found) > cap:
        raise CycleOverflowError(len(found), cap)
    max_len = g - 1
    nbrs = [D.neighbors(v) for v in range(D.n)]
    for s in range(D.n):
        higher = [w for w in nbrs[s] if w > s]
        if len(higher) < 2:
            continue
        path = [s]
        on_path = {s}
        # stack of neighbour iterators
        stack = [iter(higher)]
        while stack:
            w = next(stack[-1], None)
            if w is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if w <= s or w in on_path:
                continue
            path.append(w)
            on_path.add(w)
            k = len(path)
            if k >= 3 and path[1] < w and s in nbrs[w]:
                # s-neighbours checked via sorted list membership
                found.append(tuple(path))
                if len(found) > cap:
                    raise CycleOverflowError(len(found), cap)
            if k < max_len:
                stack.append(iter(nbrs[w]))
            else:
                path.pop()
                on_path.discard(w)
    found.sort(key=lambda c: (len(c), c))
    return [CycleWitness(c, False) for c in found]


# -- I/O -----------------------------------------------------------------------

def parse_edge_list(text: str) -> Digraph:
    """Parse ``"n m"`` followed by ``m`` lines ``"u v"``; ``#`` starts a comment."""
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows:
        raise ValueError("empty edge list")
    header = rows[0]
    if len(header) != 2:
        raise ValueError(f"bad header line: {' '.join(header)!r}")
    n, m = int(header[0]), int(header[1])
    body = rows[1:]
    if len(body) != m:
        raise ValueError(f"header declares {m} arcs, found {len(body)}")
    arcs = []
    for row in body:
        if len(row) != 2:
            raise ValueError(f"bad arc line: {' '.join(row)!r}")
        arcs.append((int(row[0]), int(row[1])))
    return Digraph(n, arcs)


def format_edge_list(D: Digraph) -> str:
    lines = [f"{D.n} {D.m}"]
    lines.extend(f"{u} {v}" for u, v in D.sorted_arcs())
    return "\n".join(lines) + "\n"


def read_edge_list(path) -> Digraph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def write_edge_list(D: Digraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(D))


def to_dot(D: Digraph, name: str = "D") -> str:
    lines = [f"digraph {name} {{"]
    lines.extend(f"  {v};" for v in range(D.n))
    lines.extend(f"  {u} -> {v};" for u, v in D.sorted_arcs())
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- (in, out)-core peeling ----------------------------------------------------

def in_out_core(
    D: Digraph,
    min_in: int = 2,
    min_out: int = 2,
    within: Optional[Iterable[int]] = None,
    descending: bool = False,
) -> frozenset[int]:
    """Largest vertex set whose induced subdigraph has every in-degree
    ``>= min_in`` and every out-degree ``>= min_out``.

    Peeling is queue based; ``descending`` only changes the order in which
    the initial queue is seeded (the result does not depend on it).
    """
    alive = set(range(D.n)) if within is None else set(within)
    d_in = {v: sum(1 for u in D.in_adj[v] if u in alive) for v in alive}
    d_out = {v: sum(1 for w in D.out_adj[v] if w in alive) for v in alive}
    order = sorted(alive, reverse=descending)
    queue = deque(v for v in order if d_in[v] < min_in or d_out[v] < min_out)
    queued = set(queue)
    while queue:
        v = queue.popleft()
        alive.discard(v)
        for w in D.out_adj[v]:
            if w in alive:
                d_in[w] -= 1
                if d_in[w] < min_in and w not in queued:
                    queued.add(w)
                    queue.append(w)
        for u in D.in_adj[v]:
            if u in alive:
                d_out[u] -= 1
                if d_out[u] < min_out and u not in queued:
                    queued.add(u)
                    queue.append(u)
    return frozenset(alive)
