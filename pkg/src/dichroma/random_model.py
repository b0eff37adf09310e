"""Reproducible sampling of the random digraph D(n, p).

Every unordered pair {u, v} (u < v) is visited in lexicographic order and
consumes exactly one uniform U from a PCG64 stream: the arc u->v is present
when U < p, the arc v->u when p <= U < 2p, and neither otherwise.  So each
edge appears with probability 2p and, when present, each orientation is
equally likely.

Per-trial seeds are derived with ``numpy.random.SeedSequence`` from
``(master_seed, trial_index)``; both PCG64 and SeedSequence are fully
specified algorithms, so streams agree across platforms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .digraph import Digraph

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class ModelParams:
    n: int
    p: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")
        if not (0.0 <= self.p <= 0.5) or math.isnan(self.p):
            raise ValueError(f"p must lie in [0, 1/2], got {self.p}")
        if not (0 <= self.seed <= _SEED_MASK):
            raise ValueError("seed must be a 64-bit unsigned integer")


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit seed for stream ``index`` under ``master_seed``."""
    ss = np.random.SeedSequence([master_seed & _SEED_MASK, index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _SEED_MASK))


def _pair_from_index(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # row u covers linear indices [start[u], start[u] + n - 1 - u)
    rows = np.arange(n, dtype=np.int64)
    start = rows * (2 * n - rows - 1) // 2
    u = np.searchsorted(start, idx, side="right") - 1
    v = idx - start[u] + u + 1
    return u, v


def sample(params: ModelParams) -> Digraph:
    n, p = params.n, params.p
    n_pairs = n * (n - 1) // 2
    if n_pairs == 0 or p == 0.0:
        return Digraph(n)
    rng = make_rng(params.seed)
    draws = rng.random(n_pairs)
    hit = np.flatnonzero(draws < 2 * p)
    u, v = _pair_from_index(hit, n)
    forward = draws[hit] < p
    tails = np.where(forward, u, v)
    heads = np.where(forward, v, u)
    return Digraph(n, zip(tails.tolist(), heads.tolist()))


def p_theorem1(delta: float, n: int) -> float:
    """Edge parameter Delta / (4 e n) used for the girth construction."""
    if delta < 1 or n < 1:
        raise ValueError("need delta >= 1 and n >= 1")
    p = delta / (4 * math.e * n)
    if p > 0.5:
        raise ValueError(f"p = {p:.6g} exceeds 1/2; model undefined")
    return p


def p_theorem2(k: int, n: int) -> float:
    """Edge parameter k^2 / n used for the local 2-colourability construction."""
    if k < 1 or n < 1:
        raise ValueError("need k >= 1 and n >= 1")
    p = k * k / n
    if p > 0.5:
        raise ValueError(f"p = {p:.6g} exceeds 1/2; model undefined")
    return p


def random_digraph(n: int, arc_prob: float, seed: int) -> Digraph:
    """Each ordered pair (u, v), u != v, is an arc independently.

    Unlike :func:`sample` this model produces digons; it feeds the solver
    cross-checks, which must cover general digraphs.  Pairs are visited in
    lexicographic order of (u, v).
    """
    if not (0.0 <= arc_prob <= 1.0):
        raise ValueError(f"arc_prob must lie in [0, 1], got {arc_prob}")
    rng = make_rng(seed)
    draws = rng.random((n, n))
    arcs = [
        (u, v)
        for u in range(n)
        for v in range(n)
        if u != v and draws[u, v] < arc_prob
    ]
    return Digraph(n, arcs)


def digraph_from_code(n: int, code: int) -> Digraph:
    """Decode bit ``i`` of ``code`` as the i-th ordered pair in lex order."""
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    if not (0 <= code < 1 << len(pairs)):
        raise ValueError("code out of range")
    return Digraph(n, (pr for i, pr in enumerate(pairs) if code >> i & 1))
