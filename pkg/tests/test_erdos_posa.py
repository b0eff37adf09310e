import random
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from dichroma import oracles
from dichroma.digraph import (
    CycleWitness,
    Digraph,
    bidirected_complete,
    digirth,
    directed_cycle,
    is_acyclic_induced,
    shortest_dicycle,
    transitive_tournament,
)
from dichroma.erdos_posa import (
    Decomposition,
    decompose,
    default_t,
    greedy_cycle_packing,
    max_cycle_packing,
    short_cycle_witness,
    verify_decomposition,
)
from dichroma.random_model import ModelParams, random_digraph, sample
from dichroma.solver import BudgetExhausted, SolverBudget, k_colorable, min_fvs_exact
from strategies import digraphs


def _digons(k):
    return Digraph(2 * k, [a for i in range(k) for a in ((2 * i, 2 * i + 1), (2 * i + 1, 2 * i))])


def _brute_packing(D):
    """Largest number of vertex-disjoint directed cycles, by exhaustive search."""
    cycles = []
    for size in range(2, D.n + 1):
        for S in combinations(range(D.n), size):
            sub = D.induced(S)
            if not is_acyclic_induced(sub, range(sub.n)) and all(
                is_acyclic_induced(sub, [v for v in range(sub.n) if v != x]) for x in range(sub.n)
            ):
                cycles.append(frozenset(S))  # vertex-minimal cyclic sets hold a spanning cycle
    best = 0

    def go(i, used, count):
        nonlocal best
        best = max(best, count)
        for j in range(i, len(cycles)):
            if not cycles[j] & used:
                go(j + 1, used | cycles[j], count + 1)

    go(0, frozenset(), 0)
    return best


def test_greedy_examples():
    assert len(greedy_cycle_packing(_digons(3), 3)) == 3
    assert len(greedy_cycle_packing(directed_cycle(5), 2)) == 1
    assert greedy_cycle_packing(transitive_tournament(6), 4) == []
    with pytest.raises(ValueError):
        greedy_cycle_packing(directed_cycle(3), 0)


def test_decompose_examples():
    dec = decompose(_digons(4), 4)
    assert dec.kind == "cycles" and len(dec.cycles) == 4
    dec = decompose(directed_cycle(7), 2)
    assert dec.kind == "fvs" and len(dec.fvs) == 1
    assert verify_decomposition(directed_cycle(7), dec) == []
    with pytest.raises(ValueError):
        decompose(directed_cycle(3), 0)


def test_shortest_dicycle_examples():
    assert len(shortest_dicycle(Digraph(2, [(0, 1), (1, 0)]))) == 2
    C = Digraph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)])
    assert len(shortest_dicycle(C)) == 4
    assert shortest_dicycle(transitive_tournament(4)) is None


@given(digraphs(max_n=7), st.integers(1, 4))
def test_greedy_packing_properties(D, t):
    cycles = greedy_cycle_packing(D, t)
    used = set()
    for c in cycles:
        assert c.directed and c.is_valid_in(D)
        assert not used & set(c.vertices)
        used |= set(c.vertices)
    if len(cycles) == t:
        assert digirth(D) <= D.n / t


@given(digraphs(max_n=7))
def test_max_packing_matches_brute_force(D):
    best = _brute_packing(D)
    got = max_cycle_packing(D, D.n + 1)
    assert len(got) == best
    used = set()
    for c in got:
        assert c.is_valid_in(D) and not used & set(c.vertices)
        used |= set(c.vertices)


@given(digraphs(max_n=8), st.integers(1, 4))
def test_decompose_verified(D, t):
    dec = decompose(D, t)
    assert verify_decomposition(D, dec) == []
    if dec.kind == "fvs" and dec.exact_packing_used:
        # exact search found fewer than t disjoint cycles
        assert len(max_cycle_packing(D, t)) < t
        assert len(dec.fvs) == oracles.min_fvs_brute(D)


def test_verify_decomposition_catches_errors():
    D = _digons(2)
    bad = Decomposition("cycles", 2, cycles=[CycleWitness((0, 1), True), CycleWitness((1, 0), True)])
    assert verify_decomposition(D, bad)
    short = Decomposition("cycles", 3, cycles=[CycleWitness((0, 1), True)])
    assert verify_decomposition(D, short)
    wrong = Decomposition("cycles", 1, cycles=[CycleWitness((0, 2), True)])
    assert verify_decomposition(D, wrong)
    assert verify_decomposition(D, Decomposition("fvs", 1, fvs=frozenset({0})))
    assert verify_decomposition(D, Decomposition("what", 1))
    assert verify_decomposition(D, Decomposition("fvs", 1, fvs=frozenset({0, 2}))) == []


def test_decomposition_to_dict():
    d = decompose(_digons(2), 2).to_dict()
    assert d["kind"] == "cycles" and d["cycles"] == [[0, 1], [2, 3]] and d["fvs"] == []


def test_short_cycle_witness_examples():
    cyc, trace = short_cycle_witness(bidirected_complete(4))
    assert len(cyc) == 2 and cyc.is_valid_in(bidirected_complete(4))
    assert trace["branch"] in ("packing", "fvs")
    with pytest.raises(ValueError):
        short_cycle_witness(directed_cycle(6))


def test_default_t():
    assert default_t(1) == 1 and default_t(12) == 3 and default_t(16) == 4


def _three_chromatic(rng):
    while True:
        n = rng.randint(5, 11)
        if rng.random() < 0.5:
            D = sample(ModelParams(n, 0.5, rng.randrange(2**63)))
        else:
            D = random_digraph(n, 0.5, rng.randrange(2**63))
        if k_colorable(D, 2) is None:
            return D


@pytest.mark.parametrize("seed", range(30))
def test_witness_and_fvs_key_step(seed):
    rng = random.Random(seed)
    D = _three_chromatic(rng)
    for t in (1, 2, default_t(D.n)):
        cyc, trace = short_cycle_witness(D, t=t)
        assert cyc.directed and cyc.is_valid_in(D)
        assert len(cyc) <= trace["bound"]
        if trace["branch"] == "packing":
            assert trace["bound"] == D.n / t
    size, S = min_fvs_exact(D)
    inner = shortest_dicycle(D.induced(sorted(S)))
    assert inner is not None and len(inner) <= size


def test_fvs_branch_fires():
    # digraph with chi >= 3 whose only disjoint cycles are few: t large forces the fvs branch
    rng = random.Random(5)
    D = _three_chromatic(rng)
    cyc, trace = short_cycle_witness(D, t=D.n)
    assert trace["branch"] == "fvs"
    assert len(cyc) <= trace["fvs_size"]


def test_budget_exhaustion():
    tiny = SolverBudget(node_limit=2, time_limit=10)
    D = random_digraph(18, 0.4, 2)
    with pytest.raises(BudgetExhausted):
        max_cycle_packing(D, 9, tiny)
    with pytest.raises(BudgetExhausted):
        decompose(D, 9, tiny)
