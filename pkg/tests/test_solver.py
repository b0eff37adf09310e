import random

import pytest
from hypothesis import given, strategies as st

from dichroma import oracles
from dichroma.digraph import (
    Digraph,
    bidirected_complete,
    directed_cycle,
    is_acyclic_induced,
    transitive_tournament,
)
from dichroma.random_model import random_digraph
from dichroma.solver import (
    BudgetExhausted,
    ColoringAssignment,
    SolverBudget,
    chromatic_number_exact,
    greedy_coloring,
    k_colorable,
    max_acyclic_set_exact,
    min_fvs_exact,
    pigeonhole_lower_bound,
    two_colorable_fast,
)
from strategies import digraphs

TWO_DIGONS = Digraph(4, [(0, 1), (1, 0), (2, 3), (3, 2)])


def test_chromatic_examples():
    assert chromatic_number_exact(transitive_tournament(6))[0] == 1
    for n in range(2, 8):
        assert chromatic_number_exact(directed_cycle(n))[0] == 2
    k, col = chromatic_number_exact(bidirected_complete(4))
    assert k == 4 and col.is_valid(bidirected_complete(4))
    assert chromatic_number_exact(Digraph(0))[0] == 0
    assert chromatic_number_exact(Digraph(3))[0] == 1


def test_k_colorable_examples():
    C3 = directed_cycle(3)
    assert k_colorable(C3, 1) is None
    witness = k_colorable(C3, 2)
    assert witness is not None and witness.is_valid(C3)
    assert k_colorable(bidirected_complete(4), 3) is None
    with pytest.raises(ValueError):
        k_colorable(C3, 0)


def test_acyclic_set_examples():
    assert max_acyclic_set_exact(directed_cycle(7))[0] == 6
    assert max_acyclic_set_exact(transitive_tournament(5))[0] == 5
    for k in range(1, 6):
        assert max_acyclic_set_exact(bidirected_complete(k))[0] == 1


def test_fvs_examples():
    assert min_fvs_exact(directed_cycle(3))[0] == 1
    assert min_fvs_exact(TWO_DIGONS)[0] == 2
    assert min_fvs_exact(transitive_tournament(4)) == (0, frozenset())


def test_greedy_examples():
    assert greedy_coloring(transitive_tournament(5), [4, 2, 0, 1, 3]).k == 1
    for order in ([0, 1, 2], [2, 0, 1]):
        assert greedy_coloring(bidirected_complete(3), order).k == 3
    col = greedy_coloring(directed_cycle(4), [0, 1, 2, 3])
    assert col.colors == (0, 0, 0, 1)


def test_pigeonhole_examples():
    D = Digraph(10)
    assert pigeonhole_lower_bound(D, 3) == 4
    assert pigeonhole_lower_bound(D, 10) == 1
    assert pigeonhole_lower_bound(D, 2.5) == 4
    with pytest.raises(ValueError):
        pigeonhole_lower_bound(D, 0)


def test_two_colorable_fast_examples():
    assert two_colorable_fast(transitive_tournament(6))
    assert two_colorable_fast(directed_cycle(3))
    assert not two_colorable_fast(bidirected_complete(4))
    assert chromatic_number_exact(bidirected_complete(4))[0] == 4


def test_coloring_assignment_validity():
    C3 = directed_cycle(3)
    assert not ColoringAssignment((0, 0, 0)).is_valid(C3)
    assert not ColoringAssignment((0, 2, 0)).is_valid(C3)  # gap in colours
    assert not ColoringAssignment((0, 1)).is_valid(C3)
    assert ColoringAssignment((0, 1, 0)).classes() == [[0, 2], [1]]


@given(digraphs(max_n=6))
def test_matches_oracles(D):
    chi, col = chromatic_number_exact(D)
    alpha, keep = max_acyclic_set_exact(D)
    fvs, removed = min_fvs_exact(D)
    assert chi == oracles.chromatic_number_brute(D)
    assert alpha == oracles.max_acyclic_set_brute(D)
    assert fvs == oracles.min_fvs_brute(D)
    assert col.is_valid(D) and col.k == chi
    assert is_acyclic_induced(D, keep) and len(keep) == alpha
    assert is_acyclic_induced(D, [v for v in range(D.n) if v not in removed])
    assert alpha + fvs == D.n


@pytest.mark.parametrize("seed", range(40))
def test_seven_vertex_alpha_oracle(seed):
    D = random_digraph(7, 0.35, seed)
    assert max_acyclic_set_exact(D)[0] == oracles.max_acyclic_set_brute(D)


@given(digraphs(max_n=9))
def test_sandwich_and_fast_soundness(D):
    chi, _ = chromatic_number_exact(D)
    alpha, _ = max_acyclic_set_exact(D)
    order = list(range(D.n))
    greedy = greedy_coloring(D, order)
    assert greedy.is_valid(D)
    if D.n:
        assert pigeonhole_lower_bound(D, alpha) <= chi <= greedy.k
    if two_colorable_fast(D):
        assert k_colorable(D, 2) is not None
    assert (k_colorable(D, max(chi, 1)) is not None) and (chi <= 1 or k_colorable(D, chi - 1) is None)


@given(digraphs(max_n=8), st.data())
def test_monotone_under_induced(D, data):
    S = data.draw(st.sets(st.integers(0, max(D.n - 1, 0)), max_size=D.n)) if D.n else set()
    assert chromatic_number_exact(D.induced(S))[0] <= chromatic_number_exact(D)[0]


def test_larger_instances_consistent():
    rng = random.Random(1)
    for _ in range(15):
        n = rng.randint(15, 25)
        D = random_digraph(n, 0.2, rng.randrange(2**32))
        chi, col = chromatic_number_exact(D)
        alpha, keep = max_acyclic_set_exact(D)
        fvs, removed = min_fvs_exact(D)
        assert col.is_valid(D)
        assert alpha + fvs == n and keep.isdisjoint(removed)
        assert is_acyclic_induced(D, keep)
        assert pigeonhole_lower_bound(D, alpha) <= chi


def test_budget_exhaustion_is_reported():
    tiny = SolverBudget(node_limit=3, time_limit=60)
    D = bidirected_complete(7)
    with pytest.raises(BudgetExhausted) as info:
        chromatic_number_exact(D, tiny)
    assert info.value.lower is not None and info.value.upper == 7
    hard = random_digraph(30, 0.3, 0)
    with pytest.raises(BudgetExhausted) as info:
        min_fvs_exact(hard, tiny)
    assert info.value.lower <= info.value.upper
    with pytest.raises(BudgetExhausted) as info:
        max_acyclic_set_exact(hard, tiny)
    assert info.value.lower <= info.value.upper
    with pytest.raises(BudgetExhausted):
        k_colorable(bidirected_complete(7), 6, tiny)


def test_budget_validation():
    with pytest.raises(ValueError):
        SolverBudget(0, 1)
    with pytest.raises(ValueError):
        SolverBudget(1, 0)


def test_deterministic_witnesses():
    D = random_digraph(12, 0.3, 5)
    assert chromatic_number_exact(D) == chromatic_number_exact(D)
    assert min_fvs_exact(D) == min_fvs_exact(D)
