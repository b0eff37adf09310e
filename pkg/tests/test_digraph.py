import random

import pytest
from hypothesis import given, strategies as st

from dichroma.digraph import (
    CycleOverflowError,
    CycleWitness,
    Digraph,
    bidirected_complete,
    degrees,
    digirth,
    directed_cycle,
    directed_path,
    enumerate_short_cycles,
    format_edge_list,
    girth,
    in_out_core,
    is_acyclic,
    is_acyclic_induced,
    max_total_degree,
    parse_edge_list,
    read_edge_list,
    shortest_dicycle,
    strongly_connected_components,
    to_dot,
    transitive_tournament,
    write_edge_list,
)
from strategies import digraphs

DIGON = Digraph(2, [(0, 1), (1, 0)])
TT3 = Digraph(3, [(0, 1), (0, 2), (1, 2)])
C5_CHORD = Digraph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)])


def test_rejects_loops_parallel_and_range():
    with pytest.raises(ValueError):
        Digraph(2, [(0, 0)])
    with pytest.raises(ValueError):
        Digraph(2, [(0, 1), (0, 1)])
    with pytest.raises(ValueError):
        Digraph(2, [(0, 2)])
    with pytest.raises(ValueError):
        Digraph(-1)


def test_adjacency_mirrors_arcs():
    D = Digraph(4, [(2, 0), (0, 1), (1, 0), (3, 0)])
    assert D.out_adj[0] == (1,)
    assert D.in_adj[0] == (1, 2, 3)
    assert sum(map(len, D.out_adj)) == sum(map(len, D.in_adj)) == D.m == 4


def test_degrees_examples():
    assert degrees(DIGON, 0) == (1, 1, 2)
    for v in range(3):
        assert degrees(directed_cycle(3), v) == (1, 1, 2)
    assert degrees(Digraph(1), 0) == (0, 0, 0)
    with pytest.raises(ValueError):
        degrees(DIGON, 2)
    with pytest.raises(ValueError):
        degrees(DIGON, -1)


def test_max_total_degree_examples():
    assert max_total_degree(bidirected_complete(3)) == 4
    assert max_total_degree(directed_path(3)) == 2
    assert max_total_degree(Digraph(5)) == 0
    assert max_total_degree(Digraph(0)) == 0


def test_scc_examples():
    assert strongly_connected_components(directed_cycle(3)) == [[0, 1, 2]]
    assert sorted(strongly_connected_components(transitive_tournament(4))) == [[0], [1], [2], [3]]
    two = Digraph(4, [(0, 1), (1, 0), (2, 3), (3, 2)])
    assert sorted(strongly_connected_components(two)) == [[0, 1], [2, 3]]


def test_scc_topological_order():
    # 0 -> {1,2 cycle} -> 3
    D = Digraph(4, [(0, 1), (1, 2), (2, 1), (2, 3)])
    comps = strongly_connected_components(D)
    assert comps == [[0], [1, 2], [3]]


def test_is_acyclic_induced_examples():
    C3 = directed_cycle(3)
    assert not is_acyclic_induced(C3, [0, 1, 2])
    for pair in ([0, 1], [1, 2], [0, 2]):
        assert is_acyclic_induced(C3, pair)
    assert not is_acyclic_induced(DIGON, [0, 1])
    assert is_acyclic_induced(DIGON, [])


def test_girth_examples():
    assert girth(DIGON) == 2
    assert girth(TT3) == 3
    assert girth(directed_path(5)) is None
    assert girth(directed_cycle(6)) == 6


def test_digirth_examples():
    assert digirth(DIGON) == 2
    assert digirth(TT3) is None
    assert digirth(C5_CHORD) == 4


def test_shortest_dicycle_examples():
    assert len(shortest_dicycle(DIGON)) == 2
    cyc = shortest_dicycle(C5_CHORD)
    assert cyc.vertices == (0, 2, 3, 4)
    assert cyc.directed and cyc.is_valid_in(C5_CHORD)
    assert shortest_dicycle(transitive_tournament(5)) is None


def test_enumerate_short_cycles_examples():
    assert [c.vertices for c in enumerate_short_cycles(TT3, 4)] == [(0, 1, 2)]
    assert enumerate_short_cycles(directed_cycle(5), 5) == []
    assert len(enumerate_short_cycles(directed_cycle(5), 6)) == 1
    rng = random.Random(4)
    for _ in range(20):
        arcs = [(u, v) if rng.random() < 0.5 else (v, u) for u in range(4) for v in range(u + 1, 4)]
        assert len(enumerate_short_cycles(Digraph(4, arcs), 4)) == 4


def _brute_cycles(D, g):
    """Cycles of the underlying multigraph shorter than g, by permutations."""
    from itertools import combinations, permutations

    found = set()
    for u, v in D.arcs:
        if (v, u) in D.arcs:
            found.add(frozenset([(min(u, v), max(u, v))]))
    for size in range(3, g):
        for subset in combinations(range(D.n), size):
            first = subset[0]
            for rest in permutations(subset[1:]):
                cyc = (first,) + rest
                if cyc[1] > cyc[-1]:
                    continue
                if all(D.has_arc(a, b) or D.has_arc(b, a) for a, b in zip(cyc, cyc[1:] + cyc[:1])):
                    found.add(cyc)
    return len(found)


@given(digraphs(max_n=6), st.integers(3, 7))
def test_enumeration_matches_brute_force(D, g):
    cycles = enumerate_short_cycles(D, g)
    assert len(cycles) == _brute_cycles(D, g)
    assert all(c.is_valid_in(D) for c in cycles)
    assert len({c.vertices for c in cycles}) == len(cycles)
    assert cycles == sorted(cycles, key=lambda c: (len(c), c.vertices))


def test_enumeration_cap():
    D = bidirected_complete(6)
    with pytest.raises(CycleOverflowError) as info:
        enumerate_short_cycles(D, 6, cap=10)
    assert info.value.count > 10 and info.value.cap == 10
    with pytest.raises(ValueError):
        enumerate_short_cycles(D, 2)


@given(digraphs(max_n=7), st.data())
def test_acyclic_iff_no_digirth(D, data):
    S = data.draw(st.sets(st.integers(0, max(D.n - 1, 0)), max_size=D.n)) if D.n else set()
    assert is_acyclic_induced(D, S) == (digirth(D.induced(S)) is None)
    assert is_acyclic(D) == (digirth(D) is None)


@given(digraphs(max_n=7))
def test_girth_at_most_digirth(D):
    dg = digirth(D)
    if dg is not None:
        assert girth(D) is not None and girth(D) <= dg
        cyc = shortest_dicycle(D)
        assert len(cyc) == dg and cyc.is_valid_in(D)


@given(digraphs(max_n=7), st.integers(3, 8))
def test_enumeration_empty_iff_girth(D, g):
    gi = girth(D)
    assert (enumerate_short_cycles(D, g) == []) == (gi is None or gi >= g)


@given(digraphs(max_n=8), st.randoms(use_true_random=False))
def test_scc_relabel_invariance(D, rnd):
    perm = list(range(D.n))
    rnd.shuffle(perm)
    inverse = [0] * D.n
    for v, pv in enumerate(perm):
        inverse[pv] = v
    back = D.relabel(perm).relabel(inverse)
    assert back == D
    comps = strongly_connected_components(D)
    assert sorted(map(sorted, comps)) == sorted(map(sorted, strongly_connected_components(back)))
    relabelled = {frozenset(perm[v] for v in c) for c in comps}
    assert relabelled == {frozenset(c) for c in strongly_connected_components(D.relabel(perm))}
    assert sorted(v for c in comps for v in c) == list(range(D.n))


def test_induced_keeps_parent_ids():
    D = directed_cycle(6)
    sub = D.induced([5, 1, 2, 3])
    assert sub.parent_ids == (1, 2, 3, 5)
    assert sub.sorted_arcs() == [(0, 1), (1, 2)]
    subsub = sub.induced([1, 2, 3])
    assert subsub.parent_ids == (2, 3, 5)


def test_cycle_witness_validity():
    assert CycleWitness((0, 1), False).is_valid_in(DIGON)
    assert not CycleWitness((0, 1), False).is_valid_in(Digraph(2, [(0, 1)]))
    assert CycleWitness((0, 1, 2), False).is_valid_in(TT3)
    assert not CycleWitness((0, 1, 2), True).is_valid_in(TT3)
    assert not CycleWitness((0, 1, 1), True).is_valid_in(TT3)


def test_edge_list_round_trip(tmp_path):
    D = Digraph(5, [(0, 1), (1, 0), (3, 4), (4, 2)])
    text = format_edge_list(D)
    assert text.splitlines()[0] == "5 4"
    assert parse_edge_list(text) == D
    path = tmp_path / "d.txt"
    write_edge_list(D, path)
    assert read_edge_list(path) == D
    assert parse_edge_list("# comment\n3 1\n0 2  # arc\n") == Digraph(3, [(0, 2)])


@pytest.mark.parametrize("text", ["", "3\n", "3 2\n0 1\n", "3 1\n0 1 2\n", "2 1\n0 0\n", "2 1\n0 5\n"])
def test_edge_list_errors(text):
    with pytest.raises(ValueError):
        parse_edge_list(text)


def test_dot_export():
    dot = to_dot(Digraph(3, [(2, 0)]))
    assert dot.startswith("digraph D {")
    assert "  2 -> 0;" in dot and "  1;" in dot
    assert dot.rstrip().endswith("}")


def test_in_out_core_order_independent():
    rng = random.Random(9)
    for _ in range(50):
        n = rng.randint(0, 12)
        D = Digraph(n, [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < 0.3])
        core = in_out_core(D)
        assert core == in_out_core(D, descending=True)
        sub = D.induced(core)
        assert all(len(sub.out_adj[v]) >= 2 and len(sub.in_adj[v]) >= 2 for v in range(sub.n))
