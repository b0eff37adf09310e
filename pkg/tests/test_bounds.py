import math

import pytest

import bound_oracles as bo
from dichroma import bounds
from dichroma.bounds import (
    BoundReport,
    chi_lower_theorem1,
    claim3_mas_bound,
    critical_subset_term,
    eq1_bound,
    evaluate,
    excess_degree_expectation_bound,
    expected_cycles_of_length,
    mas_bound,
    mas_bound_applicable,
    short_cycle_total_bound,
)


def test_expected_cycles_examples():
    assert expected_cycles_of_length(4, 5) == 1
    assert expected_cycles_of_length(8, 3) == 8
    assert expected_cycles_of_length(16, 4) == 256
    with pytest.raises(ValueError):
        expected_cycles_of_length(8, 2)


def test_short_cycle_total_examples():
    assert short_cycle_total_bound(4, 7) == (4.0, 4096.0)
    assert short_cycle_total_bound(8, 4) == (8.0, 512.0)
    assert short_cycle_total_bound(16, 5) == (320.0, 65536.0)
    with pytest.raises(ValueError):
        short_cycle_total_bound(4, 3)


def test_short_cycle_total_below_cap_sweep():
    for delta in range(2, 200):
        for g in range(4, 13):
            total, cap = short_cycle_total_bound(delta, g)
            assert total <= cap


def test_excess_examples():
    assert excess_degree_expectation_bound(2000, 20) == pytest.approx(0.03814697265625, rel=1e-12)
    assert excess_degree_expectation_bound(2000, 11) == pytest.approx(10.7421875, rel=1e-12)
    assert excess_degree_expectation_bound(0, 7) == 0


def test_mas_examples():
    assert mas_bound(1000, 0.1) == pytest.approx(242.2162722286828, rel=1e-12)
    p = 1 - 1 / math.e
    assert mas_bound(100, p) == pytest.approx(2 * (math.log(100 * p) + 3 * math.e), rel=1e-12)
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(ValueError):
            mas_bound(100, bad)
    with pytest.raises(ValueError):
        mas_bound(5, 0.1)


def test_mas_monotone():
    ps = [0.02 * i for i in range(1, 50)]
    for n in (100, 1000, 10**5):
        vals = [mas_bound(n, p) for p in ps]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[-1] > 0
    for p in (0.05, 0.3, 0.9):
        vals = [mas_bound(n, p) for n in range(100, 5000, 97)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
    assert 0 < mas_bound(1000, 1 - 1e-12) < mas_bound(1000, 0.98)


def test_mas_applicability_flag():
    assert mas_bound_applicable(200, 0.1)
    assert not mas_bound_applicable(100, 0.1)
    rep = evaluate("mas_bound", n=100, p=0.1)
    assert rep.notes == {"conditional": True, "applicable": False}


def test_claim3_examples():
    # 4e*3000*ln16/16 evaluated exactly; a cruder hand value of 5654.9 is off in the fourth digit
    assert claim3_mas_bound(3000, 16) == pytest.approx(5652.50815609116, rel=1e-12)
    assert claim3_mas_bound(3000, math.e) == pytest.approx(12000.0, rel=1e-12)
    vals = [claim3_mas_bound(3000, d) for d in range(3, 500)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        claim3_mas_bound(10, 1.5)


def test_chi_lower_examples():
    assert chi_lower_theorem1(100) == pytest.approx(1.5976801130640936, rel=1e-12)
    assert chi_lower_theorem1(math.e) == pytest.approx(0.2, rel=1e-12)
    vals = [chi_lower_theorem1(d) for d in range(8, 1000)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_critical_subset_term_examples():
    assert critical_subset_term(10**6, 3, 3) == pytest.approx(1701e-6**3, rel=1e-12)
    assert critical_subset_term(10**6, 3, 3) == pytest.approx(4.92e-9, rel=1e-3)
    # base exactly one
    assert critical_subset_term(7 * 5 * 16, 2, 5) == 1.0
    assert critical_subset_term(10**4, 10, 2000) == math.inf
    with pytest.raises(ValueError):
        critical_subset_term(100, 3, 2)


@pytest.mark.parametrize("n", [500, 2000, 10**4])
@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("eps", [0.002, 0.01, 0.05])
def test_eq1_equals_brute_sweep(n, k, eps):
    hi = math.floor(eps * n)
    if hi < 3:
        assert eq1_bound(n, k, eps) == 0
        return
    brute = eps * n * max(critical_subset_term(n, k, t) for t in range(3, hi + 1))
    assert eq1_bound(n, k, eps) == pytest.approx(brute, rel=1e-12)


def test_eq1_endpoint_when_small():
    # with 7 eps k^4 < 1/e the maximum is at t = 3
    n, k, eps = 10**5, 2, 0.003
    assert 7 * eps * k**4 < 1 / math.e
    assert eq1_bound(n, k, eps) == pytest.approx(eps * n * critical_subset_term(n, k, 3))


@pytest.mark.parametrize("name", sorted(bo.GRIDS))
def test_against_high_precision_oracle(name):
    assert len(bo.GRIDS[name]) == 100
    assert bo.worst_relative_error(name, getattr(bounds, name)) <= 1e-9


def test_evaluate_wraps_reports():
    rep = evaluate("short_cycle_total_bound", delta=16, g=5)
    assert rep.theoretical == 320 and rep.notes["cap"] == 65536
    assert rep.inputs == {"delta": 16.0, "g": 5}
    rep = evaluate("expected_cycles_of_length", delta=8, l=3)
    assert rep.within() is None
    rep.attach(8.5, 0.2, 100)
    assert rep.within(3.0) and not rep.within(2.0)
    d = rep.to_dict()
    assert d["empirical_mean"] == 8.5 and d["trials"] == 100
    with pytest.raises(ValueError):
        evaluate("nope")
    with pytest.raises(ValueError):
        evaluate("mas_bound", n=10)
    with pytest.raises(ValueError):
        evaluate("mas_bound", n=10, p=0.5, q=1)


def test_reports_finite_and_nonnegative():
    for name, grid in bo.GRIDS.items():
        if name in ("critical_subset_term", "eq1_bound"):
            continue
        for params in grid:
            rep = evaluate(name, **params)
            assert isinstance(rep, BoundReport)
            assert math.isfinite(rep.theoretical) and rep.theoretical >= 0
