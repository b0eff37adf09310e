"""Seeded Monte Carlo experiments with CSV + JSON reports.

An experiment is a named trial function plus a summariser.  A run writes

* ``trials.csv``: one row per trial, columns fixed per experiment
  (``trial_index, seed, status`` first, then ``detail`` and ``digest``, a
  hash of the other fields that exposes hand-edited rows), rows sorted by
  trial index;
* ``summary.json``: the config, per-column mean/stderr over ``ok`` rows,
  bound reports and the pass/fail checks.

Trial ``i`` only ever sees ``derive_seed(master_seed, i)``, and aggregates use
``math.fsum`` (exactly rounded, so order independent); results therefore do
not depend on the number of worker processes.

Columns per experiment:

E1  arcs, N_l for 3 <= l < g, short_total
E2  arcs, max_degree, ex, removed_degree
E3  arcs, alpha, fvs, chi_pigeonhole
E4  surviving_n, removed_degree, removed_cycles, removed_total, ex,
    short_cycles, girth, max_degree, girth_ok, maxdeg_ok, alpha_upper,
    alpha_exact, chi_lower, stage_ok, validator_ok
E5  arcs, core_size, exhaustive_candidates, exhaustive_complete,
    random_checked, fast_certified, fast_disagreements, critical_found,
    arcs_check_failures, counterexample_size, audit_status, small_eps_regime
E6  attempts, n, arcs, witness_len, witness_ok, branch, bound, within_bound,
    fvs_min, fvs_cycle_len, key_step_ok
E7  code, n, arcs, chi, chi_oracle, alpha, alpha_oracle, fvs, fvs_oracle,
    greedy_k, pigeonhole, fast_2col, chi_match, alpha_match, duality_ok,
    witness_ok, sandwich_ok, fast_sound
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional

from . import bounds, constructions, oracles
from .digraph import Digraph, enumerate_short_cycles, shortest_dicycle
from .erdos_posa import short_cycle_witness
from .random_model import (
    ModelParams,
    derive_seed,
    digraph_from_code,
    make_rng,
    p_theorem1,
    p_theorem2,
    random_digraph,
    sample,
)
from .solver import (
    BudgetExhausted,
    SolverBudget,
    chromatic_number_exact,
    greedy_coloring,
    k_colorable,
    max_acyclic_set_exact,
    min_fvs_exact,
    pigeonhole_lower_bound,
    two_colorable_fast,
)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
THREADS_ENV = "DICHROMA_THREADS"
SIGMAS = 3.0


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict = field(default_factory=dict)
    trials: int = 1
    master_seed: int = 0
    node_limit: int = 10_000_000
    time_limit: float = 120.0
    output_path: str = "out"
    parallelism: Optional[int] = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; choose from {sorted(EXPERIMENTS)}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        exp = EXPERIMENTS[self.experiment]
        merged = dict(exp.defaults)
        unknown = set(self.params) - set(merged)
        if unknown:
            raise ValueError(f"{self.experiment} does not take {sorted(unknown)}")
        merged.update(self.params)
        self.params = merged
        if exp.validate is not None:
            exp.validate(self)

    @property
    def budget(self) -> SolverBudget:
        return SolverBudget(self.node_limit, self.time_limit)

    def to_dict(self) -> dict:
        data = asdict(self)
        data.pop("parallelism")
        data.pop("output_path")
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config fields {sorted(extra)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class TrialRecord:
    trial_index: int
    seed: int
    status: str
    measured: dict
    detail: str = ""


@dataclass
class Experiment:
    name: str
    defaults: dict
    columns: Callable[[dict], list[tuple[str, type]]]
    trial: Callable[[dict, int, int, SolverBudget], dict]
    summarize: Callable[[dict, list[dict]], tuple[list, list]]
    validate: Optional[Callable[[ExperimentConfig], None]] = None


# -- formatting ----------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(text: str, kind: type):
    if text == "":
        return None
    if kind is bool:
        return text == "1"
    if kind is int:
        return int(text)
    if kind is float:
        return float(text)
    return text


def _base_columns() -> list[tuple[str, type]]:
    return [("trial_index", int), ("seed", int), ("status", str)]


def all_columns(exp: Experiment, params: dict) -> list[tuple[str, type]]:
    return _base_columns() + exp.columns(params) + [("detail", str), ("digest", str)]


def row_digest(row: dict[str, str], columns) -> str:
    text = "\x1f".join(row.get(name, "") for name, _ in columns if name != "digest")
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def record_to_row(rec: TrialRecord, columns) -> dict[str, str]:
    values = {"trial_index": rec.trial_index, "seed": rec.seed, "status": rec.status, "detail": rec.detail}
    values.update(rec.measured)
    row = {name: _fmt(values.get(name)) for name, _ in columns if name != "digest"}
    row["digest"] = row_digest(row, columns)
    return row


def parse_row(row: dict[str, str], columns) -> dict:
    return {name: _parse(row.get(name, ""), kind) for name, kind in columns}


# -- aggregation ---------------------------------------------------------------

def mean_stderr(values: list[float]) -> tuple[Optional[float], Optional[float]]:
    if not values:
        return None, None
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2 for x in values) / (n - 1)
    return mean, math.sqrt(var / n)


def aggregate(rows: list[dict], columns) -> dict:
    ok = [r for r in rows if r["status"] == "ok"]
    out = {}
    skip = {"trial_index", "seed"}
    for name, kind in columns:
        if kind not in (int, float, bool) or name in skip:
            continue
        vals = [float(r[name]) for r in ok if r[name] is not None]
        mean, se = mean_stderr(vals)
        out[name] = {"mean": mean, "stderr": se, "count": len(vals)}
    return out


def _check(name: str, passed: bool, hard: bool, detail: str = "") -> dict:
    return {"name": name, "hard": hard, "passed": bool(passed), "detail": detail}


def _ok_rows(rows):
    return [r for r in rows if r["status"] == "ok"]


def _status_check(rows) -> dict:
    failed = [r["trial_index"] for r in rows if r["status"] == "failed"]
    return _check("no_failed_trials", not failed, False, f"failed trials: {failed[:10]}")


# -- E1: short cycles ------------------------------------------------------------

def _e1_columns(params):
    return [("arcs", int)] + [(f"N_{l}", int) for l in range(3, params["g"])] + [("short_total", int)]


def _e1_trial(params, index, seed, budget):
    n, delta, g = params["n"], params["delta"], params["g"]
    D = sample(ModelParams(n, p_theorem1(delta, n), seed))
    cycles = enumerate_short_cycles(D, g, params["cycle_cap"])
    counts = {f"N_{l}": 0 for l in range(3, g)}
    for c in cycles:
        counts[f"N_{len(c)}"] += 1
    return {"arcs": D.m, **counts, "short_total": len(cycles)}


def _e1_summary(params, rows):
    ok = _ok_rows(rows)
    delta, g = params["delta"], params["g"]
    reports, checks = [], [_status_check(rows)]
    for l in range(3, g):
        mean, se = mean_stderr([r[f"N_{l}"] for r in ok])
        rep = bounds.evaluate("expected_cycles_of_length", delta=delta, l=l)
        if mean is not None:
            rep.attach(mean, se, len(ok))
        reports.append(rep)
        checks.append(_check(f"mean_N_{l}_within_bound", bool(rep.within(SIGMAS)), True,
                             f"mean={mean} bound={rep.theoretical} se={se}"))
    if g >= 4:
        total = bounds.evaluate("short_cycle_total_bound", delta=delta, g=g)
        mean, se = mean_stderr([r["short_total"] for r in ok])
        if mean is not None:
            total.attach(mean, se, len(ok))
        reports.append(total)
        cap = float(delta) ** g
        frac = sum(r["short_total"] <= cap for r in ok) / max(len(ok), 1)
        checks.append(_check("freq_short_cycles_at_most_delta_pow_g", frac >= 1 - 1 / delta, False,
                             f"fraction={frac} reference={1 - 1 / delta}"))
    return reports, checks


# -- E2: excess degree ------------------------------------------------------------

def _e2_columns(params):
    return [("arcs", int), ("max_degree", int), ("ex", int), ("removed_degree", int)]


def _e2_trial(params, index, seed, budget):
    n, delta = params["n"], params["delta"]
    D = sample(ModelParams(n, p_theorem1(delta, n), seed))
    _, removed = constructions.reduce_max_degree(D, delta)
    return {
        "arcs": D.m,
        "max_degree": D.max_total_degree(),
        "ex": constructions.excess_degree(D, delta),
        "removed_degree": len(removed),
    }


def _e2_summary(params, rows):
    ok = _ok_rows(rows)
    n, delta = params["n"], params["delta"]
    rep = bounds.evaluate("excess_degree_expectation_bound", n=n, delta=delta)
    mean, se = mean_stderr([r["ex"] for r in ok])
    if mean is not None:
        rep.attach(mean, se, len(ok))
    bad = [r["trial_index"] for r in ok if r["removed_degree"] > r["ex"]]
    frac = sum(r["ex"] <= n / 1000 for r in ok) / max(len(ok), 1)
    checks = [
        _status_check(rows),
        _check("mean_ex_within_bound", bool(rep.within(SIGMAS)), True,
               f"mean={mean} bound={rep.theoretical} se={se}"),
        _check("removed_at_most_ex_every_trial", not bad, True, f"violations: {bad[:10]}"),
        _check("freq_ex_at_most_n_over_1000", frac >= 0.5, False, f"fraction={frac}"),
    ]
    return [rep], checks


# -- E3: maximum acyclic sets ----------------------------------------------------

def _e3_p(params) -> float:
    if params.get("delta") is not None:
        return p_theorem1(params["delta"], params["n"])
    return float(params["p"])


def _e3_columns(params):
    return [("arcs", int), ("alpha", int), ("fvs", int), ("chi_pigeonhole", int)]


def _e3_trial(params, index, seed, budget):
    n = params["n"]
    D = sample(ModelParams(n, _e3_p(params), seed))
    alpha, _ = max_acyclic_set_exact(D, budget)
    return {"arcs": D.m, "alpha": alpha, "fvs": n - alpha,
            "chi_pigeonhole": pigeonhole_lower_bound(D, max(alpha, 1))}


def _e3_summary(params, rows):
    ok = _ok_rows(rows)
    n, p = params["n"], _e3_p(params)
    mean, se = mean_stderr([r["alpha"] for r in ok])
    reports, checks = [], [_status_check(rows)]
    if n * p >= 1:
        rep = bounds.evaluate("mas_bound", n=n, p=p)
        rep.notes["applicable"] = bounds.mas_bound_applicable(n, p, params["mas_threshold"])
        if mean is not None:
            rep.attach(mean, se, len(ok))
        frac = sum(r["alpha"] <= rep.theoretical for r in ok) / max(len(ok), 1)
        rep.notes["fraction_alpha_within"] = frac
        reports.append(rep)
        checks.append(_check("freq_alpha_within_mas_bound", frac >= 0.5, False,
                             f"fraction={frac} conditional on np>=threshold: {rep.notes['applicable']}"))
    if params.get("delta") is not None and params["delta"] >= 2:
        rep = bounds.evaluate("claim3_mas_bound", n=n, delta=params["delta"])
        if mean is not None:
            rep.attach(mean, se, len(ok))
        frac = sum(r["alpha"] <= rep.theoretical for r in ok) / max(len(ok), 1)
        rep.notes["fraction_alpha_within"] = frac
        reports.append(rep)
        checks.append(_check("freq_alpha_within_claim3_bound", frac >= 0.5, False, f"fraction={frac}"))
    return reports, checks


def _e3_validate(cfg):
    prm = cfg.params
    if prm.get("delta") is None and prm.get("p") is None:
        raise ValueError("E3 needs either p or delta")


# -- E4: theorem 1 pipeline ----------------------------------------------------

def _e4_columns(params):
    return [
        ("surviving_n", int), ("removed_degree", int), ("removed_cycles", int),
        ("removed_total", int), ("ex", int), ("short_cycles", int), ("girth", int),
        ("max_degree", int), ("girth_ok", bool), ("maxdeg_ok", bool),
        ("alpha_upper", float), ("alpha_exact", bool), ("chi_lower", int),
        ("stage_ok", bool), ("validator_ok", bool),
    ]


def _e4_trial(params, index, seed, budget):
    cert = constructions.theorem1_pipeline(
        params["delta"], params["g"], params["n"], seed,
        exact_threshold=params["exact_threshold"], budget=budget,
        cycle_cap=params["cycle_cap"],
    )
    problems = constructions.validate_certificate(cert, resample=True, budget=budget)
    removed_total = len(cert.removed_for_degree) + len(cert.removed_for_cycles)
    return {
        "surviving_n": cert.surviving_n,
        "removed_degree": len(cert.removed_for_degree),
        "removed_cycles": len(cert.removed_for_cycles),
        "removed_total": removed_total,
        "ex": cert.excess_degree,
        "short_cycles": cert.short_cycles_found,
        "girth": cert.girth,
        "max_degree": cert.max_degree,
        "girth_ok": cert.verified_girth_ok,
        "maxdeg_ok": cert.verified_maxdeg_ok,
        "alpha_upper": None if cert.alpha_upper_used is None else float(cert.alpha_upper_used),
        "alpha_exact": cert.alpha_provenance == "exact",
        "chi_lower": cert.chi_lower,
        "stage_ok": cert.ok,
        "validator_ok": not problems,
        "_detail": "; ".join(problems) or (cert.failure_detail or ""),
    }


def _e4_summary(params, rows):
    ok = _ok_rows(rows)
    n, delta = params["n"], params["delta"]
    invalid = [r["trial_index"] for r in ok if not r["validator_ok"]]
    completed = sum(bool(r["stage_ok"]) for r in ok)
    frac = completed / len(rows)
    over_ex = [r["trial_index"] for r in ok if r["removed_degree"] > r["ex"]]
    within_budget = sum(r["removed_total"] <= n / 100 for r in ok) / max(len(ok), 1)
    rep = bounds.evaluate("chi_lower_theorem1", delta=delta)
    mean, se = mean_stderr([r["chi_lower"] for r in ok if r["chi_lower"] is not None])
    if mean is not None:
        rep.attach(mean, se, len(ok))
    checks = [
        _status_check(rows),
        _check("every_certificate_validates", not invalid, True, f"invalid: {invalid[:10]}"),
        _check("completion_fraction", frac >= params["min_success_fraction"], True,
               f"{completed}/{len(rows)} without stage failure"),
        _check("removed_degree_at_most_ex", not over_ex, True, f"violations: {over_ex[:10]}"),
        _check("freq_removed_at_most_n_over_100", within_budget >= 0.5, False, f"fraction={within_budget}"),
    ]
    return [rep], checks


# -- E5: theorem 2 audit ---------------------------------------------------------

def _e5_columns(params):
    return [
        ("arcs", int), ("core_size", int), ("exhaustive_candidates", int),
        ("exhaustive_complete", bool), ("random_checked", int), ("fast_certified", int),
        ("fast_disagreements", int), ("critical_found", int), ("arcs_check_failures", int),
        ("counterexample_size", int), ("audit_status", str), ("small_eps_regime", bool),
    ]


def _e5_trial(params, index, seed, budget):
    n, k = params["n"], params["k"]
    D = sample(ModelParams(n, p_theorem2(k, n), seed))
    rep = constructions.theorem2_audit(
        D, k, params["eps"], params["subset_budget"], seed,
        exhaustive_size=params["exhaustive_size"], budget=budget,
        search_node_limit=params["search_node_limit"],
    )
    out = {
        "arcs": D.m,
        "core_size": rep.core_size,
        "exhaustive_candidates": rep.exhaustive_candidates,
        "exhaustive_complete": rep.exhaustive_complete,
        "random_checked": rep.random_checked,
        "fast_certified": rep.fast_certified,
        "fast_disagreements": rep.fast_disagreements,
        "critical_found": len(rep.critical_sets),
        "arcs_check_failures": rep.arcs_check_failures,
        "counterexample_size": None if rep.counterexample is None else len(rep.counterexample),
        "audit_status": rep.status,
        "small_eps_regime": rep.small_eps_regime,
    }
    if rep.status == "inconclusive":
        out["_status"] = "undecided"
        out["_detail"] = f"{len(rep.inconclusive)} undecided subsets; exhaustive_complete={rep.exhaustive_complete}"
    return out


def _e5_summary(params, rows):
    ok = _ok_rows(rows)
    disagreements = sum(r["fast_disagreements"] for r in ok)
    arcs_fail = sum(r["arcs_check_failures"] for r in ok)
    found = sum(r["counterexample_size"] is not None for r in ok)
    n, k, eps = params["n"], params["k"], params["eps"]
    rep = bounds.evaluate("eq1_bound", n=n, k=k, eps=eps)
    rep.attach(found / max(len(ok), 1), 0.0, len(ok))
    rep.notes["empirical"] = "fraction of trials with a counterexample"
    checks = [
        _status_check(rows),
        _check("fast_path_sound", disagreements == 0, True, f"disagreements={disagreements}"),
        _check("critical_sets_have_2t_arcs", arcs_fail == 0, True, f"failures={arcs_fail}"),
        _check("no_undecided_audits", len(ok) == len(rows), True,
               f"{len(rows) - len(ok)} trials not ok"),
        _check("freq_no_counterexample", found == 0, False, f"trials with counterexample: {found}"),
    ]
    return [rep], checks


# -- E6: short directed cycles in 3-chromatic digraphs -----------------------------

def _e6_columns(params):
    return [
        ("attempts", int), ("n", int), ("arcs", int), ("witness_len", int),
        ("witness_ok", bool), ("branch", str), ("bound", float), ("within_bound", bool),
        ("fvs_min", int), ("fvs_cycle_len", int), ("key_step_ok", bool),
    ]


def _e6_trial(params, index, seed, budget):
    rng = make_rng(seed)
    for attempt in range(1, params["max_attempts"] + 1):
        n = int(rng.integers(params["n_min"], params["n_max"] + 1))
        sub_seed = int(rng.integers(0, 2**63))
        if _e6_oriented(params["model"], index):
            D = sample(ModelParams(n, 0.5, sub_seed))
        else:
            D = random_digraph(n, params["arc_prob"], sub_seed)
        if k_colorable(D, 2, budget) is None:
            break
    else:
        return {"attempts": params["max_attempts"], "_status": "failed",
                "_detail": "no 3-chromatic digraph drawn"}
    cyc, trace = short_cycle_witness(D, budget)
    size, fvs = min_fvs_exact(D, budget)
    inner = shortest_dicycle(D.induced(sorted(fvs)))
    return {
        "attempts": attempt,
        "n": n,
        "arcs": D.m,
        "witness_len": len(cyc),
        "witness_ok": cyc.directed and cyc.is_valid_in(D),
        "branch": trace["branch"],
        "bound": float(trace["bound"]),
        "within_bound": len(cyc) <= trace["bound"],
        "fvs_min": size,
        "fvs_cycle_len": None if inner is None else len(inner),
        "key_step_ok": inner is not None and len(inner) <= size,
    }


def _e6_oriented(model: str, index: int) -> bool:
    # "mixed": even trials draw digon-free tournaments D(n, 1/2)
    return model == "oriented" or (model == "mixed" and index % 2 == 0)


def _e6_validate(cfg):
    if cfg.params["model"] not in ("general", "oriented", "mixed"):
        raise ValueError("E6 model must be general, oriented or mixed")
    if not 1 <= cfg.params["n_min"] <= cfg.params["n_max"]:
        raise ValueError("need 1 <= n_min <= n_max")


def _e6_summary(params, rows):
    ok = _ok_rows(rows)
    bad_w = [r["trial_index"] for r in ok if not (r["witness_ok"] and r["within_bound"])]
    bad_k = [r["trial_index"] for r in ok if not r["key_step_ok"]]
    checks = [
        _status_check(rows),
        _check("witness_valid_and_within_bound", not bad_w, True, f"violations: {bad_w[:10]}"),
        _check("fvs_contains_short_dicycle", not bad_k, True, f"violations: {bad_k[:10]}"),
        _check("all_trials_ok", len(ok) == len(rows), True, f"{len(rows) - len(ok)} trials not ok"),
    ]
    return [], checks


# -- E7: solver versus brute force -----------------------------------------------

def _e7_columns(params):
    return [
        ("code", int), ("n", int), ("arcs", int), ("chi", int), ("chi_oracle", int),
        ("alpha", int), ("alpha_oracle", int), ("fvs", int), ("fvs_oracle", int),
        ("greedy_k", int), ("pigeonhole", int), ("fast_2col", bool),
        ("chi_match", bool), ("alpha_match", bool), ("duality_ok", bool),
        ("witness_ok", bool), ("sandwich_ok", bool), ("fast_sound", bool),
    ]


def _e7_trial(params, index, seed, budget):
    n = params["n"]
    if params["mode"] == "exhaustive":
        code = index
        D = digraph_from_code(n, code)
    else:
        code = None
        D = random_digraph(n, params["arc_prob"], seed)
    chi, coloring = chromatic_number_exact(D, budget)
    alpha, acyclic = max_acyclic_set_exact(D, budget)
    fvs, fvs_set = min_fvs_exact(D, budget)
    chi_o = oracles.chromatic_number_brute(D)
    alpha_o = oracles.max_acyclic_set_brute(D)
    fvs_o = oracles.min_fvs_brute(D)
    greedy = greedy_coloring(D, sorted(range(n), key=lambda v: (-D.total_degree(v), v))).k
    pig = pigeonhole_lower_bound(D, max(alpha, 1)) if n else 0
    fast = two_colorable_fast(D)
    rest = [v for v in range(n) if v not in fvs_set]
    witness_ok = (
        coloring.is_valid(D) and coloring.k == chi
        and not oracles.has_dicycle(D.arcs, sorted(acyclic)) and len(acyclic) == alpha
        and not oracles.has_dicycle(D.arcs, rest) and len(fvs_set) == fvs
    )
    return {
        "code": code, "n": n, "arcs": D.m, "chi": chi, "chi_oracle": chi_o,
        "alpha": alpha, "alpha_oracle": alpha_o, "fvs": fvs, "fvs_oracle": fvs_o,
        "greedy_k": greedy, "pigeonhole": pig, "fast_2col": fast,
        "chi_match": chi == chi_o, "alpha_match": alpha == alpha_o and fvs == fvs_o,
        "duality_ok": alpha + fvs == n, "witness_ok": witness_ok,
        "sandwich_ok": pig <= chi <= greedy,
        "fast_sound": (not fast) or k_colorable(D, 2, budget) is not None,
    }


def _e7_summary(params, rows):
    ok = _ok_rows(rows)

    def bad(col):
        return [r["trial_index"] for r in ok if not r[col]]

    mism = sorted(set(bad("chi_match")) | set(bad("alpha_match")))
    checks = [
        _check("all_trials_ok", len(ok) == len(rows), True, f"{len(rows) - len(ok)} trials not ok"),
        _check("oracle_equivalence", not mism, True, f"mismatches: {len(mism)} {mism[:10]}"),
        _check("duality", not bad("duality_ok"), True, f"violations: {bad('duality_ok')[:10]}"),
        _check("witnesses_valid", not bad("witness_ok"), True, f"violations: {bad('witness_ok')[:10]}"),
        _check("bounds_sandwich", not bad("sandwich_ok"), True, f"violations: {bad('sandwich_ok')[:10]}"),
        _check("fast_2col_sound", not bad("fast_sound"), True, f"violations: {bad('fast_sound')[:10]}"),
    ]
    return [], checks


def _e7_validate(cfg):
    prm = cfg.params
    if prm["mode"] not in ("exhaustive", "random"):
        raise ValueError("E7 mode must be 'exhaustive' or 'random'")
    if prm["mode"] == "exhaustive":
        total = 1 << (prm["n"] * (prm["n"] - 1))
        if cfg.trials != total:
            raise ValueError(f"exhaustive E7 on n={prm['n']} needs trials={total}")


def _pipeline_validate(cfg):
    prm = cfg.params
    if "delta" in prm and "n" in prm and cfg.experiment in ("E1", "E2", "E4"):
        p_theorem1(prm["delta"], prm["n"])
    if cfg.experiment == "E5":
        p_theorem2(prm["k"], prm["n"])


EXPERIMENTS: dict[str, Experiment] = {
    "E1": Experiment("E1", {"n": 200, "delta": 8, "g": 7, "cycle_cap": 10**6},
                     _e1_columns, _e1_trial, _e1_summary, _pipeline_validate),
    "E2": Experiment("E2", {"n": 2000, "delta": 20}, _e2_columns, _e2_trial, _e2_summary, _pipeline_validate),
    "E3": Experiment("E3", {"n": 24, "p": 0.2, "delta": None, "mas_threshold": bounds.DEFAULT_MAS_THRESHOLD},
                     _e3_columns, _e3_trial, _e3_summary, _e3_validate),
    "E4": Experiment("E4", {"n": 3000, "delta": 16, "g": 5, "exact_threshold": constructions.EXACT_ALPHA_THRESHOLD,
                            "cycle_cap": 10**6, "min_success_fraction": 0.8},
                     _e4_columns, _e4_trial, _e4_summary, _pipeline_validate),
    "E5": Experiment("E5", {"n": 500, "k": 3, "eps": 0.01, "subset_budget": 10_000, "exhaustive_size": 8,
                            "search_node_limit": 50_000_000},
                     _e5_columns, _e5_trial, _e5_summary, _pipeline_validate),
    "E6": Experiment("E6", {"n_min": 5, "n_max": 12, "arc_prob": 0.5, "model": "mixed", "max_attempts": 1000},
                     _e6_columns, _e6_trial, _e6_summary, _e6_validate),
    "E7": Experiment("E7", {"mode": "random", "n": 6, "arc_prob": 0.3},
                     _e7_columns, _e7_trial, _e7_summary, _e7_validate),
}


# -- running ---------------------------------------------------------------------

def run_trial(experiment: str, params: dict, index: int, master_seed: int, budget: SolverBudget) -> TrialRecord:
    exp = EXPERIMENTS[experiment]
    seed = derive_seed(master_seed, index)
    try:
        measured = exp.trial(params, index, seed, budget)
    except BudgetExhausted as exc:
        return TrialRecord(index, seed, "undecided", {}, str(exc))
    except Exception as exc:  # noqa: BLE001 - recorded, not fatal
        log.warning("trial %d failed: %s", index, exc)
        return TrialRecord(index, seed, "failed", {}, f"{type(exc).__name__}: {exc}")
    status = measured.pop("_status", "ok")
    detail = measured.pop("_detail", "")
    return TrialRecord(index, seed, status, measured, detail)


def _run_trial_args(args):
    return run_trial(*args)


def resolve_parallelism(value: Optional[int]) -> int:
    if value is None:
        value = int(os.environ.get(THREADS_ENV, "1"))
    return max(1, value)


def _collect(config: ExperimentConfig, indices) -> list[TrialRecord]:
    jobs = [(config.experiment, config.params, i, config.master_seed, config.budget) for i in indices]
    workers = resolve_parallelism(config.parallelism)
    if workers == 1 or len(jobs) < 2:
        return [_run_trial_args(j) for j in jobs]
    chunk = max(1, len(jobs) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_trial_args, jobs, chunksize=chunk))


def summarize(config: ExperimentConfig, rows: list[dict]) -> dict:
    """Summary dict computed purely from parsed CSV rows."""
    exp = EXPERIMENTS[config.experiment]
    columns = all_columns(exp, config.params)
    reports, checks = exp.summarize(config.params, rows)
    statuses = {s: sum(r["status"] == s for r in rows) for s in ("ok", "undecided", "failed")}
    return {
        "schema_version": SCHEMA_VERSION,
        "experiment": config.experiment,
        "config": config.to_dict(),
        "trials": len(rows),
        "status_counts": statuses,
        "aggregates": aggregate(rows, columns),
        "bounds": [r.to_dict() for r in reports],
        "checks": checks,
        "all_hard_passed": all(c["passed"] for c in checks if c["hard"]),
    }


def write_csv(path: Path, columns, records: list[TrialRecord]) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=[c for c, _ in columns], lineterminator="\n")
    writer.writeheader()
    for rec in sorted(records, key=lambda r: r.trial_index):
        writer.writerow(record_to_row(rec, columns))
    path.write_text(buf.getvalue(), encoding="utf-8")


def read_csv(path: Path, columns) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return [parse_row(row, columns) for row in csv.DictReader(fh)]


def run_experiment(config: ExperimentConfig) -> dict:
    """Run every trial, write ``trials.csv`` and ``summary.json``, return the summary."""
    out = Path(config.output_path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ValueError(f"cannot create output directory {out}: {exc}") from None
    exp = EXPERIMENTS[config.experiment]
    columns = all_columns(exp, config.params)
    records = _collect(config, range(config.trials))
    csv_path = out / "trials.csv"
    write_csv(csv_path, columns, records)
    rows = read_csv(csv_path, columns)
    summary = summarize(config, rows)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return summary


def verify_report(path, fraction: float = 0.05) -> tuple[bool, list[str]]:
    """Recheck a report directory: rerun a sample of trials from their seeds
    and recompute the whole summary from the CSV rows.
    """
    out = Path(path)
    problems: list[str] = []
    try:
        summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        return False, [f"cannot read summary: {exc}"]
    try:
        config = ExperimentConfig.from_dict(summary["config"])
    except (KeyError, TypeError, ValueError) as exc:
        return False, [f"summary has no usable config: {exc!r}"]
    exp = EXPERIMENTS[config.experiment]
    columns = all_columns(exp, config.params)
    with open(out / "trials.csv", encoding="utf-8", newline="") as fh:
        raw_rows = list(csv.DictReader(fh))
    header = list(raw_rows[0].keys()) if raw_rows else []
    if raw_rows and header != [c for c, _ in columns]:
        problems.append(f"unexpected CSV columns {header}")
        return False, problems
    try:
        rows = [parse_row(r, columns) for r in raw_rows]
    except ValueError as exc:
        return False, problems + [f"unparseable CSV value: {exc}"]
    for raw in raw_rows:
        if raw.get("digest") != row_digest(raw, columns):
            problems.append(f"trial {raw.get('trial_index')} was modified (digest mismatch)")
    indices = sorted(r["trial_index"] for r in rows)
    if indices != list(range(config.trials)):
        problems.append("trial indices are not exactly 0..trials-1")

    by_index = {r["trial_index"]: raw for r, raw in zip(rows, raw_rows)}
    k = max(1, math.ceil(fraction * config.trials))
    chosen = sorted(random.Random(config.master_seed).sample(range(config.trials), min(k, config.trials)))
    for i in chosen:
        rec = run_trial(config.experiment, config.params, i, config.master_seed, config.budget)
        expect = record_to_row(rec, columns)
        got = by_index.get(i)
        if got != expect:
            diff = [c for c, _ in columns if got is None or got.get(c) != expect[c]]
            problems.append(f"trial {i} does not reproduce (columns {diff})")
            break

    recomputed = summarize(config, rows)
    for key in ("trials", "status_counts", "aggregates", "bounds", "checks", "all_hard_passed"):
        if recomputed[key] != summary.get(key):
            problems.append(f"summary field {key!r} does not match the CSV")
    return not problems, problems
