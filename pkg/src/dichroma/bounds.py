"""Closed-form bounds from the probabilistic arguments, as plain functions.

All logarithms are natural.  Each evaluator is a pure function of its
arguments; :func:`evaluate` wraps them into a :class:`BoundReport` for the
harness and the CLI.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

# np must reach this before the maximum-acyclic-set bound is treated as
# applicable; the true constant is not known.
DEFAULT_MAS_THRESHOLD = 20.0


@dataclass
class BoundReport:
    name: str
    inputs: dict
    theoretical: float
    empirical_mean: Optional[float] = None
    empirical_stderr: Optional[float] = None
    trials: Optional[int] = None
    notes: dict = field(default_factory=dict)

    def attach(self, mean: float, stderr: float, trials: int) -> "BoundReport":
        self.empirical_mean = mean
        self.empirical_stderr = stderr
        self.trials = trials
        return self

    def within(self, sigmas: float = 3.0) -> Optional[bool]:
        """Is the empirical mean at most the bound plus ``sigmas`` stderr?"""
        if self.empirical_mean is None:
            return None
        return self.empirical_mean <= self.theoretical + sigmas * self.empirical_stderr

    def to_dict(self) -> dict:
        return asdict(self)


def expected_cycles_of_length(delta: float, l: int) -> float:
    """(Delta/4)^l, the bound on the expected number of l-cycles."""
    if l < 3:
        raise ValueError("cycle length must be at least 3")
    if delta < 1:
        raise ValueError("delta must be at least 1")
    return (delta / 4.0) ** l


def short_cycle_total_bound(delta: float, g: int) -> tuple[float, float]:
    """Sum of (Delta/4)^l over 3 <= l < g, and the coarser cap Delta^(g-1)."""
    if g < 4:
        raise ValueError("g must be at least 4")
    total = math.fsum(expected_cycles_of_length(delta, l) for l in range(3, g))
    return total, float(delta) ** (g - 1)


def excess_degree_expectation_bound(n: int, delta: float) -> float:
    """n * Delta / 2^Delta."""
    if delta < 1:
        raise ValueError("delta must be at least 1")
    return n * delta / 2.0**delta


def mas_bound(n: int, p: float) -> float:
    """(2 / ln q) (ln(np) + 3e) with q = 1/(1-p)."""
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
    if n * p < 1:
        raise ValueError("need np >= 1")
    log_q = -math.log1p(-p)
    return (2.0 / log_q) * (math.log(n * p) + 3 * math.e)


def claim3_mas_bound(n: int, delta: float) -> float:
    """4 e n ln(Delta) / Delta."""
    if delta < 2:
        raise ValueError("delta must be at least 2")
    return 4 * math.e * n * math.log(delta) / delta


def chi_lower_theorem1(delta: float) -> float:
    """Delta / (5 e ln Delta)."""
    if delta < 2:
        raise ValueError("delta must be at least 2")
    return delta / (5 * math.e * math.log(delta))


def critical_subset_term(n: int, k: float, t: int) -> float:
    """(7 t k^4 / n)^t; ``inf`` if it overflows a double."""
    if not (3 <= t <= n):
        raise ValueError(f"need 3 <= t <= n, got t={t}, n={n}")
    base = 7.0 * t * k**4 / n
    try:
        return base**t
    except OverflowError:
        return math.inf


def eq1_bound(n: int, k: float, eps: float) -> float:
    """eps*n times the largest critical_subset_term over integer t in [3, eps*n].

    The term is log-convex in t, so the maximum sits at an endpoint; both are
    evaluated.  Returns 0 when the range is empty.
    """
    hi = math.floor(eps * n)
    if hi < 3:
        return 0.0
    hi = min(hi, n)
    peak = max(critical_subset_term(n, k, 3), critical_subset_term(n, k, hi))
    return eps * n * peak


def mas_bound_applicable(n: int, p: float, threshold: float = DEFAULT_MAS_THRESHOLD) -> bool:
    return n * p >= threshold


_EVALUATORS: dict[str, tuple[Callable, tuple[str, ...]]] = {
    "expected_cycles_of_length": (expected_cycles_of_length, ("delta", "l")),
    "short_cycle_total_bound": (short_cycle_total_bound, ("delta", "g")),
    "excess_degree_expectation_bound": (excess_degree_expectation_bound, ("n", "delta")),
    "mas_bound": (mas_bound, ("n", "p")),
    "claim3_mas_bound": (claim3_mas_bound, ("n", "delta")),
    "chi_lower_theorem1": (chi_lower_theorem1, ("delta",)),
    "critical_subset_term": (critical_subset_term, ("n", "k", "t")),
    "eq1_bound": (eq1_bound, ("n", "k", "eps")),
}

_INT_PARAMS = {"n", "l", "g", "t"}


def bound_names() -> list[str]:
    return sorted(_EVALUATORS)


def evaluate(name: str, **params) -> BoundReport:
    try:
        fn, arg_names = _EVALUATORS[name]
    except KeyError:
        raise ValueError(f"unknown bound {name!r}; choose from {bound_names()}") from None
    missing = [a for a in arg_names if a not in params]
    extra = [a for a in params if a not in arg_names]
    if missing or extra:
        raise ValueError(f"{name} takes {arg_names}; missing {missing}, unexpected {extra}")
    args = {a: (int(params[a]) if a in _INT_PARAMS else float(params[a])) for a in arg_names}
    value = fn(**args)
    notes: dict = {}
    if name == "short_cycle_total_bound":
        value, cap = value
        notes["cap"] = cap
    if name == "mas_bound":
        notes["conditional"] = True
        notes["applicable"] = mas_bound_applicable(args["n"], args["p"])
    return BoundReport(name=name, inputs=args, theoretical=value, notes=notes)
