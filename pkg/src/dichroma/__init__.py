"""Dichromatic number experiments on random digraphs."""
from .digraph import (
    CycleOverflowError,
    CycleWitness,
    Digraph,
    digirth,
    enumerate_short_cycles,
    girth,
    is_acyclic_induced,
    shortest_dicycle,
    strongly_connected_components,
)
from .random_model import ModelParams, p_theorem1, p_theorem2, sample
from .solver import (
    BudgetExhausted,
    ColoringAssignment,
    SolverBudget,
    chromatic_number_exact,
    k_colorable,
    max_acyclic_set_exact,
    min_fvs_exact,
)

__version__ = "0.1.0"
