"""Approximation algorithms for densest k-subhypergraph and set union knapsack."""

from .dksh import DkshConfig, approx_dksh, solve_trivial, solve_weighted
from .exponents import alpha, gamma, theta, theta_general
from .hypercore import (
    Hypergraph,
    Solution,
    SukpInstance,
    WeightedHypergraph,
    induced_value,
    read_instance,
    write_instance,
)
from .oracles import GenSpec, exact_dksh, exact_sukp, generate
from .sukp import SukpConfig, approx_sukp, knapsack_fptas

__version__ = "0.1.0"
