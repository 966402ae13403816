import itertools
from fractions import Fraction

import pytest
from hypothesis import settings

from hypersukp.hypercore import Hypergraph, SukpInstance

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def brute_sukp(inst: SukpInstance):
    """Plain-Python optimum over all subsets; independent of the numpy oracle."""
    best = Fraction(0)
    for mask in range(1 << inst.n):
        sel = {i for i in range(inst.n) if mask >> i & 1}
        if sum((inst.costs[i] for i in sel), Fraction(0)) > inst.budget:
            continue
        val = sum((inst.vertex_profits[i] for i in sel), Fraction(0))
        val += sum((p for e, p in zip(inst.edges, inst.profits) if sel.issuperset(e)), Fraction(0))
        best = max(best, val)
    return best


def brute_dksh(g, k):
    weights = getattr(g, "weights", None) or [1] * len(g.edges)
    best = 0
    for c in itertools.combinations(range(g.n), k):
        s = set(c)
        best = max(best, sum(w for e, w in zip(g.edges, weights) if s.issuperset(e)))
    return Fraction(best)


def complete(n, m):
    return Hypergraph.build(n, itertools.combinations(range(n), m), m_cap=m)


@pytest.fixture
def k4():
    return complete(4, 2)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
