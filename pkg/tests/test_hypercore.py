import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import complete
from hypersukp.hypercore import (
    Hypergraph,
    InstanceError,
    InstanceFormatError,
    Solution,
    SukpInstance,
    WeightedHypergraph,
    best_of,
    dumps_instance,
    induced_value,
    link_multihypergraph,
    loads_instance,
    make_solution,
    read_instance,
    to_fraction,
    write_instance,
)
from hypersukp.oracles import GenSpec, generate


def test_induced_value_triangle_in_k4(k4):
    assert induced_value(k4, {0, 1, 2}) == 3


def test_induced_value_empty_selection(k4):
    assert induced_value(k4, set()) == 0


def test_induced_value_sukp_containment():
    inst = SukpInstance.build([1] * 4, 10, [((0, 1, 2), 5), ((1, 2, 3), 4)])
    assert induced_value(inst, {0, 1, 2}) == 5
    assert induced_value(inst, range(4)) == 9


def test_induced_value_out_of_range(k4):
    with pytest.raises(InstanceError):
        induced_value(k4, {4})


def test_weighted_value():
    g = WeightedHypergraph.from_weights(4, {(0, 1): F(3, 2), (2, 3): 2})
    assert induced_value(g, {0, 1, 2}) == F(3, 2)


def test_link_single_block_vertex():
    g = Hypergraph.build(3, [(0, 1, 2)])
    assert link_multihypergraph(g, {0}).weight_map() == {(1, 2): 1}


def test_link_two_block_vertices():
    g = Hypergraph.build(3, [(0, 1, 2)])
    assert link_multihypergraph(g, {0, 1}).weight_map() == {(1, 2): 1, (0, 2): 1}


def test_link_two_edges():
    g = Hypergraph.build(4, [(0, 1, 2), (0, 1, 3)])
    assert link_multihypergraph(g, {0}).weight_map() == {(1, 2): 1, (1, 3): 1}


def test_link_multiplicity_accumulates():
    g = Hypergraph.build(4, [(0, 2, 3), (1, 2, 3)])
    assert link_multihypergraph(g, {0, 1}).weight_map() == {(2, 3): 2}


def test_link_rejects_non_uniform():
    g = Hypergraph.build(4, [(0, 1), (1, 2, 3)])
    with pytest.raises(InstanceError):
        link_multihypergraph(g, {1})


@given(st.integers(0, 2**31), st.integers(4, 9), st.integers(2, 4))
def test_link_total_weight(seed, n, m):
    m = min(m, n)
    g = generate(GenSpec("uniform-random", n=n, m=m, p=0.4, seed=seed))
    s = set(range(0, n, 2))
    link = link_multihypergraph(g, s)
    assert sum(link.weights) == sum(len(set(e) & s) for e in g.edges)


@given(st.integers(0, 2**31), st.integers(4, 9))
def test_link_partition_counts_each_edge_r_times(seed, n):
    g = generate(GenSpec("uniform-random", n=n, m=3, p=0.5, seed=seed))
    blocks = [range(i, min(i + 2, n)) for i in range(0, n, 2)]
    total = 0
    for b in blocks:
        if any(v in b for e in g.edges for v in e):
            total += sum(link_multihypergraph(g, b).weights)
    assert total == 3 * len(g.edges)


@given(st.integers(0, 2**31), st.integers(3, 10))
def test_induced_value_monotone(seed, n):
    inst = generate(GenSpec("sukp-random", n=n, m=min(3, n), edges=n, mixed_sizes=True, vertex_profit_prob=0.3, seed=seed))
    sel = set()
    prev = F(0)
    for v in range(n):
        sel.add(v)
        cur = induced_value(inst, sel)
        assert cur >= prev
        prev = cur


def test_hypergraph_invariants():
    g = Hypergraph.build(5, [(2, 1, 0), (3, 4)])
    assert g.edges == ((0, 1, 2), (3, 4))
    assert g.m_cap == 3
    with pytest.raises(InstanceError):
        Hypergraph.build(3, [(0, 1), (1, 0)])
    with pytest.raises(InstanceError):
        Hypergraph.build(3, [(0, 3)])
    with pytest.raises(InstanceError):
        Hypergraph.build(3, [(0, 1, 2)], m_cap=2)
    with pytest.raises(InstanceError):
        Hypergraph.build(3, [()])


def test_weighted_drops_zero_and_rejects_negative():
    g = WeightedHypergraph.from_weights(3, {(0, 1): 0, (1, 2): 4})
    assert g.edges == ((1, 2),)
    with pytest.raises(InstanceError):
        WeightedHypergraph.from_weights(3, {(0, 1): -1})


def test_sukp_invariants():
    with pytest.raises(InstanceError):
        SukpInstance.build([1, -1], 2, [])
    with pytest.raises(InstanceError):
        SukpInstance.build([1, 1], -1, [])
    with pytest.raises(InstanceError):
        SukpInstance.build([1, 1], 1, [((0, 1), -2)])
    inst = SukpInstance.build([1, 2, 3], 4, [((2, 0), 1), ((0, 1), 2)])
    assert inst.edges == ((0, 1), (0, 2))
    assert inst.profits == (2, 1)


def test_to_fraction_parses_exactly():
    assert to_fraction("3/4") == F(3, 4)
    assert to_fraction("0.1") == F(1, 10)
    assert to_fraction(0.1) == F(1, 10)
    with pytest.raises(InstanceError):
        to_fraction("abc")
    with pytest.raises(InstanceError):
        to_fraction(True)


def test_solution_json_and_ordering():
    a = Solution((2, 1), 3, 2, "x")
    b = Solution((0, 5), 3, 2, "y")
    assert best_of([a, b]) is b
    assert a.to_json() == {"value": 3, "vertices": [1, 2], "cost": 2, "method": "x", "guarantee_exponent": None}
    assert Solution((0,), F(1, 3)).to_json()["value"] == "1/3"


def test_make_solution_recomputes():
    inst = SukpInstance.build([1, 2], 5, [((0, 1), 7)])
    s = make_solution(inst, [1, 0])
    assert (s.vertices, s.value, s.cost) == ((0, 1), 7, 3)


def test_round_trip_3_uniform(tmp_path):
    g = complete(5, 3)
    p = tmp_path / "g.json"
    write_instance(g, p)
    assert read_instance(p) == g


@given(st.integers(0, 2**31), st.sampled_from(["uniform-random", "planted-dense", "sukp-random", "sukp-correlated"]))
def test_round_trip_generated(seed, kind):
    spec = GenSpec(kind, n=8, m=3, p=0.2, core=4, cost_den=3, vertex_profit_prob=0.5, mixed_sizes=True, seed=seed)
    inst = generate(spec)
    assert loads_instance(dumps_instance(inst)) == inst


def test_round_trip_weighted():
    g = WeightedHypergraph.from_weights(4, {(0, 1): F(7, 3), (2, 3): 2})
    assert loads_instance(dumps_instance(g)) == g


def test_dump_is_line_oriented():
    text = dumps_instance(complete(4, 2))
    lines = text.splitlines()
    assert lines[0] == "{" and lines[-1] == "}"
    assert sum('"verts"' in ln for ln in lines) == 6


def _sukp_doc(**over):
    doc = {"kind": "sukp", "n": 2, "m_cap": 2, "costs": [1, 2], "budget": 2,
           "edges": [{"verts": [0, 1], "profit": 3}], "vertex_profits": [0, 0]}
    doc.update(over)
    return json.dumps(doc)


def test_parse_error_edge_id_equals_n():
    with pytest.raises(InstanceFormatError, match="out of range"):
        loads_instance(_sukp_doc(edges=[{"verts": [0, 2], "profit": 1}]))


def test_parse_error_negative_cost():
    with pytest.raises(InstanceFormatError, match="costs"):
        loads_instance(_sukp_doc(costs=[1, -2]))


def test_parse_error_duplicate_edge():
    with pytest.raises(InstanceFormatError, match="duplicate"):
        loads_instance(_sukp_doc(edges=[{"verts": [0, 1], "profit": 1}, {"verts": [1, 0], "profit": 2}]))


def test_parse_error_names_line():
    with pytest.raises(InstanceFormatError, match="line 3"):
        loads_instance('{\n "kind": "sukp",\n "n": ,\n}')


def test_parse_error_missing_field_and_bad_kind():
    with pytest.raises(InstanceFormatError, match="budget"):
        loads_instance(json.dumps({"kind": "sukp", "n": 1, "m_cap": 1, "costs": [1], "edges": []}))
    with pytest.raises(InstanceFormatError, match="kind"):
        loads_instance(json.dumps({"kind": "graph", "n": 1, "m_cap": 1, "edges": []}))


def test_empty_edge_rejected_at_parse():
    with pytest.raises(InstanceFormatError):
        loads_instance(_sukp_doc(edges=[{"verts": [], "profit": 1}]))
