import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import brute_sukp
from hypersukp.harness import class_as_sukp, random_class3
from hypersukp.hypercore import SukpInstance, induced_value, make_solution
from hypersukp.oracles import GenSpec, exact_knapsack, exact_sukp, generate
from hypersukp.sukp import (
    BlowUpTooLarge,
    ClassInstance,
    SukpConfig,
    approx_sukp,
    blow_up,
    bucket_costs,
    decompose,
    degree_select,
    fold_singletons,
    knapsack_fptas,
    normalize_class3,
    prune,
    round_profits,
    solve_class2,
    solve_class3,
)


def random_sukp(seed, n, m=3, **kw):
    m = min(m, n)
    cap = sum(math.comb(n, t) for t in range(2, m + 1)) // 2
    spec = dict(kind="sukp-random" if seed % 2 else "sukp-correlated", n=n, m=m, edges=min(2 * n, cap), mixed_sizes=True,
                cost_den=1 + seed % 3, vertex_profit_prob=0.25, budget_frac=0.35, seed=seed)
    spec.update(kw)
    return generate(GenSpec(**spec))


# --- pruning and rounding ----------------------------------------------------

def test_prune_expensive_vertex():
    inst = SukpInstance.build([5, 1], 2, [((0, 1), 3)])
    pr, kept = prune(inst)
    assert kept == (1,) and pr.n == 1 and pr.edges == ()


def test_prune_zero_profit_edge():
    inst = SukpInstance.build([1, 1], 2, [((0, 1), 0)])
    pr, _ = prune(inst)
    assert pr.edges == ()
    assert exact_sukp(pr).value == exact_sukp(inst).value == 0


def test_prune_identity_when_feasible():
    inst = SukpInstance.build([1, 1, 1], 3, [((0, 1), 2), ((1, 2), 3)])
    pr, kept = prune(inst)
    assert pr is inst and kept == (0, 1, 2)


def test_prune_expensive_edge():
    inst = SukpInstance.build([2, 2, 1], 3, [((0, 1), 9), ((1, 2), 1)])
    pr, _ = prune(inst)
    assert pr.edges == ((1, 2),)


@given(st.integers(0, 2**31), st.integers(3, 12))
def test_prune_preserves_optimum(seed, n):
    inst = random_sukp(seed, n, profit_range=(0, 9))
    pr, _ = prune(inst)
    assert exact_sukp(pr).value == exact_sukp(inst).value


def test_round_profits_example():
    inst = SukpInstance.build([1] * 4, 4, [((0, 1), 10), ((1, 2), 7), ((2, 3), 3), ((0, 3), 1)])
    out = round_profits(inst, 2).edge_map()
    assert out == {(0, 1): 8, (1, 2): 4, (2, 3): 2, (0, 3): 1}


def test_round_single_profit():
    inst = SukpInstance.build([1, 1], 2, [((0, 1), 5)])
    assert round_profits(inst).profits == (4,)


def test_round_all_zero():
    inst = SukpInstance.build([1, 1], 2, [((0, 1), 0)])
    assert round_profits(inst).edges == ()


def test_round_drops_tiny_profits():
    inst = SukpInstance.build([1, 1, 1], 2, [((0, 1), 2**20), ((1, 2), 1)])
    out = round_profits(inst, 2)
    assert out.profits == (2**20,)


@given(st.integers(0, 2**31), st.integers(3, 10))
def test_rounding_keeps_quarter(seed, n):
    inst = random_sukp(seed, n, profit_range=(1, 1000))
    opt = brute_sukp(inst)
    assert 4 * brute_sukp(round_profits(inst)) >= opt


def test_fold_singletons():
    inst = SukpInstance.build([1, 1], 2, [((0,), 3), ((0, 1), 2)], [1, 0])
    out = fold_singletons(inst)
    assert out.vertex_profits == (4, 0) and out.edges == ((0, 1),)


# --- buckets and classes -------------------------------------------------------

def test_bucket_equal_costs():
    b = bucket_costs(SukpInstance.build([8, 8, 8], 10, []))
    assert b.k_pow == 3 and b.bucket_of == (1, 1, 1)


def test_bucket_tiny_cost():
    base = SukpInstance.build([8, 8, 8, 8], 10, [])
    b0 = bucket_costs(base)
    tiny = b0.upper(b0.tiny) / 2
    b = bucket_costs(SukpInstance.build([8, 8, 8, tiny], 10, []))
    assert b.bucket_of[3] == b.tiny


def test_bucket_inequalities_direct():
    b = bucket_costs(SukpInstance.build([8, 3, 1, F(1, 64)], 10, []))
    assert b.k_pow == 3 and b.s == 3
    for v, c in enumerate(b.base.costs):
        i = b.bucket_of[v]
        if i == b.tiny:
            assert 0 <= c <= 2 ** F(b.k_pow - b.s - 2)
        else:
            assert 2 ** F(b.k_pow - i) < c <= 2 ** F(b.k_pow + 1 - i)
    assert b.bucket_of == (1, 2, 4, b.tiny)


def test_bucket_zero_cost_goes_tiny():
    b = bucket_costs(SukpInstance.build([0, 4], 4, []))
    assert b.bucket_of[0] == b.tiny


@given(st.integers(0, 2**31), st.integers(2, 14))
def test_bucket_invariant_random(seed, n):
    b = bucket_costs(random_sukp(seed, n, cost_range=(0, 60)))
    assert 2 ** b.s > n
    for v, c in enumerate(b.base.costs):
        i = b.bucket_of[v]
        assert 1 <= i <= b.tiny
        assert c <= b.upper(i) and (i == b.tiny or c > b.lower(i))


def test_decompose_single_edge():
    inst = SukpInstance.build([3, 5, 2], 10, [((0, 1), 4)])
    cls = decompose(bucket_costs(round_profits(inst)))
    assert [c.class_tag for c in cls][0] == 1 and len(cls) == 2


def test_decompose_two_levels():
    inst = SukpInstance.build([4, 4, 4, 4], 10, [((0, 1), 8), ((2, 3), 2)])
    cls = decompose(bucket_costs(round_profits(inst)))
    assert len(cls) == 3
    assert [c.profit_level for c in cls[1:]] == [8, 2]


@given(st.integers(0, 2**31), st.integers(3, 14))
def test_decompose_conservation(seed, n):
    inst = fold_singletons(random_sukp(seed, n, cost_range=(0, 50)))
    ro = round_profits(inst)
    b = bucket_costs(ro)
    cls = decompose(b)
    assert cls[0].class_tag == 1
    assert sum(cls[0].vertex_profits.values()) == sum(ro.vertex_profits)
    seen = []
    for ci in cls[1:]:
        assert ci.class_tag == (2 if ci.layers[0][0] == b.tiny else 3)
        bk = [bb for bb, _ in ci.layers]
        assert bk == sorted(bk, reverse=True)
        for e in ci.edges:
            assert len(e) == ci.r
            assert all(e[j] in ci.layer(j) for j in range(ci.r))
            seen.append(tuple(sorted(e)))
            assert ro.edge_map()[tuple(sorted(e))] == ci.profit_level
    assert sorted(seen) == sorted(ro.edges)


# --- knapsack --------------------------------------------------------------------

def test_fptas_small():
    s = knapsack_fptas([1, 2, 3], [6, 10, 12], 5, F(1, 100))
    assert s.value == 22 and s.vertices == (1, 2)


def test_fptas_zero_budget():
    s = knapsack_fptas([0, 2, 0], [3, 9, 0], 0, F(1, 10))
    assert s.vertices == (0,) and s.value == 3


def test_fptas_single_item():
    assert knapsack_fptas([4], [7], 5, F(1, 2)).vertices == (0,)


def test_fptas_rejects_bad_eps():
    with pytest.raises(ValueError):
        knapsack_fptas([1], [1], 1, 0)


@given(st.lists(st.tuples(st.integers(1, 30), st.integers(0, 500), st.integers(1, 6)), min_size=1, max_size=14),
       st.integers(0, 120), st.sampled_from([F(1, 100), F(1, 10), F(1, 2)]))
def test_fptas_ratio(items, budget, eps):
    costs = [F(c) for c, _, _ in items]
    profits = [F(p, d) for _, p, d in items]
    s = knapsack_fptas(costs, profits, budget, eps)
    opt, _ = exact_knapsack(costs, profits, budget)
    assert sum(costs[i] for i in s.vertices) <= budget
    assert s.value * (1 + eps) >= opt
    assert s.value <= opt


@given(st.lists(st.tuples(st.integers(1, 30), st.integers(0, 5)), min_size=1, max_size=16), st.integers(0, 100))
def test_fptas_exact_with_integer_profits(items, budget):
    costs = [c for c, _ in items]
    profits = [p for _, p in items]
    s = knapsack_fptas(costs, profits, budget, F(1, 10))
    assert s.value == exact_knapsack(costs, profits, budget)[0]


# --- class solvers ---------------------------------------------------------------

def _class2_example():
    # tiny t=0 in layer 1, u=1 and v=2 in layer 2
    return ClassInstance(2, F(2), ((6, (0,)), (2, (1, 2))), ((0, 1), (0, 2)), F(5),
                         {0: F(1, 100), 1: F(4), 2: F(4)}, (F(0), F(2)))


def test_class2_example():
    s = solve_class2(_class2_example())
    assert s.value == 2 and s.cost <= 5
    inst, verts = class_as_sukp(_class2_example())
    assert exact_sukp(inst).value == 2


def test_class2_no_edges():
    ci = ClassInstance(2, F(2), ((6, (0,)), (2, (1,))), (), F(5), {0: F(1, 100), 1: F(4)}, (F(0), F(2)))
    assert solve_class2(ci).value == 0


def test_class2_budget_below_layer2():
    ci = _class2_example()
    ci = ClassInstance(2, ci.profit_level, ci.layers, ci.edges, F(1), ci.costs, ci.layer_lower)
    s = solve_class2(ci)
    assert s.value == 0 and s.cost <= 1


def test_normalize_class3():
    ci = ClassInstance(3, F(16), ((2, (0,)), (2, (1,))), ((0, 1),), F(20), {0: F(6), 1: F(5)}, (F(4), F(4)))
    norm, lam, kappa = normalize_class3(ci)
    assert lam == 4 and kappa == 16
    assert norm.costs[0] == F(3, 2) and norm.budget == 5 and norm.profit_level == 1
    assert norm.value_of((0, 1)) * kappa == ci.value_of((0, 1))


@given(st.integers(0, 2**31))
def test_normalize_round_trip_optimum(seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    ci = random_class3(rng, 8)
    scale = F(int(rng.integers(1, 5)), int(rng.integers(1, 4)))
    kappa = F(2) ** int(rng.integers(0, 5))
    raw = ClassInstance(3, kappa, ci.layers, ci.edges, ci.budget * scale,
                        {v: c * scale for v, c in ci.costs.items()}, tuple(x * scale for x in ci.layer_lower))
    norm, lam, kk = normalize_class3(raw)
    a, _ = class_as_sukp(raw)
    b, _ = class_as_sukp(norm)
    assert exact_sukp(b).value * kk == exact_sukp(a).value


def test_blow_up_two_copies():
    ci = ClassInstance(3, F(1), ((2, (0,)), (1, (1,))), ((0, 1),), F(10), {0: F(3, 2), 1: F(3)}, (F(1), F(2)))
    hs = blow_up(ci)
    assert hs.copies == (1, 2)
    assert len(hs.graph.edges) == 2
    assert sorted(hs.costs) == [F(3, 2), F(3, 2), F(3, 2)]
    for e in hs.graph.edges:
        assert tuple(hs.back_map[v] for v in e) in ci.edges


@given(st.integers(0, 2**31))
def test_blow_up_structure(seed):
    ci = random_class3(np.random.Generator(np.random.PCG64(seed)))
    hs = blow_up(ci)
    assert len(hs.graph.edges) == len(ci.edges) * math.prod(hs.copies)
    assert hs.copies[0] == 1
    assert all(1 <= c <= 2 for c in hs.costs)
    assert {tuple(hs.back_map[v] for v in e) for e in hs.graph.edges} == set(ci.edges)


def test_blow_up_limit():
    ci = ClassInstance(3, F(1), ((2, (0,)), (1, (1,))), ((0, 1),), F(10), {0: F(3, 2), 1: F(3)}, (F(1), F(2)))
    with pytest.raises(BlowUpTooLarge):
        blow_up(ci, max_vertices=2)


def test_degree_select_empty():
    ci = random_class3(np.random.Generator(np.random.PCG64(1)))
    s = degree_select(blow_up(ci), (), F(100), ci.r)
    assert s.value == 0 and s.vertices == ()


def test_degree_select_single_edge():
    ci = ClassInstance(3, F(1), ((2, (0,)), (2, (1,))), ((0, 1),), F(8), {0: F(3, 2), 1: F(3, 2)}, (F(1), F(1)))
    hs = blow_up(ci)
    s = degree_select(hs, range(hs.graph.n), ci.budget, 2)
    assert s.vertices == (0, 1) and s.value == 1


def test_degree_select_no_room():
    ci = ClassInstance(3, F(1), ((2, (0,)), (2, (1,))), ((0, 1),), F(3), {0: F(3, 2), 1: F(3, 2)}, (F(1), F(1)))
    hs = blow_up(ci)
    assert degree_select(hs, range(hs.graph.n), ci.budget, 2).value == 0


@given(st.integers(0, 2**31))
def test_degree_select_ample_budget_bound(seed):
    ci = random_class3(np.random.Generator(np.random.PCG64(seed)))
    hs = blow_up(ci)
    r = ci.r
    budget = F(2 * r * max(hs.copies) * hs.graph.n)
    chosen = range(hs.graph.n)
    s = degree_select(hs, chosen, budget, r)
    induced = len(hs.graph.edges)
    assert s.value * (2 * r) ** r * math.prod(hs.copies) >= induced
    assert s.value == ci.value_of(s.vertices)


@given(st.integers(0, 2**31), st.integers(0, 40))
def test_degree_select_layer_costs(seed, bq):
    ci = random_class3(np.random.Generator(np.random.PCG64(seed)))
    hs = blow_up(ci)
    budget = F(bq, 2)
    sub = [v for v in range(hs.graph.n) if (v * 7 + seed) % 3]
    s = degree_select(hs, sub, budget, ci.r)
    for c in s.info.get("layer_costs", ()):
        assert c <= budget / ci.r
    assert s.cost <= budget


def test_class3_large_budget_blow_up_path():
    # both layers in (2, 4]; normalised budget well above 2 r a_r
    costs = {0: F(3), 1: F(4), 2: F(3), 3: F(7, 2)}
    ci = ClassInstance(3, F(1), ((2, (0, 1)), (2, (2, 3))), ((0, 2), (0, 3), (1, 3)), F(40), costs, (F(2), F(2)))
    s = solve_class3(ci)
    inst, verts = class_as_sukp(ci)
    assert s.cost <= ci.budget
    assert s.value == ci.value_of(s.vertices) <= exact_sukp(inst).value


def test_class3_single_edge():
    ci = ClassInstance(3, F(8), ((2, (0,)), (2, (1,))), ((0, 1),), F(8), {0: F(3), 1: F(3)}, (F(2), F(2)))
    assert solve_class3(ci).value == 8


def test_class3_budget_too_small():
    ci = ClassInstance(3, F(8), ((2, (0,)), (2, (1,))), ((0, 1),), F(2), {0: F(3), 1: F(3)}, (F(2), F(2)))
    assert solve_class3(ci).value == 0


@given(st.integers(0, 2**31))
def test_class3_feasible_and_bounded(seed):
    ci = random_class3(np.random.Generator(np.random.PCG64(seed)), 10)
    s = solve_class3(ci)
    inst, _ = class_as_sukp(ci)
    assert s.cost <= ci.budget
    assert s.value == ci.value_of(s.vertices) <= exact_sukp(inst).value


# --- end to end -----------------------------------------------------------------

def test_approx_sukp_small_example():
    inst = SukpInstance.build([1, 1, 2], 2, [((0, 1), 5), ((1, 2), 4)])
    assert approx_sukp(inst, SukpConfig(exact_cutoff_n=10)).value == 5 == brute_sukp(inst)
    assert approx_sukp(inst, SukpConfig()).value == 5


def test_approx_sukp_zero_budget():
    inst = SukpInstance.build([1, 2, 3], 0, [((0, 1), 5)], [1, 1, 1])
    assert approx_sukp(inst).value == 0


def test_approx_sukp_free_vertices_added():
    inst = SukpInstance.build([0, 0, 5], 0, [((0, 1), 5)])
    s = approx_sukp(inst)
    assert s.vertices == (0, 1) and s.value == 5


def test_edge_free_equals_knapsack():
    costs = [3, 4, 5, 2, 7]
    vp = [4, 5, 6, 1, 9]
    inst = SukpInstance.build(costs, 10, [], vp)
    cfg = SukpConfig()
    assert approx_sukp(inst, cfg).value == knapsack_fptas(costs, vp, 10, cfg.epsilon).value


def test_trace_rows():
    inst = random_sukp(4, 10)
    s = approx_sukp(inst, SukpConfig(trace=True))
    rows = s.info["trace"]
    assert rows and rows[0]["event"] == "class" and rows[0]["class"] == 1
    assert {r["event"] for r in rows} <= {"class", "branch"}


def test_config_validation():
    with pytest.raises(ValueError):
        SukpConfig(epsilon=F(-1))


@given(st.integers(0, 2**31), st.integers(3, 12), st.sampled_from([2, 3]))
def test_end_to_end_properties(seed, n, m):
    inst = random_sukp(seed, n, m=min(m, n), cost_range=(seed % 2, 30))
    cfg = SukpConfig()
    s = approx_sukp(inst, cfg)
    chk = make_solution(inst, s.vertices)
    assert chk.cost <= inst.budget
    assert chk.value == s.value
    assert s.value <= exact_sukp(inst).value
    k1 = knapsack_fptas(inst.costs, inst.vertex_profits, inst.budget, cfg.epsilon)
    assert s.value >= induced_value(inst, k1.vertices)


@given(st.integers(0, 2**31))
def test_deterministic(seed):
    inst = random_sukp(seed, 12)
    assert approx_sukp(inst).to_json() == approx_sukp(inst).to_json()
