"""Brute-force ground truth and seeded instance generators.

The exact solvers enumerate every candidate set with numpy bitmasks.  They
refuse (``OracleRefusal``) rather than approximate when an instance is
over budget.

Generators draw from ``numpy.random.Generator(PCG64(seed))``; the same
:class:`GenSpec` always yields the same instance.
"""

import itertools
import json
import math
from dataclasses import asdict, dataclass, fields
from fractions import Fraction

import numpy as np

from .hypercore import (
    Hypergraph,
    SukpInstance,
    Solution,
    WeightedHypergraph,
    make_solution,
)

DEFAULT_ENUM_BUDGET = 10**7
DEFAULT_SUKP_MAX_N = 24
_CHUNK = 1 << 16
_INT64_SAFE = 1 << 62


class OracleRefusal(RuntimeError):
    """The instance is larger than the configured enumeration budget."""


def _scale_to_ints(values):
    """Common-denominator integer image of a list of Fractions."""
    den = 1
    for v in values:
        den = math.lcm(den, Fraction(v).denominator)
    ints = [int(Fraction(v) * den) for v in values]
    return ints, den


def _int_array(ints):
    # int64 when no sum can overflow, else exact Python ints
    if sum(abs(x) for x in ints) < _INT64_SAFE:
        return np.array(ints, dtype=np.int64)
    return np.array(ints, dtype=object)


def _edge_masks(edges):
    return [sum(1 << v for v in e) for e in edges]


def _combo_chunks(n, k):
    it = itertools.combinations(range(n), k)
    while True:
        block = list(itertools.islice(it, _CHUNK))
        if not block:
            return
        arr = np.array(block, dtype=np.int64).reshape(len(block), k)
        yield block, np.bitwise_or.reduce(np.left_shift(1, arr), axis=1) if k else np.zeros(len(block), np.int64)


def exact_dksh(g, k: int, budget: int = DEFAULT_ENUM_BUDGET) -> Solution:
    """Optimal k-subset of a (weighted) hypergraph by full enumeration.

    Ties resolve to the lexicographically least k-set.
    """
    n = g.n
    if k < 0 or k > n:
        raise ValueError(f"k must lie in [0, n={n}], got {k}")
    if n > 62:
        raise OracleRefusal(f"n={n} exceeds the 62-vertex bitmask limit")
    total = math.comb(n, k)
    if total > budget:
        raise OracleRefusal(f"C({n},{k})={total} exceeds enumeration budget {budget}")
    weighted = isinstance(g, WeightedHypergraph)
    masks = _edge_masks(g.edges)
    if weighted:
        w_int, _ = _scale_to_ints(g.weights)
    else:
        w_int = [1] * len(masks)
    w_arr = _int_array(w_int)
    best_val, best_set = None, None
    for block, sets in _combo_chunks(n, k):
        vals = np.zeros(len(block), dtype=w_arr.dtype)
        for em, w in zip(masks, w_arr):
            vals += ((sets & em) == em) * w
        i = int(np.argmax(vals))
        if best_val is None or vals[i] > best_val:
            best_val, best_set = vals[i], block[i]
    method = "exact_weighted_dksh" if weighted else "exact_dksh"
    return make_solution(g, best_set, method)


def exact_weighted_dksh(g: WeightedHypergraph, k: int, budget: int = DEFAULT_ENUM_BUDGET) -> Solution:
    if not isinstance(g, WeightedHypergraph):
        raise TypeError("exact_weighted_dksh needs a WeightedHypergraph")
    return exact_dksh(g, k, budget)


def exact_sukp(inst: SukpInstance, max_n: int = DEFAULT_SUKP_MAX_N) -> Solution:
    """Optimal SUKP subset over all 2^n selections.

    Witness rule: among optimal sets, least cost, then least bitmask.
    """
    n = inst.n
    if n > max_n:
        raise OracleRefusal(f"n={n} exceeds exact SUKP limit {max_n}")
    if n == 0:
        return make_solution(inst, (), "exact_sukp")
    c_int, _ = _scale_to_ints(list(inst.costs) + [inst.budget])
    b_int = c_int.pop()
    p_int, _ = _scale_to_ints(list(inst.vertex_profits) + list(inst.profits))
    vp, ep = p_int[:n], p_int[n:]
    c_arr = _int_array(c_int)
    vp_arr = _int_array(vp)
    ep_arr = _int_array(ep)
    masks = _edge_masks(inst.edges)
    best = None  # (value, -cost, -mask) maximised
    for start in range(0, 1 << n, _CHUNK):
        sets = np.arange(start, min(start + _CHUNK, 1 << n), dtype=np.int64)
        cost = np.zeros(len(sets), dtype=c_arr.dtype)
        val = np.zeros(len(sets), dtype=vp_arr.dtype)
        for i in range(n):
            bit = (sets >> i) & 1
            if c_int[i]:
                cost += bit * c_arr[i]
            if vp[i]:
                val += bit * vp_arr[i]
        for em, p in zip(masks, ep_arr):
            val += ((sets & em) == em) * p
        ok = cost <= b_int
        if not ok.any():
            continue
        fv = val[ok]
        top = fv.max()
        cand = np.nonzero(ok)[0][fv == top]
        j = min(cand, key=lambda t: (cost[t], sets[t]))
        key = (top, -cost[j], -int(sets[j]))
        if best is None or key > best:
            best = key
    mask = -best[2]
    return make_solution(inst, [i for i in range(n) if mask >> i & 1], "exact_sukp")


def exact_knapsack(costs, profits, budget) -> tuple[Fraction, tuple[int, ...]]:
    """Optimal 0/1 knapsack by dynamic programming over exact total cost."""
    c_int, _ = _scale_to_ints(list(costs) + [budget])
    cap = c_int.pop()
    p_int, pden = _scale_to_ints(profits)
    best = {0: (0, ())}
    for i, (c, p) in enumerate(zip(c_int, p_int)):
        for tc, (tp, items) in list(best.items()):
            nc = tc + c
            if nc > cap:
                continue
            cur = best.get(nc)
            if cur is None or tp + p > cur[0]:
                best[nc] = (tp + p, items + (i,))
    val, items = max(best.values(), key=lambda t: t[0])
    return Fraction(val, pden), items


# --- generators ------------------------------------------------------------

KINDS = ("uniform-random", "planted-dense", "sukp-random", "sukp-correlated")


class SpecError(ValueError):
    """Generator spec cannot be satisfied."""


@dataclass(frozen=True)
class GenSpec:
    kind: str
    n: int
    m: int
    edges: int | None = None
    p: float | None = None
    core: int = 0
    core_density: float = 1.0
    cost_range: tuple = (1, 10)
    cost_den: int = 1
    profit_range: tuple = (1, 10)
    budget_frac: float = 0.5
    vertex_profit_prob: float = 0.0
    mixed_sizes: bool = False
    seed: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "GenSpec":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise SpecError(f"unknown GenSpec fields: {sorted(unknown)}")
        d = dict(d)
        for key in ("cost_range", "profit_range"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed % (1 << 64)))


def _sample_subsets(rng, pool, m, count, exclude=()):
    """``count`` distinct m-subsets of ``pool`` not in ``exclude``."""
    exclude = {c for c in exclude if len(c) == m}
    total = math.comb(len(pool), m)
    if count > total - len(exclude):
        raise SpecError(f"cannot draw {count} distinct {m}-sets from {len(pool)} vertices")
    if total <= 200_000:
        allc = [c for c in itertools.combinations(pool, m) if c not in exclude]
        idx = rng.choice(len(allc), size=count, replace=False)
        return [allc[i] for i in sorted(idx)]
    out, seen = [], set(exclude)
    while len(out) < count:
        c = tuple(sorted(int(x) for x in rng.choice(pool, size=m, replace=False)))
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def _draw_edges(spec: GenSpec, rng):
    n, m = spec.n, spec.m
    if m < 1 or m > n:
        raise SpecError(f"need 1 <= m <= n, got m={m}, n={n}")
    sizes = list(range(2, m + 1)) if spec.mixed_sizes and m >= 2 else [m]
    edges = []
    if spec.kind == "planted-dense":
        if not 0 <= spec.core <= n:
            raise SpecError(f"core size {spec.core} outside [0, {n}]")
        core = sorted(int(x) for x in rng.choice(n, size=spec.core, replace=False))
        for c in itertools.combinations(core, m):
            if spec.core_density >= 1 or rng.random() < spec.core_density:
                edges.append(c)
    if spec.edges is not None:
        if spec.edges < 0:
            raise SpecError("edges must be >= 0")
        per = [spec.edges // len(sizes) + (i < spec.edges % len(sizes)) for i in range(len(sizes))]
        for size, cnt in zip(sizes, per):
            edges += _sample_subsets(rng, list(range(n)), size, cnt, exclude=edges)
    elif spec.p is not None:
        taken = set(edges)
        for size in sizes:
            for c in itertools.combinations(range(n), size):
                if rng.random() < spec.p and c not in taken:
                    edges.append(c)
    elif spec.kind != "planted-dense":
        raise SpecError("one of edges or p is required")
    return sorted(set(edges))


def generate(spec: GenSpec):
    if spec.kind not in KINDS:
        raise SpecError(f"unknown kind {spec.kind!r}; expected one of {KINDS}")
    if spec.n < 1:
        raise SpecError("n must be >= 1")
    rng = _rng(spec.seed)
    edges = _draw_edges(spec, rng)
    if spec.kind in ("uniform-random", "planted-dense"):
        return Hypergraph.build(spec.n, edges, m_cap=spec.m)
    lo, hi = spec.cost_range
    if lo < 0 or hi < lo:
        raise SpecError(f"bad cost_range {spec.cost_range}")
    costs = [Fraction(int(x), spec.cost_den) for x in rng.integers(lo, hi, size=spec.n, endpoint=True)]
    plo, phi = spec.profit_range
    if plo < 0 or phi < plo:
        raise SpecError(f"bad profit_range {spec.profit_range}")
    profits = []
    for e in edges:
        base = int(rng.integers(plo, phi, endpoint=True))
        if spec.kind == "sukp-correlated":
            base += int(sum(costs[v] for v in e))
        profits.append(Fraction(base))
    vprof = [
        Fraction(int(rng.integers(plo, phi, endpoint=True))) if rng.random() < spec.vertex_profit_prob else Fraction(0)
        for _ in range(spec.n)
    ]
    budget = Fraction(math.floor(sum(costs) * Fraction(spec.budget_frac).limit_denominator(1000)))
    return SukpInstance.build(costs, budget, list(zip(edges, profits)), vprof, m_cap=spec.m)
