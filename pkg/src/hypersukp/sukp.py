"""Set union knapsack approximation.

Pipeline: fold singleton edges into vertex profits, prune infeasible
items and edges, round edge profits to powers of two, bucket item costs by
powers of two, and split the instance into single-level r-partite classes.
Class 1 (vertex profits only) is a plain knapsack.  Class 2 (cheapest
layer is the tiny-cost bucket) and Class 3 (all layers costly) are solved
by fixing part of a layer and recursing on the order r-1 instance that
remains; Class 3 additionally replicates layers into a unit-cost
hypergraph and calls the DkSHP solver on it.

Every candidate is re-scored against the caller's original profits; the
best feasible one is returned.
"""

import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction

from . import exponents
from .dksh import DkshConfig, approx_dksh
from .hypercore import Hypergraph, SukpInstance, Solution, best_of, fmt, induced_value, make_solution
from .oracles import DEFAULT_SUKP_MAX_N, OracleRefusal, exact_sukp

log = logging.getLogger(__name__)

ZERO = Fraction(0)


def pow2(j: int) -> Fraction:
    return Fraction(2) ** j


def floor_log2(x) -> int:
    """Largest j with 2^j <= x, for a positive rational x."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("floor_log2 needs a positive argument")
    j = x.numerator.bit_length() - x.denominator.bit_length()
    if pow2(j) > x:
        j -= 1
    elif pow2(j + 1) <= x:
        j += 1
    return j


def ceil_log2(x) -> int:
    """Smallest j with 2^j >= x."""
    j = floor_log2(x)
    return j if pow2(j) == Fraction(x) else j + 1


@dataclass(frozen=True)
class SukpConfig:
    epsilon: Fraction = Fraction(1, 10)
    exact_cutoff_n: int = 0
    dksh_config: DkshConfig = field(default_factory=lambda: DkshConfig(enum_budget=20_000))
    seed: int = 0
    # Class 2: fixed subsets of a layer have at most this many vertices
    class2_subset_max: int = 3
    # Class 3, B <= 2r a_r: cap on enumerated subsets of the top layer
    class3_enum_budget: int = 5_000
    blowup_max_vertices: int = 96
    blowup_max_edges: int = 20_000
    trace: bool = False

    def __post_init__(self):
        if Fraction(self.epsilon) <= 0:
            raise ValueError("epsilon must be positive")
        if self.exact_cutoff_n < 0:
            raise ValueError("exact_cutoff_n must be >= 0")


# --- knapsack ---------------------------------------------------------------

def knapsack_fptas(costs, profits, budget, epsilon) -> Solution:
    """0/1 knapsack by profit-scaled dynamic programming.

    Returns a set of item indices with cost <= budget and profit at least
    OPT / (1 + epsilon).  Scaling uses K = (eps / (1 + eps)) * pmax / n; with
    integer profits and K <= 1 the DP runs unscaled and is exact.
    """
    costs = [Fraction(c) for c in costs]
    profits = [Fraction(p) for p in profits]
    budget = Fraction(budget)
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    free = [i for i, (c, p) in enumerate(zip(costs, profits)) if c == 0 and p > 0]
    items = [i for i, (c, p) in enumerate(zip(costs, profits)) if 0 < c <= budget and p > 0]
    if not items:
        return _ks_solution(free, costs, profits, scale=None)
    pmax = max(profits[i] for i in items)
    scale = eps / (1 + eps) * pmax / len(items)
    if scale <= 1 and all(profits[i].denominator == 1 for i in items):
        scale = Fraction(1)
    scaled = [math.floor(profits[i] / scale) for i in items]
    # exact integer images of costs and profits keep the DP off Fractions
    cden = math.lcm(budget.denominator, *(costs[i].denominator for i in items))
    pden = math.lcm(*(profits[i].denominator for i in items))
    cap = int(budget * cden)
    ic = [int(costs[i] * cden) for i in items]
    ip = [int(profits[i] * pden) for i in items]
    # scaled total -> (cost, profit, bitmask over positions in `items`)
    dp = {0: (0, 0, 0)}
    for pos in range(len(items)):
        c, p, s = ic[pos], ip[pos], scaled[pos]
        for t, (tc, tp, tm) in list(dp.items()):
            nc = tc + c
            if nc > cap:
                continue
            nt = t + s
            cur = dp.get(nt)
            if cur is None or nc < cur[0] or (nc == cur[0] and tp + p > cur[1]):
                dp[nt] = (nc, tp + p, tm | (1 << pos))
    _, _, mask = min(dp.values(), key=lambda st: (-st[1], st[0], st[2]))
    chosen = [items[pos] for pos in range(len(items)) if mask >> pos & 1]
    return _ks_solution(chosen + free, costs, profits, scale)


def _ks_solution(chosen, costs, profits, scale):
    chosen = sorted(chosen)
    return Solution(
        tuple(chosen),
        sum((profits[i] for i in chosen), ZERO),
        sum((costs[i] for i in chosen), ZERO),
        "knapsack_fptas",
        None,
        {"scale": scale},
    )


# --- preprocessing ----------------------------------------------------------

def fold_singletons(inst: SukpInstance) -> SukpInstance:
    """Move the profit of every size-1 edge onto its vertex."""
    if all(len(e) > 1 for e in inst.edges):
        return inst
    vp = list(inst.vertex_profits)
    pairs = []
    for e, p in zip(inst.edges, inst.profits):
        if len(e) == 1:
            vp[e[0]] += p
        else:
            pairs.append((e, p))
    return SukpInstance.build(list(inst.costs), inst.budget, pairs, vp, inst.m_cap)


def _restrict(inst: SukpInstance, keep, pairs) -> tuple[SukpInstance, tuple[int, ...]]:
    keep = tuple(sorted(keep))
    idx = {v: i for i, v in enumerate(keep)}
    sub = SukpInstance.build(
        [inst.costs[v] for v in keep],
        inst.budget,
        [(tuple(idx[v] for v in e), p) for e, p in pairs],
        [inst.vertex_profits[v] for v in keep],
        inst.m_cap,
    )
    return sub, keep


def prune(inst: SukpInstance) -> tuple[SukpInstance, tuple[int, ...]]:
    """Remove items costing more than B, edges costing more than B and
    zero-profit edges.  Returns the reindexed instance and the kept ids."""
    B = inst.budget
    keep = [v for v in range(inst.n) if inst.costs[v] <= B]
    pairs = [
        (e, p)
        for e, p in zip(inst.edges, inst.profits)
        if p > 0 and inst.cost_of(e) <= B
    ]
    if len(keep) == inst.n and len(pairs) == len(inst.edges):
        return inst, tuple(range(inst.n))
    return _restrict(inst, keep, pairs)


def drop_inert(inst: SukpInstance) -> tuple[SukpInstance, tuple[int, ...]]:
    """Remove items with no vertex profit that lie on no edge."""
    touched = {v for e in inst.edges for v in e}
    keep = [v for v in range(inst.n) if v in touched or inst.vertex_profits[v] > 0]
    if len(keep) == inst.n:
        return inst, tuple(range(inst.n))
    return _restrict(inst, keep, list(zip(inst.edges, inst.profits)))


def profit_levels(inst: SukpInstance, r: int | None = None):
    """``(top, q)``: 2^top is the largest power of two <= max profit, q the
    number of halvings kept (smallest integer with 2^q > n^r)."""
    r = r or max((len(e) for e in inst.edges), default=1)
    pos = [p for p in inst.profits if p > 0]
    if not pos:
        return None, None
    top = floor_log2(max(pos))
    q = (max(inst.n, 1) ** r).bit_length()
    return top, q


def round_profits(inst: SukpInstance, r: int | None = None) -> SukpInstance:
    """Round edge profits down to 2^top, 2^(top-1), .., 2^(top-q); smaller
    profits are dropped with their edges.  Vertex profits are untouched."""
    top, q = profit_levels(inst, r)
    if top is None:
        return SukpInstance.build(list(inst.costs), inst.budget, [], list(inst.vertex_profits), inst.m_cap)
    pairs = []
    for e, p in zip(inst.edges, inst.profits):
        if p <= 0:
            continue
        j = floor_log2(p)
        if j >= top - q:
            pairs.append((e, pow2(j)))
    return SukpInstance.build(list(inst.costs), inst.budget, pairs, list(inst.vertex_profits), inst.m_cap)


@dataclass(frozen=True)
class BucketedInstance:
    base: SukpInstance
    bucket_of: tuple[int, ...]
    k_pow: int
    s: int

    @property
    def tiny(self) -> int:
        return self.s + 3

    def lower(self, i: int) -> Fraction:
        """Exclusive lower cost bound of bucket i (0 for the tiny bucket)."""
        return ZERO if i >= self.tiny else pow2(self.k_pow - i)

    def upper(self, i: int) -> Fraction:
        return pow2(self.k_pow - self.s - 2) if i >= self.tiny else pow2(self.k_pow + 1 - i)

    def members(self, i: int) -> list[int]:
        return [v for v, b in enumerate(self.bucket_of) if b == i]


def bucket_costs(inst: SukpInstance) -> BucketedInstance:
    """Bucket i <= s+2 holds costs in (2^(k-i), 2^(k+1-i)]; bucket s+3 holds
    costs in [0, 2^(k-s-2)], where 2^k >= max cost and 2^s > n."""
    s = max(inst.n, 1).bit_length()
    cmax = max(inst.costs, default=ZERO)
    if cmax == 0:
        return BucketedInstance(inst, tuple([s + 3] * inst.n), 0, s)
    k = ceil_log2(cmax)
    out = []
    for c in inst.costs:
        if c == 0:
            out.append(s + 3)
        else:
            out.append(min(k + 1 - ceil_log2(c), s + 3))
    return BucketedInstance(inst, tuple(out), k, s)


# --- classes ----------------------------------------------------------------

@dataclass(frozen=True)
class ClassInstance:
    """An r-partite, single-profit-level piece of the rounded instance.

    ``edges`` hold one vertex per layer, in layer order; ``layers[j]`` is
    ``(bucket, vertex ids)``.  A vertex may occur in several layers when an
    edge has two items in one bucket; selections are always evaluated on the
    real vertex sets, so feasibility and value are never overstated.
    """

    class_tag: int
    profit_level: Fraction | None
    layers: tuple[tuple[int, tuple[int, ...]], ...]
    edges: tuple[tuple[int, ...], ...]
    budget: Fraction
    costs: dict
    layer_lower: tuple[Fraction, ...] = ()
    vertex_profits: dict = field(default_factory=dict)

    @property
    def r(self) -> int:
        return len(self.layers)

    def layer(self, j: int) -> tuple[int, ...]:
        return self.layers[j][1]

    def cost_of(self, vertices) -> Fraction:
        return sum((self.costs[v] for v in set(vertices)), ZERO)

    def value_of(self, vertices) -> Fraction:
        sel = set(vertices)
        val = sum((p for v, p in self.vertex_profits.items() if v in sel), ZERO)
        if self.profit_level is not None:
            val += self.profit_level * sum(1 for e in self.edges if sel.issuperset(e))
        return val

    def solution(self, vertices, method, **info) -> Solution:
        vs = tuple(sorted(set(vertices)))
        return Solution(vs, self.value_of(vs), self.cost_of(vs), method, None, info)


def decompose(b: BucketedInstance) -> list[ClassInstance]:
    """Class 1 (vertex profits, no edges) followed by one class per
    (profit level, bucket signature) that has at least one edge."""
    inst = b.base
    allv = tuple(range(inst.n))
    costs = {v: inst.costs[v] for v in allv}
    out = [
        ClassInstance(
            1, None, ((0, allv),), (), inst.budget, costs, (ZERO,),
            {v: p for v, p in enumerate(inst.vertex_profits) if p > 0},
        )
    ]
    groups = defaultdict(list)
    for e, p in zip(inst.edges, inst.profits):
        # cheapest bucket (largest index) first; ties by id
        ordered = tuple(sorted(e, key=lambda v: (-b.bucket_of[v], v)))
        sig = tuple(b.bucket_of[v] for v in ordered)
        groups[(p, sig)].append(ordered)
    for (p, sig) in sorted(groups, key=lambda key: (-key[0], key[1])):
        edges = tuple(sorted(groups[(p, sig)]))
        layers = tuple((sig[j], tuple(sorted({e[j] for e in edges}))) for j in range(len(sig)))
        used = {v for e in edges for v in e}
        tag = 2 if sig[0] == b.tiny else 3
        out.append(
            ClassInstance(
                tag, p, layers, edges, inst.budget,
                {v: inst.costs[v] for v in sorted(used)},
                tuple(b.lower(i) for i in sig),
            )
        )
    return out


def normalize_class3(ci: ClassInstance):
    """Scale costs and budget by lam (layer 1's lower bound) and profits to 1.

    Returns ``(normalized, lam, kappa)``; a normalized value times kappa is
    the original value.
    """
    lam = ci.layer_lower[0]
    if lam <= 0:
        raise ValueError("normalize_class3 needs a class without the tiny bucket")
    kappa = ci.profit_level
    norm = replace(
        ci,
        profit_level=Fraction(1),
        budget=ci.budget / lam,
        costs={v: c / lam for v, c in ci.costs.items()},
        layer_lower=tuple(x / lam for x in ci.layer_lower),
    )
    return norm, lam, kappa


# --- blow-up ----------------------------------------------------------------

class BlowUpTooLarge(ValueError):
    """The replicated hypergraph would exceed the configured size limits."""


@dataclass(frozen=True)
class BlowUpGraph:
    source: ClassInstance
    copies: tuple[int, ...]
    vertices: tuple[tuple[int, int, int], ...]  # (layer, index in layer, copy)
    costs: tuple[Fraction, ...]
    graph: Hypergraph
    back_map: tuple[int, ...]

    @property
    def ids(self) -> dict:
        return {t: i for i, t in enumerate(self.vertices)}


def blow_up(ci: ClassInstance, max_vertices: int = 10**4, max_edges: int = 10**6) -> BlowUpGraph:
    """Replace layer j by a_j copies with costs divided by a_j.

    ``ci`` must be normalized so that a_j = layer_lower[j] is a power of
    two >= 1; copy costs then land in (1, 2].
    """
    a = []
    for lo in ci.layer_lower:
        if lo < 1 or lo.denominator != 1:
            raise ValueError(f"layer lower bound {lo} is not an integer >= 1; normalize first")
        a.append(int(lo))
    nv = sum(a[j] * len(ci.layer(j)) for j in range(ci.r))
    ne = len(ci.edges) * math.prod(a)
    if nv > max_vertices or ne > max_edges:
        raise BlowUpTooLarge(f"blow-up would have {nv} vertices and {ne} edges")
    verts, costs, back = [], [], []
    for j in range(ci.r):
        for li, x in enumerate(ci.layer(j)):
            for p in range(a[j]):
                verts.append((j, li, p))
                costs.append(ci.costs[x] / a[j])
                back.append(x)
    ids = {t: i for i, t in enumerate(verts)}
    pos = [{x: li for li, x in enumerate(ci.layer(j))} for j in range(ci.r)]
    hedges = []
    for e in ci.edges:
        idx = [pos[j][x] for j, x in enumerate(e)]
        for combo in itertools.product(*(range(aj) for aj in a)):
            hedges.append(tuple(ids[(j, idx[j], combo[j])] for j in range(ci.r)))
    g = Hypergraph(len(verts), tuple(hedges), max(ci.r, 1))
    return BlowUpGraph(ci, tuple(a), tuple(verts), tuple(costs), g, tuple(back))


def degree_select(hstar: BlowUpGraph, chosen, budget, r: int | None = None) -> Solution:
    """Thin a DkSHP solution on the blow-up down to a budget-feasible set.

    Layer by layer, keep the floor(B / (2r a_j)) original items whose best
    copy has the highest degree in the current restricted subgraph.  The
    result is a set of original vertices valued in ``hstar.source``.
    """
    ci = hstar.source
    r = r or ci.r
    budget = Fraction(budget)
    cnt = [defaultdict(int) for _ in range(ci.r)]
    for vid in set(chosen):
        j, li, _ = hstar.vertices[vid]
        cnt[j][li] += 1
    pos = [{x: li for li, x in enumerate(ci.layer(j))} for j in range(ci.r)]
    hedges = [tuple(pos[j][x] for j, x in enumerate(e)) for e in ci.edges]
    kept: list[set] = []
    per_layer = []
    for j in range(ci.r):
        t = math.floor(budget / (2 * r * hstar.copies[j]))
        if t == 0:
            return ci.solution((), "degree_select", reason=f"no room in layer {j + 1}")
        deg = defaultdict(int)
        for e in hedges:
            if cnt[j][e[j]] == 0:
                continue
            if any(e[jj] not in kept[jj] for jj in range(j)):
                continue
            w = 1
            for jj in range(j + 1, ci.r):
                w *= cnt[jj][e[jj]]
                if not w:
                    break
            if w:
                deg[e[j]] += w
        order = sorted((li for li in deg if deg[li] > 0), key=lambda li: (-deg[li], li))
        kept.append(set(order[:t]))
        per_layer.append(ci.cost_of(ci.layer(j)[li] for li in kept[j]))
    verts = {ci.layer(j)[li] for j in range(ci.r) for li in kept[j]}
    return ci.solution(verts, "degree_select", layer_costs=tuple(per_layer))


# --- solver -----------------------------------------------------------------

class _Run:
    """Per-call state: config, memo of solved sub-instances and the trace."""

    def __init__(self, cfg: SukpConfig):
        self.cfg = cfg
        self.memo: dict = {}
        self.trace: list[dict] = []


def _derive(ci: ClassInstance, edges, fixed, budget: Fraction) -> tuple[SukpInstance, tuple[int, ...], Fraction]:
    """Order r-1 SUKP left after selecting ``fixed``: fixed vertices leave
    every edge; empty edges become a constant, singletons vertex profits."""
    fixed = set(fixed)
    acc = defaultdict(lambda: ZERO)
    offset = ZERO
    for e in edges:
        rest = tuple(sorted({v for v in e if v not in fixed}))
        if rest:
            acc[rest] += ci.profit_level
        else:
            offset += ci.profit_level
    verts = sorted({v for e in acc for v in e})
    idx = {v: i for i, v in enumerate(verts)}
    pairs = [(tuple(idx[v] for v in e), p) for e, p in sorted(acc.items())]
    sub = SukpInstance.build(
        [ci.costs[v] for v in verts], budget, pairs, [0] * len(verts),
        max((len(e) for e in acc), default=1),
    )
    return sub, tuple(verts), offset


def _fix_and_recurse(ci, edges, fixed, run, depth) -> tuple[int, ...] | None:
    budget = ci.budget - ci.cost_of(fixed)
    if budget < 0:
        return None
    sub, verts, _ = _derive(ci, edges, fixed, budget)
    sol = _solve(sub, run, depth + 1)
    return tuple(sorted(set(fixed) | {verts[v] for v in sol.vertices}))


def _record(run, depth, **row):
    if depth == 0 and run.cfg.trace:
        run.trace.append(row)


def solve_class2(ci: ClassInstance, cfg: SukpConfig | None = None, _run=None, _depth=0, _tag=None) -> Solution:
    """Class whose cheapest layer is the tiny-cost bucket.

    Branches: fix X (|X| <= 3) in some layer i >= 2 and recurse on the
    edges through X; or fix the whole first layer and recurse.
    """
    run = _run or _Run(cfg or SukpConfig())
    if ci.class_tag != 2:
        raise ValueError("solve_class2 needs a Class 2 instance")
    cands = [ci.solution((), "class2")]
    smax = run.cfg.class2_subset_max
    for i in range(1, ci.r):
        layer = ci.layer(i)
        for size in range(1, min(smax, len(layer)) + 1):
            for X in itertools.combinations(layer, size):
                if ci.cost_of(X) > ci.budget:
                    continue
                xs = set(X)
                edges = [e for e in ci.edges if e[i] in xs]
                got = _fix_and_recurse(ci, edges, X, run, _depth)
                if got is not None:
                    cands.append(ci.solution(got, "class2:fix_subset", layer=i + 1, subset=X))
    a1 = ci.layer(0)
    if ci.cost_of(a1) <= ci.budget:
        got = _fix_and_recurse(ci, ci.edges, a1, run, _depth)
        if got is not None:
            cands.append(ci.solution(got, "class2:fix_first_layer"))
    for c in cands[1:]:
        _record(run, _depth, event="branch", index=_tag, strategy=c.method, value=fmt(c.value))
    best = best_of(c for c in cands if c.cost <= ci.budget)
    return Solution(best.vertices, best.value, best.cost, "class2", None, {"branch": best.method})


def _top_layer_subsets(ci: ClassInstance, limit: int, cap: int):
    """Subsets of the last layer of size 1..limit, or density-greedy
    prefixes when there are more than ``cap`` of them."""
    top = ci.layer(ci.r - 1)
    total = sum(math.comb(len(top), t) for t in range(1, min(limit, len(top)) + 1))
    if total <= cap:
        for t in range(1, min(limit, len(top)) + 1):
            yield from itertools.combinations(top, t)
        return
    log.info("class 3: %d top-layer subsets exceed budget %d; using greedy prefixes", total, cap)
    deg = defaultdict(int)
    for e in ci.edges:
        deg[e[-1]] += 1
    order = sorted(top, key=lambda x: (-Fraction(deg[x]) / ci.costs[x], x))
    seen = set()
    for t in range(1, min(limit, len(top)) + 1):
        seen.add(tuple(sorted(order[:t])))
    for x in top:
        seen.add((x,))
    yield from sorted(seen)


def solve_class3(ci: ClassInstance, cfg: SukpConfig | None = None, _run=None, _depth=0, _tag=None) -> Solution:
    """Class whose layers all avoid the tiny bucket.

    After normalization every strategy runs: fix one top-layer item (S1);
    fix the first layer (S2); when B <= 2r a_r, fix small top-layer subsets
    (S3); otherwise blow up, solve DkSHP with k = floor(B) and thin by
    degrees (S4).  Values are reported in the original scale.
    """
    run = _run or _Run(cfg or SukpConfig())
    if ci.class_tag != 3:
        raise ValueError("solve_class3 needs a Class 3 instance")
    h, lam, kappa = normalize_class3(ci)
    r = h.r
    B = h.budget
    cands = [h.solution((), "class3")]
    top = h.layer(r - 1)
    for x in top:
        if h.costs[x] > B:
            continue
        edges = [e for e in h.edges if e[-1] == x]
        got = _fix_and_recurse(h, edges, (x,), run, _depth)
        if got is not None:
            cands.append(h.solution(got, "class3:S1", item=x))
    a1 = h.layer(0)
    if h.cost_of(a1) <= B:
        got = _fix_and_recurse(h, h.edges, a1, run, _depth)
        if got is not None:
            cands.append(h.solution(got, "class3:S2"))
    a_r = h.layer_lower[-1]
    if B <= 2 * r * a_r:
        for X in _top_layer_subsets(h, 2 * r, run.cfg.class3_enum_budget):
            if len(X) == 1 or h.cost_of(X) > B:
                continue  # singletons are S1
            xs = set(X)
            edges = [e for e in h.edges if e[-1] in xs]
            got = _fix_and_recurse(h, edges, X, run, _depth)
            if got is not None:
                cands.append(h.solution(got, "class3:S3", subset=X))
    else:
        s4 = _blow_up_branch(h, run)
        if s4 is not None:
            cands.append(s4)
    for c in cands[1:]:
        _record(run, _depth, event="branch", index=_tag, strategy=c.method, value=fmt(c.value * kappa))
    best = best_of(c for c in cands if c.cost <= B)
    return Solution(best.vertices, best.value * kappa, best.cost * lam, "class3", None, {"branch": best.method})


def _blow_up_branch(h: ClassInstance, run: _Run) -> Solution | None:
    cfg = run.cfg
    try:
        hs = blow_up(h, cfg.blowup_max_vertices, cfg.blowup_max_edges)
    except BlowUpTooLarge as exc:
        log.info("class 3 S4 skipped: %s", exc)
        return None
    k = min(math.floor(h.budget), hs.graph.n)
    if k < 1:
        return None
    chosen = approx_dksh(hs.graph, k, h.r, cfg.dksh_config)
    sel = degree_select(hs, chosen.vertices, h.budget, h.r)
    return h.solution(sel.vertices, "class3:S4", dksh_value=fmt(chosen.value))


def solve_class(ci: ClassInstance, cfg: SukpConfig | None = None, _run=None, _depth=0, _tag=None) -> Solution:
    run = _run or _Run(cfg or SukpConfig())
    if ci.class_tag == 1:
        vs = ci.layer(0)
        ks = knapsack_fptas(
            [ci.costs[v] for v in vs],
            [ci.vertex_profits.get(v, ZERO) for v in vs],
            ci.budget,
            run.cfg.epsilon,
        )
        return ci.solution([vs[i] for i in ks.vertices], "class1")
    if ci.class_tag == 2:
        return solve_class2(ci, _run=run, _depth=_depth, _tag=_tag)
    return solve_class3(ci, _run=run, _depth=_depth, _tag=_tag)


def _add_free(inst: SukpInstance, vertices):
    free = [v for v in range(inst.n) if inst.costs[v] == 0]
    if not free:
        return vertices
    more = set(vertices) | set(free)
    if induced_value(inst, more) > induced_value(inst, vertices):
        return tuple(sorted(more))
    return vertices


def _solve(inst: SukpInstance, run: _Run, depth: int) -> Solution:
    hit = run.memo.get(inst)
    if hit is not None:
        return hit
    cfg = run.cfg
    folded = fold_singletons(inst)
    pruned, kept1 = prune(folded)
    work, kept2 = drop_inert(pruned)
    back = [kept1[v] for v in kept2]

    cands = []  # (vertex set in `work` ids, method)
    if work.n:
        classes = [decompose(bucket_costs(work))[0]]
        if work.edges:
            classes = decompose(bucket_costs(round_profits(work)))
        for i, ci in enumerate(classes):
            s = solve_class(ci, None, run, depth, i)
            cands.append((s.vertices, f"class{ci.class_tag}"))
            if depth == 0 and cfg.trace:
                full = make_solution(inst, [back[v] for v in s.vertices])
                run.trace.append({
                    "event": "class", "index": i, "class": ci.class_tag,
                    "level": None if ci.profit_level is None else fmt(ci.profit_level),
                    "buckets": [b for b, _ in ci.layers] if ci.class_tag != 1 else [],
                    "edges": len(ci.edges), "value": fmt(full.value), "cost": fmt(full.cost),
                })
        if work.n <= cfg.exact_cutoff_n:
            try:
                cands.append((exact_sukp(work, DEFAULT_SUKP_MAX_N).vertices, "exact"))
            except OracleRefusal as exc:
                log.info("exact branch skipped: %s", exc)

    sols = [make_solution(inst, _free_ids(inst), "empty")]
    for verts, method in cands:
        verts = _add_free(work, verts)
        s = make_solution(inst, [back[v] for v in verts], method)
        if s.cost > inst.budget:
            raise AssertionError(f"infeasible candidate from {method}: {s.cost} > {inst.budget}")
        sols.append(s)
    best = best_of(sols)
    run.memo[inst] = best
    return best


def _free_ids(inst):
    return [v for v in range(inst.n) if inst.costs[v] == 0]


def approx_sukp(inst: SukpInstance, cfg: SukpConfig | None = None) -> Solution:
    """Best feasible selection found by the class pipeline (plus exact
    enumeration when n <= exact_cutoff_n), valued with the input profits."""
    cfg = cfg or SukpConfig()
    run = _Run(cfg)
    best = _solve(inst, run, 0)
    r = max((len(e) for e in inst.edges), default=1)
    info = dict(best.info)
    if cfg.trace:
        info["trace"] = run.trace
    return Solution(best.vertices, best.value, best.cost, best.method, exponents.alpha(max(r, 1)), info)
