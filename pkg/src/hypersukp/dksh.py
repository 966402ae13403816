"""Densest k-subhypergraph approximation.

``approx_dksh`` recurses on the edge order m: each block of floor(k/2)
vertices is turned into its (m-1)-uniform link multi-hypergraph, which is
solved as a weighted instance by power-of-two weight rounding plus a
recursive call, and the block is added back.  The cheap edge-packing
solver and (for small instances) exact enumeration always run as well; the
best feasible set wins.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable

from . import exponents
from .hypercore import (
    Hypergraph,
    InstanceError,
    Solution,
    WeightedHypergraph,
    best_of,
    induced_value,
    link_multihypergraph,
    make_solution,
)
from .oracles import OracleRefusal, exact_dksh

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BaseOracleSpec:
    """A pluggable DkSP (m = 2) solver used at the bottom of the recursion."""

    name: str
    solve: Callable[[Hypergraph, int], Solution]
    claimed_exponent: Fraction


def _compact(g: Hypergraph):
    """Drop isolated vertices; returns the smaller graph and its id map."""
    used = sorted({v for e in g.edges for v in e})
    idx = {v: i for i, v in enumerate(used)}
    sub = Hypergraph(len(used), tuple(tuple(idx[v] for v in e) for e in g.edges), g.m_cap)
    return sub, used


def pad(vertices, k: int, n: int) -> tuple[int, ...]:
    """Fill a vertex set up to k ids with the lowest unused ids."""
    out = set(vertices)
    v = 0
    while len(out) < k and v < n:
        out.add(v)
        v += 1
    return tuple(sorted(out))


def exact_base_oracle(g: Hypergraph, k: int, budget: int = 10**6) -> Solution:
    """Exact DkSP by enumeration over the non-isolated vertices."""
    sub, used = _compact(g)
    if sub.n <= k:
        verts = used
    else:
        verts = [used[v] for v in exact_dksh(sub, k, budget).vertices]
    return make_solution(g, pad(verts, k, g.n), "exact_base")


def greedy_base_oracle(g: Hypergraph, k: int) -> Solution:
    """Better of min-degree peeling and the k highest-degree vertices.

    Ties go to the lowest vertex id in both rules.
    """
    n = g.n
    k = min(k, n)
    deg = g.degrees()
    top = sorted(range(n), key=lambda v: (-deg[v], v))[:k]

    incident = [[] for _ in range(n)]
    for i, e in enumerate(g.edges):
        for v in e:
            incident[v].append(i)
    alive_edge = [True] * len(g.edges)
    cur = list(deg)
    alive = set(range(n))
    while len(alive) > k:
        v = min(alive, key=lambda u: (cur[u], u))
        alive.remove(v)
        for i in incident[v]:
            if alive_edge[i]:
                alive_edge[i] = False
                for u in g.edges[i]:
                    if u != v:
                        cur[u] -= 1
    cands = [make_solution(g, alive, "greedy_base"), make_solution(g, top, "greedy_base")]
    return best_of(cands)


EXACT_BASE = BaseOracleSpec("exact", exact_base_oracle, Fraction(0))
GREEDY_BASE = BaseOracleSpec("greedy", greedy_base_oracle, Fraction(1))


def _auto_solve(g: Hypergraph, k: int) -> Solution:
    try:
        return exact_base_oracle(g, k)
    except OracleRefusal:
        return greedy_base_oracle(g, k)


AUTO_BASE = BaseOracleSpec("auto", _auto_solve, Fraction(1))
BASES = {"exact": EXACT_BASE, "greedy": GREEDY_BASE, "auto": AUTO_BASE}


@dataclass(frozen=True)
class DkshConfig:
    epsilon: Fraction = Fraction(1, 10)
    exact_cutoff_n: int = 0
    base: BaseOracleSpec = field(default=AUTO_BASE)
    seed: int = 0
    # enumeration cap for the exact branch; over-budget instances skip it
    enum_budget: int = 200_000
    # route k < 4m instances to the exact branch
    small_k_exact: bool = True

    def __post_init__(self):
        if Fraction(self.epsilon) <= 0:
            raise ValueError("epsilon must be positive")
        if self.exact_cutoff_n < 0:
            raise ValueError("exact_cutoff_n must be >= 0")


def guarantee_exponent(m: int, cfg: DkshConfig) -> Fraction:
    return exponents.theta_bound(m, cfg.base.claimed_exponent) if m >= 2 else Fraction(0)


def solve_trivial(g: Hypergraph, k: int, m: int) -> Solution:
    """Edge packing with an O(k^(m-1)) guarantee.

    Fewer than k/m edges: all of them fit, which is optimal.  Otherwise
    edges are added greedily, fewest new vertices first, while the union
    stays within k; at least floor(k/m) edges always fit.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > g.n:
        raise ValueError(f"k={k} exceeds n={g.n}")
    edges = g.edges
    if m * len(edges) < k:
        verts = {v for e in edges for v in e}
        return make_solution(g, pad(verts, k, g.n), "trivial")
    chosen: set[int] = set()
    used = [False] * len(edges)
    while True:
        best, best_new = None, None
        for i, e in enumerate(edges):
            if used[i]:
                continue
            new = sum(1 for v in e if v not in chosen)
            if len(chosen) + new > k:
                continue
            if best_new is None or new < best_new:
                best, best_new = i, new
                if new == 0:
                    break
        if best is None:
            break
        used[best] = True
        chosen.update(edges[best])
    return make_solution(g, pad(chosen, k, g.n), "trivial")


def round_weights(weights, n: int, m: int):
    """Round each weight down to w_max / 2^j (j = 0..l) or to 0.

    Returns ``(rounded, l)`` with l = ceil(log2 C(n, m)).
    """
    weights = [Fraction(w) for w in weights]
    x = math.comb(n, m)
    l = (x - 1).bit_length() if x > 1 else 0
    if not weights:
        return [], l
    w = max(weights)
    out = []
    for wt in weights:
        lvl = w
        j = 0
        while lvl > wt and j <= l:
            lvl /= 2
            j += 1
        out.append(lvl if j <= l else Fraction(0))
    return out, l


def solve_weighted(g: WeightedHypergraph, k: int, unweighted_solver, m: int | None = None) -> Solution:
    """Weighted DkSHP through one unweighted solve per rounded weight level.

    The level solution with the largest original weight is returned.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if any(w <= 0 for w in g.weights):
        raise InstanceError("weights must be positive")
    m = m or g.m_cap
    k = min(k, g.n)
    rounded, l = round_weights(g.weights, g.n, m)
    levels: dict[Fraction, list] = {}
    for e, rw in zip(g.edges, rounded):
        levels.setdefault(rw, []).append(e)
    sols = []
    for lvl in sorted(levels, reverse=True):
        sub = Hypergraph(g.n, tuple(levels[lvl]), g.m_cap)
        s = unweighted_solver(sub, k)
        sols.append(make_solution(g, s.vertices, "weighted", level=lvl))
    if not sols:
        return make_solution(g, pad((), k, g.n), "weighted")
    best = best_of(sols)
    return Solution(best.vertices, best.value, best.cost, "weighted", None, {"levels": len(levels), "l": l})


def _exact_branch(g: Hypergraph, k: int, cfg: DkshConfig):
    sub, used = _compact(g)
    if sub.n <= k:
        return make_solution(g, pad(used, k, g.n), "exact")
    try:
        s = exact_dksh(sub, k, cfg.enum_budget)
    except OracleRefusal as exc:
        log.debug("exact branch skipped: %s", exc)
        return None
    return make_solution(g, pad([used[v] for v in s.vertices], k, g.n), "exact")


def approx_dksh(g: Hypergraph, k: int, m: int | None = None, cfg: DkshConfig | None = None) -> Solution:
    """Best feasible k-set over all branches of the order-m recursion."""
    cfg = cfg or DkshConfig()
    m = m or g.m_cap
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > g.n:
        raise ValueError(f"k={k} exceeds n={g.n}")
    if any(len(e) > m for e in g.edges):
        raise InstanceError(f"edges larger than m={m}")
    gexp = guarantee_exponent(m, cfg)
    if not g.edges:
        return make_solution(g, pad((), k, g.n), "empty", gexp)

    cands = [solve_trivial(g, k, m)]
    if g.n <= cfg.exact_cutoff_n or (cfg.small_k_exact and k < 4 * m):
        s = _exact_branch(g, k, cfg)
        if s is not None:
            cands.append(s)
    if m <= 2:
        s = cfg.base.solve(g, k)
        if len(s.vertices) > k:
            raise RuntimeError(f"base oracle {cfg.base.name} returned {len(s.vertices)} > k vertices")
        cands.append(make_solution(g, pad(s.vertices, k, g.n), f"base:{cfg.base.name}"))
    else:
        cands.extend(_link_branch(g, k, m, cfg))

    best = best_of(cands)
    return Solution(best.vertices, best.value, Fraction(len(best.vertices)), best.method, gexp, best.info)


def _link_branch(g: Hypergraph, k: int, m: int, cfg: DkshConfig) -> list[Solution]:
    half = k // 2
    top = Hypergraph(g.n, g.edges_of_size(m), g.m_cap)
    if half < 1 or not top.edges:
        return []
    if log.isEnabledFor(logging.DEBUG):
        th = exponents.theta(m)
        log.debug(
            "m=%d n=%d k=%d: proof threshold k >= n^(%s) = %.3f, blocks=%d",
            m, g.n, k, th / (m - 1), g.n ** float(th / (m - 1)), math.ceil(g.n / half),
        )

    def sub_solver(h: Hypergraph, kk: int) -> Solution:
        return approx_dksh(h, kk, m - 1, cfg)

    out = []
    for start in range(0, g.n, half):
        block = range(start, min(start + half, g.n))
        if not any(v in block for e in top.edges for v in e):
            continue
        link = link_multihypergraph(top, block)
        sub = solve_weighted(link, half, sub_solver, m - 1)
        verts = set(sub.vertices) | set(block)
        out.append(make_solution(g, pad(verts, k, g.n), "link", block=(block.start, block.stop)))
    return out


def make_config(epsilon=Fraction(1, 10), exact_cutoff_n=0, base="auto", seed=0, **kw) -> DkshConfig:
    b = BASES[base] if isinstance(base, str) else base
    return DkshConfig(Fraction(epsilon), exact_cutoff_n, b, seed, **kw)


def with_base(cfg: DkshConfig, base: str) -> DkshConfig:
    return replace(cfg, base=BASES[base])


__all__ = [
    "AUTO_BASE",
    "BaseOracleSpec",
    "DkshConfig",
    "EXACT_BASE",
    "GREEDY_BASE",
    "approx_dksh",
    "exact_base_oracle",
    "greedy_base_oracle",
    "induced_value",
    "make_config",
    "pad",
    "round_weights",
    "solve_trivial",
    "solve_weighted",
]
