"""Property verification over seeded random instances, and benchmarking.

Every check draws its instances from a per-trial seed (logged for any
violation) and compares against brute-force ground truth.  Solver outputs
are never trusted: values are recomputed from the returned vertex sets.
"""

import itertools
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exponents
from .dksh import approx_dksh, make_config, round_weights, solve_trivial, solve_weighted
from .hypercore import (
    Hypergraph,
    SukpInstance,
    WeightedHypergraph,
    induced_value,
    make_solution,
)
from .oracles import (
    GenSpec,
    OracleRefusal,
    exact_dksh,
    exact_knapsack,
    exact_sukp,
    generate,
)
from .sukp import (
    ClassInstance,
    SukpConfig,
    approx_sukp,
    blow_up,
    degree_select,
    knapsack_fptas,
    prune,
    round_profits,
)

CHECKS = ("identities", "lemma22", "lemma23", "rounding4x", "blowup", "feasibility", "fptas")


class ConfigError(ValueError):
    """Requested sizes are beyond what the brute-force oracles accept."""


@dataclass
class VerifyReport:
    check: str
    trials: int
    violations: int = 0
    worst_ratio: Fraction | None = None
    violation_seeds: list = field(default_factory=list)
    bound: str = ""

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def observe(self, ratio):
        if ratio is not None and (self.worst_ratio is None or ratio > self.worst_ratio):
            self.worst_ratio = ratio

    def to_json(self) -> dict:
        w = self.worst_ratio
        return {
            "check": self.check,
            "trials": self.trials,
            "violations": self.violations,
            "worst_ratio": None if w is None else (str(w) if isinstance(w, Fraction) else w),
            "bound": self.bound,
            "violation_seeds": self.violation_seeds,
        }


def trial_seed(seed: int, i: int) -> int:
    return (seed * 1_000_003 + i) % (1 << 63)


def _rng(s):
    return np.random.Generator(np.random.PCG64(s))


def _ratio(big, small):
    """big / small with 0/0 = 1 and x/0 = infinity."""
    big, small = Fraction(big), Fraction(small)
    if small == 0:
        return Fraction(1) if big == 0 else math.inf
    return big / small


# --- individual trials: each returns (violated, ratio) -----------------------

def trial_lemma22(s: int, bounds: dict):
    """MAX[G, floor(k/2)] * 3^m >= MAX[G, k] for k >= 4m."""
    rng = _rng(s)
    m = bounds.get("m") or (3 if s % 10 == 9 else 2)
    if m == 2:
        n = int(rng.integers(8, bounds.get("n_max", 12), endpoint=True))
        k = int(rng.integers(8, n, endpoint=True))
    else:
        n = bounds.get("n3", 13)
        k = bounds.get("k3", 12)
    if k < 4 * m:
        raise ConfigError(f"lemma22 needs k >= 4m, got k={k}, m={m}")
    total = math.comb(n, m)
    e = int(rng.integers(1, total, endpoint=True))
    g = generate(GenSpec("uniform-random", n=n, m=m, edges=e, seed=s))
    full = exact_dksh(g, k).value
    half = exact_dksh(g, k // 2).value
    return half * 3**m < full, _ratio(full, half)


def _random_weighted(rng, n, m):
    total = math.comb(n, m)
    count = int(rng.integers(1, min(total, 3 * n), endpoint=True))
    pick = rng.choice(total, size=count, replace=False)
    allc = list(itertools.combinations(range(n), m))
    weights = {}
    for i in sorted(pick):
        num = int(rng.integers(1, 200, endpoint=True))
        den = int(rng.integers(1, 4, endpoint=True))
        weights[allc[i]] = Fraction(num, den)
    return WeightedHypergraph.from_weights(n, weights, m_cap=m)


def trial_lemma23(s: int, bounds: dict):
    """Weighted reduction with an exact per-level solver keeps
    OPT / (4(l+2)); the rounded graph keeps OPT / 4."""
    rng = _rng(s)
    n = int(rng.integers(4, bounds.get("n_max", 10), endpoint=True))
    m = int(rng.integers(2, min(bounds.get("m_max", 3), n), endpoint=True))
    k = int(rng.integers(m, n, endpoint=True))
    g = _random_weighted(rng, n, m)
    opt = exact_dksh(g, k).value
    sol = solve_weighted(g, k, lambda h, kk: exact_dksh(h, kk), m)
    if len(sol.vertices) > k or sol.value != induced_value(g, sol.vertices):
        return True, None
    rounded, l = round_weights(g.weights, n, m)
    gstar = WeightedHypergraph.from_weights(n, dict(zip(g.edges, rounded)), m_cap=m)
    opt_star = exact_dksh(gstar, k).value if gstar.edges else Fraction(0)
    bad = sol.value * 4 * (l + 2) < opt or opt_star * 4 < opt
    return bad, _ratio(opt, sol.value)


def _random_sukp(rng, s, n, m):
    sizes = range(2, m + 1)
    cap = len(sizes) * min(math.comb(n, t) for t in sizes)
    spec = GenSpec(
        "sukp-random" if s % 2 == 0 else "sukp-correlated",
        n=n,
        m=m,
        edges=int(rng.integers(1, min(2 * n, cap), endpoint=True)),
        mixed_sizes=True,
        cost_range=(0 if s % 7 == 0 else 1, int(rng.integers(2, 40))),
        cost_den=int(rng.integers(1, 3, endpoint=True)),
        profit_range=(0 if s % 5 == 0 else 1, int(rng.integers(1, 100))),
        budget_frac=float(rng.choice([0.1, 0.25, 0.4, 0.6])),
        vertex_profit_prob=float(rng.choice([0.0, 0.3])),
        seed=s,
    )
    return generate(spec)


def trial_rounding4x(s: int, bounds: dict):
    """Pruning keeps OPT exactly; power-of-two rounding keeps >= OPT / 4."""
    rng = _rng(s)
    n = int(rng.integers(3, bounds.get("n_max", 10), endpoint=True))
    m = int(rng.integers(2, min(bounds.get("m_max", 3), n), endpoint=True))
    inst = _random_sukp(rng, s, n, m)
    opt = exact_sukp(inst).value
    pr, _ = prune(inst)
    if exact_sukp(pr).value != opt:
        return True, None
    ro = exact_sukp(round_profits(inst)).value
    return ro * 4 < opt, _ratio(opt, ro)


def random_class3(rng, max_blowup: int = 14) -> ClassInstance:
    """Tiny normalized Class-3 instance: disjoint layers, a_j in {1, 2, 4},
    normalized costs in (a_j, 2 a_j], unit profits, blow-up size bounded."""
    while True:
        r = int(rng.integers(2, 3, endpoint=True))
        a = [1]
        for _ in range(r - 1):
            a.append(a[-1] * int(rng.choice([1, 1, 2])))
        sizes = [int(rng.integers(1, 3, endpoint=True)) for _ in range(r)]
        if sum(x * y for x, y in zip(a, sizes)) <= max_blowup:
            break
    layers, costs, nxt = [], {}, 0
    for j in range(r):
        ids = tuple(range(nxt, nxt + sizes[j]))
        nxt += sizes[j]
        for v in ids:
            # quarter steps strictly above a_j up to 2 a_j
            costs[v] = Fraction(a[j]) + Fraction(int(rng.integers(1, 4 * a[j], endpoint=True)), 4)
        layers.append((j + 1, ids))
    allc = list(itertools.product(*(ids for _, ids in layers)))
    pick = rng.choice(len(allc), size=int(rng.integers(1, len(allc), endpoint=True)), replace=False)
    edges = tuple(sorted(allc[i] for i in pick))
    total = sum(costs.values())
    budget = Fraction(int(rng.integers(2, 4 * int(total) + 4, endpoint=True)), 4)
    return ClassInstance(3, Fraction(1), tuple(layers), edges, budget, costs, tuple(Fraction(x) for x in a))


def class_as_sukp(ci: ClassInstance) -> tuple[SukpInstance, list]:
    verts = sorted(ci.costs)
    idx = {v: i for i, v in enumerate(verts)}
    inst = SukpInstance.build(
        [ci.costs[v] for v in verts],
        ci.budget,
        [(tuple(idx[v] for v in e), ci.profit_level) for e in ci.edges],
        m_cap=ci.r,
    )
    return inst, verts


def trial_blowup(s: int, bounds: dict):
    """MAX[H*, B] >= (prod a_j) MAX[H, B], both as SUKP with budget B and as
    DkSHP with k = floor(B); degree selection respects B / r per layer."""
    rng = _rng(s)
    ci = random_class3(rng, bounds.get("max_blowup", 14))
    hs = blow_up(ci)
    prod_a = math.prod(hs.copies)
    h_inst, _ = class_as_sukp(ci)
    opt_h = exact_sukp(h_inst).value
    star = SukpInstance.build(list(hs.costs), ci.budget, [(e, 1) for e in hs.graph.edges], m_cap=ci.r)
    opt_star = exact_sukp(star).value
    k = min(math.floor(ci.budget), hs.graph.n)
    best_k = exact_dksh(hs.graph, k)
    bad = opt_star < prod_a * opt_h or best_k.value < prod_a * opt_h
    chosen = best_k.vertices
    sel = degree_select(hs, chosen, ci.budget, ci.r)
    for c in sel.info.get("layer_costs", ()):
        if c > ci.budget / ci.r:
            bad = True
    if sel.cost > ci.budget:
        bad = True
    return bad, _ratio(prod_a * opt_h, opt_star)


def trial_feasibility(s: int, bounds: dict):
    """DkSHP and SUKP outputs are feasible, honest and never beat the oracle."""
    rng = _rng(s)
    if s % 2 == 0:
        m = int(rng.choice([2, 3, 4]))
        n = int(rng.integers(max(m, 5), bounds.get("n_max_dksh", 11), endpoint=True))
        e = int(rng.integers(0, min(math.comb(n, m), 4 * n), endpoint=True))
        g = generate(GenSpec("uniform-random", n=n, m=m, edges=e, seed=s))
        k = int(rng.integers(1, n, endpoint=True))
        cfg = make_config(base=str(rng.choice(["exact", "greedy"])), small_k_exact=bool(rng.integers(0, 2)))
        sol = approx_dksh(g, k, m, cfg)
        val = induced_value(g, sol.vertices)
        ex = exact_dksh(g, k).value
        bad = (
            len(sol.vertices) > k
            or val != sol.value
            or val < solve_trivial(g, k, m).value
            or val > ex
        )
        return bad, _ratio(ex, val)
    n = int(rng.integers(3, bounds.get("n_max_sukp", 14), endpoint=True))
    m = int(rng.integers(2, min(bounds.get("m_max", 3), n), endpoint=True))
    inst = _random_sukp(rng, s, n, m)
    cfg = SukpConfig(exact_cutoff_n=0)
    sol = approx_sukp(inst, cfg)
    chk = make_solution(inst, sol.vertices)
    opt = exact_sukp(inst).value
    k1 = knapsack_fptas(inst.costs, inst.vertex_profits, inst.budget, cfg.epsilon)
    bad = (
        chk.cost > inst.budget
        or chk.value != sol.value
        or chk.value > opt
        or chk.value < induced_value(inst, k1.vertices)
    )
    return bad, _ratio(opt, chk.value)


def fptas_case(s: int, bounds: dict):
    """Seeded knapsack instance ``(costs, profits, budget, eps)``; every third
    seed has small integer profits."""
    rng = _rng(s)
    n = int(rng.integers(1, bounds.get("n_max", 20), endpoint=True))
    eps = Fraction(int(rng.choice([1, 5, 10, 50])), 100)
    costs = [Fraction(int(x), int(rng.integers(1, 3, endpoint=True))) for x in rng.integers(1, 30, size=n)]
    if s % 3 == 0:
        profits = [Fraction(int(x)) for x in rng.integers(0, 5, size=n)]
    else:
        profits = [Fraction(int(x), int(rng.integers(1, 7, endpoint=True))) for x in rng.integers(0, 1000, size=n)]
    budget = Fraction(int(rng.integers(0, int(sum(costs)) + 1)))
    return costs, profits, budget, eps


def trial_fptas(s: int, bounds: dict):
    """Profit-scaled knapsack keeps OPT / (1 + eps); exact when scaling is lossless."""
    costs, profits, budget, eps = fptas_case(s, bounds)
    integral = all(p.denominator == 1 for p in profits)
    sol = knapsack_fptas(costs, profits, budget, eps)
    opt, _ = exact_knapsack(costs, profits, budget)
    val = sum((profits[i] for i in sol.vertices), Fraction(0))
    cost = sum((costs[i] for i in sol.vertices), Fraction(0))
    bad = cost > budget or val != sol.value or val * (1 + eps) < opt or val > opt
    if integral and sol.info.get("scale") == 1 and val != opt:
        bad = True
    return bad, _ratio(opt, val)


TRIALS = {
    "lemma22": trial_lemma22,
    "lemma23": trial_lemma23,
    "rounding4x": trial_rounding4x,
    "blowup": trial_blowup,
    "feasibility": trial_feasibility,
    "fptas": trial_fptas,
}

BOUNDS_TEXT = {
    "identities": "Eq17 and Eq29 exact",
    "lemma22": "MAX[k]/MAX[k/2] <= 3^m",
    "lemma23": "OPT/value <= 4(l+2); OPT/MAX[G*] <= 4",
    "rounding4x": "OPT/OPT(rounded) <= 4; pruning exact",
    "blowup": "(prod a) OPT(H) / OPT(H*) <= 1; layer cost <= B/r",
    "feasibility": "feasible, recomputed, <= OPT, >= floor solver",
    "fptas": "OPT/value <= 1+eps",
}


def verify(check: str, trials: int = 100, seed: int = 0, bounds: dict | None = None) -> VerifyReport:
    bounds = dict(bounds or {})
    if check not in CHECKS:
        raise ConfigError(f"unknown check {check!r}; expected one of {CHECKS}")
    rep = VerifyReport(check, trials, bound=BOUNDS_TEXT[check])
    if check == "identities":
        rows = exponents.verify_identities(bounds.get("m_max", 50))
        rep.trials = len(rows)
        rep.violations = sum(1 for *_, ok in rows if not ok)
        rep.violation_seeds = [f"r={r}:{name}" for r, name, ok in rows if not ok]
        return rep
    fn = TRIALS[check]
    for i in range(trials):
        s = trial_seed(seed, i)
        try:
            bad, ratio = fn(s, bounds)
        except OracleRefusal as exc:
            raise ConfigError(f"{check}: oracle refused ({exc}); lower the size bounds (e.g. n_max)") from None
        rep.observe(ratio)
        if bad:
            rep.violations += 1
            rep.violation_seeds.append(s)
    return rep


# --- benchmark ---------------------------------------------------------------

@dataclass
class BenchReport:
    rows: list

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r) + "\n" for r in self.rows)

    def to_table(self) -> str:
        if not self.rows:
            return "(no rows)\n"
        cols = list(self.rows[0])
        cells = [[("" if r[c] is None else str(r[c])) for c in cols] for r in self.rows]
        width = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        lines = ["  ".join(c.rjust(w) for c, w in zip(cols, width))]
        lines += ["  ".join(x.rjust(w) for x, w in zip(row, width)) for row in cells]
        return "\n".join(lines) + "\n"


def _family_range(v):
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, int) for x in v):
        return list(range(v[0], v[1] + 1))
    if isinstance(v, list):
        return list(v)
    return [v]


def _ratio_cell(ex, approx):
    if ex is None:
        return None
    q = _ratio(ex, approx)
    return "inf" if q == math.inf else round(float(q), 6)


def bench(family: dict, *, timing: bool = False, exact_max_n: int = 14) -> BenchReport:
    """Run a solver over a generated family.

    ``family`` holds GenSpec fields where ``n`` may be ``[lo, hi]``, plus
    ``seeds`` (count), ``k`` (DkSHP; default n // 2), ``epsilon``,
    ``base`` and ``exact_cutoff``.
    """
    fam = dict(family)
    seeds = int(fam.pop("seeds", 1))
    ns = _family_range(fam.pop("n"))
    k_spec = fam.pop("k", None)
    eps = Fraction(str(fam.pop("epsilon", "1/10")))
    base = fam.pop("base", "auto")
    cutoff = int(fam.pop("exact_cutoff", 0))
    kind = fam.get("kind", "uniform-random")
    m = fam.get("m", 2)
    rows = []
    for n in ns:
        for sd in range(seeds):
            spec = GenSpec.from_dict({**fam, "n": n, "seed": sd})
            inst = generate(spec)
            t0 = time.perf_counter()
            if kind in ("uniform-random", "planted-dense"):
                k = min(n, max(1, n // 2 if k_spec is None else int(k_spec)))
                sol = approx_dksh(inst, k, m, make_config(eps, cutoff, base))
                budget_col = k
                ex = None
                if n <= exact_max_n:
                    ex = exact_dksh(inst, k).value
                approx = induced_value(inst, sol.vertices)
            else:
                sol = approx_sukp(inst, SukpConfig(eps, cutoff))
                budget_col = str(inst.budget)
                ex = exact_sukp(inst).value if n <= exact_max_n else None
                approx = induced_value(inst, sol.vertices)
            dt = time.perf_counter() - t0
            row = {
                "n": n,
                "seed": sd,
                "m": m,
                "k_or_B": budget_col,
                "exact": None if ex is None else str(ex),
                "approx": str(approx),
                "ratio": _ratio_cell(ex, approx),
                "envelope_theta": round(n ** float(exponents.theta(max(m, 2))), 6),
                "envelope_alpha": round(n ** float(exponents.alpha(max(m, 1))), 6),
                "method": sol.method,
            }
            if timing:
                row["wall_s"] = round(dt, 6)
            rows.append(row)
    rows.sort(key=lambda r: (r["n"], r["seed"]))
    return BenchReport(rows)
