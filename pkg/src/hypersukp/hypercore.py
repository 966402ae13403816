"""Hypergraphs, SUKP instances, solutions and the JSON instance format.

Vertices are integer ids ``0..n-1``.  Edges are stored as sorted tuples.
All costs, profits and weights are exact :class:`~fractions.Fraction`
values so that every inequality the solvers rely on can be checked exactly.
"""

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence


class InstanceError(ValueError):
    """Invalid instance data (bad id, negative cost, duplicate edge, ...)."""


class InstanceFormatError(InstanceError):
    """Instance file could not be parsed; the message names the line or field."""


def to_fraction(x, where: str = "value") -> Fraction:
    """Parse ints, decimal strings, ``"p/q"`` strings and floats exactly."""
    if isinstance(x, bool):
        raise InstanceError(f"{where}: boolean is not a number")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        # go through repr so 0.1 means one tenth, not the binary neighbour
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise InstanceError(f"{where}: cannot parse {x!r} as a rational") from None
    raise InstanceError(f"{where}: unsupported numeric type {type(x).__name__}")


def fmt(x: Fraction):
    """JSON-friendly rational: an int when integral, else a ``"p/q"`` string."""
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else str(x)


def _norm_edge(verts: Iterable[int], n: int, where: str) -> tuple[int, ...]:
    vs = list(verts)
    for v in vs:
        if isinstance(v, bool) or not isinstance(v, int):
            raise InstanceError(f"{where}: vertex id {v!r} is not an integer")
        if not 0 <= v < n:
            raise InstanceError(f"{where}: vertex id {v} out of range for n={n}")
    e = tuple(sorted(vs))
    if len(set(e)) != len(e):
        raise InstanceError(f"{where}: repeated vertex in edge {e}")
    if not e:
        raise InstanceError(f"{where}: empty edge")
    return e


@dataclass(frozen=True)
class Hypergraph:
    n: int
    edges: tuple[tuple[int, ...], ...]
    m_cap: int

    def __post_init__(self):
        if self.n < 0:
            raise InstanceError(f"n must be >= 0, got {self.n}")
        norm = tuple(_norm_edge(e, self.n, f"edges[{i}]") for i, e in enumerate(self.edges))
        seen = set()
        for i, e in enumerate(norm):
            if e in seen:
                raise InstanceError(f"edges[{i}]: duplicate edge {e}")
            seen.add(e)
            if len(e) > self.m_cap:
                raise InstanceError(f"edges[{i}]: size {len(e)} exceeds m_cap={self.m_cap}")
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @classmethod
    def build(cls, n: int, edges, m_cap: int | None = None) -> "Hypergraph":
        edges = [tuple(e) for e in edges]
        if m_cap is None:
            m_cap = max((len(e) for e in edges), default=1)
        return cls(n, tuple(edges), m_cap)

    def is_uniform(self, r: int | None = None) -> bool:
        sizes = {len(e) for e in self.edges}
        if r is None:
            return len(sizes) <= 1
        return sizes <= {r}

    def edges_of_size(self, r: int) -> tuple[tuple[int, ...], ...]:
        return tuple(e for e in self.edges if len(e) == r)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg


@dataclass(frozen=True)
class WeightedHypergraph:
    """Hypergraph with a positive weight per edge (multi-hypergraphs use integer weights)."""

    base: Hypergraph
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.base.edges):
            raise InstanceError("one weight per edge required")
        for e, w in zip(self.base.edges, self.weights):
            if w <= 0:
                raise InstanceError(f"edge {e}: weight must be positive, got {w}")

    @classmethod
    def from_weights(cls, n: int, weights: dict, m_cap: int | None = None) -> "WeightedHypergraph":
        """Build from ``{edge: weight}``; zero weights are dropped, negatives rejected."""
        items = []
        for e, w in weights.items():
            w = to_fraction(w, f"weight of {tuple(e)}")
            if w < 0:
                raise InstanceError(f"edge {tuple(e)}: negative weight {w}")
            if w > 0:
                items.append((tuple(sorted(e)), w))
        items.sort()
        base = Hypergraph.build(n, [e for e, _ in items], m_cap)
        return cls(base, tuple(w for _, w in items))

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def edges(self):
        return self.base.edges

    @property
    def m_cap(self) -> int:
        return self.base.m_cap

    def weight_map(self) -> dict:
        return dict(zip(self.base.edges, self.weights))


@dataclass(frozen=True)
class SukpInstance:
    n: int
    costs: tuple[Fraction, ...]
    budget: Fraction
    edges: tuple[tuple[int, ...], ...]
    profits: tuple[Fraction, ...]
    vertex_profits: tuple[Fraction, ...]
    m_cap: int

    def __post_init__(self):
        if len(self.costs) != self.n:
            raise InstanceError(f"costs: expected {self.n} entries, got {len(self.costs)}")
        if len(self.vertex_profits) != self.n:
            raise InstanceError(
                f"vertex_profits: expected {self.n} entries, got {len(self.vertex_profits)}"
            )
        if len(self.profits) != len(self.edges):
            raise InstanceError("one profit per edge required")
        costs = tuple(to_fraction(c, f"costs[{i}]") for i, c in enumerate(self.costs))
        vprof = tuple(to_fraction(p, f"vertex_profits[{i}]") for i, p in enumerate(self.vertex_profits))
        budget = to_fraction(self.budget, "budget")
        for name, seq in (("costs", costs), ("vertex_profits", vprof)):
            for i, x in enumerate(seq):
                if x < 0:
                    raise InstanceError(f"{name}[{i}]: negative value {x}")
        if budget < 0:
            raise InstanceError(f"budget: negative value {budget}")
        pairs = []
        seen = set()
        for i, (e, p) in enumerate(zip(self.edges, self.profits)):
            e = _norm_edge(e, self.n, f"edges[{i}]")
            p = to_fraction(p, f"edges[{i}].profit")
            if p < 0:
                raise InstanceError(f"edges[{i}].profit: negative value {p}")
            if len(e) > self.m_cap:
                raise InstanceError(f"edges[{i}]: size {len(e)} exceeds m_cap={self.m_cap}")
            if e in seen:
                raise InstanceError(f"edges[{i}]: duplicate edge {e}")
            seen.add(e)
            pairs.append((e, p))
        pairs.sort()
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "vertex_profits", vprof)
        object.__setattr__(self, "budget", budget)
        object.__setattr__(self, "edges", tuple(e for e, _ in pairs))
        object.__setattr__(self, "profits", tuple(p for _, p in pairs))

    @classmethod
    def build(cls, costs, budget, edge_profits, vertex_profits=None, m_cap=None) -> "SukpInstance":
        """Convenience constructor; ``edge_profits`` is ``{edge: profit}`` or pairs."""
        if isinstance(edge_profits, dict):
            edge_profits = list(edge_profits.items())
        n = len(costs)
        edges = [tuple(e) for e, _ in edge_profits]
        if m_cap is None:
            m_cap = max((len(e) for e in edges), default=1)
        if vertex_profits is None:
            vertex_profits = [0] * n
        return cls(
            n,
            tuple(costs),
            budget,
            tuple(edges),
            tuple(p for _, p in edge_profits),
            tuple(vertex_profits),
            m_cap,
        )

    def cost_of(self, vertices: Iterable[int]) -> Fraction:
        return sum((self.costs[v] for v in set(vertices)), Fraction(0))

    def edge_map(self) -> dict:
        return dict(zip(self.edges, self.profits))


@dataclass(frozen=True)
class Solution:
    vertices: tuple[int, ...]
    value: Fraction
    cost: Fraction = Fraction(0)
    method: str = ""
    guarantee_exponent: Fraction | None = None
    info: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(set(self.vertices))))
        object.__setattr__(self, "value", Fraction(self.value))
        object.__setattr__(self, "cost", Fraction(self.cost))

    def key(self):
        """Ordering key for deterministic best-of: larger value, then lexicographically least set."""
        return (-self.value, self.vertices)

    def to_json(self) -> dict:
        return {
            "value": fmt(self.value),
            "vertices": list(self.vertices),
            "cost": fmt(self.cost),
            "method": self.method,
            "guarantee_exponent": None if self.guarantee_exponent is None else str(self.guarantee_exponent),
        }


def best_of(solutions: Iterable[Solution]) -> Solution | None:
    sols = [s for s in solutions if s is not None]
    if not sols:
        return None
    return min(sols, key=Solution.key)


def _check_ids(vertices, n):
    for v in vertices:
        if not 0 <= v < n:
            raise InstanceError(f"vertex id {v} out of range for n={n}")


def induced_value(obj, vertices: Iterable[int]) -> Fraction:
    """Objective of a vertex set.

    Hypergraph: number of edges inside the set.  WeightedHypergraph: total
    weight of those edges.  SukpInstance: vertex profits of the set plus the
    profits of the edges it covers.
    """
    sel = set(vertices)
    _check_ids(sel, obj.n)
    if isinstance(obj, Hypergraph):
        return Fraction(sum(1 for e in obj.edges if sel.issuperset(e)))
    if isinstance(obj, WeightedHypergraph):
        return sum((w for e, w in zip(obj.edges, obj.weights) if sel.issuperset(e)), Fraction(0))
    if isinstance(obj, SukpInstance):
        val = sum((obj.vertex_profits[v] for v in sel), Fraction(0))
        val += sum((p for e, p in zip(obj.edges, obj.profits) if sel.issuperset(e)), Fraction(0))
        return val
    raise TypeError(f"cannot evaluate {type(obj).__name__}")


def make_solution(obj, vertices, method: str = "", guarantee=None, **info) -> Solution:
    """Solution whose value (and cost, for SUKP) is recomputed from the instance."""
    vertices = tuple(sorted(set(vertices)))
    value = induced_value(obj, vertices)
    cost = obj.cost_of(vertices) if isinstance(obj, SukpInstance) else Fraction(len(vertices))
    return Solution(vertices, value, cost, method, guarantee, dict(info))


def link_multihypergraph(g: Hypergraph, s: Iterable[int]) -> WeightedHypergraph:
    """The (r-1)-uniform link of block ``s``: every r-edge ``e`` contributes
    ``e - {v}`` once for each ``v`` in ``e & s``; repeats become integer weights."""
    s = set(s)
    if not s:
        raise InstanceError("link block must be nonempty")
    _check_ids(s, g.n)
    sizes = {len(e) for e in g.edges}
    if len(sizes) > 1:
        raise InstanceError(f"link requires a uniform hypergraph, found edge sizes {sorted(sizes)}")
    r = sizes.pop() if sizes else g.m_cap
    if r < 2:
        raise InstanceError(f"link requires edge size >= 2, got {r}")
    counts = Counter()
    for e in g.edges:
        for v in e:
            if v in s:
                counts[tuple(u for u in e if u != v)] += 1
    return WeightedHypergraph.from_weights(g.n, dict(counts), m_cap=r - 1)


# --- instance files --------------------------------------------------------

def _dump_lines(doc: dict, list_keys=("edges",)) -> str:
    # one key per line and one edge per line: diff-friendly
    lines = ["{"]
    keys = list(doc)
    for i, k in enumerate(keys):
        sep = "," if i < len(keys) - 1 else ""
        v = doc[k]
        if k in list_keys and isinstance(v, list) and v:
            lines.append(f"  {json.dumps(k)}: [")
            for j, item in enumerate(v):
                isep = "," if j < len(v) - 1 else ""
                lines.append(f"    {json.dumps(item)}{isep}")
            lines.append(f"  ]{sep}")
        else:
            lines.append(f"  {json.dumps(k)}: {json.dumps(v)}{sep}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def instance_to_dict(obj) -> dict:
    if isinstance(obj, Hypergraph):
        return {
            "kind": "hypergraph",
            "n": obj.n,
            "m_cap": obj.m_cap,
            "edges": [{"verts": list(e)} for e in obj.edges],
        }
    if isinstance(obj, WeightedHypergraph):
        return {
            "kind": "weighted_hypergraph",
            "n": obj.n,
            "m_cap": obj.m_cap,
            "edges": [{"verts": list(e), "weight": fmt(w)} for e, w in zip(obj.edges, obj.weights)],
        }
    if isinstance(obj, SukpInstance):
        return {
            "kind": "sukp",
            "n": obj.n,
            "m_cap": obj.m_cap,
            "costs": [fmt(c) for c in obj.costs],
            "budget": fmt(obj.budget),
            "edges": [{"verts": list(e), "profit": fmt(p)} for e, p in zip(obj.edges, obj.profits)],
            "vertex_profits": [fmt(p) for p in obj.vertex_profits],
        }
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_instance(obj) -> str:
    return _dump_lines(instance_to_dict(obj))


def write_instance(obj, path) -> None:
    Path(path).write_text(dumps_instance(obj))


def _field(doc, key, where=""):
    if key not in doc:
        raise InstanceFormatError(f"{where}{key}: missing field")
    return doc[key]


def _int_field(doc, key):
    v = _field(doc, key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise InstanceFormatError(f"{key}: expected an integer, got {v!r}")
    return v


def instance_from_dict(doc: dict):
    if not isinstance(doc, dict):
        raise InstanceFormatError("top level: expected a JSON object")
    kind = _field(doc, "kind")
    n = _int_field(doc, "n")
    m_cap = _int_field(doc, "m_cap")
    raw_edges = _field(doc, "edges")
    if not isinstance(raw_edges, list):
        raise InstanceFormatError("edges: expected a list")
    verts = []
    for i, ed in enumerate(raw_edges):
        if not isinstance(ed, dict) or "verts" not in ed or not isinstance(ed["verts"], list):
            raise InstanceFormatError(f"edges[{i}]: expected an object with a 'verts' list")
        verts.append(ed["verts"])
    try:
        if kind == "hypergraph":
            return Hypergraph(n, tuple(tuple(v) for v in verts), m_cap)
        if kind == "weighted_hypergraph":
            ws = []
            for i, ed in enumerate(raw_edges):
                w = to_fraction(_field(ed, "weight", f"edges[{i}]."), f"edges[{i}].weight")
                ws.append(w)
            pairs = sorted(zip((tuple(sorted(v)) for v in verts), ws))
            base = Hypergraph(n, tuple(e for e, _ in pairs), m_cap)
            if len(base.edges) != len(pairs):
                raise InstanceFormatError("edges: duplicate edge")
            return WeightedHypergraph(base, tuple(w for _, w in pairs))
        if kind == "sukp":
            costs = _field(doc, "costs")
            vprof = doc.get("vertex_profits", [0] * n)
            if not isinstance(costs, list):
                raise InstanceFormatError("costs: expected a list")
            if not isinstance(vprof, list):
                raise InstanceFormatError("vertex_profits: expected a list")
            costs = tuple(to_fraction(c, f"costs[{i}]") for i, c in enumerate(costs))
            vprof = tuple(to_fraction(p, f"vertex_profits[{i}]") for i, p in enumerate(vprof))
            profits = tuple(
                to_fraction(_field(ed, "profit", f"edges[{i}]."), f"edges[{i}].profit")
                for i, ed in enumerate(raw_edges)
            )
            budget = to_fraction(_field(doc, "budget"), "budget")
            return SukpInstance(n, costs, budget, tuple(tuple(v) for v in verts), profits, vprof, m_cap)
    except InstanceFormatError:
        raise
    except InstanceError as exc:
        raise InstanceFormatError(str(exc)) from None
    raise InstanceFormatError(f"kind: unknown instance kind {kind!r}")


def loads_instance(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return instance_from_dict(doc)


def read_instance(path):
    return loads_instance(Path(path).read_text())


def sukp_from_hypergraph(g: Hypergraph, costs: Sequence, budget) -> SukpInstance:
    """Unit-profit SUKP instance on the edges of ``g``."""
    return SukpInstance.build(list(costs), budget, [(e, 1) for e in g.edges], m_cap=g.m_cap)
