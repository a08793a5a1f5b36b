"""Named graph families with certified analytic facts.

Each family builds consistent exhaustion balls and ships the closed-form
knowledge that finite computation cannot recover: diameter bounds, tail
sums, separated sets, and per-condition compactness verdicts.  Vertex
identifiers encode family coordinates as strings (tooth ``n``, depth
``k`` becomes ``"n:k"``) so examples stay addressable from the command
line.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.special import zeta

from .core import Measure, Vertex, VertexFunction, WeightedGraph
from .errors import FamilyError
from .exhaustion import AnalyticFacts, Ball, GraphFamily, ball as hop_ball

FAMILY_NAMES = (
    "finite_path",
    "finite_tree",
    "random_tree",
    "ray_power",
    "comb",
    "triangle_ladder",
    "twin_rays",
    "star_augmented",
)

MEASURE_RULES = ("unit", "canonical", "geometric", "custom")


@dataclass(frozen=True)
class FamilySpec:
    """A family name with parameters and a measure rule."""

    name: str
    params: tuple = ()
    measure: str = "unit"
    measure_param: float | None = None
    custom_measure: Callable[[Vertex, int], float] | None = None

    def describe(self) -> str:
        ps = ",".join(str(p) for p in self.params)
        return f"{self.name}({ps})/{self.measure}"


def _measure_for(
    spec: FamilySpec,
    graph: WeightedGraph,
    origin: Vertex,
    neighbor_view: WeightedGraph,
) -> Measure:
    """Measure on a ball under the family spec's measure rule.

    ``neighbor_view`` is one level deeper so canonical masses see every
    neighbor of the ball's vertices.
    """
    if spec.measure == "unit":
        return Measure.from_mapping({v: 1.0 for v in graph.vertices})
    if spec.measure == "canonical":
        vals = {}
        for v in graph.vertices:
            nbrs = neighbor_view.adjacency[v]
            if not nbrs:
                raise FamilyError(f"canonical measure undefined at isolated {v!r}")
            vals[v] = 0.5 * math.fsum(1.0 / b for b in nbrs.values())
        return Measure.from_mapping(vals)
    if spec.measure == "geometric":
        q = spec.measure_param
        if q is None or not (0 < q < 1):
            raise FamilyError("geometric measure needs a ratio in (0,1)")
        from collections import deque

        dist = {origin: 0}
        dq = deque([origin])
        while dq:
            x = dq.popleft()
            for y in graph.adjacency[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    dq.append(y)
        return Measure.from_mapping({v: q ** dist[v] for v in graph.vertices})
    if spec.measure == "custom":
        if spec.custom_measure is None:
            raise FamilyError("custom measure rule needs a callable")
        return Measure.from_mapping(
            {v: spec.custom_measure(v, 0) for v in graph.vertices}
        )
    raise FamilyError(f"unknown measure rule {spec.measure!r}")


def _ray_graph(p: float, top: int) -> WeightedGraph:
    """Path on vertices "1".."top" with weight k^p on edge (k, k+1)."""
    vertices = tuple(str(k) for k in range(1, top + 1))
    edges = {
        (str(k), str(k + 1)): float(k) ** p for k in range(1, top)
    }
    return WeightedGraph(vertices, edges, {v: 0.0 for v in vertices})


def _make_ray_power(spec: FamilySpec) -> GraphFamily:
    (p,) = spec.params
    p = float(p)

    @lru_cache(maxsize=None)
    def build(n: int) -> Ball:
        graph = _ray_graph(p, n + 1)
        deeper = _ray_graph(p, n + 2)
        frontier = frozenset({str(n + 1)})
        m = _measure_for(spec, graph, "1", deeper)
        return Ball(graph, frontier, m)

    facts_kwargs: dict = {"is_tree": True, "locally_finite": True}
    if p > 1:
        total = float(zeta(p))
        facts_kwargs.update(
            d_diameter_bound=total,
            inv_b_total=total,
            inv_b_tail=lambda n: float(zeta(p, n + 1)),
            certified_conditions={
                "A": (True, "summable inverse weights: every tail is a short path"),
                "B": (True, "squared resistance metric is dominated by the path metric"),
                "C": (True, "locally finite with finite path-metric diameter"),
                "D": (True, "finite path-metric diameter bounds the resistance diameter"),
            },
        )
        if spec.measure == "canonical":
            facts_kwargs["total_measure"] = {"canonical": total}
    else:
        facts_kwargs.update(
            d_spine_divergent=True,
            certified_conditions={
                "A": (False, "path-metric diameter diverges along the ray"),
                "B": (False, "tree: resistance equals the path metric, which diverges"),
                "C": (False, "refuted through the boundedness condition it implies"),
                "D": (False, "square root of a divergent path metric is unbounded"),
            },
        )
    if spec.measure == "geometric" and spec.measure_param:
        facts_kwargs.setdefault("total_measure", {})["geometric"] = 1.0 / (
            1.0 - spec.measure_param
        )
    return GraphFamily(
        name=f"ray_power({p:g})",
        origin="1",
        build_ball=build,
        facts=AnalyticFacts(**facts_kwargs),
        spine=lambda n: str(n + 1),
    )


def _make_comb(spec: FamilySpec) -> GraphFamily:
    @lru_cache(maxsize=None)
    def graph_at(r: int) -> WeightedGraph:
        vertices = []
        edges = {}
        for n in range(r + 1):
            for k in range(r + 1 - n):
                vertices.append(f"{n}:{k}")
                if k >= 1:
                    edges[(f"{n}:{k - 1}", f"{n}:{k}")] = 2.0**k
            if n >= 1:
                edges[(f"{n - 1}:0", f"{n}:0")] = 2.0**n
        return WeightedGraph(
            tuple(vertices), edges, {v: 0.0 for v in vertices}
        )

    @lru_cache(maxsize=None)
    def build(r: int) -> Ball:
        graph = graph_at(r)
        frontier = frozenset(v for v in graph.vertices if _coord_sum(v) == r)
        m = _measure_for(spec, graph, "0:0", graph_at(r + 1))
        return Ball(graph, frontier, m)

    facts = AnalyticFacts(
        is_tree=True,
        locally_finite=True,
        d_diameter_bound=3.0,
        d_separated_infinite=1.5,
        rho_separated_infinite=math.sqrt(1.5),
        certified_conditions={
            "A": (False, "tooth tips at fixed depth form an infinite separated set"),
            "B": (False, "tree: the separated set survives under the square root"),
            "C": (True, "locally finite with finite path-metric diameter"),
            "D": (True, "finite path-metric diameter bounds the resistance diameter"),
        },
    )
    return GraphFamily(
        name="comb",
        origin="0:0",
        build_ball=build,
        facts=facts,
        spine=lambda n: f"{n}:0",
    )


def _coord_sum(label: str) -> int:
    a, b = label.split(":")
    return int(a) + int(b)


def _make_triangle_ladder(spec: FamilySpec) -> GraphFamily:
    @lru_cache(maxsize=None)
    def graph_at(L: int) -> WeightedGraph:
        vertices = [str(n) for n in range(1, L + 2)]
        edges = {}
        for n in range(1, L + 1):
            edges[(str(n), str(n + 1))] = n / 2.0
            for k in range(1, n + 1):
                vertices.append(f"{n}:{k}")
                edges[(str(n), f"{n}:{k}")] = float(n)
                edges[(f"{n}:{k}", str(n + 1))] = float(n)
        return WeightedGraph(tuple(vertices), edges, {v: 0.0 for v in vertices})

    @lru_cache(maxsize=None)
    def build(L: int) -> Ball:
        graph = graph_at(L)
        frontier = frozenset({str(L + 1)})
        m = _measure_for(spec, graph, "1", graph_at(L + 1))
        return Ball(graph, frontier, m)

    facts = AnalyticFacts(
        is_tree=False,
        locally_finite=True,
        d_spine_divergent=True,
        r_spine_tail=lambda n: 2.0 / max(n, 1),
        offspine_r_bound=lambda n: 1.0 / max(n, 1),
        certified_conditions={
            "A": (False, "path-metric diameter grows like twice the harmonic series"),
            "B": (True, "summable resistance increments along the spine (2/(n(n+1))) "
                        "with off-spine detours inside 1/n"),
            "C": (True, "implied by total boundedness in the resistance metric"),
            "D": (True, "bounded resistance diameter"),
        },
    )
    return GraphFamily(
        name="triangle_ladder",
        origin="1",
        build_ball=build,
        facts=facts,
        spine=lambda n: str(n + 1),
    )


def _make_twin_rays(spec: FamilySpec) -> GraphFamily:
    @lru_cache(maxsize=None)
    def graph_at(L: int) -> WeightedGraph:
        vertices = []
        edges = {}
        for n in range(L + 1):
            for j in range(n + 2):
                vertices.append(f"{n}:{j}")
            for j in range(1, n + 2):
                edges[(f"{n}:0", f"{n}:{j}")] = 1.0
            for j in range(2, n + 2):
                edges[(f"{n}:1", f"{n}:{j}")] = 1.0
            if n >= 1:
                edges[(f"{n - 1}:0", f"{n}:0")] = 2.0 ** (n - 1)
                edges[(f"{n - 1}:1", f"{n}:1")] = 2.0 ** (n - 1)
        return WeightedGraph(tuple(vertices), edges, {v: 0.0 for v in vertices})

    @lru_cache(maxsize=None)
    def build(L: int) -> Ball:
        graph = graph_at(L)
        frontier = frozenset({f"{L}:0", f"{L}:1"})
        m = _measure_for(spec, graph, "0:0", graph_at(L + 1))
        return Ball(graph, frontier, m)

    facts = AnalyticFacts(
        is_tree=False,
        locally_finite=True,
        d_diameter_bound=9.0,
        d_separated_infinite=2.0,
        rho_separated_infinite=1.0 / math.sqrt(2.0),
        certified_conditions={
            "A": (False, "cross-path connectors form an infinite 2-separated set"),
            "B": (False, "connectors keep pairwise resistance at least 1/2 "
                         "(each has weighted degree 2)"),
            "C": (True, "locally finite with finite path-metric diameter"),
            "D": (True, "finite path-metric diameter bounds the resistance diameter"),
        },
    )
    return GraphFamily(
        name="twin_rays",
        origin="0:0",
        build_ball=build,
        facts=facts,
        spine=lambda n: f"{n}:0",
    )


def _make_finite_path(spec: FamilySpec) -> GraphFamily:
    length = int(spec.params[0])
    weights = spec.params[1] if len(spec.params) > 1 else None
    if weights is None:
        weights = tuple(1.0 for _ in range(length))
    if len(weights) != length:
        raise FamilyError("finite_path needs one weight per edge")

    @lru_cache(maxsize=None)
    def build(n: int) -> Ball:
        top = min(n, length)
        vertices = tuple(str(k) for k in range(top + 1))
        edges = {
            (str(k), str(k + 1)): float(weights[k]) for k in range(top)
        }
        graph = WeightedGraph(vertices, edges, {v: 0.0 for v in vertices})
        frontier = frozenset() if top == length else frozenset({str(top)})
        m = _measure_for(spec, graph, "0", graph)
        return Ball(graph, frontier, m)

    facts = AnalyticFacts(
        is_tree=True,
        d_diameter_bound=math.fsum(1.0 / w for w in weights),
        inv_b_total=math.fsum(1.0 / w for w in weights),
        inv_b_tail=lambda n: math.fsum(1.0 / w for w in weights[min(n, length):]),
        certified_conditions={
            "A": (True, "finite graph"),
            "B": (True, "finite graph"),
            "C": (True, "finite graph"),
            "D": (True, "finite graph"),
        },
    )
    return GraphFamily("finite_path", "0", build, facts, spine=lambda n: str(min(n, length)))


def _make_finite_tree(spec: FamilySpec) -> GraphFamily:
    depth = int(spec.params[0])
    branching = int(spec.params[1]) if len(spec.params) > 1 else 2
    weight = float(spec.params[2]) if len(spec.params) > 2 else 1.0

    @lru_cache(maxsize=None)
    def full() -> WeightedGraph:
        vertices = ["r"]
        edges = {}
        frontier_labels = ["r"]
        for _ in range(depth):
            nxt = []
            for parent in frontier_labels:
                for c in range(branching):
                    child = parent + str(c)
                    vertices.append(child)
                    edges[(parent, child)] = weight
                    nxt.append(child)
            frontier_labels = nxt
        return WeightedGraph(tuple(vertices), edges, {v: 0.0 for v in vertices})

    @lru_cache(maxsize=None)
    def build(n: int) -> Ball:
        g = full()
        members, frontier = hop_ball(g, "r", n)
        from .exhaustion import induced_subgraph

        sub = induced_subgraph(g, [v for v in g.vertices if v in members])
        m = _measure_for(spec, sub, "r", g)
        return Ball(sub, frozenset(frontier), m)

    facts = AnalyticFacts(
        is_tree=True,
        certified_conditions={c: (True, "finite graph") for c in "ABCD"},
    )
    return GraphFamily("finite_tree", "r", build, facts)


def _make_random_tree(spec: FamilySpec) -> GraphFamily:
    seed = int(spec.params[0])
    size = int(spec.params[1]) if len(spec.params) > 1 else 32

    @lru_cache(maxsize=None)
    def full() -> WeightedGraph:
        rng = np.random.default_rng(seed)
        vertices = tuple(str(k) for k in range(size))
        edges = {}
        for k in range(1, size):
            parent = int(rng.integers(0, k))
            w = float(np.exp(rng.uniform(np.log(0.25), np.log(4.0))))
            edges[(str(parent), str(k))] = w
        return WeightedGraph(vertices, edges, {v: 0.0 for v in vertices})

    @lru_cache(maxsize=None)
    def build(n: int) -> Ball:
        g = full()
        members, frontier = hop_ball(g, "0", n)
        from .exhaustion import induced_subgraph

        sub = induced_subgraph(g, [v for v in g.vertices if v in members])
        m = _measure_for(spec, sub, "0", g)
        return Ball(sub, frozenset(frontier), m)

    facts = AnalyticFacts(
        is_tree=True,
        certified_conditions={c: (True, "finite graph") for c in "ABCD"},
    )
    return GraphFamily(f"random_tree({seed})", "0", build, facts)


def _make_star_augmented(spec: FamilySpec) -> GraphFamily:
    if not spec.params:
        base_spec = FamilySpec("ray_power", (3.0,), spec.measure, spec.measure_param)
    else:
        base_spec = spec.params[0]
        if not isinstance(base_spec, FamilySpec):
            raise FamilyError("star_augmented expects a FamilySpec parameter")
    base = make(base_spec)

    @lru_cache(maxsize=None)
    def build(n: int) -> Ball:
        inner = base.build_ball(n)
        g = inner.graph
        members, _ = hop_ball(g, base.origin, 1)
        # attach geometric weights to every vertex at hop distance >= 2,
        # in vertex order so levels stay consistent
        far = [v for v in g.vertices if v not in members]
        edges = dict(g.edges)
        for i, y in enumerate(far):
            edges[(base.origin, y)] = 2.0 ** (-i)
        graph = WeightedGraph(g.vertices, edges, dict(g.killing))
        if spec.measure == "unit":
            m = Measure.from_mapping({v: 1.0 for v in graph.vertices})
        else:
            raise FamilyError(
                "star_augmented supports only the unit measure rule "
                "(the hub has infinitely many neighbors)"
            )
        # the hub keeps acquiring edges at every level, so it never leaves
        # the frontier
        return Ball(graph, inner.frontier | {base.origin}, m)

    base_certs = base.facts.certified_conditions if base.facts else {}
    if not all(v for v, _ in base_certs.values()):
        raise FamilyError("star_augmented needs a base with all conditions certified")
    facts = AnalyticFacts(
        is_tree=False,
        locally_finite=False,
        certified_conditions={
            c: (True, "inherited: extra edges shrink distances and raise energies")
            for c in "ABCD"
        },
    )
    return GraphFamily(
        name=f"star_augmented[{base.name}]",
        origin=base.origin,
        build_ball=build,
        facts=facts,
        spine=base.spine,
    )


_BUILDERS = {
    "finite_path": _make_finite_path,
    "finite_tree": _make_finite_tree,
    "random_tree": _make_random_tree,
    "ray_power": _make_ray_power,
    "comb": _make_comb,
    "triangle_ladder": _make_triangle_ladder,
    "twin_rays": _make_twin_rays,
    "star_augmented": _make_star_augmented,
}


def make(spec: FamilySpec) -> GraphFamily:
    """Instantiate a named family; raises FamilyError for bad parameters."""
    if spec.name not in _BUILDERS:
        raise FamilyError(f"unknown family {spec.name!r}")
    if spec.measure not in MEASURE_RULES:
        raise FamilyError(f"unknown measure rule {spec.measure!r}")
    if spec.name == "ray_power":
        if not spec.params:
            raise FamilyError("ray_power needs an exponent")
    return _BUILDERS[spec.name](spec)


def add_killing(fam: GraphFamily, c_fn: Callable[[Vertex], float], name: str | None = None) -> GraphFamily:
    """Wrap a family, adding a killing term to every ball.

    Certificates of the base family do not transfer; the wrapped family
    carries no analytic facts.
    """

    @lru_cache(maxsize=None)
    def build(n: int) -> Ball:
        b = fam.build_ball(n)
        g = b.graph
        killing = {v: float(c_fn(v)) for v in g.vertices}
        return Ball(WeightedGraph(g.vertices, dict(g.edges), killing), b.frontier, b.measure)

    return GraphFamily(
        name=name or f"{fam.name}+killing",
        origin=fam.origin,
        build_ball=build,
        facts=None,
        spine=fam.spine,
    )


def witness_functions(
    fam: GraphFamily,
) -> dict[str, Callable[[int], tuple[VertexFunction, float]]]:
    """Named witness builders: level -> (function on the ball, its energy).

    Ray families expose the classical pair: an inverse-coordinate function
    whose truncated energies diverge, and finite-energy regularizations;
    shallow-exponent rays also expose an unbounded finite-energy witness.
    """
    from .core import energy as _energy

    if not fam.name.startswith("ray_power"):
        raise FamilyError(f"no witness functions for family {fam.name}")
    p = float(fam.name[fam.name.index("(") + 1 : -1])

    def on_ball(fn: Callable[[int], float]) -> Callable[[int], tuple[VertexFunction, float]]:
        def builder(n: int) -> tuple[VertexFunction, float]:
            g = fam.build_ball(n).graph
            f = VertexFunction({v: fn(int(v)) for v in g.vertices})
            return f, _energy(g, f).energy

        return builder

    out = {"inverse": on_ball(lambda k: 1.0 / k), "constant": on_ball(lambda k: 1.0)}
    for j in (1, 2, 3):
        out[f"inverse_power_{j}"] = on_ball(lambda k, j=j: k ** -(1.0 + 1.0 / j))
    if p < 0.5:
        out["unbounded_finite_energy"] = on_ball(lambda k: k**0.25)
    return out


def parse_family_spec(text: str, measure: str = "unit",
                      measure_param: float | None = None) -> FamilySpec:
    """Parse CLI syntax like ``ray_power:3``, ``random_tree:7:48`` or
    ``star_augmented:ray_power:3``."""
    parts = text.split(":")
    name = parts[0]
    if name == "star_augmented":
        if len(parts) > 1:
            inner = parse_family_spec(":".join(parts[1:]))
            return FamilySpec(name, (inner,), measure, measure_param)
        return FamilySpec(name, (), measure, measure_param)
    params = tuple(float(p) if "." in p or name == "ray_power" else int(p) for p in parts[1:])
    return FamilySpec(name, params, measure, measure_param)
