"""Finite approximations of large graphs: balls, frontiers and limit monitoring.

Everything that pretends to be an infinite-graph computation in this
package really runs on an increasing sequence of finite balls.  A ball
carries its frontier (the vertices that still touch the unseen part of
the graph) so downstream operators can choose to kill it (Dirichlet) or
keep the induced form (Neumann).  Limits along the sequence are never
reported bare: they come with a ConvergenceReport.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field

from .core import Measure, Vertex, WeightedGraph
from .errors import UnknownVertexError, ValidationError


def ball(g: WeightedGraph, o: Vertex, n: int) -> tuple[set, set]:
    """Vertices reachable from ``o`` in at most ``n`` hops, plus frontier.

    The frontier consists of ball members with at least one neighbor
    outside the ball.
    """
    if o not in g.index:
        raise UnknownVertexError(repr(o))
    dist = {o: 0}
    queue = deque([o])
    while queue:
        x = queue.popleft()
        if dist[x] == n:
            continue
        for y in g.adjacency[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    members = set(dist)
    frontier = {
        x for x in members if any(y not in members for y in g.adjacency[x])
    }
    return members, frontier


def induced_subgraph(g: WeightedGraph, subset: Iterable[Vertex]) -> WeightedGraph:
    """Restriction of the graph to ``subset``: inside edges and killing only."""
    sub = list(subset)
    subset_set = set(sub)
    if not subset_set <= set(g.vertices):
        raise ValidationError(["subset contains vertices not in the graph"])
    order = [v for v in g.vertices if v in subset_set]
    edges = {
        (u, v): b
        for (u, v), b in g.edges.items()
        if u in subset_set and v in subset_set
    }
    killing = {v: g.killing[v] for v in order}
    return WeightedGraph(tuple(order), edges, killing)


@dataclass(frozen=True)
class ConvergenceReport:
    """A monitored scalar sequence with a convergence verdict.

    ``converged`` requires the last ``window`` increments to all be below
    the tolerance; ``diverging`` requires the values to exceed the ceiling
    while increments stay above tolerance.  Anything else is inconclusive.
    """

    values: tuple[float, ...]
    tolerance: float
    status: str
    last_increment: float
    window: int = 3

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    @property
    def limit(self) -> float:
        return self.values[-1]


def monitor(
    seq: Sequence[float],
    tolerance: float,
    window: int = 3,
    ceiling: float | None = None,
) -> ConvergenceReport:
    """Classify a monitored scalar sequence.

    Never claims convergence from fewer than ``window``+1 terms.
    """
    values = tuple(float(v) for v in seq)
    if not values:
        raise ValidationError(["cannot monitor an empty sequence"])
    if len(values) == 1:
        return ConvergenceReport(values, tolerance, "inconclusive", float("nan"), window)
    increments = [abs(values[k] - values[k - 1]) for k in range(1, len(values))]
    last = increments[-1]
    tail = increments[-window:]
    if len(increments) >= window and all(inc < tolerance for inc in tail):
        status = "converged"
    elif (
        ceiling is not None
        and values[-1] > ceiling
        and len(increments) >= window
        and all(inc > tolerance for inc in tail)
    ):
        status = "diverging"
    else:
        status = "inconclusive"
    return ConvergenceReport(values, tolerance, status, last, window)


@dataclass(frozen=True)
class Ball:
    """One level of an exhaustion: its graph, frontier and optional measure."""

    graph: WeightedGraph
    frontier: frozenset
    measure: Measure | None = None

    @property
    def interior(self) -> tuple:
        return tuple(v for v in self.graph.vertices if v not in self.frontier)


@dataclass(frozen=True)
class AnalyticFacts:
    """Closed-form knowledge a family builder certifies about its limit object.

    These are the only route to "certified" verdicts about the infinite
    graph; everything computed from a finite ball alone stays empirical.
    Callables are indexed by the exhaustion level.
    """

    is_tree: bool = False
    locally_finite: bool = True
    c_zero: bool = True
    d_diameter_bound: float | None = None
    d_spine_divergent: bool = False
    inv_b_total: float | None = None
    inv_b_tail: Callable[[int], float] | None = None
    r_spine_tail: Callable[[int], float] | None = None
    offspine_r_bound: Callable[[int], float] | None = None
    d_separated_infinite: float | None = None
    rho_separated_infinite: float | None = None
    total_measure: dict[str, float] = field(default_factory=dict)
    certified_conditions: dict[str, tuple[bool, str]] = field(default_factory=dict)


@dataclass(frozen=True)
class GraphFamily:
    """An exhaustion generator: increasing balls with consistent weights.

    ``build_ball(n)`` must satisfy: vertex sets increase with ``n``, edge
    weights agree on common pairs, and the frontier of level ``n`` is
    exactly the set of level-``n`` vertices adjacent to new vertices at
    level ``n``+1.
    """

    name: str
    origin: Vertex
    build_ball: Callable[[int], Ball]
    facts: AnalyticFacts | None = None
    spine: Callable[[int], Vertex] | None = None

    def find_level(self, targets: Iterable[Vertex], max_level: int = 256) -> int:
        """Smallest level whose ball contains all target vertices."""
        want = set(targets)
        for n in range(max_level + 1):
            if want <= set(self.build_ball(n).graph.vertices):
                return n
        raise ValidationError(
            [f"vertices {sorted(map(repr, want))} not found up to level {max_level}"]
        )


def check_family_consistency(fam: GraphFamily, levels: Sequence[int]) -> None:
    """Verify the exhaustion invariants on the given levels; raise on failure."""
    prev: Ball | None = None
    prev_n: int | None = None
    for n in sorted(levels):
        cur = fam.build_ball(n)
        if prev is not None:
            pv = set(prev.graph.vertices)
            if not pv <= set(cur.graph.vertices):
                raise ValidationError(
                    [f"{fam.name}: ball {prev_n} is not contained in ball {n}"]
                )
            sub = induced_subgraph(cur.graph, prev.graph.vertices)
            if dict(sub.edges) != dict(prev.graph.edges):
                raise ValidationError(
                    [f"{fam.name}: edge weights disagree between levels {prev_n} and {n}"]
                )
        prev, prev_n = cur, n
