"""Effective resistance and the square-root resistance metric.

The resistance between two vertices is the largest 1/energy over
potentials with unit difference at the pair; equivalently the value
delta' A^+ delta for the energy matrix A and the signed pair indicator
delta.  Its square root is a metric whose Lipschitz functions are exactly
the finite-energy functions.  Two independent solver routes are kept
alive deliberately: a grounded positive-definite solve (production) and a
dense pseudoinverse (oracle), plus a series-parallel reducer for the
instances it can collapse.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
import math

import numpy as np
import scipy.linalg

from .core import (
    Vertex,
    VertexFunction,
    WeightedGraph,
    quadratic_form_matrix,
)
from .errors import (
    ConsistencyError,
    InfiniteResistanceError,
    UnknownVertexError,
    ValidationError,
)
from .exhaustion import ConvergenceReport, GraphFamily, monitor
from .metrics import LengthFunction, path_metric


@dataclass(frozen=True)
class ResistanceResult:
    pair: tuple[Vertex, Vertex]
    r: float
    minimizer: VertexFunction
    method: str
    coupled_through_killing: bool = False
    beyond_local_scope: bool = False
    report: ConvergenceReport | None = None

    @property
    def rho(self) -> float:
        return math.sqrt(self.r)


def _kernel_basis(g: WeightedGraph) -> list[np.ndarray]:
    """Orthonormal kernel of the energy matrix: one flat vector per
    component whose killing term vanishes identically."""
    basis = []
    for comp in g.components:
        if all(g.killing[v] == 0.0 for v in comp):
            vec = np.zeros(g.size)
            for v in comp:
                vec[g.index[v]] = 1.0
            basis.append(vec / math.sqrt(len(comp)))
    return basis


def _check_finite(g: WeightedGraph, kernel: list[np.ndarray], delta: np.ndarray):
    for vec in kernel:
        if abs(float(vec @ delta)) > 1e-12:
            raise InfiniteResistanceError(
                "infinite resistance: pair separated by a zero-energy direction"
            )


def _sup_value(
    A: np.ndarray,
    kernel: list[np.ndarray],
    delta: np.ndarray,
    method: str,
) -> tuple[float, np.ndarray]:
    """Maximize (delta.g)^2 / g.A.g; returns (value, potential with unit gap).

    ``kernel`` must span the null space of A; the pair direction is
    required to be orthogonal to it (checked by the caller).
    """
    if method == "constrained_solve":
        B = A.copy()
        for vec in kernel:
            B += np.outer(vec, vec)
        sol = scipy.linalg.solve(B, delta, assume_a="pos")
    elif method == "pseudoinverse":
        sol = np.linalg.pinv(A, hermitian=True) @ delta
    else:
        raise ValidationError([f"unknown solver method {method!r}"])
    value = float(delta @ sol)
    if value <= 0:
        raise ConsistencyError("nonpositive resistance from solver")
    return value, sol / value


def resistance_finite(
    g: WeightedGraph,
    x: Vertex,
    y: Vertex,
    method: str = "constrained_solve",
) -> ResistanceResult:
    """Effective resistance on a finite graph, with the minimizing potential.

    The minimizer has unit difference at the pair and energy 1/r.  Raises
    InfiniteResistanceError when the pair cannot be coupled (different
    components, both free of killing term).
    """
    for v in (x, y):
        if v not in g.index:
            raise UnknownVertexError(repr(v))
    if x == y:
        return ResistanceResult(
            (x, y), 0.0, VertexFunction.constant(g, 0.0), method
        )
    A = quadratic_form_matrix(g)
    delta = np.zeros(g.size)
    delta[g.index[x]] = 1.0
    delta[g.index[y]] = -1.0
    kernel = _kernel_basis(g)
    _check_finite(g, kernel, delta)
    r, pot = _sup_value(A, kernel, delta, method)
    coupled = g.component_of(x) is not g.component_of(y)
    return ResistanceResult(
        (x, y),
        r,
        VertexFunction.from_array(g, pot),
        method,
        coupled_through_killing=coupled,
    )


def rho(g: WeightedGraph, x: Vertex, y: Vertex) -> float:
    """Square root of the effective resistance."""
    return resistance_finite(g, x, y).rho


def rho_o(g: WeightedGraph, x: Vertex, y: Vertex, o: Vertex) -> float:
    """Variant of the resistance metric anchored at a base vertex.

    Maximizes |f(x)-f(y)| under energy(f) + |f(o)|^2 <= 1; always at most
    the unanchored value, and equal to it when the killing term vanishes.
    """
    for v in (x, y, o):
        if v not in g.index:
            raise UnknownVertexError(repr(v))
    if x == y:
        return 0.0
    A = quadratic_form_matrix(g)
    oi = g.index[o]
    A[oi, oi] += 1.0
    delta = np.zeros(g.size)
    delta[g.index[x]] = 1.0
    delta[g.index[y]] = -1.0
    # The anchored form is definite on o's component and on every
    # component carrying killing term; flat vectors elsewhere stay null.
    kernel = []
    for comp in g.components:
        if o in comp:
            continue
        if all(g.killing[v] == 0.0 for v in comp):
            vec = np.zeros(g.size)
            for v in comp:
                vec[g.index[v]] = 1.0
            kernel.append(vec / math.sqrt(len(comp)))
    _check_finite(g, kernel, delta)
    val, _ = _sup_value(A, kernel, delta, "constrained_solve")
    return math.sqrt(val)


def resistance_tree_path(g: WeightedGraph, x: Vertex, y: Vertex) -> ResistanceResult:
    """Series fast path for trees: resistance equals the inverse-weight
    path metric along the unique path.

    The minimizer ramps by 1/b across each path edge and is constant off
    the path.  Callers are responsible for ``g`` actually being a forest.
    """
    if x == y:
        return ResistanceResult((x, y), 0.0, VertexFunction.constant(g, 0.0), "tree_path")
    # unique path via parent pointers from a BFS rooted at x
    parent: dict[Vertex, Vertex] = {x: x}
    stack = [x]
    while stack:
        u = stack.pop()
        for w in g.adjacency[u]:
            if w not in parent:
                parent[w] = u
                stack.append(w)
    if y not in parent:
        raise InfiniteResistanceError("pair lies in different components of the tree")
    path = [y]
    while path[-1] != x:
        path.append(parent[path[-1]])
    path.reverse()
    r = math.fsum(1.0 / g.b(path[k], path[k + 1]) for k in range(len(path) - 1))
    # potential: 0 on x's side, ramp along the path, constant on hanging branches
    values = {v: 0.0 for v in g.vertices}
    level = 0.0
    for k in range(1, len(path)):
        level -= 1.0 / (g.b(path[k - 1], path[k]) * r)
        values[path[k]] = level
    # propagate to branches hanging off each path vertex
    on_path = set(path)
    for p in path:
        stack = [p]
        seen = {p} | on_path
        while stack:
            u = stack.pop()
            for w in g.adjacency[u]:
                if w not in seen:
                    values[w] = values[p] if u == p else values[u]
                    seen.add(w)
                    stack.append(w)
    scale = 1.0 / (values[x] - values[y])
    pot = VertexFunction({v: values[v] * scale for v in g.vertices})
    return ResistanceResult((x, y), r, pot, "tree_path")


def series_parallel_resistance(
    g: WeightedGraph, x: Vertex, y: Vertex
) -> float | None:
    """Closed-form reduction for series-parallel instances, or None.

    Alternates three local moves until fixpoint: drop non-terminal leaves,
    contract non-terminal degree-2 vertices (resistances add in series),
    and merge the parallel edges that contraction creates (conductances
    add).  Requires a vanishing killing term.
    """
    if g.has_killing():
        return None
    cond: dict[Vertex, dict[Vertex, float]] = {
        v: dict(g.adjacency[v]) for v in g.vertices
    }
    terminals = {x, y}

    def drop(u: Vertex) -> None:
        for w in list(cond[u]):
            del cond[w][u]
        del cond[u]

    changed = True
    while changed:
        changed = False
        for u in list(cond):
            if u in terminals or u not in cond:
                continue
            deg = len(cond[u])
            if deg == 0:
                drop(u)
                changed = True
            elif deg == 1:
                drop(u)
                changed = True
            elif deg == 2:
                (a, ba), (bb, bbb) = cond[u].items()
                r_new = 1.0 / ba + 1.0 / bbb
                drop(u)
                if bb in cond[a]:
                    cond[a][bb] += 1.0 / r_new
                    cond[bb][a] = cond[a][bb]
                else:
                    cond[a][bb] = 1.0 / r_new
                    cond[bb][a] = 1.0 / r_new
                changed = True
    if set(cond) == terminals and y in cond[x]:
        return 1.0 / cond[x][y]
    return None


def free_resistance(
    fam: GraphFamily,
    x: Vertex,
    y: Vertex,
    tolerance: float = 1e-9,
    max_level: int = 64,
    start_level: int | None = None,
) -> ResistanceResult:
    """Resistance via subgraph exhaustion: nonincreasing level values,
    monitored until convergence or the level budget runs out.

    A growing subgraph can only lower the resistance; any increase beyond
    rounding indicates a solver bug and raises ConsistencyError.
    """
    n0 = start_level if start_level is not None else fam.find_level((x, y), max_level)
    values: list[float] = []
    last: ResistanceResult | None = None
    beyond = False
    for n in range(n0, max_level + 1):
        ball_n = fam.build_ball(n)
        if ball_n.graph.has_killing():
            beyond = True
        last = resistance_finite(ball_n.graph, x, y)
        if values and last.r > values[-1] + 1e-10:
            raise ConsistencyError(
                f"resistance increased from {values[-1]} to {last.r} at level {n}"
            )
        values.append(last.r)
        report = monitor(values, tolerance)
        if report.converged:
            break
    report = monitor(values, tolerance)
    assert last is not None
    return ResistanceResult(
        (x, y),
        values[-1],
        last.minimizer,
        "exhaustion",
        beyond_local_scope=beyond,
        report=report,
    )


def all_pairs_rho(g: WeightedGraph) -> np.ndarray:
    """Dense matrix of the square-root resistance metric.

    Requires a connected graph (or killing term everywhere); entries use
    the pseudoinverse identity r_ij = G_ii + G_jj - 2 G_ij.
    """
    A = quadratic_form_matrix(g)
    kernel = _kernel_basis(g)
    if len(kernel) > 1 or (kernel and len(g.components) > 1):
        raise InfiniteResistanceError(
            "all-pairs table undefined across zero-energy components"
        )
    B = A.copy()
    for vec in kernel:
        B += np.outer(vec, vec)
    G = np.linalg.inv(B)
    if kernel:
        # remove the artificial flat mode so G acts as the pseudoinverse
        for vec in kernel:
            G -= np.outer(vec, vec)
    diag = np.diag(G)
    r = diag[:, None] + diag[None, :] - 2.0 * G
    r = np.maximum(r, 0.0)
    return np.sqrt(r)


@dataclass(frozen=True)
class DiameterEstimate:
    values: tuple[float, ...]
    report: ConvergenceReport
    status: str  # finite | infinite | inconclusive
    certified_bound: float | None
    lower_bound: float


def rho_diameter_estimate(
    fam: GraphFamily,
    levels: Sequence[int],
    tolerance: float = 1e-6,
) -> DiameterEstimate:
    """Monitored growth of the resistance-metric diameter across balls.

    Subgraph resistances overestimate the limit values, so the sequence
    (max over pairs of ball-n vertices, evaluated on the largest ball) is
    a certified upper-bound profile; the last value is always a valid
    lower bound for nothing and an upper bound for the diameter of the
    probed region.  ``finite`` status needs both convergence and a
    generator tail certificate; ``infinite`` needs a certified divergent
    lower bound (trees with divergent path metric along a spine).
    """
    levels = sorted(set(levels))
    if not levels:
        raise ValidationError(["need at least one level"])
    top = fam.build_ball(levels[-1])
    table = all_pairs_rho(top.graph)
    vmap = {v: i for i, v in enumerate(top.graph.vertices)}
    values = []
    for n in levels:
        members = [vmap[v] for v in fam.build_ball(n).graph.vertices]
        sub = table[np.ix_(members, members)]
        values.append(float(sub.max()) if sub.size else 0.0)
    report = monitor(values, tolerance)

    facts = fam.facts
    status = "inconclusive"
    certified: float | None = None
    lower = values[-1] if facts and facts.is_tree else 0.0
    if facts:
        if facts.is_tree and facts.d_spine_divergent and fam.spine is not None:
            # on trees the squared metric is the path metric, so a
            # divergent spine certifies an infinite diameter
            d = path_metric(top.graph, LengthFunction.inverse_b(), source=fam.origin)
            lower = math.sqrt(d.distance(fam.origin, fam.spine(levels[-1])))
            status = "infinite"
        else:
            bound = None
            if facts.d_diameter_bound is not None:
                bound = math.sqrt(facts.d_diameter_bound)
            if facts.r_spine_tail is not None:
                tail = facts.r_spine_tail(levels[-1])
                off = facts.offspine_r_bound(levels[-1]) if facts.offspine_r_bound else 0.0
                spine_bound = values[-1] + math.sqrt(tail) + 2.0 * math.sqrt(off)
                bound = spine_bound if bound is None else min(bound, spine_bound)
            if bound is not None and report.converged:
                status = "finite"
                certified = bound
    return DiameterEstimate(tuple(values), report, status, certified, lower)


def collapse_set(
    g: WeightedGraph, targets: Sequence[Vertex], label: Vertex = "__collapsed__"
) -> WeightedGraph:
    """Identify a vertex set to a single new vertex, merging parallel weights."""
    tset = set(targets)
    if not tset <= set(g.vertices):
        raise ValidationError(["collapse set contains unknown vertices"])
    if label in g.index:
        raise ValidationError([f"collapse label {label!r} already in use"])
    keep = [v for v in g.vertices if v not in tset]
    edges: dict[tuple[Vertex, Vertex], float] = {}
    star: dict[Vertex, float] = {}
    for (u, v), b in g.edges.items():
        inu, inv = u in tset, v in tset
        if inu and inv:
            continue
        if inu or inv:
            out = v if inu else u
            star[out] = star.get(out, 0.0) + b
        else:
            edges[(u, v)] = b
    for out, b in star.items():
        edges[(out, label)] = b
    killing = {v: g.killing[v] for v in keep}
    killing[label] = math.fsum(g.killing[v] for v in tset)
    return WeightedGraph(tuple(keep) + (label,), edges, killing)
