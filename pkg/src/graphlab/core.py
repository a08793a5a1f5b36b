"""Weighted graphs, the energy form and the formal Laplacian.

A weighted graph is a finite vertex set together with a symmetric,
zero-diagonal edge weight ``b`` and a nonnegative vertex potential
(killing term) ``c``.  The quadratic energy of a function ``f`` on the
vertices is

    energy(f) = (1/2) sum_{x,y} b(x,y) |f(x)-f(y)|^2 + sum_x c(x) |f(x)|^2,

summed once per undirected edge in the implementation.  The operator

    (Lf)(x) = sum_y b(x,y) (f(x)-f(y)) + c(x) f(x)

is the associated formal Laplacian; dividing by a vertex measure ``m``
gives its measure-weighted variant.  Everything here is immutable and
pure, so shared instances are safe to use concurrently.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np

from .errors import DomainMismatchError, UnknownVertexError, ValidationError

Vertex = Hashable


def validate_graph_data(
    vertices: Iterable[Vertex],
    edges: Mapping[tuple[Vertex, Vertex], float],
    killing: Mapping[Vertex, float] | None = None,
    measure: Mapping[Vertex, float] | None = None,
) -> list[str]:
    """Check raw graph data and return every violated invariant.

    Violations are returned as data rather than raised, so callers can
    report all of them at once.  ``edges`` may contain one or both
    orientations of a pair; asymmetric duplicates are flagged.
    """
    violations: list[str] = []
    vlist = list(vertices)
    vset = set(vlist)
    if len(vlist) != len(vset):
        violations.append("duplicate vertex identifiers")
    seen: dict[frozenset, tuple[tuple[Vertex, Vertex], float]] = {}
    for (u, v), b in edges.items():
        if u == v:
            violations.append(f"self-loop at {u!r}")
            continue
        if u not in vset or v not in vset:
            violations.append(f"edge ({u!r},{v!r}) references unknown vertex")
            continue
        if not (b > 0) or not math.isfinite(b):
            violations.append(f"nonpositive or nonfinite weight on edge ({u!r},{v!r})")
            continue
        key = frozenset((u, v))
        if key in seen:
            (pu, pv), pb = seen[key]
            if pb != b:
                violations.append(f"asymmetric edge ({u!r},{v!r}): {pb} vs {b}")
            elif (pu, pv) == (u, v):
                violations.append(f"duplicate edge ({u!r},{v!r})")
        else:
            seen[key] = ((u, v), b)
    for x, cx in (killing or {}).items():
        if x not in vset:
            violations.append(f"killing term on unknown vertex {x!r}")
        elif cx < 0:
            violations.append(f"negative killing term at {x!r}")
    for x, mx in (measure or {}).items():
        if x not in vset:
            violations.append(f"measure on unknown vertex {x!r}")
        elif not (mx > 0):
            violations.append(f"nonpositive measure at {x!r}")
    return violations


@dataclass(frozen=True)
class WeightedGraph:
    """Immutable weighted graph with killing term.

    Edges are stored once, keyed by the pair ordered by vertex position,
    so symmetry is structural rather than a runtime promise.
    """

    vertices: tuple[Vertex, ...]
    edges: dict[tuple[Vertex, Vertex], float]
    killing: dict[Vertex, float]

    @classmethod
    def build(
        cls,
        vertices: Iterable[Vertex],
        edges: Mapping[tuple[Vertex, Vertex], float],
        killing: Mapping[Vertex, float] | None = None,
    ) -> "WeightedGraph":
        """Validate raw data and construct the canonical representation.

        Raises ValidationError listing every violation if the data does
        not describe a weighted graph.
        """
        violations = validate_graph_data(vertices, edges, killing)
        if violations:
            raise ValidationError(violations)
        vtuple = tuple(vertices)
        order = {v: i for i, v in enumerate(vtuple)}
        canonical: dict[tuple[Vertex, Vertex], float] = {}
        for (u, v), b in edges.items():
            if order[u] > order[v]:
                u, v = v, u
            canonical[(u, v)] = float(b)
        c = {v: float((killing or {}).get(v, 0.0)) for v in vtuple}
        return cls(vtuple, canonical, c)

    def __post_init__(self):
        object.__setattr__(self, "edges", dict(self.edges))
        object.__setattr__(self, "killing", dict(self.killing))

    @cached_property
    def index(self) -> dict[Vertex, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def adjacency(self) -> dict[Vertex, dict[Vertex, float]]:
        adj: dict[Vertex, dict[Vertex, float]] = {v: {} for v in self.vertices}
        for (u, v), b in self.edges.items():
            adj[u][v] = b
            adj[v][u] = b
        return adj

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Index arrays (i, j, b) with one row per undirected edge."""
        n = len(self.edges)
        ii = np.empty(n, dtype=np.intp)
        jj = np.empty(n, dtype=np.intp)
        ww = np.empty(n, dtype=float)
        idx = self.index
        for k, ((u, v), b) in enumerate(self.edges.items()):
            ii[k], jj[k], ww[k] = idx[u], idx[v], b
        return ii, jj, ww

    @cached_property
    def killing_array(self) -> np.ndarray:
        return np.array([self.killing[v] for v in self.vertices], dtype=float)

    def b(self, x: Vertex, y: Vertex) -> float:
        """Edge weight, 0.0 for non-neighbors."""
        return self.adjacency[x].get(y, 0.0)

    def neighbors(self, x: Vertex) -> dict[Vertex, float]:
        return self.adjacency[x]

    def weighted_degree(self, x: Vertex) -> float:
        return sum(self.adjacency[x].values())

    @property
    def size(self) -> int:
        return len(self.vertices)

    def has_killing(self) -> bool:
        return any(cx > 0 for cx in self.killing.values())

    @cached_property
    def components(self) -> tuple[frozenset, ...]:
        """Connected components of the edge structure (c plays no role)."""
        remaining = set(self.vertices)
        comps = []
        while remaining:
            seed = next(iter(remaining))
            comp = {seed}
            stack = [seed]
            while stack:
                x = stack.pop()
                for y in self.adjacency[x]:
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
            comps.append(frozenset(comp))
            remaining -= comp
        return tuple(comps)

    def is_connected(self) -> bool:
        return len(self.components) <= 1

    def component_of(self, x: Vertex) -> frozenset:
        if x not in self.index:
            raise UnknownVertexError(repr(x))
        for comp in self.components:
            if x in comp:
                return comp
        raise AssertionError("unreachable")


@dataclass(frozen=True)
class Measure:
    """Strictly positive vertex weights with cached total mass."""

    values: dict[Vertex, float]
    total: float = field(default=0.0)

    @classmethod
    def from_mapping(cls, values: Mapping[Vertex, float]) -> "Measure":
        bad = [v for v, m in values.items() if not (m > 0)]
        if bad:
            raise ValidationError([f"nonpositive measure at {v!r}" for v in bad])
        vals = {v: float(m) for v, m in values.items()}
        return cls(vals, math.fsum(vals.values()))

    @classmethod
    def unit(cls, g: WeightedGraph) -> "Measure":
        return cls.from_mapping({v: 1.0 for v in g.vertices})

    @classmethod
    def canonical(cls, g: WeightedGraph) -> "Measure":
        """Half the summed inverse weights at each vertex.

        Finite total exactly when 1/b is summable over edges; makes the
        inverse-weight path metric intrinsic.
        """
        vals = {}
        for v in g.vertices:
            nbrs = g.adjacency[v]
            if not nbrs:
                raise ValidationError([f"isolated vertex {v!r} has no canonical mass"])
            vals[v] = 0.5 * math.fsum(1.0 / b for b in nbrs.values())
        return cls.from_mapping(vals)

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))

    def __getitem__(self, x: Vertex) -> float:
        return self.values[x]

    def restrict(self, vertices: Iterable[Vertex]) -> "Measure":
        return Measure.from_mapping({v: self.values[v] for v in vertices})

    def as_array(self, g: WeightedGraph) -> np.ndarray:
        return np.array([self.values[v] for v in g.vertices], dtype=float)


@dataclass(frozen=True)
class VertexFunction:
    """A scalar (real or complex) function on a graph's vertex set."""

    values: dict[Vertex, complex]

    @classmethod
    def from_mapping(cls, values: Mapping[Vertex, complex]) -> "VertexFunction":
        return cls(dict(values))

    @classmethod
    def from_array(cls, g: WeightedGraph, arr: np.ndarray) -> "VertexFunction":
        return cls({v: arr[i] for i, v in enumerate(g.vertices)})

    @classmethod
    def constant(cls, g: WeightedGraph, value: complex = 1.0) -> "VertexFunction":
        return cls({v: value for v in g.vertices})

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))

    def __getitem__(self, x: Vertex) -> complex:
        return self.values[x]

    def as_array(self, g: WeightedGraph) -> np.ndarray:
        if set(self.values) != set(g.vertices):
            raise DomainMismatchError("function/graph vertex set mismatch")
        vals = [self.values[v] for v in g.vertices]
        if any(isinstance(x, complex) and x.imag != 0 for x in vals):
            return np.array(vals, dtype=complex)
        return np.array([complex(x).real for x in vals], dtype=float)

    def is_real(self) -> bool:
        return all(complex(x).imag == 0 for x in self.values.values())

    def restrict(self, vertices: Iterable[Vertex]) -> "VertexFunction":
        return VertexFunction({v: self.values[v] for v in vertices})


@dataclass(frozen=True)
class EnergyReport:
    """Energy split into its edge and potential contributions."""

    energy: float
    edge_part: float
    potential_part: float


def _check_domain(g: WeightedGraph, f: VertexFunction) -> None:
    if set(f.values) != set(g.vertices):
        raise DomainMismatchError("function/graph vertex set mismatch")


def energy(g: WeightedGraph, f: VertexFunction) -> EnergyReport:
    """Quadratic energy of ``f``, computed once per undirected edge."""
    _check_domain(g, f)
    arr = f.as_array(g)
    ii, jj, ww = g.edge_arrays
    diffs = arr[ii] - arr[jj]
    edge_part = float(np.sum(ww * np.abs(diffs) ** 2))
    potential_part = float(np.sum(g.killing_array * np.abs(arr) ** 2))
    return EnergyReport(edge_part + potential_part, edge_part, potential_part)


def energy_inner(g: WeightedGraph, f: VertexFunction, h: VertexFunction) -> complex:
    """Sesquilinear energy pairing, conjugate-linear in ``f``."""
    _check_domain(g, f)
    _check_domain(g, h)
    fa = f.as_array(g).astype(complex)
    ha = h.as_array(g).astype(complex)
    ii, jj, ww = g.edge_arrays
    val = np.sum(ww * np.conj(fa[ii] - fa[jj]) * (ha[ii] - ha[jj]))
    val += np.sum(g.killing_array * np.conj(fa) * ha)
    val = complex(val)
    return val.real if val.imag == 0 else val


def apply_laplacian(
    g: WeightedGraph, f: VertexFunction, m: Measure | None = None
) -> VertexFunction:
    """Apply the formal Laplacian, optionally weighted by a measure."""
    _check_domain(g, f)
    arr = f.as_array(g)
    ii, jj, ww = g.edge_arrays
    out = g.killing_array.astype(arr.dtype) * arr
    diffs = arr[ii] - arr[jj]
    np.add.at(out, ii, ww * diffs)
    np.add.at(out, jj, -ww * diffs)
    if m is not None:
        out = out / m.as_array(g)
    return VertexFunction.from_array(g, out)


def norm_o(g: WeightedGraph, f: VertexFunction, o: Vertex) -> float:
    """Energy norm anchored at a base vertex: (energy + |f(o)|^2)^(1/2)."""
    if o not in g.index:
        raise UnknownVertexError(repr(o))
    _check_domain(g, f)
    return math.sqrt(energy(g, f).energy + abs(f[o]) ** 2)


def quadratic_form_matrix(g: WeightedGraph) -> np.ndarray:
    """Dense matrix A with f*.A.f = energy(f).

    Diagonal holds weighted degree plus killing term, off-diagonal the
    negated edge weights.
    """
    n = g.size
    A = np.zeros((n, n), dtype=float)
    ii, jj, ww = g.edge_arrays
    np.add.at(A, (ii, jj), -ww)
    np.add.at(A, (jj, ii), -ww)
    deg = np.zeros(n)
    np.add.at(deg, ii, ww)
    np.add.at(deg, jj, ww)
    A[np.diag_indices(n)] = deg + g.killing_array
    return A


def validate_graph(g: WeightedGraph, m: Measure | None = None) -> list[str]:
    """Re-check a constructed graph (and optional measure) against the invariants."""
    mvals = None
    if m is not None:
        mvals = {v: m.values.get(v, -1.0) for v in g.vertices}
        if set(m.values) != set(g.vertices):
            return ["measure/graph vertex set mismatch"]
    return validate_graph_data(g.vertices, g.edges, g.killing, mvals)
