"""Truncated operators, spectra, heat semigroups and partial traces.

Operators are assembled on finite truncations in two flavors: the
Neumann flavor keeps the induced form of the truncation; the Dirichlet
flavor removes a boundary set and retains its couplings as extra
diagonal, which is the matrix picture of forcing zero boundary values.
The measure enters through a diagonal similarity, so one symmetric
eigensolve serves every time value of the heat semigroup.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import Measure, Vertex, WeightedGraph, quadratic_form_matrix
from .errors import ValidationError
from .exhaustion import ConvergenceReport, GraphFamily, monitor

ZERO_EIGENVALUE_TOL = 1e-10


@dataclass(frozen=True)
class TruncatedOperator:
    """Finite selfadjoint realization of the measure-weighted Laplacian.

    ``matrix`` is the symmetrized form D^{-1/2} A D^{-1/2} with D the
    measure diagonal and A the energy matrix over the operator's support
    (for the Dirichlet kind, A keeps the couplings into the removed
    boundary on its diagonal).
    """

    kind: str  # "neumann" | "dirichlet"
    vertices: tuple[Vertex, ...]
    matrix: np.ndarray
    form_matrix: np.ndarray
    measure: np.ndarray
    boundary: tuple[Vertex, ...] = ()

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def total_measure(self) -> float:
        return float(self.measure.sum())

    @cached_property
    def index(self) -> dict[Vertex, int]:
        return {v: i for i, v in enumerate(self.vertices)}


def assemble(
    g: WeightedGraph,
    m: Measure,
    kind: str = "neumann",
    boundary: Iterable[Vertex] = (),
) -> TruncatedOperator:
    """Build the Neumann or Dirichlet operator for a graph and measure."""
    if kind not in ("neumann", "dirichlet"):
        raise ValidationError([f"unknown operator kind {kind!r}"])
    A = quadratic_form_matrix(g)
    if kind == "neumann":
        support = g.vertices
        boundary = ()
    else:
        bset = set(boundary)
        unknown = bset - set(g.vertices)
        if unknown:
            raise ValidationError([f"boundary vertex {v!r} not in graph" for v in unknown])
        support = tuple(v for v in g.vertices if v not in bset)
        if not support:
            raise ValidationError(["empty interior for dirichlet operator"])
        idx = [g.index[v] for v in support]
        A = A[np.ix_(idx, idx)]
        boundary = tuple(v for v in g.vertices if v in bset)
    marr = np.array([m[v] for v in support], dtype=float)
    dhalf = 1.0 / np.sqrt(marr)
    sym = dhalf[:, None] * A * dhalf[None, :]
    sym = 0.5 * (sym + sym.T)
    return TruncatedOperator(kind, tuple(support), sym, A, marr, tuple(boundary))


@dataclass(frozen=True)
class SpectrumResult:
    """Eigenvalues (ascending) with measure-orthonormal eigenfunctions."""

    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray  # column k is the k-th eigenfunction
    vertices: tuple[Vertex, ...]

    @property
    def e0_multiplicity(self) -> int:
        return int(np.sum(self.eigenvalues < ZERO_EIGENVALUE_TOL))


def spectrum(op: TruncatedOperator) -> SpectrumResult:
    """Full eigendecomposition in the measure-weighted inner product."""
    evals, psi = np.linalg.eigh(op.matrix)
    phi = psi / np.sqrt(op.measure)[:, None]
    return SpectrumResult(evals, phi, op.vertices)


@dataclass(frozen=True)
class HeatResult:
    """Heat kernel snapshot at one time."""

    t: float
    vertices: tuple[Vertex, ...]
    kernel: np.ndarray
    mass: np.ndarray
    partial_trace: float

    def entry(self, x: Vertex, y: Vertex) -> float:
        i = self.vertices.index(x)
        j = self.vertices.index(y)
        return float(self.kernel[i, j])

    def mass_at(self, x: Vertex) -> float:
        return float(self.mass[self.vertices.index(x)])


def heat(
    op: TruncatedOperator,
    t: float,
    spec: SpectrumResult | None = None,
) -> HeatResult:
    """Heat kernel, total mass under the semigroup and the partial trace.

    Kernel entries satisfy (e^{-tL} f)(x) = sum_y p_t(x,y) f(y) m(y).
    """
    if t < 0:
        raise ValidationError(["heat semigroup needs t >= 0"])
    spec = spec or spectrum(op)
    weights = np.exp(-t * spec.eigenvalues)
    phi = spec.eigenfunctions
    kernel = (phi * weights[None, :]) @ phi.T
    mass = kernel @ op.measure
    return HeatResult(t, op.vertices, kernel, mass, float(weights.sum()))


def apply_semigroup(op: TruncatedOperator, t: float, f: np.ndarray,
                    spec: SpectrumResult | None = None) -> np.ndarray:
    """e^{-tL} applied to a vector given in vertex order."""
    res = heat(op, t, spec)
    return res.kernel @ (op.measure * f)


def trace_convergence(
    fam: GraphFamily,
    t: float,
    levels: Sequence[int],
    tolerance: float = 1e-6,
) -> ConvergenceReport:
    """Partial traces of the Dirichlet semigroup across exhaustion levels.

    Each level kills its frontier; bounded increments across levels are
    the finite-scale evidence for a trace-class limit.  The family must
    supply a measure.
    """
    if t < 0:
        raise ValidationError(["trace monitoring needs t >= 0"])
    traces = []
    for n in sorted(set(levels)):
        b = fam.build_ball(n)
        if b.measure is None:
            raise ValidationError([f"family {fam.name} supplies no measure"])
        if not b.frontier:
            op = assemble(b.graph, b.measure, "neumann")
        else:
            op = assemble(b.graph, b.measure, "dirichlet", b.frontier)
        if t == 0:
            traces.append(float(op.size))
        else:
            evals = np.linalg.eigvalsh(op.matrix)
            traces.append(float(np.exp(-t * evals).sum()))
    return monitor(traces, tolerance)


def zero_multiplicity_matches_components(
    g: WeightedGraph, m: Measure
) -> tuple[int, int]:
    """(spectral multiplicity of 0, count of killing-free components) for
    the Neumann operator; the two agree on finite graphs."""
    spec = spectrum(assemble(g, m, "neumann"))
    free = sum(
        1 for comp in g.components if all(g.killing[v] == 0.0 for v in comp)
    )
    return spec.e0_multiplicity, free
