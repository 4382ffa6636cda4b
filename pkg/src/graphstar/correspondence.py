"""The graph correspondence ``(C(G1), φ)`` over ``C(G0)``.

Functions on vertices and edges are plain coordinate vectors.  Right
action and inner product read the range map, the left action reads the
source map.  Interior tensor powers are realized on composable paths
``e1 e2 ... em`` with ``r(e_i) = s(e_{i+1})``; a non-composable elementary
tensor is zero because ``δ_e·δ_{r(e)} ⊗ δ_f = δ_e ⊗ φ(δ_{r(e)})δ_f``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _kernels
from ._config import default_tol
from .errors import DimensionMismatchError, GraphMismatchError
from .graph import Graph


@dataclass(frozen=True, eq=False)
class VertexFunction:
    """An element of ``C(G0)``."""

    graph: Graph
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.graph.n_vertices,):
            raise DimensionMismatchError(
                f"expected {self.graph.n_vertices} vertex coordinates, got shape {vals.shape}"
            )
        object.__setattr__(self, "values", vals)

    @classmethod
    def delta(cls, graph: Graph, vertex: str) -> "VertexFunction":
        vals = np.zeros(graph.n_vertices, dtype=np.complex128)
        vals[graph.vertex_index[vertex]] = 1.0
        return cls(graph, vals)

    @classmethod
    def ones(cls, graph: Graph) -> "VertexFunction":
        return cls(graph, np.ones(graph.n_vertices, dtype=np.complex128))

    @classmethod
    def zeros(cls, graph: Graph) -> "VertexFunction":
        return cls(graph, np.zeros(graph.n_vertices, dtype=np.complex128))

    def __getitem__(self, vertex: str) -> complex:
        return complex(self.values[self.graph.vertex_index[vertex]])

    def __add__(self, other):
        _same_graph(self, other)
        return VertexFunction(self.graph, self.values + other.values)

    def __sub__(self, other):
        _same_graph(self, other)
        return VertexFunction(self.graph, self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, VertexFunction):
            _same_graph(self, other)
            return VertexFunction(self.graph, self.values * other.values)
        return VertexFunction(self.graph, self.values * other)

    __rmul__ = __mul__

    def conj(self) -> "VertexFunction":
        return VertexFunction(self.graph, self.values.conj())

    def allclose(self, other, tol=None) -> bool:
        _same_graph(self, other)
        tol = default_tol() if tol is None else tol
        return bool(np.abs(self.values - other.values).max(initial=0.0) <= tol)


@dataclass(frozen=True, eq=False)
class EdgeFunction:
    """An element of ``C(G1)``."""

    graph: Graph
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.graph.n_edges,):
            raise DimensionMismatchError(
                f"expected {self.graph.n_edges} edge coordinates, got shape {vals.shape}"
            )
        object.__setattr__(self, "values", vals)

    @classmethod
    def delta(cls, graph: Graph, edge: str) -> "EdgeFunction":
        vals = np.zeros(graph.n_edges, dtype=np.complex128)
        vals[graph.edge_index[edge]] = 1.0
        return cls(graph, vals)

    @classmethod
    def ones(cls, graph: Graph) -> "EdgeFunction":
        return cls(graph, np.ones(graph.n_edges, dtype=np.complex128))

    @classmethod
    def zeros(cls, graph: Graph) -> "EdgeFunction":
        return cls(graph, np.zeros(graph.n_edges, dtype=np.complex128))

    def __getitem__(self, edge: str) -> complex:
        return complex(self.values[self.graph.edge_index[edge]])

    def __add__(self, other):
        _same_graph(self, other)
        return EdgeFunction(self.graph, self.values + other.values)

    def __sub__(self, other):
        _same_graph(self, other)
        return EdgeFunction(self.graph, self.values - other.values)

    def __mul__(self, scalar):
        return EdgeFunction(self.graph, self.values * scalar)

    __rmul__ = __mul__

    def allclose(self, other, tol=None) -> bool:
        _same_graph(self, other)
        tol = default_tol() if tol is None else tol
        return bool(np.abs(self.values - other.values).max(initial=0.0) <= tol)


@dataclass(frozen=True, eq=False)
class PathVector:
    """An element of the interior tensor power ``E^(m)``.

    Level 0 is ``C(G0)`` itself (coordinates indexed by vertices); level
    ``m >= 1`` has one coordinate per composable path of length ``m``, in
    the order returned by :func:`path_basis`.
    """

    graph: Graph
    level: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        expected = basis_size(self.graph, self.level)
        if vals.shape != (expected,):
            raise DimensionMismatchError(
                f"level {self.level} has {expected} basis paths, got shape {vals.shape}"
            )
        object.__setattr__(self, "values", vals)

    @classmethod
    def delta(cls, graph: Graph, path: Sequence[str]) -> "PathVector":
        """Basis vector of a composable path given by edge ids."""
        level = len(path)
        vals = np.zeros(basis_size(graph, level), dtype=np.complex128)
        idx = tuple(graph.edge_index[e] for e in path)
        vals[path_position(graph, level)[idx]] = 1.0
        return cls(graph, level, vals)

    def __add__(self, other):
        _same_graph(self, other)
        _same_level(self, other)
        return PathVector(self.graph, self.level, self.values + other.values)

    def __sub__(self, other):
        _same_graph(self, other)
        _same_level(self, other)
        return PathVector(self.graph, self.level, self.values - other.values)

    def __mul__(self, scalar):
        return PathVector(self.graph, self.level, self.values * scalar)

    __rmul__ = __mul__


def _same_graph(a, b):
    if a.graph is not b.graph and a.graph != b.graph:
        raise GraphMismatchError("operands live on different graphs")


def _same_level(a: PathVector, b: PathVector):
    if a.level != b.level:
        raise DimensionMismatchError(f"level mismatch: {a.level} vs {b.level}")


# ---------------------------------------------------------------------------
# Path bases
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def path_basis(graph: Graph, level: int) -> np.ndarray:
    """Composable paths of length ``level`` as an ``(N, level)`` index array.

    Paths are listed lexicographically in edge index.  For ``level == 0``
    the result is the ``(n_vertices, 0)`` empty array (one empty path per
    vertex).  The array is read-only and memoized per ``(graph, level)``.
    """
    if level < 0:
        raise ValueError("level must be non-negative")
    if level == 0:
        arr = np.zeros((graph.n_vertices, 0), dtype=np.int64)
    elif level == 1:
        arr = np.arange(graph.n_edges, dtype=np.int64).reshape(-1, 1)
    else:
        ptr, out = graph.out_csr
        arr = _kernels.extend_paths(path_basis(graph, level - 1), graph.dst, ptr, out)
    arr.flags.writeable = False
    return arr


def basis_size(graph: Graph, level: int) -> int:
    return path_basis(graph, level).shape[0]


@lru_cache(maxsize=256)
def path_position(graph: Graph, level: int) -> dict[tuple[int, ...], int]:
    return {tuple(p): i for i, p in enumerate(path_basis(graph, level).tolist())}


@lru_cache(maxsize=256)
def path_ranges(graph: Graph, level: int) -> np.ndarray:
    """Range vertex of every basis path (the vertex itself at level 0)."""
    if level == 0:
        arr = np.arange(graph.n_vertices, dtype=np.int64)
    else:
        arr = graph.dst[path_basis(graph, level)[:, -1]]
    arr = np.array(arr)
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=256)
def path_sources(graph: Graph, level: int) -> np.ndarray:
    if level == 0:
        arr = np.arange(graph.n_vertices, dtype=np.int64)
    else:
        arr = graph.src[path_basis(graph, level)[:, 0]]
    arr = np.array(arr)
    arr.flags.writeable = False
    return arr


# ---------------------------------------------------------------------------
# Module operations
# ---------------------------------------------------------------------------


def inner_product(xi: EdgeFunction, eta: EdgeFunction) -> VertexFunction:
    """``<ξ, η>(v) = Σ_{r(e)=v} conj(ξ(e)) η(e)``."""
    _same_graph(xi, eta)
    g = xi.graph
    out = np.zeros(g.n_vertices, dtype=np.complex128)
    np.add.at(out, g.dst, xi.values.conj() * eta.values)
    return VertexFunction(g, out)


def right_act(xi: EdgeFunction, f: VertexFunction) -> EdgeFunction:
    """``(ξ·f)(e) = ξ(e) f(r(e))``."""
    _same_graph(xi, f)
    return EdgeFunction(xi.graph, xi.values * f.values[xi.graph.dst])


def left_act(f: VertexFunction, xi: EdgeFunction) -> EdgeFunction:
    """``φ(f)ξ(e) = f(s(e)) ξ(e)``."""
    _same_graph(xi, f)
    return EdgeFunction(xi.graph, f.values[xi.graph.src] * xi.values)


def vertex_pullback(which: str, f: VertexFunction) -> EdgeFunction:
    """``r_*(f) = f∘r`` or ``s_*(f) = f∘s``."""
    g = f.graph
    if which in ("range", "r"):
        return EdgeFunction(g, f.values[g.dst])
    if which in ("source", "s"):
        return EdgeFunction(g, f.values[g.src])
    raise ValueError(f"which must be 'range' or 'source', got {which!r}")


def tensor(xis: Sequence[EdgeFunction], graph: Graph | None = None) -> PathVector:
    """``ξ1 ⊗ ... ⊗ ξm`` as a path vector.

    The empty product is the unit of ``C(G0)`` at level 0 and needs
    ``graph``.
    """
    if not xis:
        if graph is None:
            raise ValueError("graph is required for the empty tensor product")
        return PathVector(graph, 0, np.ones(graph.n_vertices, dtype=np.complex128))
    g = xis[0].graph
    for x in xis[1:]:
        _same_graph(xis[0], x)
    level = len(xis)
    paths = path_basis(g, level)
    vals = np.ones(paths.shape[0], dtype=np.complex128)
    for j, x in enumerate(xis):
        vals = vals * x.values[paths[:, j]]
    return PathVector(g, level, vals)


def tensor_inner_product(x: PathVector, y: PathVector) -> VertexFunction:
    """Inner product on ``E^(m)``.

    Basis paths are orthogonal with ``<δ_μ, δ_μ> = δ_{r(μ)}``; at level 0
    this is the product in ``C(G0)`` twisted by the involution.
    """
    _same_graph(x, y)
    _same_level(x, y)
    g = x.graph
    out = np.zeros(g.n_vertices, dtype=np.complex128)
    np.add.at(out, path_ranges(g, x.level), x.values.conj() * y.values)
    return VertexFunction(g, out)


def tensor_inner_product_recursive(xis: Sequence[EdgeFunction], etas: Sequence[EdgeFunction]) -> VertexFunction:
    """Inner product of elementary tensors by the interior-tensor recursion.

    ``<ξ⊗ξ', η⊗η'> = <ξ', φ(<ξ,η>) η'>``, unrolled from the left.  This is
    the independent route used to check :func:`tensor_inner_product`.
    """
    if len(xis) != len(etas):
        raise DimensionMismatchError(f"level mismatch: {len(xis)} vs {len(etas)}")
    if not xis:
        raise ValueError("use tensor_inner_product for level 0")
    acc = inner_product(xis[0], etas[0])
    for xi, eta in zip(xis[1:], etas[1:]):
        acc = inner_product(xi, left_act(acc, eta))
    return acc
