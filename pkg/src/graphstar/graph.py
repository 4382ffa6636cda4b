"""Finite directed multigraphs: parsing, adjacency and structure.

Vertices and edges are identified by strings and kept in lexicographic
order, so every matrix built from a graph is indexed the same way on every
run.  Multiple edges stay individually named; the edge set (not the set of
vertex pairs) is the basis of the correspondence built on top of a graph.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .errors import (
    DanglingEndpointError,
    DuplicateIdentifierError,
    GraphFormatError,
    SizeBoundError,
)

MAX_AUTOMORPHISM_VERTICES = 10


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str


@dataclass(frozen=True)
class Graph:
    """A finite directed multigraph ``(G0, G1, r, s)``.

    ``src`` is the source map ``s`` and ``dst`` the range map ``r``.  Build
    instances with :meth:`Graph.build` or :func:`parse_graph`; both validate
    identifiers and sort everything canonically.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    @classmethod
    def build(cls, vertices: Iterable[str], edges: Iterable) -> "Graph":
        vertices = list(vertices)
        edge_list = []
        for e in edges:
            if isinstance(e, Edge):
                edge_list.append(e)
            elif isinstance(e, dict):
                edge_list.append(Edge(e["id"], e["src"], e["dst"]))
            else:
                eid, src, dst = e
                edge_list.append(Edge(eid, src, dst))
        seen = set()
        for v in vertices:
            if not isinstance(v, str):
                raise GraphFormatError(f"vertex identifier must be a string, got {v!r}", location=repr(v))
            if v in seen:
                raise DuplicateIdentifierError(f"duplicate vertex identifier {v!r}", location=v)
            seen.add(v)
        seen_edges = set()
        for e in edge_list:
            for name, value in (("id", e.id), ("src", e.src), ("dst", e.dst)):
                if not isinstance(value, str):
                    raise GraphFormatError(
                        f"edge field {name!r} must be a string, got {value!r}", location=repr(value)
                    )
            if e.id in seen_edges:
                raise DuplicateIdentifierError(f"duplicate edge identifier {e.id!r}", location=e.id)
            seen_edges.add(e.id)
            for endpoint in (e.src, e.dst):
                if endpoint not in seen:
                    raise DanglingEndpointError(
                        f"edge {e.id!r} refers to unknown vertex {endpoint!r}", location=endpoint
                    )
        return cls(tuple(sorted(vertices)), tuple(sorted(edge_list, key=lambda e: e.id)))

    # -- indexing -----------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def src(self) -> np.ndarray:
        """Source vertex index of every edge."""
        idx = self.vertex_index
        arr = np.array([idx[e.src] for e in self.edges], dtype=np.int64)
        arr.flags.writeable = False
        return arr

    @cached_property
    def dst(self) -> np.ndarray:
        """Range vertex index of every edge."""
        idx = self.vertex_index
        arr = np.array([idx[e.dst] for e in self.edges], dtype=np.int64)
        arr.flags.writeable = False
        return arr

    @cached_property
    def out_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(ptr, edges)``: edges grouped by source, ascending within a group."""
        order = np.argsort(self.src, kind="stable")
        counts = np.bincount(self.src, minlength=self.n_vertices)
        ptr = np.zeros(self.n_vertices + 1, dtype=np.int64)
        np.cumsum(counts, out=ptr[1:])
        return ptr, order.astype(np.int64)

    def out_edges(self, v: int) -> np.ndarray:
        ptr, edges = self.out_csr
        return edges[ptr[v]:ptr[v + 1]]

    @cached_property
    def emitting(self) -> np.ndarray:
        """Boolean mask of vertices that are the source of at least one edge."""
        return np.bincount(self.src, minlength=self.n_vertices) > 0

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"id": e.id, "src": e.src, "dst": e.dst} for e in self.edges],
        }

    def dumps(self) -> str:
        return dumps_graph(self)


def parse_graph(text: str | bytes) -> Graph:
    """Parse the JSON graph format.

    >>> g = parse_graph('{"vertices":["v"],"edges":[{"id":"e1","src":"v","dst":"v"}]}')
    >>> g.n_edges
    1
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GraphFormatError(f"document is not UTF-8: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc.msg}", location=f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise GraphFormatError("graph document must be a JSON object", location="$")
    for key in ("vertices", "edges"):
        if key not in doc:
            raise GraphFormatError(f"missing key {key!r}", location=key)
        if not isinstance(doc[key], list):
            raise GraphFormatError(f"{key!r} must be an array", location=key)
    edges = []
    for i, rec in enumerate(doc["edges"]):
        if not isinstance(rec, dict):
            raise GraphFormatError("edge record must be an object", location=f"edges[{i}]")
        for key in ("id", "src", "dst"):
            if key not in rec:
                raise GraphFormatError(f"edge record missing {key!r}", location=f"edges[{i}].{key}")
        edges.append(Edge(rec["id"], rec["src"], rec["dst"]))
    return Graph.build(doc["vertices"], edges)


def dumps_graph(g: Graph) -> str:
    return json.dumps(g.to_dict(), separators=(",", ":"))


def load_graph(path) -> Graph:
    with open(path, "rb") as fh:
        return parse_graph(fh.read())


def adjacency(g: Graph) -> np.ndarray:
    """``D[v, w]`` = number of edges with source ``v`` and range ``w``."""
    D = np.zeros((g.n_vertices, g.n_vertices), dtype=np.int64)
    np.add.at(D, (g.src, g.dst), 1)
    return D


# ---------------------------------------------------------------------------
# Structure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Shape:
    kind: str  # "m_gon_union" | "bouquet_union" | "generic"
    params: tuple[tuple[str, int], ...] = ()

    def __getitem__(self, key):
        return dict(self.params)[key]

    def to_dict(self) -> dict:
        return {"kind": self.kind, **dict(self.params)}

    def __str__(self):
        if self.kind == "m_gon_union":
            return f"m_gon_union(m={self['m']}, count={self['count']})"
        if self.kind == "bouquet_union":
            return f"bouquet_union(loops={self['loops']}, copies={self['copies']})"
        return "generic"


GENERIC = Shape("generic")


@dataclass(frozen=True)
class StructuralReport:
    no_sources: bool
    no_sinks: bool
    r_injective: bool
    s_injective: bool
    out_regular: Optional[int]
    emitting_vertices: tuple[str, ...]
    components: tuple[tuple[str, ...], ...]
    shape: Shape
    has_loops: bool
    has_multiple_edges: bool

    @property
    def simple(self) -> bool:
        """No parallel edges.  Loops are allowed and reported separately."""
        return not self.has_multiple_edges

    def to_dict(self) -> dict:
        return {
            "no_sources": self.no_sources,
            "no_sinks": self.no_sinks,
            "r_injective": self.r_injective,
            "s_injective": self.s_injective,
            "out_regular": self.out_regular,
            "emitting_vertices": list(self.emitting_vertices),
            "components": [list(c) for c in self.components],
            "shape": self.shape.to_dict(),
            "has_loops": self.has_loops,
            "has_multiple_edges": self.has_multiple_edges,
        }


def _components(g: Graph) -> list[list[int]]:
    parent = list(range(g.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in zip(g.src, g.dst):
        ra, rb = find(int(a)), find(int(b))
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for v in range(g.n_vertices):
        groups.setdefault(find(v), []).append(v)
    return sorted(groups.values())


def _detect_shape(g: Graph, comps: list[list[int]]) -> Shape:
    if not comps or g.n_edges == 0:
        return GENERIC
    comp_of = np.empty(g.n_vertices, dtype=np.int64)
    for ci, comp in enumerate(comps):
        comp_of[comp] = ci
    edge_counts = np.bincount(comp_of[g.src], minlength=len(comps))
    outdeg = np.bincount(g.src, minlength=g.n_vertices)
    indeg = np.bincount(g.dst, minlength=g.n_vertices)

    if all(len(c) == 1 for c in comps):
        loops = {int(k) for k in edge_counts}
        if len(loops) == 1 and loops != {0}:
            return Shape("bouquet_union", (("loops", loops.pop()), ("copies", len(comps))))
        return GENERIC

    sizes = {len(c) for c in comps}
    if len(sizes) == 1 and (outdeg == 1).all() and (indeg == 1).all():
        m = sizes.pop()
        # in/out-degree one on a connected component forces a single cycle
        if m >= 2 and (edge_counts == m).all():
            return Shape("m_gon_union", (("m", m), ("count", len(comps))))
    return GENERIC


def structural_report(g: Graph) -> StructuralReport:
    outdeg = np.bincount(g.src, minlength=g.n_vertices)
    indeg = np.bincount(g.dst, minlength=g.n_vertices)
    comps = _components(g)
    pairs = list(zip(g.src.tolist(), g.dst.tolist()))
    regular = None
    if g.n_vertices and (outdeg == outdeg[0]).all():
        regular = int(outdeg[0])
    return StructuralReport(
        no_sources=bool((indeg > 0).all()),
        no_sinks=bool((outdeg > 0).all()),
        r_injective=bool((indeg <= 1).all()),
        s_injective=bool((outdeg <= 1).all()),
        out_regular=regular,
        emitting_vertices=tuple(g.vertices[i] for i in np.flatnonzero(outdeg > 0)),
        components=tuple(tuple(g.vertices[i] for i in c) for c in comps),
        shape=_detect_shape(g, comps),
        has_loops=bool((g.src == g.dst).any()),
        has_multiple_edges=len(set(pairs)) != len(pairs),
    )


# ---------------------------------------------------------------------------
# Classical automorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GraphAutomorphism:
    """A pair of vertex and edge permutations intertwining ``s`` and ``r``.

    ``vertex_perm[i]`` is the index of the image of vertex ``i``; likewise
    for edges.
    """

    graph: Graph = field(repr=False, compare=False)
    vertex_perm: tuple[int, ...]
    edge_perm: tuple[int, ...]

    def is_identity(self) -> bool:
        return all(i == p for i, p in enumerate(self.vertex_perm)) and all(
            i == p for i, p in enumerate(self.edge_perm)
        )

    def compose(self, other: "GraphAutomorphism") -> "GraphAutomorphism":
        """``self ∘ other``."""
        return GraphAutomorphism(
            self.graph,
            tuple(self.vertex_perm[i] for i in other.vertex_perm),
            tuple(self.edge_perm[i] for i in other.edge_perm),
        )

    def vertex_matrix(self) -> np.ndarray:
        """Permutation matrix ``P`` with ``P[σ(v), v] = 1``."""
        n = len(self.vertex_perm)
        P = np.zeros((n, n), dtype=np.int64)
        P[list(self.vertex_perm), np.arange(n)] = 1
        return P

    def edge_matrix(self) -> np.ndarray:
        n = len(self.edge_perm)
        P = np.zeros((n, n), dtype=np.int64)
        P[list(self.edge_perm), np.arange(n)] = 1
        return P

    def to_dict(self) -> dict:
        g = self.graph
        return {
            "vertices": {g.vertices[i]: g.vertices[p] for i, p in enumerate(self.vertex_perm)},
            "edges": {g.edges[i].id: g.edges[p].id for i, p in enumerate(self.edge_perm)},
        }


def classical_automorphisms(g: Graph, max_vertices: int = MAX_AUTOMORPHISM_VERTICES) -> list[GraphAutomorphism]:
    """Enumerate Aut(G) by brute force.

    Vertex permutations commuting with the adjacency matrix are found first;
    each is then extended to edges fiber by fiber, every bijection between
    the edge sets ``v -> w`` and ``σ(v) -> σ(w)`` giving one automorphism.
    """
    if g.n_vertices > max_vertices:
        raise SizeBoundError(
            f"automorphism search is limited to {max_vertices} vertices, graph has {g.n_vertices}",
            location="vertices",
        )
    D = adjacency(g)
    fibers: dict[tuple[int, int], list[int]] = {}
    for e, (a, b) in enumerate(zip(g.src.tolist(), g.dst.tolist())):
        fibers.setdefault((a, b), []).append(e)
    keys = sorted(fibers)
    result = []
    for perm in _kernels.vertex_automorphisms(D):
        perm = tuple(int(p) for p in perm)
        choices = [
            [(fibers[(a, b)], img) for img in itertools.permutations(fibers[(perm[a], perm[b])])]
            for a, b in keys
        ]
        for combo in itertools.product(*choices):
            edge_perm = [0] * g.n_edges
            for sources, images in combo:
                for e, f in zip(sources, images):
                    edge_perm[e] = f
            result.append(GraphAutomorphism(g, perm, tuple(edge_perm)))
    return result


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def _names(prefix: str, count: int) -> list[str]:
    width = len(str(max(count, 1)))
    return [f"{prefix}{i + 1:0{width}d}" for i in range(count)]


def bouquet(n: int, vertex: str = "v") -> Graph:
    """One vertex with ``n`` loops (the graph of the Cuntz algebra O_n)."""
    return Graph.build([vertex], [(name, vertex, vertex) for name in _names("e", n)])


def bouquet_union(n: int, m: int) -> Graph:
    """Disjoint union of ``m`` copies of the ``n``-loop bouquet."""
    vs = _names("v", m)
    width = len(str(max(n, 1)))
    edges = [(f"{v}e{j + 1:0{width}d}", v, v) for v in vs for j in range(n)]
    return Graph.build(vs, edges)


def oriented_cycle(m: int) -> Graph:
    """Oriented ``m``-gon ``v1 -> v2 -> ... -> vm -> v1``."""
    vs = _names("v", m)
    es = _names("e", m)
    return Graph.build(vs, [(es[i], vs[i], vs[(i + 1) % m]) for i in range(m)])


def disjoint_union(graphs: Sequence[Graph], prefixes: Optional[Sequence[str]] = None) -> Graph:
    if prefixes is None:
        prefixes = _names("c", len(graphs))
        prefixes = [p + "." for p in prefixes]
    vertices, edges = [], []
    for p, h in zip(prefixes, graphs):
        vertices += [p + v for v in h.vertices]
        edges += [(p + e.id, p + e.src, p + e.dst) for e in h.edges]
    return Graph.build(vertices, edges)


def from_adjacency(D, vertex_names: Optional[Sequence[str]] = None) -> Graph:
    """Graph with ``D[v][w]`` edges ``v -> w``; edges named ``v>w#k``."""
    D = np.asarray(D, dtype=np.int64)
    n = D.shape[0]
    vs = list(vertex_names) if vertex_names is not None else _names("v", n)
    if sorted(vs) != vs:
        raise ValueError("vertex names must already be in lexicographic order")
    edges = []
    for a in range(n):
        for b in range(n):
            for k in range(int(D[a, b])):
                edges.append((f"{vs[a]}>{vs[b]}#{k}", vs[a], vs[b]))
    return Graph.build(vs, edges)
