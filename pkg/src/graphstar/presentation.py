"""Quantum automorphism presentations and their evaluation on matrices.

A presentation is a list of noncommutative *-polynomials in named
generators.  A polynomial is a tuple of terms ``(coeff, word)`` where a
word is a tuple of ``(generator key, starred)`` pairs; the empty word is
the unit.  Evaluating at a matrix realization replaces every generator by
its ``k x k`` matrix and measures each relation by the operator norm.

Flavors:

``banica``
    ``q = q*``, orthogonality along rows and columns, row and column sums
    equal to one, the non-edge relations and ``UD = DU``.
``bichon``
    the above plus ``q_{s(e)s(f)} q_{r(e)r(f)} = q_{r(e)r(f)} q_{s(e)s(f)}``
    for every ordered pair of edges.
``wreath``
    ``m`` free copies of ``S_n^+`` together with ``S_m^+`` and the
    commutation ``ν_l(u_ij) v_lk = v_lk ν_l(u_ij)``, for a disjoint union
    of ``m`` bouquets with ``n`` loops each.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import DimensionMismatchError, GraphFormatError, PreconditionError
from .graph import Graph, adjacency, structural_report
from .magic import MagicUnitary, _opnorm

PASS_TOL = 1e-8

GenKey = tuple[str, tuple[int, ...]]
Word = tuple[tuple[GenKey, bool], ...]
Poly = tuple[tuple[complex, Word], ...]


@dataclass(frozen=True)
class Generator:
    key: GenKey
    name: str

    @property
    def family(self) -> str:
        return self.key[0]

    @property
    def indices(self) -> tuple[int, ...]:
        return self.key[1]

    def transposed_key(self) -> GenKey:
        """Swap the last two indices (``q_vw -> q_wv``)."""
        idx = self.indices
        return (self.family, idx[:-2] + (idx[-1], idx[-2]))


@dataclass(frozen=True)
class Relation:
    cls: str
    instance: str
    poly: Poly

    def generators(self) -> set[GenKey]:
        return {g for _, word in self.poly for g, _ in word}


@dataclass
class Presentation:
    label: str
    generators: list[Generator]
    relations: list[Relation]
    coproduct: dict[str, list[tuple[str, str]]]
    params: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    trivial_generators: list[str] = field(default_factory=list)

    def __post_init__(self):
        self._by_key = {g.key: g for g in self.generators}
        self._by_name = {g.name: g for g in self.generators}
        for rel in self.relations:
            unknown = rel.generators() - self._by_key.keys()
            if unknown:
                raise ValueError(f"relation {rel.instance} uses undeclared generators {sorted(unknown)}")

    def generator(self, key_or_name) -> Generator:
        if isinstance(key_or_name, str):
            return self._by_name[key_or_name]
        return self._by_key[key_or_name]

    @property
    def families(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.generators:
            out[g.family] = out.get(g.family, 0) + 1
        return out

    def relation_classes(self) -> list[str]:
        seen = []
        for rel in self.relations:
            if rel.cls not in seen:
                seen.append(rel.cls)
        return seen

    def render_word(self, word: Word) -> str:
        if not word:
            return "1"
        return " ".join(self._by_key[g].name + ("*" if star else "") for g, star in word)

    def to_dict(self) -> dict:
        rels = []
        for rel in self.relations:
            rels.append({
                "class": rel.cls,
                "instance": rel.instance,
                "terms": [
                    {"coeff": [c.real, c.imag], "word": [self._by_key[g].name + ("*" if s else "") for g, s in w]}
                    for c, w in rel.poly
                ],
            })
        return {
            "label": self.label,
            "params": self.params,
            "flags": self.flags,
            "generators": [g.name for g in self.generators],
            "trivial_generators": self.trivial_generators,
            "relation_counts": {c: sum(r.cls == c for r in self.relations) for c in self.relation_classes()},
            "relations": rels,
            "coproduct": {k: [list(p) for p in v] for k, v in self.coproduct.items()},
        }


# ---------------------------------------------------------------------------
# Polynomial helpers
# ---------------------------------------------------------------------------


def _poly(terms) -> Poly:
    """Collect like words and drop zero coefficients, keeping first-seen order."""
    acc: dict[Word, complex] = {}
    for c, word in terms:
        word = tuple(word)
        acc[word] = acc.get(word, 0j) + complex(c)
    return tuple((c, w) for w, c in acc.items() if c != 0)


def _w(*keys: GenKey, star: bool = False) -> Word:
    return tuple((k, star) for k in keys)


class _Builder:
    def __init__(self):
        self.relations: list[Relation] = []

    def add(self, cls: str, instance: str, terms):
        poly = _poly(terms)
        if poly:
            self.relations.append(Relation(cls, instance, poly))


def _magic_relations(b: _Builder, key, names: Sequence[str], n: int, prefix: str = ""):
    """The ``S_n^+`` relations for the family ``key(i, j)``."""
    for i, j in itertools.product(range(n), repeat=2):
        g = key(i, j)
        b.add(prefix + "r1_selfadjoint", f"{names[i]},{names[j]}", [(1, ((g, True),)), (-1, ((g, False),))])
    for i, j, l in itertools.product(range(n), repeat=3):
        g, h = key(i, j), key(i, l)
        terms = [(1, _w(g, h))] + ([(-1, _w(g))] if j == l else [])
        b.add(prefix + "r1_row", f"{names[i]}:{names[j]},{names[l]}", terms)
    for i, j, l in itertools.product(range(n), repeat=3):
        g, h = key(i, j), key(l, j)
        terms = [(1, _w(g, h))] + ([(-1, _w(g))] if i == l else [])
        b.add(prefix + "r1_column", f"{names[j]}:{names[i]},{names[l]}", terms)
    for i in range(n):
        b.add(prefix + "r2_row", names[i], [(1, _w(key(i, j))) for j in range(n)] + [(-1, ())])
    for j in range(n):
        b.add(prefix + "r2_column", names[j], [(1, _w(key(i, j))) for i in range(n)] + [(-1, ())])


def _matrix_coproduct(name, n) -> dict[str, list[tuple[str, str]]]:
    return {name(i, j): [(name(i, u), name(u, j)) for u in range(n)] for i in range(n) for j in range(n)}


# ---------------------------------------------------------------------------
# Emitters
# ---------------------------------------------------------------------------


def _require_simple(g: Graph, flavor: str):
    report = structural_report(g)
    if report.has_multiple_edges:
        D = adjacency(g)
        v, w = map(int, np.argwhere(D > 1)[0])
        raise PreconditionError(
            f"{flavor} presentation needs a graph without multiple edges; "
            f"{g.vertices[v]} -> {g.vertices[w]} has {D[v, w]} edges",
            location=f"{g.vertices[v]}->{g.vertices[w]}",
        )
    return report


def _q_generators(g: Graph):
    V = g.vertices
    n = g.n_vertices

    def key(v, w):
        return ("q", (v, w))

    def name(v, w):
        return f"q[{V[v]}][{V[w]}]"

    gens = [Generator(key(v, w), name(v, w)) for v in range(n) for w in range(n)]
    return key, name, gens


def emit_banica(g: Graph) -> Presentation:
    """Banica's quantum automorphism group of a graph without multiple edges."""
    report = _require_simple(g, "banica")
    key, name, gens = _q_generators(g)
    V = g.vertices
    n = g.n_vertices
    b = _Builder()
    _magic_relations(b, key, V, n)

    D = adjacency(g)
    edge_pairs = list(zip(g.src.tolist(), g.dst.tolist()))
    non_edges = [(v, w) for v in range(n) for w in range(n) if D[v, w] == 0]
    for e, (s, r) in zip(g.edges, edge_pairs):
        for v, w in non_edges:
            inst = f"{e.id};({V[v]},{V[w]})"
            b.add("r3", inst + ";s-row", [(1, _w(key(s, v), key(r, w)))])
            b.add("r3", inst + ";r-row", [(1, _w(key(r, w), key(s, v)))])
            b.add("r3", inst + ";s-column", [(1, _w(key(v, s), key(w, r)))])
            b.add("r3", inst + ";r-column", [(1, _w(key(w, r), key(v, s)))])

    # (UD - DU)_{vw} = Σ_u q_vu D_uw - Σ_u D_vu q_uw
    for v, w in itertools.product(range(n), repeat=2):
        terms = [(D[u, w], _w(key(v, u))) for u in range(n) if D[u, w]]
        terms += [(-D[v, u], _w(key(u, w))) for u in range(n) if D[v, u]]
        b.add("UD=DU", f"{V[v]},{V[w]}", terms)

    return Presentation(
        label="banica",
        generators=gens,
        relations=b.relations,
        coproduct=_matrix_coproduct(name, n),
        params={"vertices": list(V)},
        flags={"has_loops": report.has_loops},
    )


def emit_bichon(g: Graph) -> Presentation:
    """Banica relations plus the commutation relations making λ multiplicative."""
    _require_simple(g, "bichon")
    base = emit_banica(g)
    key = lambda v, w: ("q", (v, w))  # noqa: E731
    b = _Builder()
    b.relations = list(base.relations)
    pairs = list(zip(g.src.tolist(), g.dst.tolist()))
    for (e, (se, re_)), (f, (sf, rf)) in itertools.product(zip(g.edges, pairs), repeat=2):
        a, c = key(se, sf), key(re_, rf)
        # kept even when a == c so every ordered pair has its instance
        b.relations.append(Relation("r4", f"{e.id},{f.id}", ((1 + 0j, _w(a, c)), (-1 + 0j, _w(c, a)))))
    return Presentation(
        label="bichon",
        generators=base.generators,
        relations=b.relations,
        coproduct=base.coproduct,
        params=base.params,
        flags=base.flags,
    )


def wreath_layout(g: Graph) -> tuple[int, int, list[str], list[list[int]]]:
    """``(n, m, copies, loops)`` for a bouquet union.

    ``copies[l]`` is the vertex of copy ``l`` and ``loops[l][i]`` the edge
    index of its ``i``-th loop, both in canonical order.
    """
    shape = structural_report(g).shape
    if shape.kind != "bouquet_union":
        raise PreconditionError(f"wreath presentation needs a bouquet union, graph shape is {shape}", location="shape")
    n, m = shape["loops"], shape["copies"]
    copies = list(g.vertices)
    loops = [[int(e) for e in g.out_edges(l)] for l in range(m)]
    return n, m, copies, loops


def emit_wreath(g: Graph) -> Presentation:
    """Free wreath product ``S_n^+ ≀_* S_m^+`` for ``m`` copies of the ``n``-loop bouquet.

    Generators ``u(l)[i][j]`` stand for ``ν_l(u_ij)`` and ``v[k][l]`` for the
    ``S_m^+`` generators.  A family with a single generator is identically
    the unit; it is substituted and listed in ``trivial_generators``, so
    ``m = 1`` leaves ``S_n^+`` and ``n = 1`` leaves ``S_m^+``.
    """
    n, m, copies, _ = wreath_layout(g)
    idx = [str(i + 1) for i in range(max(n, m))]

    def ukey(l, i, j):
        return ("u", (l, i, j))

    def uname(l, i, j):
        return f"u({l + 1})[{i + 1}][{j + 1}]"

    def vkey(k, l):
        return ("v", (k, l))

    def vname(k, l):
        return f"v[{k + 1}][{l + 1}]"

    keep_u, keep_v = n > 1, m > 1
    gens, trivial = [], []
    for l in range(m):
        for i, j in itertools.product(range(n), repeat=2):
            (gens if keep_u else trivial).append(Generator(ukey(l, i, j), uname(l, i, j)))
    for k, l in itertools.product(range(m), repeat=2):
        (gens if keep_v else trivial).append(Generator(vkey(k, l), vname(k, l)))

    b = _Builder()
    if keep_u:
        for l in range(m):
            _magic_relations(b, lambda i, j, l=l: ukey(l, i, j), idx[:n], n, prefix=f"copy{l + 1}:")
    if keep_v:
        _magic_relations(b, vkey, idx[:m], m, prefix="base:")
    if keep_u and keep_v:
        for l, i, j, k in itertools.product(range(m), range(n), range(n), range(m)):
            a, c = ukey(l, i, j), vkey(l, k)
            b.add("wreath_commute", f"{uname(l, i, j)},{vname(l, k)}", [(1, _w(a, c)), (-1, _w(c, a))])

    coproduct: dict[str, list[tuple[str, str]]] = {}
    for k, l in itertools.product(range(m), repeat=2):
        coproduct[vname(k, l)] = [(vname(k, t), vname(t, l)) for t in range(m)]
    for l in range(m):
        for i, j in itertools.product(range(n), repeat=2):
            coproduct[uname(l, i, j)] = [
                (f"{uname(l, i, t)} {vname(l, k)}", uname(k, t, j)) for k in range(m) for t in range(n)
            ]

    return Presentation(
        label=f"wreath_sn_sm({n},{m})",
        generators=gens,
        relations=b.relations,
        coproduct=coproduct,
        params={"n": n, "m": m, "copies": copies},
        flags={"has_loops": True},
        trivial_generators=[t.name for t in trivial],
    )


def emit(g: Graph, flavor: str) -> Presentation:
    if flavor == "banica":
        return emit_banica(g)
    if flavor == "bichon":
        return emit_bichon(g)
    if flavor == "wreath":
        return emit_wreath(g)
    raise ValueError(f"unknown flavor {flavor!r}")


# ---------------------------------------------------------------------------
# Realizations
# ---------------------------------------------------------------------------


def classical_wreath_realization(n: int, m: int, sigmas: Sequence[Sequence[int]], pi: Sequence[int]) -> dict[str, np.ndarray]:
    """Scalar realization of one element of ``S_n ≀ S_m``.

    ``u(l)[i][j] = [i = σ_l(j)]`` and ``v[k][l] = [k = π(l)]``.
    """
    out = {}
    for l in range(m):
        for i, j in itertools.product(range(n), repeat=2):
            out[f"u({l + 1})[{i + 1}][{j + 1}]"] = np.array([[1.0 if i == sigmas[l][j] else 0.0]])
    for k, l in itertools.product(range(m), repeat=2):
        out[f"v[{k + 1}][{l + 1}]"] = np.array([[1.0 if k == pi[l] else 0.0]])
    return out


Realization = Union[MagicUnitary, Mapping[str, np.ndarray]]


def _realization_map(U: Realization, P: Presentation) -> tuple[dict[GenKey, np.ndarray], int]:
    if isinstance(U, MagicUnitary):
        if set(P.families) != {"q"}:
            raise DimensionMismatchError(
                f"a magic unitary realizes only q-presentations, {P.label} has families {sorted(P.families)}",
                location="unitary",
            )
        m = int(np.sqrt(P.families["q"]))
        if U.dimension != m:
            raise DimensionMismatchError(
                f"magic unitary has dimension {U.dimension}, presentation needs {m}", location="unitary"
            )
        return {g.key: U.entries[g.indices] for g in P.generators}, U.block
    out = {}
    k = None
    for g in P.generators:
        if g.name not in U:
            raise DimensionMismatchError(f"realization is missing generator {g.name}", location=g.name)
        mat = np.asarray(U[g.name], dtype=np.complex128)
        if mat.ndim == 0:
            mat = mat.reshape(1, 1)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or (k is not None and mat.shape[0] != k):
            raise DimensionMismatchError(f"generator {g.name} has shape {mat.shape}", location=g.name)
        k = mat.shape[0]
        out[g.key] = mat
    return out, (k or 1)


def evaluate(poly: Poly, values: Mapping[GenKey, np.ndarray], k: int) -> np.ndarray:
    acc = np.zeros((k, k), dtype=np.complex128)
    eye = np.eye(k, dtype=np.complex128)
    for c, word in poly:
        mat = eye
        for g, star in word:
            x = values[g]
            mat = mat @ (x.conj().T if star else x)
        acc += c * mat
    return acc


def residuals_by_class(P: Presentation, values: Mapping[GenKey, np.ndarray], k: int) -> tuple[dict[str, float], Optional[str]]:
    per_class: dict[str, float] = {c: 0.0 for c in P.relation_classes()}
    worst, worst_val = None, -1.0
    for rel in P.relations:
        r = _opnorm(evaluate(rel.poly, values, k))
        if r > per_class[rel.cls]:
            per_class[rel.cls] = r
        if r > worst_val:
            worst, worst_val = f"{rel.cls}:{rel.instance}", r
    return per_class, worst


def verify_magic(U: Realization, P: Presentation, tol: float = PASS_TOL) -> dict:
    """Substitute a matrix realization into every relation of ``P``.

    Returns the largest operator-norm residual per relation class, the
    overall maximum, ``pass`` (maximum ``<= tol``) and
    ``antipode_compatible``: whether the realization with the last two
    indices of every generator swapped (``q_vw -> q_wv``) also passes.
    """
    values, k = _realization_map(U, P)
    per_class, worst = residuals_by_class(P, values, k)
    total = max(per_class.values(), default=0.0)

    swapped = {g.key: values[g.transposed_key()] for g in P.generators if g.transposed_key() in values}
    if len(swapped) == len(values):
        t_class, _ = residuals_by_class(P, swapped, k)
        antipode = max(t_class.values(), default=0.0) <= tol
    else:
        antipode = False
    return {
        "label": P.label,
        "block_size": k,
        "residuals": per_class,
        "max_residual": total,
        "worst_relation": worst if total > 0 else None,
        "pass": total <= tol,
        "antipode_compatible": antipode,
        "tolerance": tol,
    }


def parse_realization(doc) -> dict[str, np.ndarray]:
    """``{generator name: [[[re, im], ...], ...]}`` to a realization map."""
    if not isinstance(doc, dict):
        raise GraphFormatError("realization must map generator names to matrices", location="unitary")
    out = {}
    for name, raw in doc.items():
        arr = np.asarray(raw, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[-1] != 2:
            raise DimensionMismatchError(f"generator {name} must be a k x k array of [re, im]", location=name)
        out[name] = arr[..., 0] + 1j * arr[..., 1]
    return out
