"""Symbolic calculus in the graph algebra ``C*(G)``.

Elements are finite sums of monomials ``S_μ S_ν*`` with ``r(μ) = r(ν)``.
A monomial is keyed by ``(μ, ν, v)`` where ``μ`` and ``ν`` are tuples of
edge indices and ``v`` is the common range vertex (for ``μ = ν = ()`` the
key is the vertex projection ``p_v``).  Coefficients live in a pluggable
ring (see :mod:`graphstar.rings`).

Products are reduced with ``S_e* S_f = δ_{e,f} p_{r(e)}`` only.  The
Cuntz-Krieger relation ``p_v = Σ_{s(e)=v} S_e S_e*`` is applied on demand
by :func:`expand`, and only at vertices that emit edges; equality is
decided after expanding both sides to a common depth.
"""

from __future__ import annotations

import cmath
import itertools
import json
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

import numpy as np

from ._config import default_tol
from .correspondence import path_basis, path_ranges
from .errors import GraphFormatError, GraphMismatchError, PreconditionError
from .graph import Graph
from .kms import KmsProfile
from .rings import SCALARS, ScalarRing

Key = tuple[tuple[int, ...], tuple[int, ...], int]


class AlgebraElement:
    """A finite linear combination of reduced monomials ``S_μ S_ν*``."""

    __slots__ = ("graph", "ring", "terms")

    def __init__(self, graph: Graph, ring=SCALARS, terms: Optional[Mapping[Key, object]] = None):
        self.graph = graph
        self.ring = ring
        self.terms: dict[Key, object] = {}
        if terms:
            for key, c in terms.items():
                self._accumulate(key, c)
            self._prune()

    # -- construction ---------------------------------------------------------

    @classmethod
    def zero(cls, graph: Graph, ring=SCALARS) -> "AlgebraElement":
        return cls(graph, ring)

    @classmethod
    def monomial(cls, graph: Graph, mu: Sequence, nu: Sequence = (), coeff=None,
                 ring=SCALARS, vertex=None) -> "AlgebraElement":
        """``coeff · S_μ S_ν*``; zero if the paths are not composable or
        their ranges differ.

        Paths may be given as edge ids or edge indices.  ``vertex`` is needed
        only when both paths are empty.
        """
        mu = _as_indices(graph, mu)
        nu = _as_indices(graph, nu)
        coeff = ring.one if coeff is None else coeff
        if isinstance(coeff, (int, float, complex)):
            coeff = ring.scalar(coeff)
        if isinstance(vertex, str):
            vertex = graph.vertex_index[vertex]
        if not (_composable(graph, mu) and _composable(graph, nu)):
            return cls(graph, ring)
        ends = {int(graph.dst[p[-1]]) for p in (mu, nu) if p}
        if vertex is not None:
            ends.add(int(vertex))
        if len(ends) != 1:
            if not ends:
                raise ValueError("vertex is required when both paths are empty")
            return cls(graph, ring)
        return cls(graph, ring, {(mu, nu, ends.pop()): coeff})

    @classmethod
    def S(cls, graph: Graph, edge, ring=SCALARS) -> "AlgebraElement":
        return cls.monomial(graph, (edge,), (), ring=ring)

    @classmethod
    def S_star(cls, graph: Graph, edge, ring=SCALARS) -> "AlgebraElement":
        return cls.monomial(graph, (), (edge,), ring=ring)

    @classmethod
    def p(cls, graph: Graph, vertex, ring=SCALARS) -> "AlgebraElement":
        return cls.monomial(graph, (), (), ring=ring, vertex=vertex)

    @classmethod
    def one(cls, graph: Graph, ring=SCALARS) -> "AlgebraElement":
        return cls(graph, ring, {((), (), v): ring.one for v in range(graph.n_vertices)})

    # -- bookkeeping ----------------------------------------------------------

    def _accumulate(self, key, c):
        if key in self.terms:
            self.terms[key] = self.terms[key] + c
        else:
            self.terms[key] = c

    def _prune(self, tol: float = 0.0):
        norm = self.ring.norm
        for key in [k for k, c in self.terms.items() if norm(c) <= tol]:
            del self.terms[key]

    def _check(self, other: "AlgebraElement"):
        if self.graph is not other.graph and self.graph != other.graph:
            raise GraphMismatchError("elements live on different graphs")
        if self.ring != other.ring:
            raise GraphMismatchError(f"coefficient ring mismatch: {self.ring.name} vs {other.ring.name}")

    def copy(self) -> "AlgebraElement":
        out = AlgebraElement(self.graph, self.ring)
        out.terms = dict(self.terms)
        return out

    def __len__(self):
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[Key, object]]:
        return iter(sorted(self.terms.items(), key=lambda kv: kv[0]))

    def is_zero(self, tol: Optional[float] = None) -> bool:
        tol = default_tol() if tol is None else tol
        return all(self.ring.norm(c) <= tol for c in self.terms.values())

    def max_length(self) -> int:
        return max((max(len(m), len(n)) for m, n, _ in self.terms), default=0)

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        out = self.copy()
        for key, c in other.terms.items():
            out._accumulate(key, c)
        out._prune()
        return out

    def __neg__(self) -> "AlgebraElement":
        out = AlgebraElement(self.graph, self.ring)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, c, side: str = "left") -> "AlgebraElement":
        """Multiply every coefficient by a ring element or a complex number."""
        out = AlgebraElement(self.graph, self.ring)
        if isinstance(c, (int, float, complex)):
            out.terms = {k: v * c for k, v in self.terms.items()}
        elif side == "left":
            out.terms = {k: self.ring.mul(c, v) for k, v in self.terms.items()}
        else:
            out.terms = {k: self.ring.mul(v, c) for k, v in self.terms.items()}
        out._prune()
        return out

    def __rmul__(self, c):
        return self.scale(c)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        return self.scale(other, side="right")

    def adjoint(self) -> "AlgebraElement":
        return adjoint(self)

    @property
    def H(self) -> "AlgebraElement":
        return adjoint(self)

    def allclose(self, other: "AlgebraElement", tol: Optional[float] = None) -> bool:
        return equal(self, other, tol)

    # -- serialization ----------------------------------------------------------

    def to_dict(self) -> dict:
        g = self.graph
        terms = []
        for (mu, nu, v), c in self:
            terms.append({
                "mu": [g.edges[i].id for i in mu],
                "nu": [g.edges[i].id for i in nu],
                "vertex": g.vertices[v],
                "coeff": _coeff_to_json(c),
            })
        return {"terms": terms}

    def __repr__(self):
        if not self.terms:
            return "0"
        g = self.graph
        parts = []
        for (mu, nu, v), c in self:
            if not mu and not nu:
                word = f"p[{g.vertices[v]}]"
            else:
                word = "".join(f"S[{g.edges[i].id}]" for i in mu)
                word += "".join(f"S*[{g.edges[i].id}]" for i in reversed(nu))
            parts.append(f"({c})·{word}")
        return " + ".join(parts)


def _as_indices(graph: Graph, path) -> tuple[int, ...]:
    out = []
    for e in path:
        if isinstance(e, str):
            if e not in graph.edge_index:
                raise GraphFormatError(f"unknown edge {e!r}", location=e)
            out.append(graph.edge_index[e])
        else:
            out.append(int(e))
    return tuple(out)


def _composable(graph: Graph, path) -> bool:
    return all(graph.dst[a] == graph.src[b] for a, b in zip(path, path[1:]))


def _coeff_to_json(c):
    if isinstance(c, np.ndarray):
        return [[[float(z.real), float(z.imag)] for z in row] for row in c]
    if hasattr(c, "terms"):
        return [{"exp": list(e), "coeff": [float(z.real), float(z.imag)]} for e, z in sorted(c.terms.items())]
    c = complex(c)
    return [c.real, c.imag]


def _path_source(graph: Graph, path, v) -> int:
    return int(graph.src[path[0]]) if path else v


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def _multiply_terms(graph: Graph, k1: Key, k2: Key) -> Optional[Key]:
    mu, nu, v1 = k1
    kappa, lam, v2 = k2
    if _path_source(graph, nu, v1) != _path_source(graph, kappa, v2):
        return None
    ln, lk = len(nu), len(kappa)
    if ln <= lk:
        if kappa[:ln] != nu:
            return None
        return (mu + kappa[ln:], lam, v2)
    if nu[:lk] != kappa:
        return None
    return (mu, lam + nu[lk:], v1)


def multiply(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Product of two elements, reduced by prefix comparison of ``ν`` and ``κ``
    in ``S_μ S_ν* · S_κ S_λ*``."""
    x._check(y)
    g = x.graph
    mul = x.ring.mul
    out = AlgebraElement(g, x.ring)
    for k1, c1 in x.terms.items():
        for k2, c2 in y.terms.items():
            key = _multiply_terms(g, k1, k2)
            if key is not None:
                out._accumulate(key, mul(c1, c2))
    out._prune()
    return out


def product(elements: Iterable[AlgebraElement], graph: Graph, ring=SCALARS) -> AlgebraElement:
    acc = None
    for el in elements:
        acc = el if acc is None else multiply(acc, el)
    return AlgebraElement.one(graph, ring) if acc is None else acc


def adjoint(x: AlgebraElement) -> AlgebraElement:
    """``(c S_μ S_ν*)* = c* S_ν S_μ*``."""
    out = AlgebraElement(x.graph, x.ring)
    star = x.ring.star
    out.terms = {(nu, mu, v): star(c) for (mu, nu, v), c in x.terms.items()}
    return out


def _reweight(x: AlgebraElement, weight: Callable[[int], complex]) -> AlgebraElement:
    out = AlgebraElement(x.graph, x.ring)
    out.terms = {k: c * weight(len(k[0]) - len(k[1])) for k, c in x.terms.items()}
    out._prune()
    return out


def gauge_apply(z: complex, x: AlgebraElement) -> AlgebraElement:
    """Gauge action: ``γ_z(S_μ S_ν*) = z^{|μ|-|ν|} S_μ S_ν*``."""
    if abs(abs(z) - 1.0) > 1e-12:
        raise PreconditionError(f"gauge parameter must have modulus one, got |z| = {abs(z)!r}", location="z")
    z = complex(z)
    return _reweight(x, lambda d: z ** d)


def sigma_apply(t: complex, x: AlgebraElement) -> AlgebraElement:
    """Time evolution of the scalar dynamics, ``e^{it(|μ|-|ν|)}``; ``t`` may be
    complex (analytic continuation)."""
    t = complex(t)
    return _reweight(x, lambda d: cmath.exp(1j * t * d))


def sigma_i_beta(x: AlgebraElement, rho: float) -> AlgebraElement:
    """``σ_{iβ}`` with ``e^β = ρ`` taken exactly: weight ``ρ^{-(|μ|-|ν|)}``."""
    rho = float(rho)
    return _reweight(x, lambda d: rho ** (-d))


def expand(x: AlgebraElement, depth: int) -> AlgebraElement:
    """Apply ``S_μ S_ν* = Σ_{s(e)=v} S_{μe} S_{νe}*`` at emitting range vertices
    until every term has ``min(|μ|, |ν|) >= depth`` or ends at a sink."""
    g = x.graph
    ptr, out_edges = g.out_csr
    emitting = g.emitting
    out = AlgebraElement(g, x.ring)
    stack = list(x.terms.items())
    while stack:
        (mu, nu, v), c = stack.pop()
        if min(len(mu), len(nu)) >= depth or not emitting[v]:
            out._accumulate((mu, nu, v), c)
            continue
        for e in out_edges[ptr[v]:ptr[v + 1]]:
            e = int(e)
            stack.append(((mu + (e,), nu + (e,), int(g.dst[e])), c))
    out._prune()
    return out


def common_depth(*elements: AlgebraElement) -> int:
    return max((min(len(m), len(n)) for x in elements for (m, n, _) in x.terms), default=0)


def equal(x: AlgebraElement, y: AlgebraElement, tol: Optional[float] = None) -> bool:
    """Equality in ``C*(G)``: compare after expanding to a common depth."""
    x._check(y)
    tol = default_tol() if tol is None else tol
    diff = x - y
    return expand(diff, common_depth(diff)).is_zero(tol)


def difference_norm(x: AlgebraElement, y: AlgebraElement) -> float:
    """Largest coefficient of ``x - y`` in the common-depth normal form."""
    diff = x - y
    diff = expand(diff, common_depth(diff))
    return max((diff.ring.norm(c) for c in diff.terms.values()), default=0.0)


# ---------------------------------------------------------------------------
# The KMS state
# ---------------------------------------------------------------------------


def apply_state(x: AlgebraElement, profile: KmsProfile):
    """``(φ ⊗ id)(x)`` for any coefficient ring.

    ``φ(S_μ S_ν*) = δ_{μ,ν} ρ^{-|μ|} μ_{r(μ)}``.
    """
    profile.require()
    if profile.graph != x.graph:
        raise GraphMismatchError("profile and element live on different graphs")
    mu = profile.mu_array
    rho = profile.rho
    acc = x.ring.zero
    for (m, n, v), c in x.terms.items():
        if m == n:
            acc = acc + c * (rho ** (-len(m)) * mu[v])
    return acc


def state_eval(x: AlgebraElement, profile: KmsProfile) -> complex:
    """Value of the KMS state on a scalar element."""
    if not isinstance(x.ring, ScalarRing):
        raise PreconditionError(f"state_eval needs scalar coefficients, got {x.ring.name}", location="ring")
    return complex(apply_state(x, profile))


def kms_condition_check(x: AlgebraElement, y: AlgebraElement, profile: KmsProfile, depth: int = 1) -> float:
    """Residual of the KMS condition ``φ(xy) = φ(y σ_{iβ}(x))``.

    Each side is evaluated both on the reduced product and after expanding
    to ``depth`` with the Cuntz-Krieger relation, and the largest of the
    four cross differences is returned.  The expansion is what makes the
    check sensitive to the choice of vertex weights: a vector that is not
    a ρ-eigenvector of the adjacency matrix passes the reduced comparison
    but fails across depths.
    """
    if not isinstance(x.ring, ScalarRing) or not isinstance(y.ring, ScalarRing):
        raise PreconditionError("kms_condition_check needs scalar coefficients", location="ring")
    profile.require()
    lhs = multiply(x, y)
    rhs = multiply(y, sigma_i_beta(x, profile.rho))
    depths = sorted({0, int(depth)})
    left = [state_eval(expand(lhs, d), profile) for d in depths]
    right = [state_eval(expand(rhs, d), profile) for d in depths]
    return max(abs(a - b) for a in left for b in right)


class KmsResidualTable:
    """Fast KMS residuals for pairs of monomials.

    For monomials ``x`` and ``y`` both products ``xy`` and ``yx`` are single
    monomials (or zero), so the residual of :func:`kms_condition_check`
    only needs the state of one expanded monomial.  Expanding
    ``S_μ S_ν*`` never makes ``μ`` and ``ν`` equal, and for ``μ = ν`` the
    expansion by ``j`` more edges sums ``ρ^{-|μ|-j} μ_{r(γ)}`` over the
    continuations ``γ``; that sum is ``ρ^{-|μ|} (T^j μ)_v`` with
    ``(Tx)_v = ρ^{-1} Σ_{s(e)=v} x_{r(e)}`` at emitting vertices and
    ``(Tx)_v = x_v`` at sinks.
    """

    def __init__(self, profile: KmsProfile, depth: int):
        profile.require()
        self.profile = profile
        self.graph = profile.graph
        self.depth = int(depth)
        self._rho = float(profile.rho)
        g = self.graph
        T = np.zeros((g.n_vertices, g.n_vertices))
        np.add.at(T, (g.src, g.dst), 1.0 / self._rho)
        sinks = np.flatnonzero(~g.emitting)
        T[sinks, sinks] = 1.0
        vecs = [profile.mu_array.astype(float)]
        for _ in range(self.depth):
            vecs.append(T @ vecs[-1])
        self._vecs = [v.tolist() for v in vecs]

    def key_state(self, key: Optional[Key], d: int) -> float:
        """``φ`` of the depth-``d`` expansion of a single monomial."""
        if key is None:
            return 0.0
        mu, nu, v = key
        if mu != nu:
            return 0.0
        return self._rho ** (-len(mu)) * self._vecs[max(0, d - len(mu))][v]

    def residual(self, kx: Key, ky: Key) -> float:
        g = self.graph
        lhs = _multiply_terms(g, kx, ky)
        rhs = _multiply_terms(g, ky, kx)
        if lhs is None and rhs is None:
            return 0.0
        weight = self._rho ** (-(len(kx[0]) - len(kx[1])))
        depths = (0, self.depth) if self.depth else (0,)
        left = [self.key_state(lhs, d) for d in depths]
        right = [weight * self.key_state(rhs, d) for d in depths]
        return max(abs(a - b) for a in left for b in right)

    def max_residual(self, keys: Sequence[Key]) -> tuple[float, Optional[tuple[Key, Key]]]:
        """Largest residual over all ordered pairs of ``keys``.

        A residual is nonzero only if ``xy`` or ``yx`` is a monomial
        ``S_γ S_γ*``.  For ``x = S_μ S_ν*`` that forces ``y`` to be
        ``S_{νγ} S_{μγ}*`` for a path ``γ``, or ``S_ν' S_μ'*`` where ``μ``
        and ``ν`` share a suffix that ``μ'`` and ``ν'`` drop.  Only those
        partners are visited; every other pair has residual exactly zero.
        """
        by_paths: dict[tuple, list[Key]] = {}
        for k in keys:
            by_paths.setdefault((k[0], k[1]), []).append(k)
        longest = max((len(k[0]) + len(k[1]) for k in keys), default=0)
        extensions = [[tuple(p) for p in path_basis(self.graph, m).tolist()] for m in range(longest // 2 + 1)]
        extensions[0] = [()]
        worst, arg = 0.0, None
        for kx in keys:
            mu, nu, _ = kx
            partners = set()
            for m in range((longest - len(mu) - len(nu)) // 2 + 1):
                partners.update((nu + gam, mu + gam) for gam in extensions[m])
            for j in range(1, min(len(mu), len(nu)) + 1):
                if mu[-j:] != nu[-j:]:
                    break
                partners.add((nu[:-j], mu[:-j]))
            for pair in partners:
                for ky in by_paths.get(pair, ()):
                    r = self.residual(kx, ky)
                    if r > worst:
                        worst, arg = r, (kx, ky)
        return worst, arg


# ---------------------------------------------------------------------------
# Enumeration, homomorphisms and JSON
# ---------------------------------------------------------------------------


def monomial_keys(graph: Graph, max_length: int) -> list[Key]:
    """All monomials ``S_μ S_ν*`` with ``|μ| + |ν| <= max_length``, including
    the vertex projections."""
    keys = []
    by_level = []
    for level in range(max_length + 1):
        paths = [tuple(p) for p in path_basis(graph, level).tolist()]
        ranges = path_ranges(graph, level).tolist()
        by_level.append(list(zip(paths, ranges)))
    for a in range(max_length + 1):
        for b in range(max_length + 1 - a):
            for mu, rm in by_level[a]:
                for nu, rn in by_level[b]:
                    if rm == rn:
                        keys.append((mu, nu, rm))
    return keys


def monomials(graph: Graph, max_length: int, ring=SCALARS) -> list[AlgebraElement]:
    return [AlgebraElement(graph, ring, {k: ring.one}) for k in monomial_keys(graph, max_length)]


def apply_homomorphism(x: AlgebraElement, edge_image: Callable[[int], AlgebraElement],
                       vertex_image: Callable[[int], AlgebraElement],
                       coeff_map: Callable[[object], object], target_ring) -> AlgebraElement:
    """Extend generator images multiplicatively and *-preservingly to ``x``.

    ``S_μ S_ν* ↦ h(S_μ1)···h(S_μk) h(S_νl)*···h(S_ν1)*``, with ``h(p_v)``
    used only for the bare projections.  Each original coefficient ``c`` is
    mapped by ``coeff_map`` and multiplied on the right, which places it in
    a separate tensor leg.
    """
    g = x.graph
    cache_s: dict[int, AlgebraElement] = {}
    cache_st: dict[int, AlgebraElement] = {}

    def img(e):
        if e not in cache_s:
            cache_s[e] = edge_image(e)
        return cache_s[e]

    def img_star(e):
        if e not in cache_st:
            cache_st[e] = adjoint(img(e))
        return cache_st[e]

    out = AlgebraElement(g, target_ring)
    for (mu, nu, v), c in x.terms.items():
        if not mu and not nu:
            term = vertex_image(v)
        else:
            factors = [img(e) for e in mu] + [img_star(e) for e in reversed(nu)]
            term = factors[0]
            for f in factors[1:]:
                term = multiply(term, f)
                if not term.terms:
                    break
        term = term.scale(coeff_map(c), side="right")
        for key, val in term.terms.items():
            out._accumulate(key, val)
    out._prune()
    return out


def _parse_coeff(raw, location):
    if isinstance(raw, (int, float)):
        return complex(raw)
    if isinstance(raw, list) and len(raw) == 2 and all(isinstance(t, (int, float)) for t in raw):
        return complex(raw[0], raw[1])
    if isinstance(raw, dict) and set(raw) <= {"re", "im"}:
        return complex(raw.get("re", 0.0), raw.get("im", 0.0))
    raise GraphFormatError(f"coefficient must be a number or [re, im], got {raw!r}", location=location)


def element_from_json(graph: Graph, doc) -> AlgebraElement:
    """Parse ``{"terms": [{"mu": [...], "nu": [...], "coeff": ..., "vertex": ...}]}``."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"invalid monomial JSON: {exc.msg}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("terms"), list):
        raise GraphFormatError("monomial document must be an object with a 'terms' array", location="terms")
    out = AlgebraElement(graph)
    for i, t in enumerate(doc["terms"]):
        loc = f"terms[{i}]"
        if not isinstance(t, dict):
            raise GraphFormatError("term must be an object", location=loc)
        mu = t.get("mu", [])
        nu = t.get("nu", [])
        vertex = t.get("vertex")
        if vertex is not None and vertex not in graph.vertex_index:
            raise GraphFormatError(f"unknown vertex {vertex!r}", location=f"{loc}.vertex")
        if not mu and not nu and vertex is None:
            raise GraphFormatError("a term with empty paths needs 'vertex'", location=f"{loc}.vertex")
        for e in itertools.chain(mu, nu):
            if e not in graph.edge_index:
                raise GraphFormatError(f"unknown edge {e!r}", location=loc)
        coeff = _parse_coeff(t.get("coeff", 1.0), f"{loc}.coeff")
        out = out + AlgebraElement.monomial(graph, mu, nu, coeff, vertex=vertex)
    return out

