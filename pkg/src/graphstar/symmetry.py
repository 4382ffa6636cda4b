"""Coactions induced by magic unitaries and their equivariance checks.

A coaction of a (quantum) permutation group on the graph is recorded by two
arrays of ``k x k`` blocks:

* ``alpha[w, v]``: ``α(δ_v) = Σ_w δ_w ⊗ alpha[w, v]`` on ``C(G0)``;
* ``lam[f, e]``: ``λ(δ_e) = Σ_f δ_f ⊗ lam[f, e]`` on ``C(G1)``.

For a magic unitary ``q`` these are ``alpha[w, v] = q_wv`` and
``lam[f, e] = q_{s(f)s(e)} q_{r(f)r(e)}``.  The coaction on the graph
algebra sends ``S_e`` to ``Σ_f S_f ⊗ lam[f, e]``; it is evaluated one
monomial at a time with matrix coefficients.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .algebra import AlgebraElement, apply_homomorphism, apply_state, monomial_keys, state_eval
from .correspondence import path_basis, path_ranges
from .errors import DimensionMismatchError, GraphMismatchError, PreconditionError
from .graph import Graph, GraphAutomorphism, structural_report
from .kms import KmsProfile
from .magic import MagicUnitary, _opnorm
from .presentation import wreath_layout
from .rings import MatrixRing

EQUIV_TOL = 1e-8
KAC_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CoactionMatrices:
    graph: Graph
    alpha: np.ndarray  # (|G0|, |G0|, k, k)
    lam: np.ndarray  # (|G1|, |G1|, k, k)
    origin: str = "magic"

    def __post_init__(self):
        g = self.graph
        a = np.asarray(self.alpha, dtype=np.complex128)
        lam = np.asarray(self.lam, dtype=np.complex128)
        if a.ndim == 2:
            a = a[:, :, None, None]
        if lam.ndim == 2:
            lam = lam[:, :, None, None]
        if a.shape[:2] != (g.n_vertices, g.n_vertices):
            raise DimensionMismatchError(f"alpha has shape {a.shape[:2]}, graph has {g.n_vertices} vertices")
        if lam.shape[:2] != (g.n_edges, g.n_edges):
            raise DimensionMismatchError(f"lambda has shape {lam.shape[:2]}, graph has {g.n_edges} edges")
        if a.shape[2:] != lam.shape[2:] or a.shape[2] != a.shape[3]:
            raise DimensionMismatchError(f"block shapes differ: {a.shape[2:]} vs {lam.shape[2:]}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "lam", lam)

    @property
    def block(self) -> int:
        return self.alpha.shape[2]

    def lambda_power(self, level: int) -> np.ndarray:
        """``λ_(m)`` on composable paths: ``L[γ, π] = lam[γ1, π1] ··· lam[γm, πm]``.

        Rows and columns follow :func:`graphstar.correspondence.path_basis`.
        """
        paths = path_basis(self.graph, level)
        if level == 0:
            return self.alpha.copy()
        acc = None
        for j in range(level):
            col = paths[:, j]
            block = self.lam[col[:, None], col[None, :]]
            acc = block if acc is None else acc @ block
        return acc


def build_coactions(U: MagicUnitary, g: Graph) -> CoactionMatrices:
    if U.dimension != g.n_vertices:
        raise DimensionMismatchError(
            f"magic unitary has dimension {U.dimension}, graph has {g.n_vertices} vertices", location="unitary"
        )
    q = U.entries
    s, r = g.src, g.dst
    lam = q[s[:, None], s[None, :]] @ q[r[:, None], r[None, :]]
    return CoactionMatrices(g, q.copy(), lam, origin="magic")


def classical_coactions(aut: GraphAutomorphism) -> CoactionMatrices:
    """Coaction of a single automorphism, read off its vertex and edge permutations.

    On graphs with parallel edges the product formula cannot tell parallel
    edges apart, so the edge permutation is used directly.
    """
    return CoactionMatrices(aut.graph, aut.vertex_matrix(), aut.edge_matrix(), origin="classical")


def identity_coactions(g: Graph, k: int = 1) -> CoactionMatrices:
    eye = np.eye(k)
    alpha = np.einsum("vw,ab->vwab", np.eye(g.n_vertices), eye)
    lam = np.einsum("ef,ab->efab", np.eye(g.n_edges), eye)
    return CoactionMatrices(g, alpha, lam, origin="identity")


def wreath_coactions(g: Graph, realization: dict) -> CoactionMatrices:
    """Coaction of a free-wreath realization on a bouquet union.

    ``λ(ξ^i_(k)) = Σ_{j,l} ξ^j_(l) ⊗ ν_l(u_ij) v_lk`` and
    ``α(δ_k) = Σ_l δ_l ⊗ v_lk``; generators missing from ``realization``
    (trivial families) are the unit.
    """
    n, m, _, loops = wreath_layout(g)
    k = np.atleast_2d(next(iter(realization.values()), np.eye(1))).shape[0]
    eye = np.eye(k, dtype=np.complex128)

    def get(name):
        return np.atleast_2d(np.asarray(realization.get(name, eye), dtype=np.complex128))

    alpha = np.zeros((m, m, k, k), dtype=np.complex128)
    for l, kk in itertools.product(range(m), repeat=2):
        alpha[l, kk] = get(f"v[{l + 1}][{kk + 1}]")
    lam = np.zeros((g.n_edges, g.n_edges, k, k), dtype=np.complex128)
    for l, kk in itertools.product(range(m), repeat=2):
        v = alpha[l, kk]
        for i, j in itertools.product(range(n), repeat=2):
            lam[loops[l][j], loops[kk][i]] = get(f"u({l + 1})[{i + 1}][{j + 1}]") @ v
    return CoactionMatrices(g, alpha, lam, origin="wreath")


# ---------------------------------------------------------------------------
# Correspondence equivariance
# ---------------------------------------------------------------------------


def _adj(x):
    return np.conj(np.swapaxes(x, -1, -2))


def _inner_residual(L: np.ndarray, ranges: np.ndarray, alpha: np.ndarray, nv: int) -> float:
    """``Σ_{γ: r(γ)=v} L[γ,π]* L[γ,π'] = δ_{π,π'} alpha[v, r(π)]`` over all ``v, π, π'``."""
    N = L.shape[0]
    k = alpha.shape[2]
    res = 0.0
    eye_n = np.eye(N)
    for v in range(nv):
        rows = L[ranges == v]
        # gram[(p,a),(q,c)] = Σ_{g,b} conj(rows[g,p,b,a]) rows[g,q,b,c]
        X = rows.transpose(0, 2, 1, 3).reshape(-1, N * k)
        gram = (X.conj().T @ X).reshape(N, k, N, k).transpose(0, 2, 1, 3)
        target = eye_n[:, :, None, None] * alpha[v, ranges][:, None]
        res = max(res, _opnorm(gram - target))
    return res if N else 0.0


def verify_equivariance(c: CoactionMatrices, g: Graph, m_max: int = 3, tol: float = EQUIV_TOL) -> dict:
    """Check that ``(α, λ)`` makes the graph correspondence equivariant.

    ``a``  α is a unital *-homomorphism;
    ``b``  ``λ(ξ·f) = λ(ξ)α(f)``;
    ``c``  ``<λξ, λη> = α(<ξ, η>)``;
    ``d``  ``λ(φ(f)ξ) = (φ ⊗ id)(α(f)) λ(ξ)``;
    ``e``  ``(r_* ⊗ id)α = λ r_*``;
    ``f``  ``(s_* ⊗ id)α = λ s_*``;
    ``g``  ``λ_(m)`` satisfies ``c`` on ``E^(m)`` for ``m <= m_max``.

    Every check is entrywise in ``k x k`` matrices; the residual is the
    largest operator norm of a defect.
    """
    if c.graph != g:
        raise GraphMismatchError("coaction was built over a different graph")
    A, L = c.alpha, c.lam
    k = c.block
    nv, ne = g.n_vertices, g.n_edges
    s, r = g.src, g.dst
    eye = np.eye(k)

    res = {}
    # (a)
    a_res = [_opnorm(A - _adj(A)), _opnorm(A.sum(axis=1) - eye)]
    prod = np.einsum("wvab,wubc->wvuac", A, A)
    target = np.einsum("vu,wvac->wvuac", np.eye(nv), A)
    a_res.append(_opnorm(prod - target))
    res["a_alpha_homomorphism"] = max(a_res)

    if ne:
        # (b) L[g,e] A[r(g),v] = [r(e)=v] L[g,e]
        lhs = np.einsum("geab,gvbc->gevac", L, A[r])
        rhs = np.einsum("ev,geac->gevac", (r[:, None] == np.arange(nv)[None, :]).astype(float), L)
        res["b_right_module"] = _opnorm(lhs - rhs)
        # (c)
        res["c_inner_product"] = _inner_residual(L, r, A, nv)
        # (d) A[s(g),v] L[g,e] = [s(e)=v] L[g,e]
        lhs = np.einsum("gvab,gebc->gevac", A[s], L)
        rhs = np.einsum("ev,geac->gevac", (s[:, None] == np.arange(nv)[None, :]).astype(float), L)
        res["d_left_action"] = _opnorm(lhs - rhs)
        # (e), (f) A[r(g), v] = Σ_{r(e)=v} L[g, e], likewise for s
        for tag, ends in (("e_range_intertwining", r), ("f_source_intertwining", s)):
            summed = np.zeros((ne, nv, k, k), dtype=np.complex128)
            np.add.at(summed, (slice(None), ends), L)
            res[tag] = _opnorm(A[ends] - summed)
    else:
        for tag in ("b_right_module", "c_inner_product", "d_left_action", "e_range_intertwining", "f_source_intertwining"):
            res[tag] = 0.0

    levels = {}
    for m in range(1, m_max + 1):
        Lm = c.lambda_power(m)
        levels[m] = _inner_residual(Lm, path_ranges(g, m), A, nv)
    res["g_tensor_powers"] = max(levels.values(), default=0.0)

    checks = {name: {"residual": val, "pass": val <= tol} for name, val in res.items()}
    return {
        "checks": checks,
        "tensor_levels": {str(m): v for m, v in levels.items()},
        "max_residual": max(res.values()),
        "pass": all(v["pass"] for v in checks.values()),
        "bichon_source_condition": checks["f_source_intertwining"]["pass"],
        "tolerance": tol,
        "flags": {"has_loops": structural_report(g).has_loops},
    }


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------


def omega_apply(c: CoactionMatrices, x: AlgebraElement) -> AlgebraElement:
    """``ω(x)`` with ``k x k`` matrix coefficients."""
    g = c.graph
    ring = MatrixRing(c.block)

    def edge_image(e):
        out = AlgebraElement(g, ring)
        out.terms = {((f,), (), int(g.dst[f])): c.lam[f, e] for f in range(g.n_edges) if np.any(c.lam[f, e])}
        return out

    def vertex_image(v):
        out = AlgebraElement(g, ring)
        out.terms = {((), (), w): c.alpha[w, v] for w in range(g.n_vertices) if np.any(c.alpha[w, v])}
        return out

    return apply_homomorphism(x, edge_image, vertex_image, ring.scalar, ring)


def _phi_residual_algebra(c: CoactionMatrices, profile: KmsProfile, g: Graph, depth: int) -> tuple[float, int]:
    eye = np.eye(c.block)
    res, count = 0.0, 0
    for key in monomial_keys(g, depth):
        x = AlgebraElement(g, terms={key: 1.0})
        lhs = apply_state(omega_apply(c, x), profile)
        res = max(res, _opnorm(lhs - state_eval(x, profile) * eye))
        count += 1
    return res, count


def _phi_residual_closed(c: CoactionMatrices, profile: KmsProfile, g: Graph, depth: int) -> tuple[float, int]:
    """Same quantity from ``ω(S_μ S_ν*) = Σ_{γ,δ} S_γ S_δ* ⊗ L(γ,μ) L(δ,ν)*``.

    Only ``γ = δ`` survives the state, so for ``|μ| = |ν| = m`` the value is
    ``Σ_γ ρ^{-m} μ_{r(γ)} L_m[γ,μ] L_m[γ,ν]*`` and it vanishes otherwise.
    """
    mu = profile.mu_array
    rho = profile.rho
    eye = np.eye(c.block)
    res = _opnorm(np.einsum("w,wvab->vab", mu, c.alpha) - mu[:, None, None] * eye)
    count = len(monomial_keys(g, depth))
    for m in range(1, depth // 2 + 1):
        Lm = c.lambda_power(m)
        ranges = path_ranges(g, m)
        w = rho ** (-m) * mu[ranges]
        got = np.einsum("g,gpab,gqcb->pqac", w, Lm, Lm.conj())
        same_end = ranges[:, None] == ranges[None, :]
        want = (np.eye(len(ranges)) * w[None, :])[:, :, None, None] * eye
        res = max(res, _opnorm((got - want)[same_end]))
    return res, count


def state_equivariance_check(c: CoactionMatrices, profile: KmsProfile, g: Graph, depth: int = 3,
                             tol: float = EQUIV_TOL, method: str = "algebra") -> dict:
    """Compare invariance of ``τ`` under ``α`` with invariance of ``φ`` under ``ω``.

    ``tau``: ``Σ_w μ_w alpha[w, v] = μ_v I`` for every ``v``.
    ``phi``: ``(φ ⊗ id)ω(x) = φ(x) I`` for every monomial of length ``<= depth``.

    ``method="algebra"`` evaluates ``ω`` symbolically on each monomial with
    matrix coefficients; ``method="closed"`` uses the path-sum formula
    and is much faster on graphs with many monomials.
    """
    profile.require()
    if c.graph != g or profile.graph != g:
        raise GraphMismatchError("coaction, profile and graph must agree")
    mu = profile.mu_array
    eye = np.eye(c.block)
    tau_res = _opnorm(np.einsum("w,wvab->vab", mu, c.alpha) - mu[:, None, None] * eye)
    if method == "algebra":
        phi_res, count = _phi_residual_algebra(c, profile, g, depth)
    elif method == "closed":
        phi_res, count = _phi_residual_closed(c, profile, g, depth)
    else:
        raise ValueError(f"unknown method {method!r}")

    tau_ok, phi_ok = tau_res <= tol, phi_res <= tol
    return {
        "tau_equivariant": tau_ok,
        "phi_equivariant": phi_ok,
        "tau_residual": tau_res,
        "phi_residual": phi_res,
        "agree": tau_ok == phi_ok,
        "monomials": count,
        "depth": depth,
        "method": method,
        "tolerance": tol,
    }


# ---------------------------------------------------------------------------
# Kac witness and coincidence verdict
# ---------------------------------------------------------------------------


def kac_witness(u, tol: float = KAC_TOL) -> dict:
    """Unitarity of ``u`` and of its transpose.

    ``u`` is either a square complex matrix or an ``(m, m, k, k)`` array of
    blocks (operator entries).  For blocks the transpose swaps block
    positions and leaves each block alone, so a genuine failure of
    transpose-unitarity needs ``k > 1``; for scalar matrices ``uᵗ`` is
    unitary exactly when ``u`` is.
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim == 2:
        if u.shape[0] != u.shape[1]:
            raise DimensionMismatchError(f"matrix must be square, got {u.shape}")
        blocks = u[:, :, None, None]
    elif u.ndim == 4 and u.shape[0] == u.shape[1] and u.shape[2] == u.shape[3]:
        blocks = u
    else:
        raise DimensionMismatchError(f"expected a square matrix or (m, m, k, k) blocks, got {u.shape}")
    m, k = blocks.shape[0], blocks.shape[2]

    def op(b):
        return b.transpose(0, 2, 1, 3).reshape(m * k, m * k)

    U = op(blocks)
    Ut = op(blocks.transpose(1, 0, 2, 3))
    eye = np.eye(m * k)
    norms = {
        "u_star_u": float(np.linalg.norm(U.conj().T @ U - eye, 2)),
        "u_u_star": float(np.linalg.norm(U @ U.conj().T - eye, 2)),
        "ut_star_ut": float(np.linalg.norm(Ut.conj().T @ Ut - eye, 2)),
        "ut_ut_star": float(np.linalg.norm(Ut @ Ut.conj().T - eye, 2)),
    }
    return {
        "unitary": norms["u_star_u"] <= tol and norms["u_u_star"] <= tol,
        "transpose_unitary": norms["ut_star_ut"] <= tol and norms["ut_ut_star"] <= tol,
        "norms": norms,
        "tolerance": tol,
    }


def coincidence_verdict(g: Graph) -> dict:
    """Whether the Banica and Bichon quantum automorphism groups coincide by injectivity.

    Requires a graph without multiple edges and without sources; the
    verdict is ``True`` when ``r`` or ``s`` is injective.  Disjoint unions
    of oriented ``m``-gons carry their known identification.
    """
    rep = structural_report(g)
    if rep.has_multiple_edges:
        raise PreconditionError("hypothesis: simple graph", location="edges")
    if not rep.no_sources:
        raise PreconditionError("hypothesis: no sources", location="vertices")
    witness = [name for name, ok in (("r", rep.r_injective), ("s", rep.s_injective)) if ok]
    ident = None
    if rep.shape.kind == "m_gon_union":
        ident = f"Z/{rep.shape['m']}Z ≀_* S_{rep.shape['count']}⁺"
    return {
        "coincide_by_injectivity": bool(witness),
        "witness": witness[0] if len(witness) == 1 else (witness or None),
        "shape_identification": ident,
        "flags": {"has_loops": rep.has_loops},
    }
