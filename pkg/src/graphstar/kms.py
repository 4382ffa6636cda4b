"""Perron data of the adjacency matrix and the KMS state at β = ln ρ(D).

With the scalar module dynamics ``U_t = e^{it}`` the generator is the
identity, so ``e^{-βD}`` acts on ``E`` as multiplication by ``1/ρ``.  The
KMS state is then pinned down by its restriction ``τ`` to ``C(G0)``, which
is the Perron vector ``μ`` of ``D`` (right eigenvector, ``D[v, w]``
counting edges ``v -> w``, normalized to sum one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from . import _kernels
from ._config import default_tol
from .correspondence import EdgeFunction, VertexFunction, tensor, tensor_inner_product
from .errors import DimensionMismatchError, PreconditionError
from .graph import Graph, adjacency

POWER_TOL = 1e-12
# converging cases on small graphs need a few hundred steps; the rest
# (periodic or defective at ρ) go to the exact eigenspace solve
POWER_MAXITER = 2000
EIGEN_RESIDUAL_TOL = 1e-9
NONNEG_SLACK = 1e-9


@dataclass(frozen=True)
class PerronResult:
    rho: float
    vec: Optional[np.ndarray]
    reason: Optional[str] = None
    method: Optional[str] = None


def perron(D) -> PerronResult:
    """Spectral radius of a nonnegative matrix and a nonnegative eigenvector.

    Strategy: power iteration on ``D + I`` from the uniform vector; if it
    does not converge to an eigenvector (reducible matrices with Jordan
    blocks at ρ), take a basis of the ρ-eigenspace from a dense
    decomposition and solve a small LP for a nonnegative member.  The
    vector is clamped to ``>= 0`` and normalized to sum one.  Out-regular
    matrices short-circuit to the exact uniform vector.

    ``vec`` is None when no such eigenvector exists; ``reason`` says why.
    """
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise DimensionMismatchError(f"adjacency matrix must be square, got shape {D.shape}")
    if (D < 0).any():
        raise PreconditionError("adjacency matrix has negative entries")
    n = D.shape[0]
    if n == 0:
        return PerronResult(0.0, None, "empty graph")
    rho = float(np.abs(np.linalg.eigvals(D)).max())
    if rho <= EIGEN_RESIDUAL_TOL:
        return PerronResult(0.0, None, "beta undefined (ln 0)")

    rows = D.sum(axis=1)
    if np.all(rows == rows[0]):
        return PerronResult(float(rows[0]), np.full(n, 1.0 / n), method="regular")

    x, est, converged, _ = _kernels.power_iterate(D, np.full(n, 1.0 / n), POWER_TOL, POWER_MAXITER)
    if converged and abs(est - rho) <= 1e-8 * max(1.0, rho):
        vec = _polish(D, rho, np.clip(x, 0.0, None))
        if np.abs(D @ vec - rho * vec).max() <= EIGEN_RESIDUAL_TOL:
            return PerronResult(rho, vec, method="power")

    vec = _nonnegative_eigenvector(D, rho)
    if vec is None:
        return PerronResult(rho, None, "no nonnegative eigenvector for the spectral radius")
    return PerronResult(rho, _polish(D, rho, vec), method="eigenspace")


def _polish(D, rho, vec, rel=1e-7):
    """Remove round-off left by iterative or LP solutions.

    Near a Jordan block at ρ the power iterate and the LP solution carry
    entries of order 1e-9 where the exact vector is zero.  Entries below
    ``rel`` times the largest are dropped, and the rest is projected onto
    the null space of ``D - ρI`` restricted to the surviving support (rows
    outside the support must vanish too).  The polished vector is kept
    only if it is nonnegative and has a smaller eigen-residual.
    """
    vec = vec / vec.sum()
    n = D.shape[0]
    support = vec > rel * vec.max()
    M = (D - rho * np.eye(n))[:, support]
    _, s, vh = np.linalg.svd(M)
    s = np.concatenate([s, np.zeros(max(0, vh.shape[0] - s.size))])
    null = vh[s <= 1e-9 * max(1.0, rho)].T
    if null.shape[1] == 0:
        return vec
    cand = np.zeros(n)
    cand[support] = null @ (null.T @ vec[support])
    if cand.min() < -1e-12 or cand.sum() <= 0:
        return vec
    cand = np.clip(cand, 0.0, None)
    cand /= cand.sum()
    if np.abs(D @ cand - rho * cand).max() <= np.abs(D @ vec - rho * vec).max():
        return cand
    return vec


def _nonnegative_eigenvector(D, rho):
    n = D.shape[0]
    # eigenspace = numerical null space of D - ρI
    _, s, vh = np.linalg.svd(D - rho * np.eye(n))
    tol = max(n * np.finfo(float).eps * max(s.max(initial=0.0), rho) * 1e3, 1e-10)
    basis = vh[s <= tol].T
    if basis.shape[1] == 0:
        basis = vh[-1:].T
    k = basis.shape[1]
    # find c with basis @ c >= 0 and sum(basis @ c) = 1; the LP asks for
    # exact nonnegativity so its solution is not pushed onto the -slack
    # boundary, and the slack is only used to accept solver round-off
    res = linprog(
        c=np.zeros(k),
        A_ub=-basis,
        b_ub=np.zeros(n),
        A_eq=basis.sum(axis=0, keepdims=True),
        b_eq=[1.0],
        bounds=[(None, None)] * k,
        method="highs",
    )
    if not res.success:
        return None
    vec = basis @ res.x
    if vec.min() < -NONNEG_SLACK:
        return None
    vec = np.clip(vec, 0.0, None)
    vec /= vec.sum()
    if np.abs(D @ vec - rho * vec).max() > 1e-8 * max(1.0, rho):
        return None
    return vec


@dataclass(frozen=True)
class KmsProfile:
    """Perron data of a graph and the trace it induces on ``C(G0)``.

    ``beta`` is kept even when ρ = 1 (β = 0, a tracial state); ``exists``
    is False when ρ = 0 or no nonnegative Perron vector was found.
    """

    graph: Graph
    rho: float
    beta: float
    mu: Optional[VertexFunction]
    distinguished: bool
    exists: bool
    reason: Optional[str] = None

    @property
    def mu_array(self) -> np.ndarray:
        self.require()
        return self.mu.values.real

    def require(self):
        if not self.exists:
            raise PreconditionError(f"KMS state does not exist: {self.reason}", location="kms_profile")

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "beta": self.beta if self.exists or self.rho > 0 else None,
            "mu": {v: float(x) for v, x in zip(self.graph.vertices, self.mu_array)} if self.exists else None,
            "distinguished": self.distinguished,
            "exists": self.exists,
            "beta_positive": self.exists and self.beta > 0,
            "reason": self.reason,
        }


def kms_profile(g: Graph, tol: Optional[float] = None) -> KmsProfile:
    tol = default_tol() if tol is None else tol
    res = perron(adjacency(g))
    if res.vec is None:
        beta = math.log(res.rho) if res.rho > 0 else float("nan")
        return KmsProfile(g, res.rho, beta, None, False, False, res.reason)
    n = g.n_vertices
    distinguished = bool(np.abs(res.vec - 1.0 / n).max() <= tol)
    mu = res.vec
    if distinguished:
        mu = np.full(n, 1.0 / n)
    return KmsProfile(
        graph=g,
        rho=res.rho,
        beta=math.log(res.rho),
        mu=VertexFunction(g, mu),
        distinguished=distinguished,
        exists=True,
    )


def profile_from_vector(g: Graph, mu, rho: Optional[float] = None) -> KmsProfile:
    """A profile with a caller-supplied vertex weight.

    Intended for checking the KMS oracle against wrong conventions; no
    eigenvector property is enforced.
    """
    mu = np.asarray(mu, dtype=np.float64)
    mu = mu / mu.sum()
    if rho is None:
        rho = float(np.abs(np.linalg.eigvals(adjacency(g).astype(float))).max())
    n = g.n_vertices
    return KmsProfile(g, rho, math.log(rho), VertexFunction(g, mu), bool(np.allclose(mu, 1.0 / n)), True)


def trace_eval(profile: KmsProfile, f: VertexFunction) -> complex:
    """``τ(f) = Σ_v f(v) μ_v``."""
    profile.require()
    return complex(np.dot(f.values, profile.mu_array))


def kms_eval_tensor(profile: KmsProfile, xis: Sequence[EdgeFunction], etas: Sequence[EdgeFunction]) -> complex:
    """``φ(k(ξ1)...k(ξm) k(ηn)*...k(η1)*)``.

    Zero unless ``m == n``; otherwise ``ρ^{-m} τ(<η1⊗...⊗ηm, ξ1⊗...⊗ξm>)``.
    """
    profile.require()
    if len(xis) != len(etas):
        return 0j
    g = profile.graph
    m = len(xis)
    ip = tensor_inner_product(tensor(list(etas), g), tensor(list(xis), g))
    return trace_eval(profile, ip) * profile.rho ** (-m)
