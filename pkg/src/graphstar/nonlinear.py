"""A gauge-equivariant torus action on O_n that is not linear on generators.

``ρ(S_i) = (S_i ⊗ 1) u`` with ``u = Σ_k S_k S_k* ⊗ z_k`` in
``O_n ⊗ C(T^n)``.  Everything here is exact: the ``C(T^n)`` leg is a
Laurent polynomial ring, and the double leg used for coassociativity is the
Laurent ring in ``2n`` variables (first leg ``z``, second leg ``w``) with
``Δ(z_k) = z_k ⊗ z_k`` read as ``z_k w_k``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .algebra import (
    AlgebraElement,
    apply_homomorphism,
    difference_norm,
    expand,
    gauge_apply,
    monomials,
    multiply,
)
from .graph import Graph, bouquet
from .rings import Laurent, LaurentRing

MAX_DEPTH = 4
SYMBOLIC_TOL = 1e-12
GAUGE_SAMPLES = (0.37, 1.0, math.pi / 3, 2.5)


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"pass": self.passed, "residual": self.residual, **self.detail}


class NonlinearAction:
    """The action ``ρ`` on ``O_n`` for a fixed ``n``."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self.graph: Graph = bouquet(n)
        self.ring = LaurentRing(n)
        self.ring2 = LaurentRing(2 * n)
        g = self.graph
        self.u = AlgebraElement(g, self.ring)
        for k in range(n):
            self.u = self.u + AlgebraElement.monomial(g, (k,), (k,), self.ring.var(k), ring=self.ring)
        self._gen = {i: multiply(AlgebraElement.S(g, i, self.ring), self.u) for i in range(n)}

    # -- the action and its legs ---------------------------------------------

    def lift(self, x: AlgebraElement, ring=None) -> AlgebraElement:
        """``x ⊗ 1`` for a scalar element."""
        ring = ring or self.ring
        out = AlgebraElement(self.graph, ring)
        out.terms = {k: ring.scalar(c) for k, c in x.terms.items()}
        return out

    def one(self, ring=None) -> AlgebraElement:
        return AlgebraElement.one(self.graph, ring or self.ring)

    def generator_image(self, i: int) -> AlgebraElement:
        return self._gen[i]

    def apply(self, x: AlgebraElement) -> AlgebraElement:
        """``ρ(x)`` for a scalar element ``x``."""
        return apply_homomorphism(
            x,
            self.generator_image,
            lambda v: AlgebraElement.p(self.graph, v, self.ring),
            self.ring.scalar,
            self.ring,
        )

    def apply_first_leg(self, y: AlgebraElement) -> AlgebraElement:
        """``(ρ ⊗ id)(y)`` for ``y`` in ``O_n ⊗ C(T^n)``."""
        n2 = 2 * self.n
        emb = {}

        def edge_image(i):
            if i not in emb:
                img = self._gen[i]
                e = AlgebraElement(self.graph, self.ring2)
                e.terms = {k: c.embed(n2, 0) for k, c in img.terms.items()}
                emb[i] = e
            return emb[i]

        return apply_homomorphism(
            y,
            edge_image,
            lambda v: AlgebraElement.p(self.graph, v, self.ring2),
            lambda c: c.embed(n2, self.n),
            self.ring2,
        )

    def coproduct_second_leg(self, y: AlgebraElement) -> AlgebraElement:
        """``(id ⊗ Δ)(y)``: ``z^a ↦ z^a w^a``."""
        out = AlgebraElement(self.graph, self.ring2)
        out.terms = {
            k: Laurent(2 * self.n, {e + e: c for e, c in coeff.terms.items()})
            for k, coeff in y.terms.items()
        }
        out._prune()
        return out

    # -- checks --------------------------------------------------------------

    def check_unitary(self) -> CheckResult:
        u, us = self.u, self.u.adjoint()
        res = max(difference_norm(multiply(u, us), self.one()), difference_norm(multiply(us, u), self.one()))
        return CheckResult("unitary", res <= SYMBOLIC_TOL, res)

    def check_cuntz_relations(self) -> CheckResult:
        res = 0.0
        zero = AlgebraElement(self.graph, self.ring)
        for i in range(self.n):
            for j in range(self.n):
                lhs = multiply(self._gen[i].adjoint(), self._gen[j])
                res = max(res, difference_norm(lhs, self.one() if i == j else zero))
        total = AlgebraElement(self.graph, self.ring)
        for k in range(self.n):
            total = total + multiply(self._gen[k], self._gen[k].adjoint())
        res = max(res, difference_norm(total, self.one()))
        return CheckResult("cuntz_relations", res <= SYMBOLIC_TOL, res)

    def check_matrix_units(self) -> CheckResult:
        """``ρ(S_i S_j*) = S_i S_j* ⊗ 1`` and ``Σ_k ρ(S_k S_k*)(1 ⊗ z_k*) = u*``."""
        g = self.graph
        res = 0.0
        for i in range(self.n):
            for j in range(self.n):
                x = AlgebraElement.monomial(g, (i,), (j,))
                res = max(res, difference_norm(self.apply(x), self.lift(x)))
        acc = AlgebraElement(g, self.ring)
        for k in range(self.n):
            x = AlgebraElement.monomial(g, (k,), (k,))
            acc = acc + self.apply(x).scale(self.ring.var(k, -1), side="right")
        res_u = difference_norm(acc, self.u.adjoint())
        res = max(res, res_u)
        return CheckResult("matrix_units_fixed", res <= SYMBOLIC_TOL, res)

    def check_gauge(self, depth: int) -> CheckResult:
        res = 0.0
        count = 0
        for x in monomials(self.graph, depth):
            rx = self.apply(x)
            for theta in GAUGE_SAMPLES:
                z = cmath.exp(1j * theta)
                res = max(res, difference_norm(gauge_apply(z, rx), self.apply(gauge_apply(z, x))))
            count += 1
        return CheckResult("gauge_equivariant", res <= SYMBOLIC_TOL, res, {"monomials": count})

    def check_coassociative(self, depth: int) -> CheckResult:
        res = 0.0
        count = 0
        for x in monomials(self.graph, depth):
            rx = self.apply(x)
            res = max(res, difference_norm(self.apply_first_leg(rx), self.coproduct_second_leg(rx)))
            count += 1
        return CheckResult("coassociative", res <= SYMBOLIC_TOL, res, {"monomials": count})

    def check_nonlinear(self) -> CheckResult:
        """Witness that no ``q_ji`` give ``ρ(S_i) = Σ_j S_j ⊗ q_ji``.

        At depth one a linear image has the form ``Σ_{j,k} S_{jk} S_k* ⊗
        q_ji`` whose coefficient does not depend on ``k``.  We look for a
        key outside that pattern or two values of ``k`` with different
        coefficients.
        """
        g = self.graph
        witness = None
        for i in range(self.n):
            img = expand(self._gen[i], 1)
            by_j: dict[int, list] = {}
            for (mu, nu, _), c in img:
                if not (len(mu) == 2 and len(nu) == 1 and mu[1] == nu[0]):
                    witness = {"generator": g.edges[i].id, "monomial": _word(g, mu, nu), "reason": "off-pattern term"}
                    break
                by_j.setdefault(mu[0], []).append((mu, nu, c))
            if witness:
                break
            for j, entries in by_j.items():
                first = entries[0][2]
                for mu, nu, c in entries[1:]:
                    if (c - first).norm() > SYMBOLIC_TOL:
                        witness = {
                            "generator": g.edges[i].id,
                            "monomial": _word(g, mu, nu),
                            "length": len(mu) + len(nu),
                            "coefficients": [repr(first), repr(c)],
                        }
                        break
                if witness:
                    break
                if len(entries) != self.n:
                    witness = {"generator": g.edges[i].id, "reason": "missing k for j", "j": g.edges[j].id}
                    break
            if witness:
                break
        # n = 1: u = S_1 S_1* ⊗ z_1 and ρ(S_1) = S_1 ⊗ z_1 is linear
        return CheckResult("non_linear", witness is not None, 0.0, {"witness": witness})

    def report(self, depth: int) -> dict:
        if depth > MAX_DEPTH or depth < 0:
            raise ValueError(f"depth must be between 0 and {MAX_DEPTH}")
        checks = [
            self.check_unitary(),
            self.check_cuntz_relations(),
            self.check_matrix_units(),
            self.check_gauge(depth),
            self.check_coassociative(depth),
            self.check_nonlinear(),
        ]
        return {
            "n": self.n,
            "depth": depth,
            "tolerance": SYMBOLIC_TOL,
            "checks": {c.name: c.to_dict() for c in checks},
            "pass": all(c.passed for c in checks),
        }


def _word(g: Graph, mu, nu) -> str:
    return "".join(f"S[{g.edges[i].id}]" for i in mu) + "".join(f"S*[{g.edges[i].id}]" for i in reversed(nu))


def nonlinear_coaction_demo(n: int, depth: int) -> dict:
    """Run the six checks for ``ρ`` on ``O_n`` over monomials of length <= depth."""
    return NonlinearAction(n).report(depth)
