"""Coefficient rings for graph-algebra elements.

A ring object supplies ``zero``/``one``, multiplication (which need not be
commutative), the involution, and a size used for zero tests.  Addition
and scalar multiplication are the coefficients' own ``+`` and ``*``.

Three rings are provided: complex scalars, Laurent polynomials in
commuting unitaries ``z_1..z_n`` (the functions on the torus ``T^n``), and
``k x k`` complex matrices.
"""

from __future__ import annotations

import cmath
from typing import Iterable, Mapping

import numpy as np


class Laurent:
    """Laurent polynomial in ``nvars`` commuting unitary variables.

    Stored as ``{exponent tuple: complex coefficient}``.  The involution
    conjugates coefficients and negates exponents, since ``z_k* = z_k^{-1}``.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], complex] | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exp, c in terms.items():
                if len(exp) != nvars:
                    raise ValueError(f"exponent {exp} does not have {nvars} entries")
                if c != 0:
                    clean[tuple(exp)] = complex(c)
        self.terms = clean

    @classmethod
    def constant(cls, nvars: int, c: complex = 1.0) -> "Laurent":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, k: int, power: int = 1) -> "Laurent":
        exp = [0] * nvars
        exp[k] = power
        return cls(nvars, {tuple(exp): 1.0})

    def _coerce(self, other) -> "Laurent":
        if isinstance(other, Laurent):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        return Laurent.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for exp, c in other.terms.items():
            out[exp] = out.get(exp, 0) + c
        return Laurent(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Laurent(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Laurent):
            return Laurent(self.nvars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        out: dict[tuple[int, ...], complex] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Laurent(self.nvars, out)

    def __rmul__(self, other):
        return self * other

    def star(self) -> "Laurent":
        return Laurent(self.nvars, {tuple(-a for a in e): c.conjugate() for e, c in self.terms.items()})

    def norm(self) -> float:
        """Largest coefficient modulus (zero test, not the sup norm)."""
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def embed(self, total: int, offset: int = 0) -> "Laurent":
        """The same polynomial in ``total`` variables, shifted by ``offset``."""
        out = {}
        for e, c in self.terms.items():
            full = [0] * total
            full[offset:offset + self.nvars] = e
            out[tuple(full)] = c
        return Laurent(total, out)

    def evaluate(self, point: Iterable[complex]) -> complex:
        point = list(point)
        return sum(c * np.prod([z ** a for z, a in zip(point, e)]) for e, c in self.terms.items())

    def allclose(self, other, tol: float = 1e-9) -> bool:
        return (self - other).norm() <= tol

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            mono = "*".join(f"z{k + 1}^{a}" if a != 1 else f"z{k + 1}" for k, a in enumerate(e) if a)
            parts.append(f"({self.terms[e]:g})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


class ScalarRing:
    name = "scalar"
    zero = 0j
    one = 1 + 0j

    def mul(self, a, b):
        return a * b

    def star(self, a):
        return a.conjugate()

    def norm(self, a) -> float:
        return abs(a)

    def scalar(self, c):
        return complex(c)

    def __eq__(self, other):
        return isinstance(other, ScalarRing)

    def __hash__(self):
        return hash(self.name)


class LaurentRing:
    name = "laurent"

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.zero = Laurent(nvars)
        self.one = Laurent.constant(nvars)

    def mul(self, a, b):
        return a * b

    def star(self, a):
        return a.star()

    def norm(self, a) -> float:
        return a.norm()

    def scalar(self, c):
        return Laurent.constant(self.nvars, c)

    def var(self, k: int, power: int = 1) -> Laurent:
        return Laurent.var(self.nvars, k, power)

    def __eq__(self, other):
        return isinstance(other, LaurentRing) and other.nvars == self.nvars

    def __hash__(self):
        return hash((self.name, self.nvars))


class MatrixRing:
    name = "matrix"

    def __init__(self, k: int):
        self.k = k
        self.zero = np.zeros((k, k), dtype=np.complex128)
        self.one = np.eye(k, dtype=np.complex128)

    def mul(self, a, b):
        return a @ b

    def star(self, a):
        return a.conj().T

    def norm(self, a) -> float:
        return float(np.abs(a).max(initial=0.0))

    def scalar(self, c):
        return complex(c) * self.one

    def __eq__(self, other):
        return isinstance(other, MatrixRing) and other.k == self.k

    def __hash__(self):
        return hash((self.name, self.k))


SCALARS = ScalarRing()


def unit(z: complex, tol: float = 1e-12) -> bool:
    return abs(abs(z) - 1.0) <= tol


def phase(theta: float) -> complex:
    return cmath.exp(1j * theta)
