"""Magic unitaries realized by ``k x k`` complex matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError
from .graph import GraphAutomorphism


@dataclass(frozen=True, eq=False)
class MagicUnitary:
    """An ``m x m`` array of ``k x k`` blocks ``q[v][w]``.

    Only the shape is validated on construction; whether the blocks are
    really projections summing to the identity is measured by
    :meth:`magic_residual` or by evaluating a presentation.
    """

    entries: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.entries, dtype=np.complex128)
        if q.ndim == 2:
            q = q[:, :, None, None]
        if q.ndim != 4 or q.shape[0] != q.shape[1] or q.shape[2] != q.shape[3]:
            raise DimensionMismatchError(f"magic unitary must have shape (m, m, k, k), got {q.shape}")
        q = q.copy()
        q.flags.writeable = False
        object.__setattr__(self, "entries", q)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    @property
    def block(self) -> int:
        return self.entries.shape[2]

    def __getitem__(self, vw) -> np.ndarray:
        return self.entries[vw]

    @classmethod
    def identity(cls, m: int, k: int = 1) -> "MagicUnitary":
        q = np.zeros((m, m, k, k), dtype=np.complex128)
        for v in range(m):
            q[v, v] = np.eye(k)
        return cls(q)

    @classmethod
    def from_permutation(cls, perm: Sequence[int]) -> "MagicUnitary":
        """Rank-one magic unitary with ``q[σ(v)][v] = 1``."""
        m = len(perm)
        q = np.zeros((m, m), dtype=np.complex128)
        q[list(perm), np.arange(m)] = 1.0
        return cls(q)

    @classmethod
    def from_automorphism(cls, aut: GraphAutomorphism) -> "MagicUnitary":
        return cls.from_permutation(aut.vertex_perm)

    def transpose(self) -> "MagicUnitary":
        """``q[v][w] -> q[w][v]``: the antipode on a matrix realization."""
        return MagicUnitary(self.entries.transpose(1, 0, 2, 3))

    def as_operator(self) -> np.ndarray:
        """The ``mk x mk`` block matrix."""
        m, k = self.dimension, self.block
        return self.entries.transpose(0, 2, 1, 3).reshape(m * k, m * k)

    def magic_residual(self) -> float:
        """Largest operator-norm defect of the ``S_m^+`` relations."""
        q = self.entries
        eye = np.eye(self.block)
        res = [
            _opnorm(q - q.conj().transpose(0, 1, 3, 2)),
            _opnorm(q @ q - q),
            _opnorm(q.sum(axis=1) - eye),
            _opnorm(q.sum(axis=0) - eye),
        ]
        return max(res)

    def entries_commute(self, tol: float = 1e-12) -> bool:
        q = self.entries.reshape(-1, self.block, self.block)
        comm = q[:, None] @ q[None, :] - q[None, :] @ q[:, None]
        return _opnorm(comm) <= tol

    def to_json(self) -> list:
        return [[[[[float(z.real), float(z.imag)] for z in row] for row in blk] for blk in line] for line in self.entries]


def _opnorm(a) -> float:
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    if a.shape[-2:] == (1, 1):
        return float(np.abs(a).max())
    return float(np.linalg.norm(a.reshape(-1, a.shape[-2], a.shape[-1]), ord=2, axis=(1, 2)).max())


def rank_one_projection(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c * c, c * s], [c * s, s * s]], dtype=np.complex128)


def two_projection_unitary(theta: float = np.pi / 5) -> MagicUnitary:
    """4x4 magic unitary with 2x2 blocks built from two projections.

    ``p = diag(1, 0)`` and ``q`` the projection onto ``(cos θ, sin θ)``;
    the blocks are ``[[p, 1-p, 0, 0], [1-p, p, 0, 0], [0, 0, q, 1-q],
    [0, 0, 1-q, q]]``.
    """
    p = np.diag([1.0, 0.0]).astype(np.complex128)
    q = rank_one_projection(theta)
    one = np.eye(2, dtype=np.complex128)
    zero = np.zeros((2, 2), dtype=np.complex128)
    rows = [
        [p, one - p, zero, zero],
        [one - p, p, zero, zero],
        [zero, zero, q, one - q],
        [zero, zero, one - q, q],
    ]
    return MagicUnitary(np.array(rows))


def parse_unitary(doc) -> MagicUnitary:
    """Read nested ``[re, im]`` arrays of shape ``(m, m, 2)`` or ``(m, m, k, k, 2)``."""
    try:
        arr = np.asarray(doc, dtype=np.float64)
    except (TypeError, ValueError):
        raise DimensionMismatchError("unitary entries must be nested arrays of [re, im] pairs", location="unitary") from None
    if arr.ndim not in (3, 5) or arr.shape[-1] != 2:
        raise DimensionMismatchError(
            f"unitary must have shape (m, m, 2) or (m, m, k, k, 2), got {arr.shape}", location="unitary"
        )
    return MagicUnitary(arr[..., 0] + 1j * arr[..., 1])
