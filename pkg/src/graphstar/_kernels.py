"""Numeric inner loops.

Each kernel exists twice: a numba ``@njit`` version and a pure-numpy
fallback.  The public names at the bottom pick one of the two according to
``GRAPHSTAR_DISABLE_NUMBA`` (read once, at import).  Both variants stay
importable under ``*_nb`` / ``*_np`` so the benchmark and the tests can run
them side by side.
"""

import itertools

import numpy as np

from ._config import numba_enabled

try:
    import numba

    _njit = numba.njit(cache=True, nogil=True)
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

    def _njit(f):
        return f


# ---------------------------------------------------------------------------
# Perron power iteration on D + I
# ---------------------------------------------------------------------------
# The identity shift makes the iteration aperiodic (cycle graphs would
# otherwise oscillate) without moving the eigenvectors.


def _power_iterate_py(D, x0, tol, maxiter):
    n = D.shape[0]
    x = x0.copy()
    s = 0.0
    for i in range(n):
        s += x[i]
    for i in range(n):
        x[i] /= s
    y = np.empty(n)
    for it in range(maxiter):
        total = 0.0
        for i in range(n):
            acc = x[i]
            for j in range(n):
                acc += D[i, j] * x[j]
            y[i] = acc
            total += acc
        if total <= 0.0:
            return x, 0.0, False, it
        delta = 0.0
        for i in range(n):
            y[i] /= total
            d = abs(y[i] - x[i])
            if d > delta:
                delta = d
        for i in range(n):
            x[i] = y[i]
        if delta <= tol:
            return x, total - 1.0, True, it + 1
    total = 0.0
    for i in range(n):
        acc = x[i]
        for j in range(n):
            acc += D[i, j] * x[j]
        total += acc
    return x, total - 1.0, False, maxiter


power_iterate_nb = _njit(_power_iterate_py)


def power_iterate_np(D, x0, tol, maxiter):
    x = x0 / x0.sum()
    shifted = D + np.eye(D.shape[0])
    for it in range(maxiter):
        y = shifted @ x
        total = y.sum()
        if total <= 0.0:
            return x, 0.0, False, it
        y /= total
        delta = np.abs(y - x).max()
        x = y
        if delta <= tol:
            return x, total - 1.0, True, it + 1
    return x, (shifted @ x).sum() - 1.0, False, maxiter


# ---------------------------------------------------------------------------
# Vertex permutations preserving an adjacency matrix
# ---------------------------------------------------------------------------


def _vertex_automorphisms_py(D):
    n = D.shape[0]
    cap = 16
    out = np.empty((cap, n), dtype=np.int64)
    count = 0
    if n == 0:
        return out[:1]
    perm = np.full(n, -1, dtype=np.int64)
    used = np.zeros(n, dtype=np.bool_)
    # candidate[i] is the next image to try for vertex i
    candidate = np.zeros(n, dtype=np.int64)
    depth = 0
    while depth >= 0:
        if depth == n:
            if count == cap:
                grown = np.empty((cap * 2, n), dtype=np.int64)
                grown[:cap] = out
                out = grown
                cap *= 2
            out[count] = perm
            count += 1
            depth -= 1
            used[perm[depth]] = False
            perm[depth] = -1
            continue
        placed = False
        w = candidate[depth]
        while w < n:
            if not used[w] and D[depth, depth] == D[w, w]:
                ok = True
                for j in range(depth):
                    pj = perm[j]
                    if D[j, depth] != D[pj, w] or D[depth, j] != D[w, pj]:
                        ok = False
                        break
                if ok:
                    perm[depth] = w
                    used[w] = True
                    candidate[depth] = w + 1
                    placed = True
                    break
            w += 1
        if placed:
            depth += 1
            if depth < n:
                candidate[depth] = 0
        else:
            candidate[depth] = 0
            depth -= 1
            if depth >= 0:
                used[perm[depth]] = False
                perm[depth] = -1
    return out[:count]


vertex_automorphisms_nb = _njit(_vertex_automorphisms_py)


def vertex_automorphisms_np(D, batch=20000):
    n = D.shape[0]
    if n == 0:
        return np.empty((1, 0), dtype=np.int64)
    found = []
    perms = itertools.permutations(range(n))
    while True:
        chunk = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(perms, batch)),
            dtype=np.int64,
        )
        if chunk.size == 0:
            break
        P = chunk.reshape(-1, n)
        keep = (D[P[:, :, None], P[:, None, :]] == D).all(axis=(1, 2))
        found.append(P[keep])
    return np.concatenate(found, axis=0)


# ---------------------------------------------------------------------------
# Composable path enumeration
# ---------------------------------------------------------------------------
# paths: (N, m) edge indices, m >= 1.  out_ptr/out_edges is the CSR layout of
# edges grouped by source vertex (edges sorted ascending within a vertex), so
# the result stays in lexicographic order when the input is.


def _extend_paths_py(paths, dst, out_ptr, out_edges):
    N, m = paths.shape
    total = 0
    for i in range(N):
        v = dst[paths[i, m - 1]]
        total += out_ptr[v + 1] - out_ptr[v]
    res = np.empty((total, m + 1), dtype=np.int64)
    row = 0
    for i in range(N):
        v = dst[paths[i, m - 1]]
        for k in range(out_ptr[v], out_ptr[v + 1]):
            for j in range(m):
                res[row, j] = paths[i, j]
            res[row, m] = out_edges[k]
            row += 1
    return res


extend_paths_nb = _njit(_extend_paths_py)


def extend_paths_np(paths, dst, out_ptr, out_edges):
    N, m = paths.shape
    v = dst[paths[:, m - 1]]
    counts = out_ptr[v + 1] - out_ptr[v]
    rows = np.repeat(np.arange(N), counts)
    starts = np.repeat(out_ptr[v], counts)
    offsets = np.arange(rows.size) - np.repeat(np.cumsum(counts) - counts, counts)
    res = np.empty((rows.size, m + 1), dtype=np.int64)
    res[:, :m] = paths[rows]
    res[:, m] = out_edges[starts + offsets]
    return res


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

USE_NUMBA = numba is not None and numba_enabled()

if USE_NUMBA:
    _power_iterate = power_iterate_nb
    _vertex_automorphisms = vertex_automorphisms_nb
    _extend_paths = extend_paths_nb
else:
    _power_iterate = power_iterate_np
    _vertex_automorphisms = vertex_automorphisms_np
    _extend_paths = extend_paths_np


def power_iterate(D, x0, tol=1e-12, maxiter=10000):
    """Normalized power iteration on ``D + I``.

    Returns ``(x, rho_estimate, converged, iterations)`` with ``x`` summing
    to one.
    """
    D = np.ascontiguousarray(D, dtype=np.float64)
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    return _power_iterate(D, x0, float(tol), int(maxiter))


def vertex_automorphisms(D):
    """All permutations ``p`` with ``D[p[i], p[j]] == D[i, j]``, sorted."""
    D = np.ascontiguousarray(D, dtype=np.int64)
    perms = _vertex_automorphisms(D)
    if perms.shape[0] > 1:
        order = np.lexsort(perms.T[::-1])
        perms = perms[order]
    return perms


def extend_paths(paths, dst, out_ptr, out_edges):
    return _extend_paths(
        np.ascontiguousarray(paths, dtype=np.int64),
        np.ascontiguousarray(dst, dtype=np.int64),
        np.ascontiguousarray(out_ptr, dtype=np.int64),
        np.ascontiguousarray(out_edges, dtype=np.int64),
    )
