"""Runtime configuration read from the environment.

``GRAPHSTAR_TOL``
    Overrides the default comparison tolerance (1e-9).
``GRAPHSTAR_DISABLE_NUMBA``
    When set to a truthy value, the numeric kernels run their pure-numpy
    fallback instead of the numba-compiled versions.
"""

import os

DEFAULT_TOL = 1e-9


def default_tol():
    """Comparison tolerance, honouring ``GRAPHSTAR_TOL`` at call time."""
    raw = os.environ.get("GRAPHSTAR_TOL")
    if not raw:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise ValueError(f"GRAPHSTAR_TOL is not a number: {raw!r}") from None
    if not tol > 0:
        raise ValueError(f"GRAPHSTAR_TOL must be positive, got {raw!r}")
    return tol


def numba_enabled():
    raw = os.environ.get("GRAPHSTAR_DISABLE_NUMBA", "").strip().lower()
    if raw in ("1", "true", "yes", "on"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True
