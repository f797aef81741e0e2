"""Kernel backend selection.

SHAPEBENCH_BACKEND=numba forces the JIT path (error if numba is missing),
SHAPEBENCH_BACKEND=numpy forces the pure-numpy fallback, unset picks numba
when importable. Both backends produce bit-identical results; numpy exists
so the package runs (slower) without a working numba install.
"""

from __future__ import annotations

import os

from .errors import DomainError

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

ENV_BACKEND = "SHAPEBENCH_BACKEND"
ENV_WORKERS = "SHAPEBENCH_WORKERS"


def resolve_backend(backend: str | None = None) -> str:
    """Return "numba" or "numpy" from an explicit choice or the environment."""
    choice = backend or os.environ.get(ENV_BACKEND, "")
    if choice == "":
        return "numba" if HAVE_NUMBA else "numpy"
    if choice not in ("numba", "numpy"):
        raise DomainError(f"unknown backend {choice!r}: expected numba or numpy")
    if choice == "numba" and not HAVE_NUMBA:
        raise DomainError("backend numba requested but numba is not importable")
    return choice


def default_workers() -> int:
    raw = os.environ.get(ENV_WORKERS, "0")
    try:
        return max(0, int(raw))
    except ValueError:
        return 0


def set_worker_count(workers: int) -> None:
    """Pin the numba thread count; 0 leaves the runtime default. Counts above
    the configured maximum are clamped."""
    if workers <= 0 or not HAVE_NUMBA:
        return
    import numba

    limit = numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(min(workers, limit))
