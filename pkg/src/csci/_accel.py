"""Numba switch for the hot kernels.

Set ``CSCI_DISABLE_NUMBA=1`` before import to run every kernel as plain
Python/numpy. The jitted and fallback paths share one source, so
``kernel.py_func`` is always the fallback of a compiled kernel.
"""

import hashlib
import os
from pathlib import Path

_disabled = os.environ.get("CSCI_DISABLE_NUMBA", "0").strip().lower() in ("1", "true", "yes")

try:
    if _disabled:
        raise ImportError
    import numba
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def _source_digest():
    h = hashlib.sha256()
    for path in sorted(Path(__file__).parent.glob("*.py")):
        h.update(path.name.encode())
        h.update(path.read_bytes())
    return h.hexdigest()[:16]


if HAS_NUMBA:
    # numba's on-disk cache does not notice edits to kernels called across
    # modules, so caches live in a directory keyed by the package sources
    _base = os.environ.get("NUMBA_CACHE_DIR") or os.path.join(
        os.environ.get("XDG_CACHE_HOME") or os.path.join(Path.home(), ".cache"), "csci-numba"
    )
    numba.config.CACHE_DIR = os.path.join(_base, _source_digest())


def jit(func):
    """Compile ``func`` with numba when enabled, otherwise return it untouched."""
    if HAS_NUMBA:
        return _njit(cache=True, nogil=True)(func)
    return func


def backend():
    return "numba" if HAS_NUMBA else "numpy"
