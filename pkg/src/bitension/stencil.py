"""Backend selection for the central-difference kernels.

The compiled kernel is used when the extension module was built; otherwise,
or when ``BITENSION_BACKEND=numpy`` is set, the numpy implementation is used.
Both produce the same numbers (same operation order).
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

from . import _stencil_py

try:
    from . import _stencil_ext
except ImportError:  # extension not built
    _stencil_ext = None

AVAILABLE = ("compiled", "numpy") if _stencil_ext is not None else ("numpy",)
BACKEND = "numpy" if (_stencil_ext is None
                      or os.environ.get("BITENSION_BACKEND", "").lower() == "numpy") \
    else "compiled"


def set_backend(name: str) -> None:
    global BACKEND
    if name not in AVAILABLE:
        raise ValueError(f"backend {name!r} not available (have {AVAILABLE})")
    BACKEND = name


@lru_cache(maxsize=64)
def _neighbours(counts):
    idx = np.arange(int(np.prod(counts)), dtype=np.intp).reshape(counts)
    m = len(counts)
    plus = np.empty((m, idx.size), dtype=np.intp)
    minus = np.empty((m, idx.size), dtype=np.intp)
    for i in range(m):
        plus[i] = np.roll(idx, -1, axis=i).ravel()
        minus[i] = np.roll(idx, 1, axis=i).ravel()
    return plus, minus


def derivatives(f, spacing, second=True):
    """Central differences of a lattice field.

    ``f`` has shape ``counts + trailing``; the trailing component axes are
    preserved, derivative axes are appended.
    """
    f = np.asarray(f, dtype=float)
    m = len(spacing)
    counts = f.shape[:m]
    trailing = f.shape[m:]
    flat = np.ascontiguousarray(f.reshape(counts + (-1,)))
    if BACKEND == "compiled":
        plus, minus = _neighbours(tuple(counts))
        C = flat.shape[-1]
        d1, d2 = _stencil_ext.derivatives(flat.reshape(-1, C), plus, minus,
                                          np.asarray(spacing, dtype=float), second)
        d1 = d1.reshape(counts + (C, m))
        if d2 is not None:
            d2 = d2.reshape(counts + (C, m, m))
    else:
        d1, d2 = _stencil_py.derivatives(flat, tuple(spacing), second)
    d1 = d1.reshape(counts + trailing + (m,))
    if d2 is not None:
        d2 = d2.reshape(counts + trailing + (m, m))
    return d1, d2


def gradient(f, spacing):
    return derivatives(f, spacing, second=False)[0]
