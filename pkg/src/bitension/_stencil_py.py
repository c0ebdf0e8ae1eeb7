"""Pure numpy central-difference kernels.

Axes are always wrapped (``np.roll``); on non-periodic axes the values in the
boundary band are meaningless and callers mask them out.
"""

import numpy as np


def derivatives(f, spacing, second=True):
    """First and (optionally) second central differences of ``f``.

    ``f`` has shape ``counts + (C,)``.  Returns ``d1`` with shape
    ``counts + (C, m)`` and ``d2`` with shape ``counts + (C, m, m)`` (or
    ``None``).  Mixed second differences are first differences of first
    differences; pure ones use the compact three-point stencil.
    """
    m = len(spacing)
    d1 = np.empty(f.shape + (m,))
    for i, h in enumerate(spacing):
        d1[..., i] = (np.roll(f, -1, axis=i) - np.roll(f, 1, axis=i)) / (2.0 * h)
    if not second:
        return d1, None
    d2 = np.empty(f.shape + (m, m))
    for i, h in enumerate(spacing):
        d2[..., i, i] = (np.roll(f, -1, axis=i) - 2.0 * f + np.roll(f, 1, axis=i)) / (h * h)
        for j in range(i + 1, m):
            g = d1[..., i]
            mixed = (np.roll(g, -1, axis=j) - np.roll(g, 1, axis=j)) / (2.0 * spacing[j])
            d2[..., i, j] = mixed
            d2[..., j, i] = mixed
    return d1, d2
