"""Composite Gauss-Legendre panels shared by the quadrature-heavy modules.

Panels are split at user-supplied breakpoints (support endpoints, kinks,
removable singularities); node counts scale with panel length and with the
oscillation rate of any e^{i*omega*x} factor in the integrand.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

_MAX_PANEL_NODES = 6000


@lru_cache(maxsize=None)
def _gl_rule(n: int):
    x, w = roots_legendre(n)
    return x, w


def panel_nodes(breakpoints, density: float = 64.0, osc: float = 0.0,
                min_nodes: int = 24):
    """Gauss-Legendre nodes/weights over [b_0, b_last] split at breakpoints.

    density: nodes per unit length for smooth non-oscillatory factors.
    osc:     absolute oscillation rate |omega|; adds ~omega*L/3.5 nodes per
             panel so that e^{i*omega*x} is resolved to machine precision.
    """
    bs = np.unique(np.asarray(breakpoints, dtype=float))
    if bs.size < 2:
        return np.empty(0), np.empty(0)
    xs = []
    ws = []
    for a, b in zip(bs[:-1], bs[1:]):
        length = b - a
        if length <= 1e-14:
            continue
        n = int(np.ceil(density * length + osc * length / 3.5)) + 16
        n = max(min_nodes, min(n, _MAX_PANEL_NODES))
        n = ((n + 7) // 8) * 8  # quantize for rule-cache reuse
        x0, w0 = _gl_rule(n)
        xs.append(0.5 * (a + b) + 0.5 * length * x0)
        ws.append(0.5 * length * w0)
    if not xs:
        return np.empty(0), np.empty(0)
    return np.concatenate(xs), np.concatenate(ws)


def integrate(fn, breakpoints, density: float = 64.0, osc: float = 0.0):
    """Integrate a vectorized callable over panels; returns a complex value."""
    x, w = panel_nodes(breakpoints, density=density, osc=osc)
    if x.size == 0:
        return 0.0 + 0.0j
    return complex(np.sum(w * fn(x)))
