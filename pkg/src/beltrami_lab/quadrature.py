"""Quadrature rules used throughout: polar annuli, log-spaced radial panels, masked disks."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

GL_ORDER = 16


@lru_cache(maxsize=None)
def gauss_legendre(order: int = GL_ORDER):
    x, w = np.polynomial.legendre.leggauss(order)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def log_panels(r1, r2, per_octave=1, order=GL_ORDER):
    """Nodes/weights for ``int_{r1}^{r2} F(r) dr`` with Gauss-Legendre panels in ``log r``.

    One panel per factor ``2**(1/per_octave)``; the weights include the ``dr = r d(log r)``
    Jacobian.
    """
    if not 0 < r1 < r2:
        raise ValueError("need 0 < r1 < r2")
    a, b = np.log(r1), np.log(r2)
    npan = max(1, int(np.ceil((b - a) / np.log(2.0) * per_octave)))
    edges = np.linspace(a, b, npan + 1)
    return _panel_nodes(edges, order, log=True)


def ladder_panels(ladder, order=GL_ORDER, log=True):
    """Panel nodes between consecutive ladder points (ladder monotone either way).

    Returns ``(nodes, weights, panel_index)`` where panel ``j`` spans
    ``ladder[j]..ladder[j+1]``; weights are positive (oriented from smaller to larger r).
    """
    ladder = np.asarray(ladder, float)
    x, w = gauss_legendre(order)
    nodes, weights, idx = [], [], []
    for j in range(len(ladder) - 1):
        lo, hi = sorted((ladder[j], ladder[j + 1]))
        if log:
            la, lb = np.log(lo), np.log(hi)
            t = 0.5 * (lb - la) * x + 0.5 * (lb + la)
            r = np.exp(t)
            nodes.append(r)
            weights.append(0.5 * (lb - la) * w * r)
        else:
            nodes.append(0.5 * (hi - lo) * x + 0.5 * (hi + lo))
            weights.append(0.5 * (hi - lo) * w)
        idx.append(np.full(order, j))
    return np.concatenate(nodes), np.concatenate(weights), np.concatenate(idx)


def _panel_nodes(edges, order, log):
    x, w = gauss_legendre(order)
    a, b = edges[:-1, None], edges[1:, None]
    t = 0.5 * (b - a) * x + 0.5 * (b + a)
    wt = 0.5 * (b - a) * w
    if log:
        r = np.exp(t)
        return r.ravel(), (wt * r).ravel()
    return t.ravel(), wt.ravel()


def linear_panels(r1, r2, npan=4, order=GL_ORDER):
    return _panel_nodes(np.linspace(r1, r2, npan + 1), order, log=False)


def angles(m, offset=0.0):
    return offset + 2.0 * np.pi * np.arange(m) / m


def circle_means(g, z0, radii, m=256, offset=0.0):
    """Trapezoidal mean of ``g`` over circles ``|z - z0| = r`` for every r in ``radii``."""
    radii = np.asarray(radii, float)
    e = np.exp(1j * angles(m, offset))
    z = z0 + radii[:, None] * e[None, :]
    return np.asarray(g(z), float).mean(axis=1)


def radial_nodes(r1, r2, order=GL_ORDER):
    """Nodes for an annulus ``r1 < r < r2`` (``r1`` may be 0)."""
    if r1 == 0.0:
        inner = min(r2, 1e-3)
        rn, wn = linear_panels(0.0, inner, 2, order)
        if inner < r2:
            r2n, w2n = log_panels(inner, r2, 1, order)
            rn, wn = np.concatenate([rn, r2n]), np.concatenate([wn, w2n])
        return rn, wn
    return log_panels(r1, r2, 1, order)


def annulus_integral(g, z0, r1, r2, m=256, order=GL_ORDER):
    """``int_{r1<|z-z0|<r2} g dm`` by polar quadrature (``r1`` may be 0)."""
    r, w = radial_nodes(r1, r2, order)
    cm = circle_means(g, z0, r, m)
    return float(np.sum(2.0 * np.pi * r * cm * w))


def disk_midpoint(z0, eps, n=128):
    """Midpoint-rule sample points of the square ``[z0-eps, z0+eps]^2`` masked to the disk.

    ``n`` is the number of cells per side (even, so ``z0`` itself is never sampled).
    Returns the sample points inside the disk and the cell area.
    """
    n = int(n) + (int(n) % 2)
    h = 2.0 * eps / n
    c = -eps + h * (np.arange(n) + 0.5)
    X, Y = np.meshgrid(c, c)
    inside = X * X + Y * Y < eps * eps
    return z0 + (X[inside] + 1j * Y[inside]), h * h
